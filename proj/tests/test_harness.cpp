/*
 * Copyright 2026 The lbo Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "lbo/harness/bucket.hpp"
#include "lbo/harness/config.hpp"
#include "lbo/harness/hand_sim.hpp"
#include "lbo/harness/metrics.hpp"
#include "lbo/harness/mountain_sim.hpp"
#include "lbo/harness/sweep.hpp"

namespace lbo::harness {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("lbo_test_" + name);
}

HandConfig small_hand(HandSetting setting = HandSetting::Exp1, int steps = 600) {
  HandConfig cfg;
  cfg.setting = setting;
  cfg.steps = steps;
  return cfg;
}

TEST(WriteMetrics, HeaderOnlyAndOneRow) {
  const auto path = temp_file("metrics.csv");
  write_metrics({"a", "b"}, {}, path.string());
  EXPECT_EQ(slurp(path), "a,b\n");
  write_metrics({"a", "b"}, {{"1", "x,y"}}, path.string());
  EXPECT_EQ(slurp(path), "a,b\n1,\"x,y\"\n");
  const auto first = slurp(path);
  write_metrics({"a", "b"}, {{"1", "x,y"}}, path.string());
  EXPECT_EQ(slurp(path), first);
  fs::remove(path);
}

TEST(WriteMetrics, ErrorsNameThePath) {
  try {
    write_metrics({"a"}, {}, "/nonexistent-dir/x.csv");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/x.csv"), std::string::npos);
  }
  EXPECT_THROW(write_metrics({"a"}, {{"1", "2"}}, temp_file("bad.csv").string()),
               InvalidArgument);
}

TEST(ReadCsv, RoundTripsQuotedFields) {
  std::stringstream ss;
  write_csv(ss, {"k", "v"}, {{"1", "a\"b"}, {"2", "line\nbreak"}, {"3", ""}});
  const auto t = read_csv(ss);
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.rows[0][1], "a\"b");
  EXPECT_EQ(t.rows[1][1], "line\nbreak");
  EXPECT_EQ(t.rows[2][1], "");
  std::stringstream bad("a,b\n1\n");
  EXPECT_THROW(read_csv(bad), InvalidArgument);
}

TEST(Bucket, SumsAndMeans) {
  CsvTable in{{"step", "x", "label"}, {{"0", "1", "a"}, {"1", "3", "b"}, {"2", "5", "c"}}};
  const auto out = bucket_metrics(in, 2);
  EXPECT_EQ(out.header, (CsvRow{"bucket", "first", "rows", "x_sum", "x_mean"}));
  ASSERT_EQ(out.rows.size(), 2u);
  EXPECT_EQ(out.rows[0], (CsvRow{"0", "0", "2", "4", "2"}));
  EXPECT_EQ(out.rows[1], (CsvRow{"1", "2", "1", "5", "5"}));
  EXPECT_THROW(bucket_metrics(in, 0), InvalidArgument);
}

TEST(ParseRange, Forms) {
  EXPECT_EQ(parse_range("0..50:10"), (std::vector<double>{0, 10, 20, 30, 40, 50}));
  EXPECT_EQ(parse_range("1..3"), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(parse_range("1,5,10"), (std::vector<double>{1, 5, 10}));
  EXPECT_EQ(parse_range("7"), std::vector<double>{7});
  EXPECT_THROW(parse_range("5..1"), ConfigError);
  EXPECT_THROW(parse_range("0..5:0"), ConfigError);
  EXPECT_THROW(parse_range("x"), ConfigError);
}

TEST(SweepPairs, LowerMajorWithGaps) {
  const auto p = sweep_pairs({0, 10}, {}, {1, 5});
  EXPECT_EQ(p, (std::vector<std::pair<double, double>>{{0, 1}, {0, 5}, {10, 11}, {10, 15}}));
  EXPECT_THROW(sweep_pairs({}, {1}), ConfigError);
}

TEST(Sweep, InvalidPairIsSkipped) {
  const auto cells = sweep_thresholds(small_hand(HandSetting::Exp1, 200), {{10, 10}, {10, 15}});
  ASSERT_EQ(cells.size(), 2u);
  EXPECT_FALSE(cells[0].summary);
  EXPECT_NE(cells[0].status.find("skipped"), std::string::npos);
  EXPECT_EQ(to_csv(cells[0])[2], "");
  ASSERT_TRUE(cells[1].summary);
  EXPECT_EQ(cells[1].status, "ok");
}

TEST(Sweep, ParallelMatchesSerial) {
  const std::vector<std::pair<double, double>> pairs = {{0, 5}, {10, 15}, {20, 21}};
  const auto serial = sweep_thresholds(small_hand(HandSetting::Exp2, 300), pairs, 1);
  const auto parallel = sweep_thresholds(small_hand(HandSetting::Exp2, 300), pairs, 3);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) EXPECT_EQ(to_csv(serial[i]), to_csv(parallel[i]));
}

TEST(HandConfig, Validation) {
  auto cfg = small_hand();
  cfg.steps = 0;
  EXPECT_THROW(run_hand(cfg), ConfigError);
  cfg = small_hand();
  cfg.apprentice.eval.lower_threshold = 20;
  EXPECT_THROW(run_hand(cfg), ConfigError);
  cfg = small_hand();
  cfg.task = "unknown";
  EXPECT_THROW(run_hand(cfg), ConfigError);
}

TEST(HandSequences, Exp1SharedExp2Distinct) {
  Rng rng(3);
  auto cfg = small_hand(HandSetting::Exp1);
  const auto s1 = make_hand_sequences(cfg, rng);
  for (const auto& e : s1.experts) EXPECT_EQ(e, s1.apprentice);
  cfg.setting = HandSetting::Exp2;
  const auto s2 = make_hand_sequences(cfg, rng);
  std::set<std::size_t> lengths = {s2.apprentice.size()};
  for (const auto& e : s2.experts) {
    EXPECT_NE(e, s2.apprentice);
    lengths.insert(e.size());
    EXPECT_GE(e.size(), 8u);
    EXPECT_LE(e.size(), 16u);
  }
  EXPECT_EQ(lengths.size(), s2.experts.size() + 1);
}

TEST(RunHand, OneRowPerStepAndPhaseDiscipline) {
  const auto r = run_hand(small_hand(HandSetting::Exp2, 800));
  ASSERT_EQ(r.rows.size(), 800u);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    EXPECT_EQ(row.step, static_cast<int>(i));
    if (row.phase == Phase::Learning) { EXPECT_FALSE(row.executed); }
    if (row.phase == Phase::Execution) { EXPECT_FALSE(row.stored); }
    EXPECT_EQ(row.to_csv().size(), hand_header().size());
  }
  EXPECT_GT(r.summary.executed, 0);
}

TEST(RunHand, Exp1ExecutesOnlyCorrectActions) {
  const auto r = run_hand(small_hand(HandSetting::Exp1, 1000));
  EXPECT_GT(r.summary.executed, 0);
  EXPECT_EQ(r.summary.correct_executed, r.summary.executed);
  EXPECT_LE(r.summary.initial_learning_steps, 400);
}

TEST(RunHand, PhaseChangesHaveCauses) {
  const auto r = run_hand(small_hand(HandSetting::Exp2, 2000));
  Phase phase = Phase::Learning;
  for (const auto& c : r.phase_changes) {
    EXPECT_NE(c.to, phase);
    EXPECT_TRUE(c.cause == "threshold" || c.cause == "unfamiliar");
    phase = c.to;
  }
}

TEST(RunHand, ObservesEveryExpertEventually) {
  auto cfg = small_hand(HandSetting::Exp2, 4000);
  cfg.apprentice.eval.unfamiliar_limit = 1;
  const auto r = run_hand(cfg);
  std::set<std::string> seen;
  for (const auto& row : r.rows)
    if (!row.expert.empty()) seen.insert(row.expert);
  EXPECT_GE(seen.size(), 2u);
}

TEST(RunMountain, ExpertIsConstant) {
  MountainConfig cfg;
  cfg.agent = MountainAgent::Expert;
  cfg.attempts = 5;
  const auto r = run_mountain(cfg);
  ASSERT_EQ(r.rows.size(), 5u);
  for (const auto& row : r.rows) {
    EXPECT_TRUE(row.reached_goal);
    EXPECT_EQ(row.steps, r.rows[0].steps);
    EXPECT_EQ(row.distance, r.rows[0].distance);
  }
}

TEST(RunMountain, LboFirstExecutionSucceeds) {
  MountainConfig cfg;
  cfg.attempts = 10;
  const auto r = run_mountain(cfg);
  ASSERT_TRUE(r.summary.first_execution_attempt);
  EXPECT_EQ(r.summary.first_success_attempt, r.summary.first_execution_attempt);
  for (const auto& row : r.rows) {
    if (!row.executed) { EXPECT_EQ(row.phase, Phase::Learning); }
  }
}

TEST(RunMountain, Validation) {
  MountainConfig cfg;
  cfg.attempts = 0;
  EXPECT_THROW(run_mountain(cfg), ConfigError);
  cfg = MountainConfig{};
  cfg.max_steps = 0;
  EXPECT_THROW(run_mountain(cfg), ConfigError);
  cfg = MountainConfig{};
  cfg.q.gamma = 1.0;
  EXPECT_THROW(run_mountain(cfg), ConfigError);
}

TEST(Config, OverlaysKnownKeys) {
  const auto j = Json::parse(R"({
    "seed": 9, "feedback": "best-only",
    "eval": {"lower": 5, "upper": 8, "unfamiliar_reference": -1, "unfamiliar_limit": 2},
    "kstar": {"blend": 0.3},
    "ontology": {"tasks": {"sign": ["number", "index"]}},
    "hand": {"setting": "exp2", "steps": 10, "experts": 3, "action_mode": "composite",
             "expert_choice": "first", "task": "sign"},
    "mountain": {"agent": "rl", "attempts": 7, "q": {"alpha": 0.5, "initial_q": 0}}
  })");
  HandConfig h;
  apply_config(j, h);
  EXPECT_EQ(h.seed, 9u);
  EXPECT_EQ(h.apprentice.feedback, WeightFeedback::BestOnly);
  EXPECT_EQ(h.apprentice.eval.lower_threshold, 5);
  EXPECT_EQ(h.apprentice.eval.unfamiliar_limit, 2);
  EXPECT_EQ(h.apprentice.kstar.blend, 0.3);
  EXPECT_EQ(h.setting, HandSetting::Exp2);
  EXPECT_EQ(h.steps, 10);
  EXPECT_EQ(h.action_mode, hand::ActionMode::Composite);
  EXPECT_EQ(h.expert_choice, hand::ExpertChoice::FirstInOrder);
  EXPECT_EQ(h.task, std::optional<std::string>("sign"));
  EXPECT_NO_THROW(h.validate());

  MountainConfig m;
  apply_config(j, m);
  EXPECT_EQ(m.agent, MountainAgent::Rl);
  EXPECT_EQ(m.attempts, 7);
  EXPECT_EQ(m.q.alpha, 0.5);
  EXPECT_EQ(m.q.initial_q, 0.0);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  HandConfig h;
  EXPECT_THROW(apply_config(Json::parse(R"({"sed": 1})"), h), ConfigError);
  EXPECT_THROW(apply_config(Json::parse(R"({"hand": {"steps": "many"}})"), h), ConfigError);
  EXPECT_THROW(apply_config(Json::parse(R"({"hand": {"setting": "exp3"}})"), h), ConfigError);
  EXPECT_THROW(apply_config(Json::parse(R"({"eval": {"upper": 1, "bogus": 2}})"), h),
               ConfigError);
  MountainConfig m;
  EXPECT_THROW(apply_config(Json::parse(R"({"mountain": {"physics": {"g": 1}}})"), m),
               ConfigError);
}

TEST(Config, LoadErrors) {
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
  const auto path = temp_file("bad.json");
  std::ofstream(path) << "{not json";
  EXPECT_THROW(load_config(path.string()), ConfigError);
  std::ofstream(path) << "[1, 2]";
  EXPECT_THROW(load_config(path.string()), ConfigError);
  fs::remove(path);
}

}  // namespace
}  // namespace lbo::harness
