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

// lbo: command-line driver for the hand and mountain-car simulations.
//
//   lbo hand     --setting exp1 --steps 4000 --seed 1 --out hand.csv
//   lbo mountain --agent rl --attempts 5000 --seed 1 --out car.csv
//   lbo sweep    --lower 0..50:10 --gap 1,5,10,15,20 --seed 1 --out sweep.csv
//   lbo bucket   --in hand.csv --size 100 --out hand_100.csv
//
// Flags override values read from --config. Exit status: 0 on success,
// 2 on configuration errors, 1 on any other failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lbo/errors.hpp"
#include "lbo/harness/bucket.hpp"
#include "lbo/harness/config.hpp"
#include "lbo/harness/hand_sim.hpp"
#include "lbo/harness/metrics.hpp"
#include "lbo/harness/mountain_sim.hpp"
#include "lbo/harness/sweep.hpp"

namespace {

using namespace lbo;
using namespace lbo::harness;

struct HandFlags {
  std::string config;
  std::optional<std::string> setting;
  std::optional<int> steps;
  std::optional<double> lower;
  std::optional<double> upper;
  std::optional<int> unfamiliar_limit;
  std::optional<double> unfamiliar_reference;
  std::optional<std::uint64_t> seed;
  std::optional<int> experts;
  std::string out;
  std::string memory_dump;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config, "JSON configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--setting", setting, "exp1 or exp2")
        ->check(CLI::IsMember({"exp1", "exp2"}));
    cmd->add_option("--steps", steps, "simulation steps");
    cmd->add_option("--lower", lower, "lower confidence threshold");
    cmd->add_option("--upper", upper, "upper confidence threshold");
    cmd->add_option("--unfamiliar-limit", unfamiliar_limit,
                    "unfamiliar conditions in a row that force learning");
    cmd->add_option("--unfamiliar-reference", unfamiliar_reference,
                    "confidence after a forced switch");
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--experts", experts, "number of experts");
  }

  HandConfig resolve() const {
    HandConfig cfg;
    if (!config.empty()) apply_config(load_config(config), cfg);
    if (setting) cfg.setting = *setting == "exp1" ? HandSetting::Exp1 : HandSetting::Exp2;
    if (steps) cfg.steps = *steps;
    if (lower) cfg.apprentice.eval.lower_threshold = *lower;
    if (upper) cfg.apprentice.eval.upper_threshold = *upper;
    if (unfamiliar_limit) cfg.apprentice.eval.unfamiliar_limit = *unfamiliar_limit;
    if (unfamiliar_reference) cfg.apprentice.eval.unfamiliar_reference = *unfamiliar_reference;
    if (seed) cfg.seed = *seed;
    if (experts) cfg.experts = *experts;
    cfg.validate();
    return cfg;
  }
};

struct MountainFlags {
  std::string config;
  std::optional<std::string> agent;
  std::optional<int> attempts;
  std::optional<int> max_steps;
  std::optional<std::uint64_t> seed;
  std::optional<int> experts;
  bool full_scale = false;
  std::string out;

  MountainConfig resolve() const {
    MountainConfig cfg;
    if (!config.empty()) apply_config(load_config(config), cfg);
    if (agent)
      cfg.agent = *agent == "lbo"  ? MountainAgent::Lbo
                  : *agent == "rl" ? MountainAgent::Rl
                                   : MountainAgent::Expert;
    if (full_scale) cfg.attempts = 50000;
    if (attempts) cfg.attempts = *attempts;
    if (max_steps) cfg.max_steps = *max_steps;
    if (seed) cfg.seed = *seed;
    if (experts) cfg.experts = *experts;
    cfg.validate();
    return cfg;
  }
};

int run_hand_cmd(const HandFlags& f) {
  const HandConfig cfg = f.resolve();
  const HandResult r = run_hand(cfg);
  write_metrics(hand_header(), to_csv_rows(r.rows), f.out);
  if (!f.memory_dump.empty()) r.apprentice->memory().write_dump(f.memory_dump);
  const auto& s = r.summary;
  std::cout << to_string(cfg.setting) << " seed=" << cfg.seed << " steps=" << s.steps
            << " executed=" << s.executed << " correct=" << s.correct_executed
            << " accuracy=" << csv_num(s.accuracy())
            << " initial_learning=" << s.initial_learning_steps
            << " recall_weight=" << csv_num(s.final_weights.recall)
            << " classification_weight=" << csv_num(s.final_weights.classification) << '\n';
  return 0;
}

int run_mountain_cmd(const MountainFlags& f) {
  const MountainConfig cfg = f.resolve();
  const MountainResult r = run_mountain(cfg);
  write_metrics(mountain_header(), to_csv_rows(r.rows), f.out);
  const auto& s = r.summary;
  std::cout << to_string(cfg.agent) << " seed=" << cfg.seed << " attempts=" << s.attempts
            << " executed=" << s.executed_attempts << " successes=" << s.successes
            << " first_success="
            << (s.first_success_attempt ? std::to_string(*s.first_success_attempt) : "none")
            << '\n';
  return 0;
}

struct SweepFlags {
  HandFlags base;
  std::string lowers = "0..50:10";
  std::string uppers;
  std::string gaps;
  unsigned jobs = 1;
};

int run_sweep_cmd(const SweepFlags& f) {
  HandFlags b = f.base;
  b.lower.reset();
  b.upper.reset();
  const HandConfig base = b.resolve();
  const std::vector<double> gaps =
      f.uppers.empty() ? parse_range(f.gaps.empty() ? "1,5,10,15,20" : f.gaps)
                       : std::vector<double>{};
  if (!f.uppers.empty() && !f.gaps.empty())
    throw ConfigError("sweep: give --upper or --gap, not both");
  const auto pairs = sweep_pairs(parse_range(f.lowers),
                                 f.uppers.empty() ? std::vector<double>{} : parse_range(f.uppers),
                                 gaps);
  const auto cells = sweep_thresholds(base, pairs, f.jobs);
  std::vector<CsvRow> rows;
  for (const auto& c : cells) {
    if (!c.summary)
      std::cerr << "warning: (" << csv_num(c.lower) << ", " << csv_num(c.upper) << ") "
                << c.status << '\n';
    rows.push_back(to_csv(c));
  }
  write_metrics(sweep_header(), rows, f.base.out);
  std::cout << "cells=" << cells.size() << '\n';
  return 0;
}

int run_bucket_cmd(const std::string& in, std::size_t size, const std::string& out) {
  const CsvTable t = bucket_metrics(read_metrics(in), size);
  write_metrics(t.header, t.rows, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning-by-observation simulations"};
  app.require_subcommand(1);

  HandFlags hand;
  auto* hand_cmd = app.add_subcommand("hand", "run the virtual hand scenario");
  hand.add_to(hand_cmd);
  hand_cmd->add_option("--out", hand.out, "metrics CSV")->required();
  hand_cmd->add_option("--memory-dump", hand.memory_dump, "write the final experience tree");

  MountainFlags car;
  auto* car_cmd = app.add_subcommand("mountain", "run the mountain-car scenario");
  car_cmd->add_option("--config", car.config, "JSON configuration file")
      ->check(CLI::ExistingFile);
  car_cmd->add_option("--agent", car.agent, "lbo, rl or expert")
      ->check(CLI::IsMember({"lbo", "rl", "expert"}));
  car_cmd->add_option("--attempts", car.attempts, "number of attempts");
  car_cmd->add_option("--max-steps", car.max_steps, "steps before an attempt fails");
  car_cmd->add_option("--seed", car.seed, "random seed");
  car_cmd->add_option("--experts", car.experts, "number of experts (lbo)");
  car_cmd->add_flag("--full-scale", car.full_scale, "50000 attempts unless --attempts is given");
  car_cmd->add_option("--out", car.out, "metrics CSV")->required();

  SweepFlags sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "sweep the confidence thresholds");
  sweep.base.add_to(sweep_cmd);
  sweep_cmd->remove_option(sweep_cmd->get_option("--lower"));
  sweep_cmd->remove_option(sweep_cmd->get_option("--upper"));
  sweep_cmd->add_option("--lower", sweep.lowers, "lower thresholds: A..B[:STEP] or a,b,c")
      ->capture_default_str();
  sweep_cmd->add_option("--upper", sweep.uppers, "upper thresholds: A..B[:STEP] or a,b,c");
  sweep_cmd->add_option("--gap", sweep.gaps, "upper - lower values (default 1,5,10,15,20)");
  sweep_cmd->add_option("--jobs", sweep.jobs, "cells run in parallel")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", sweep.base.out, "sweep CSV")->required();

  std::string bucket_in, bucket_out;
  std::size_t bucket_size = 100;
  auto* bucket_cmd = app.add_subcommand("bucket", "aggregate a metrics CSV into buckets");
  bucket_cmd->add_option("--in", bucket_in, "metrics CSV")->required()->check(CLI::ExistingFile);
  bucket_cmd->add_option("--size", bucket_size, "rows per bucket")->capture_default_str();
  bucket_cmd->add_option("--out", bucket_out, "bucketed CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*hand_cmd) return run_hand_cmd(hand);
    if (*car_cmd) return run_mountain_cmd(car);
    if (*sweep_cmd) return run_sweep_cmd(sweep);
    if (*bucket_cmd) return run_bucket_cmd(bucket_in, bucket_size, bucket_out);
  } catch (const lbo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
