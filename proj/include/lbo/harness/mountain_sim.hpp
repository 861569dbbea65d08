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
#pragma once

// Mountain car experiment, grouped by attempts. Every attempt starts from
// the canonical start state and ends at the goal or after max_steps.
//
//   expert  the pumping policy, every attempt
//   lbo     observes expert attempts until confident, then drives itself
//   rl      tabular Q-learning, goal-only reward

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lbo/agent.hpp"
#include "lbo/errors.hpp"
#include "lbo/harness/metrics.hpp"
#include "lbo/rng.hpp"
#include "lbo/scenarios/mountain.hpp"
#include "lbo/scenarios/q_learning.hpp"

namespace lbo::harness {

enum class MountainAgent { Expert, Lbo, Rl };

inline const char* to_string(MountainAgent a) {
  switch (a) {
    case MountainAgent::Expert: return "expert";
    case MountainAgent::Lbo: return "lbo";
    case MountainAgent::Rl: return "rl";
  }
  return "?";
}

struct MountainConfig {
  MountainAgent agent = MountainAgent::Lbo;
  int attempts = 5000;
  int max_steps = 500;
  int experts = 2;
  std::uint64_t seed = 1;
  mountain::PhysicsParams physics;
  mountain::QParams q;
  ApprenticeConfig apprentice;
  std::size_t history_capacity = DynamicImage::kDefaultCapacity;

  void validate() const {
    if (attempts <= 0) throw ConfigError("mountain: attempts must be positive");
    if (max_steps <= 0) throw ConfigError("mountain: max steps must be positive");
    if (experts <= 0) throw ConfigError("mountain: expert count must be positive");
    if (history_capacity == 0) throw ConfigError("mountain: history capacity must be positive");
    try {
      physics.validate();
      q.validate();
      apprentice.eval.validate();
      apprentice.kstar.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("mountain: ") + e.what());
    }
  }
};

inline const CsvRow& mountain_header() {
  static const CsvRow h = {"attempt",  "agent",    "phase",           "executed",
                           "steps",    "reached_goal", "distance",    "correct_actions",
                           "confidence", "recall_weight", "classification_weight"};
  return h;
}

struct MountainRow {
  int attempt = 0;  // 1-based
  MountainAgent agent = MountainAgent::Expert;
  Phase phase = Phase::Execution;
  bool executed = true;  // false for an observed (learning) attempt
  int steps = 0;
  bool reached_goal = false;
  double distance = 0.0;  // sum of |position change|
  int correct_actions = 0;  // actions equal to the expert policy's
  double confidence = 0.0;
  double recall_weight = 0.0;
  double classification_weight = 0.0;

  CsvRow to_csv() const {
    return {csv_num(attempt),       to_string(agent),       to_string(phase),
            csv_bool(executed),     csv_num(steps),         csv_bool(reached_goal),
            csv_num(distance),      csv_num(correct_actions), csv_num(confidence),
            csv_num(recall_weight), csv_num(classification_weight)};
  }
};

struct MountainSummary {
  int attempts = 0;
  int executed_attempts = 0;
  int successes = 0;
  std::optional<int> first_execution_attempt;
  std::optional<int> first_success_attempt;
};

struct MountainResult {
  std::vector<MountainRow> rows;
  MountainSummary summary;
};

/// Outcome of driving the car once from the start state.
struct Trajectory {
  int steps = 0;
  bool reached_goal = false;
  double distance = 0.0;
  int correct_actions = 0;
};

/// Runs one attempt with `policy(state) -> throttle`.
template <class Policy>
Trajectory drive(const mountain::PhysicsParams& p, int max_steps, Policy&& policy) {
  Trajectory t;
  mountain::MountainState st = mountain::start_state(p);
  while (t.steps < max_steps && !mountain::at_goal(st, p)) {
    const int throttle = policy(st);
    if (throttle == mountain::mountain_expert_action(st, p)) ++t.correct_actions;
    const auto next = mountain::mountain_step(st, throttle, p);
    t.distance += std::fabs(next.position - st.position);
    st = next;
    ++t.steps;
  }
  t.reached_goal = mountain::at_goal(st, p);
  return t;
}

namespace detail {

inline void tally(MountainResult& r, MountainRow row) {
  auto& s = r.summary;
  ++s.attempts;
  if (row.executed) {
    ++s.executed_attempts;
    if (!s.first_execution_attempt) s.first_execution_attempt = row.attempt;
    if (row.reached_goal) {
      ++s.successes;
      if (!s.first_success_attempt) s.first_success_attempt = row.attempt;
    }
  }
  r.rows.push_back(std::move(row));
}

inline MountainResult run_expert(const MountainConfig& cfg) {
  MountainResult r;
  for (int a = 1; a <= cfg.attempts; ++a) {
    const Trajectory t = drive(cfg.physics, cfg.max_steps, [&](const mountain::MountainState& st) {
      return mountain::mountain_expert_action(st, cfg.physics);
    });
    MountainRow row;
    row.attempt = a;
    row.agent = MountainAgent::Expert;
    row.steps = t.steps;
    row.reached_goal = t.reached_goal;
    row.distance = t.distance;
    row.correct_actions = t.correct_actions;
    tally(r, std::move(row));
  }
  return r;
}

inline MountainResult run_rl(const MountainConfig& cfg) {
  MountainResult r;
  Rng rng = Rng(cfg.seed).fork(3);
  mountain::QTable table(cfg.q, cfg.physics);
  for (int a = 1; a <= cfg.attempts; ++a) {
    const long long k = a - 1;
    const double eps = table.epsilon_at(k);
    Trajectory t;
    mountain::MountainState st = mountain::start_state(cfg.physics);
    while (t.steps < cfg.max_steps && !mountain::at_goal(st, cfg.physics)) {
      const std::size_t s = table.discretize(st);
      const int action = table.select(s, rng, eps);
      const int throttle = mountain::throttle_of_index(action);
      if (throttle == mountain::mountain_expert_action(st, cfg.physics)) ++t.correct_actions;
      const auto next = mountain::mountain_step(st, throttle, cfg.physics);
      const bool goal = mountain::at_goal(next, cfg.physics);
      table.update(s, action, goal ? 1.0 : 0.0, table.discretize(next), k, goal);
      t.distance += std::fabs(next.position - st.position);
      st = next;
      ++t.steps;
    }
    MountainRow row;
    row.attempt = a;
    row.agent = MountainAgent::Rl;
    row.steps = t.steps;
    row.reached_goal = mountain::at_goal(st, cfg.physics);
    row.distance = t.distance;
    row.correct_actions = t.correct_actions;
    tally(r, std::move(row));
  }
  return r;
}

inline std::string mountain_expert_id(std::size_t i) { return "car-expert-" + std::to_string(i); }

/// Learning by observation. While learning, each simulation step the experts
/// drive one step and publish a snapshot, and the apprentice learns one
/// observed snapshot. The threshold rule is applied when the apprentice has
/// consumed the last snapshot of an expert attempt; each such attempt is one
/// (non-executed) row. Once in Execution the apprentice drives its own car.
inline MountainResult run_lbo(const MountainConfig& cfg) {
  MountainResult r;
  const auto& phys = cfg.physics;
  Rng master(cfg.seed);
  Rng choice_rng = master.fork(2);

  const StaticImage image = mountain::mountain_static_image();
  ImageIndex index;
  struct ExpertCar {
    std::string id;
    mountain::MountainState state;
    int steps = 0;
    std::shared_ptr<DynamicImage> dynamic;
    std::set<std::uint64_t> attempt_ends;  // seq of each attempt's last snapshot
  };
  std::vector<ExpertCar> experts;
  for (int i = 0; i < cfg.experts; ++i) {
    auto dyn = std::make_shared<DynamicImage>(cfg.history_capacity, image.condition_keys());
    experts.push_back({mountain_expert_id(static_cast<std::size_t>(i)), mountain::start_state(phys),
                       0, dyn, {}});
    index.register_image(experts.back().id, image, dyn);
  }
  Apprentice apprentice("car-apprentice", image, cfg.apprentice);
  index.register_image(
      apprentice.id(), image,
      std::make_shared<DynamicImage>(cfg.history_capacity, image.condition_keys()));

  auto step_experts = [&] {
    for (auto& e : experts) {
      const int throttle = mountain::mountain_expert_action(e.state, phys);
      const std::uint64_t seq = e.dynamic->record_snapshot(mountain::throttle_action(throttle),
                                                           mountain::conditions_of(e.state));
      e.state = mountain::mountain_step(e.state, throttle, phys);
      ++e.steps;
      if (mountain::at_goal(e.state, phys) || e.steps >= cfg.max_steps) {
        e.attempt_ends.insert(seq);
        e.state = mountain::start_state(phys);
        e.steps = 0;
      }
    }
  };
  auto expert_by_id = [&](const std::string& id) -> ExpertCar& {
    for (auto& e : experts)
      if (e.id == id) return e;
    throw UnknownAgent(id);
  };
  auto fill = [&](MountainRow& row) {
    const auto& st = apprentice.state();
    row.agent = MountainAgent::Lbo;
    row.phase = st.phase;
    row.confidence = st.confidence;
    row.recall_weight = st.weights.recall;
    row.classification_weight = st.weights.classification;
  };

  int attempt = 0;
  MountainRow observed;  // attempt being observed
  while (attempt < cfg.attempts) {
    if (apprentice.state().phase == Phase::Learning) {
      step_experts();
      if (!apprentice.observing()) {
        if (auto pick = apprentice.choose_expert(apprentice.discover(index, std::nullopt, {}),
                                                 choice_rng))
          apprentice.begin_observation(index, *pick);
      }
      const auto snap = apprentice.next_observed();
      if (!snap) continue;
      const LearnRecord rec = apprentice.learn_from(*snap);
      ++observed.steps;
      if (rec.proposal_matched) ++observed.correct_actions;
      if (!expert_by_id(*apprentice.observed_expert()).attempt_ends.contains(snap->seq)) continue;
      if (apprentice.apply_transition()) apprentice.end_observation(index);
      observed.attempt = ++attempt;
      observed.executed = false;
      fill(observed);
      observed.phase = Phase::Learning;
      tally(r, observed);
      observed = MountainRow{};
      continue;
    }

    const Trajectory t = drive(phys, cfg.max_steps, [&](const mountain::MountainState& st) {
      const ConditionSet current = mountain::conditions_of(st);
      const ProposalSet decision = apprentice.decide(current);
      if (!decision.best) throw Error("mountain: apprentice has nothing to propose");
      const bool familiar = apprentice.familiar(current);
      apprentice.executed(current, decision, true, familiar);
      return mountain::throttle_of(decision.best->proposal.action);
    });
    apprentice.apply_transition();
    MountainRow row;
    row.attempt = ++attempt;
    row.steps = t.steps;
    row.reached_goal = t.reached_goal;
    row.distance = t.distance;
    row.correct_actions = t.correct_actions;
    fill(row);
    row.phase = Phase::Execution;
    tally(r, std::move(row));
  }
  apprentice.end_observation(index);
  return r;
}

}  // namespace detail

inline MountainResult run_mountain(const MountainConfig& cfg) {
  cfg.validate();
  switch (cfg.agent) {
    case MountainAgent::Expert: return detail::run_expert(cfg);
    case MountainAgent::Rl: return detail::run_rl(cfg);
    case MountainAgent::Lbo: return detail::run_lbo(cfg);
  }
  throw ConfigError("mountain: unknown agent");
}

inline std::vector<CsvRow> to_csv_rows(const std::vector<MountainRow>& rows) {
  std::vector<CsvRow> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.to_csv());
  return out;
}

}  // namespace lbo::harness
