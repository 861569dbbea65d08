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

// Internal evaluation: confidence bookkeeping and the Learning/Execution
// state machine.
//
//            confidence > upper
//   Learning ------------------> Execution
//      ^                             |
//      |   confidence < lower, or    |
//      +-- unfamiliar_limit misses --+
//
// Between the two thresholds the phase does not change.

#include <optional>
#include <span>

#include "lbo/errors.hpp"
#include "lbo/experience_memory.hpp"
#include "lbo/learners.hpp"

namespace lbo {

enum class Phase { Learning, Execution };

inline const char* to_string(Phase p) { return p == Phase::Learning ? "learning" : "execution"; }

struct EvalConfig {
  double upper_threshold = 15.0;
  double lower_threshold = 10.0;
  double unfamiliar_reference = 0.0;
  int unfamiliar_limit = 5;

  void validate() const {
    if (!(lower_threshold < upper_threshold))
      throw InvalidArgument("lower confidence threshold must be below the upper one");
    if (!(unfamiliar_reference < lower_threshold))
      throw InvalidArgument("unfamiliar confidence reference must be below the lower threshold");
    if (unfamiliar_limit <= 0) throw InvalidArgument("unfamiliar limit must be positive");
  }
};

struct EvalState {
  double confidence = 0.0;
  Phase phase = Phase::Learning;
  int unfamiliar_streak = 0;
  MethodWeights weights;
};

/// Grades the best proposal for an observed snapshot. Confidence moves by the
/// proposal's reliability, up when it names the observed action, down
/// otherwise. No proposal leaves the state unchanged.
///
/// Weight factors: when `method_tops` is empty only the method that produced
/// `best` is graded. Otherwise each entry (one method's highest-reliability
/// proposal) is graded on its own against the observed action.
inline EvalState assess_learning(EvalState s, const std::optional<RankedProposal>& best,
                                 const ActionSpec& observed,
                                 std::span<const Proposal> method_tops = {}) {
  if (s.phase != Phase::Learning) throw PhaseViolation("assess_learning called in execution");
  if (!best) return s;
  const auto& p = best->proposal;
  const bool right = p.action == observed;
  s.confidence += right ? p.reliability : -p.reliability;
  if (method_tops.empty()) {
    s.weights = update_weight(s.weights, p.method,
                              right ? Outcome::Appropriate : Outcome::Inappropriate, p.reliability);
  } else {
    for (const auto& top : method_tops) {
      s.weights = update_weight(s.weights, top.method,
                                top.action == observed ? Outcome::Appropriate
                                                       : Outcome::Inappropriate,
                                top.reliability);
    }
  }
  return s;
}

/// Grades an executed action from the execution monitor's verdict.
///
/// A failed execution costs its reliability in confidence. Weight factors:
/// with no `method_tops` the proposing method is credited or penalised;
/// otherwise every method whose top proposal names the executed action is.
/// Confidence never rises here. Familiar conditions clear the unfamiliar
/// streak; unfamiliar conditions with a failed action extend it, and reaching
/// `unfamiliar_limit` forces the agent back to Learning with confidence set
/// to the unfamiliar reference.
inline EvalState assess_execution(EvalState s, const RankedProposal& executed, bool execution_ok,
                                  bool familiar, const EvalConfig& cfg,
                                  std::span<const Proposal> method_tops = {}) {
  if (s.phase != Phase::Execution) throw PhaseViolation("assess_execution called in learning");
  const auto& p = executed.proposal;
  const Outcome verdict = execution_ok ? Outcome::Appropriate : Outcome::Inappropriate;
  if (!execution_ok) s.confidence -= p.reliability;
  if (method_tops.empty()) {
    s.weights = update_weight(s.weights, p.method, verdict, p.reliability);
  } else {
    for (const auto& top : method_tops)
      if (top.action == p.action)
        s.weights = update_weight(s.weights, top.method, verdict, top.reliability);
  }
  if (familiar)
    s.unfamiliar_streak = 0;
  else if (!execution_ok)
    ++s.unfamiliar_streak;
  if (s.unfamiliar_streak >= cfg.unfamiliar_limit) {
    s.phase = Phase::Learning;
    s.confidence = cfg.unfamiliar_reference;
    s.unfamiliar_streak = 0;
  }
  return s;
}

/// Threshold rule with hysteresis.
inline EvalState transition(EvalState s, const EvalConfig& cfg) {
  if (s.confidence > cfg.upper_threshold)
    s.phase = Phase::Execution;
  else if (s.confidence < cfg.lower_threshold)
    s.phase = Phase::Learning;
  return s;
}

/// True iff the conditions were seen in some stored experience.
inline bool is_familiar(const ExperienceTree& tree, const ConditionSet& current) {
  return tree.contains_conditions(current);
}

}  // namespace lbo
