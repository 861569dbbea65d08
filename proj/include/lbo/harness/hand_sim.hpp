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

// Virtual hand experiment: one apprentice, several experts, all signing
// numbers from their own sources. Every simulation step each expert makes
// one decision and publishes a snapshot; the apprentice either consumes one
// observed snapshot (Learning) or acts on its own hand (Execution).

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "lbo/agent.hpp"
#include "lbo/errors.hpp"
#include "lbo/harness/metrics.hpp"
#include "lbo/rng.hpp"
#include "lbo/scenarios/hand.hpp"
#include "lbo/software_image.hpp"

namespace lbo::harness {

enum class HandSetting { Exp1, Exp2 };

inline const char* to_string(HandSetting s) { return s == HandSetting::Exp1 ? "exp1" : "exp2"; }

struct HandConfig {
  HandSetting setting = HandSetting::Exp1;
  hand::ActionMode action_mode = hand::ActionMode::Finger;
  hand::ExpertChoice expert_choice = hand::ExpertChoice::Random;
  int steps = 4000;
  int experts = 5;
  std::uint64_t seed = 1;
  ApprenticeConfig apprentice;
  std::size_t history_capacity = DynamicImage::kDefaultCapacity;
  int min_sequence_length = 8;
  int max_sequence_length = 16;
  /// Explicit sequences; when set they replace the generated ones. The
  /// expert list must then have `experts` entries.
  std::optional<std::vector<int>> apprentice_sequence;
  std::vector<std::vector<int>> expert_sequences;
  /// With a task, experts only need to share the task's elements.
  std::optional<std::string> task;
  TaskOntology ontology;

  void validate() const {
    if (steps <= 0) throw ConfigError("hand: steps must be positive");
    if (experts <= 0) throw ConfigError("hand: expert count must be positive");
    if (history_capacity == 0) throw ConfigError("hand: history capacity must be positive");
    if (min_sequence_length < 1 || max_sequence_length < min_sequence_length)
      throw ConfigError("hand: bad sequence length range");
    if (apprentice_sequence && expert_sequences.size() != static_cast<std::size_t>(experts))
      throw ConfigError("hand: explicit sequences need one per expert");
    if (task && !ontology.has_task(Designation(*task)))
      throw ConfigError("hand: task " + *task + " is not in the ontology");
    try {
      apprentice.eval.validate();
      apprentice.kstar.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("hand: ") + e.what());
    }
  }
};

/// Column order of the per-step metrics file.
inline const CsvRow& hand_header() {
  static const CsvRow h = {"step",       "phase",      "action",         "executed",
                           "stored",     "correct",    "method",         "reliability",
                           "confidence", "recall_weight", "classification_weight",
                           "familiar",   "expert",     "memory_size", "conditions"};
  return h;
}

struct HandRow {
  int step = 0;
  Phase phase = Phase::Learning;
  std::string action;  // observed (learning) or executed (execution); empty when idle
  bool executed = false;
  bool stored = false;
  bool correct = false;  // learning: proposal matched; execution: allowed by the expert policy
  std::string method;    // method of the best proposal, "none" without one
  double reliability = 0.0;
  double confidence = 0.0;
  double recall_weight = 0.0;
  double classification_weight = 0.0;
  bool familiar = false;
  std::string expert;
  std::size_t memory_size = 0;
  std::string conditions;  // observed or faced conditions

  CsvRow to_csv() const {
    return {csv_num(step),       to_string(phase),
            action,              csv_bool(executed),
            csv_bool(stored),    csv_bool(correct),
            method,              csv_num(reliability),
            csv_num(confidence), csv_num(recall_weight),
            csv_num(classification_weight),
            csv_bool(familiar),  expert,
            std::to_string(memory_size), conditions};
  }
};

struct PhaseChange {
  int step = 0;
  Phase to = Phase::Learning;
  std::string cause;  // "threshold" or "unfamiliar"
};

struct HandSummary {
  int steps = 0;
  int executed = 0;
  int correct_executed = 0;
  int initial_learning_steps = 0;
  int learning_steps = 0;
  int learning_periods = 0;
  int forced_switches = 0;
  double final_confidence = 0.0;
  MethodWeights final_weights;
  std::size_t memory_size = 0;

  double accuracy() const {
    return executed == 0 ? 0.0 : static_cast<double>(correct_executed) / executed;
  }
};

struct HandSequences {
  std::vector<int> apprentice;
  std::vector<std::vector<int>> experts;
};

/// Sources for one run. exp1: every source plays the same sequence. exp2:
/// every source gets its own sequence, each of a different length while the
/// length range allows it.
inline HandSequences make_hand_sequences(const HandConfig& cfg, Rng& rng) {
  if (cfg.apprentice_sequence) return {*cfg.apprentice_sequence, cfg.expert_sequences};
  auto random_seq = [&](int len) {
    std::vector<int> s(static_cast<std::size_t>(len));
    for (auto& v : s) v = rng.between(1, 5);
    return s;
  };
  HandSequences out;
  const auto sources = static_cast<std::size_t>(cfg.experts) + 1;
  if (cfg.setting == HandSetting::Exp1) {
    auto seq = random_seq(rng.between(cfg.min_sequence_length, cfg.max_sequence_length));
    out.apprentice = seq;
    out.experts.assign(static_cast<std::size_t>(cfg.experts), seq);
    return out;
  }
  std::vector<int> lengths(static_cast<std::size_t>(cfg.max_sequence_length -
                                                    cfg.min_sequence_length + 1));
  std::iota(lengths.begin(), lengths.end(), cfg.min_sequence_length);
  for (std::size_t i = lengths.size(); i > 1; --i) std::swap(lengths[i - 1], lengths[rng.below(i)]);
  std::vector<std::vector<int>> all;
  for (std::size_t i = 0; i < sources; ++i) {
    const int len = lengths[i % lengths.size()];
    std::vector<int> s = random_seq(len);
    while (std::find(all.begin(), all.end(), s) != all.end()) s = random_seq(len);
    all.push_back(std::move(s));
  }
  out.apprentice = all.front();
  out.experts.assign(all.begin() + 1, all.end());
  return out;
}

inline std::string hand_expert_id(std::size_t i) { return "expert-" + std::to_string(i); }
inline constexpr const char* kApprenticeId = "apprentice";

struct HandResult {
  std::vector<HandRow> rows;
  HandSummary summary;
  std::vector<PhaseChange> phase_changes;
  HandSequences sequences;
  std::shared_ptr<const Apprentice> apprentice;
};

inline HandResult run_hand(const HandConfig& cfg) {
  cfg.validate();
  Rng master(cfg.seed);
  Rng seq_rng = master.fork(1);
  Rng choice_rng = master.fork(2);

  HandResult result;
  result.sequences = make_hand_sequences(cfg, seq_rng);

  const StaticImage image = hand::hand_static_image();
  ImageIndex index;

  struct ExpertAgent {
    std::string id;
    hand::HandWorld world;
    std::shared_ptr<DynamicImage> dynamic;
    Rng rng;
  };
  std::vector<ExpertAgent> experts;
  for (std::size_t i = 0; i < result.sequences.experts.size(); ++i) {
    auto dyn = std::make_shared<DynamicImage>(cfg.history_capacity, image.condition_keys());
    experts.push_back({hand_expert_id(i),
                       hand::HandWorld(result.sequences.experts[i], cfg.action_mode), dyn,
                       master.fork(100 + i)});
    index.register_image(experts.back().id, image, dyn);
  }

  auto apprentice = std::make_shared<Apprentice>(kApprenticeId, image, cfg.apprentice);
  hand::HandWorld own_world(result.sequences.apprentice, cfg.action_mode);
  index.register_image(
      kApprenticeId, image,
      std::make_shared<DynamicImage>(cfg.history_capacity, image.condition_keys()));

  std::optional<Designation> task;
  if (cfg.task) task = Designation(*cfg.task);

  HandSummary& sum = result.summary;
  bool executed_once = false;
  sum.learning_periods = 1;

  for (int step = 0; step < cfg.steps; ++step) {
    for (auto& e : experts) {
      e.world.prepare();
      const ActionSpec act = cfg.expert_choice == hand::ExpertChoice::Random
                                 ? e.world.expert_action(e.rng)
                                 : e.world.expert_action();
      e.dynamic->record_snapshot(act, e.world.conditions());
      e.world.execute(act);
    }

    HandRow row;
    row.step = step;
    row.phase = apprentice->state().phase;
    row.method = "none";

    if (row.phase == Phase::Learning) {
      ++sum.learning_steps;
      if (!apprentice->observing()) {
        if (auto pick = apprentice->choose_expert(apprentice->discover(index, task, cfg.ontology),
                                                  choice_rng))
          apprentice->begin_observation(index, *pick);
      }
      row.expert = apprentice->observed_expert().value_or("");
      if (auto snap = apprentice->next_observed()) {
        const LearnRecord rec = apprentice->learn_from(*snap);
        row.action = snap->action.to_string();
        row.conditions = snap->conditions.to_string();
        row.stored = true;
        row.correct = rec.proposal_matched;
        if (rec.best) {
          row.method = to_string(rec.best->proposal.method);
          row.reliability = rec.best->proposal.reliability;
        }
      }
      if (apprentice->apply_transition()) {
        apprentice->end_observation(index);
        result.phase_changes.push_back({step, Phase::Execution, "threshold"});
      }
    } else {
      if (!executed_once) {
        sum.initial_learning_steps = step;
        executed_once = true;
      }
      own_world.prepare();
      const ConditionSet current = own_world.conditions();
      row.conditions = current.to_string();
      const ProposalSet decision = apprentice->decide(current);
      if (const auto& choice = decision.best) {
        const bool appropriate = own_world.is_appropriate(choice->proposal.action);
        const bool familiar = apprentice->familiar(current);
        const bool ok = own_world.execute(choice->proposal.action);
        apprentice->executed(current, decision, ok, familiar);
        row.action = choice->proposal.action.to_string();
        row.executed = true;
        row.correct = appropriate;
        row.method = to_string(choice->proposal.method);
        row.reliability = choice->proposal.reliability;
        row.familiar = familiar;
        ++sum.executed;
        if (row.correct) ++sum.correct_executed;
      }
      if (apprentice->state().phase == Phase::Learning) {
        ++sum.forced_switches;
        ++sum.learning_periods;
        result.phase_changes.push_back({step, Phase::Learning, "unfamiliar"});
      } else if (apprentice->apply_transition()) {
        ++sum.learning_periods;
        result.phase_changes.push_back({step, Phase::Learning, "threshold"});
      }
    }

    const auto& st = apprentice->state();
    row.confidence = st.confidence;
    row.recall_weight = st.weights.recall;
    row.classification_weight = st.weights.classification;
    row.memory_size = apprentice->memory().size();
    result.rows.push_back(std::move(row));
  }
  apprentice->end_observation(index);

  if (!executed_once) sum.initial_learning_steps = cfg.steps;
  sum.steps = cfg.steps;
  sum.final_confidence = apprentice->state().confidence;
  sum.final_weights = apprentice->state().weights;
  sum.memory_size = apprentice->memory().size();
  result.apprentice = apprentice;
  return result;
}

inline std::vector<CsvRow> to_csv_rows(const std::vector<HandRow>& rows) {
  std::vector<CsvRow> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.to_csv());
  return out;
}

}  // namespace lbo::harness
