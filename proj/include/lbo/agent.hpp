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

// An apprentice: discovers experts through the index, buffers their
// snapshots, learns from them and, once confident, proposes its own actions.

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lbo/evaluation.hpp"
#include "lbo/experience_memory.hpp"
#include "lbo/learners.hpp"
#include "lbo/rng.hpp"
#include "lbo/software_image.hpp"

namespace lbo {

/// How learning-phase evaluation feeds the method weight factors.
enum class WeightFeedback {
  BestOnly,   // only the method that produced the winning proposal
  PerMethod,  // each method's own top proposal, graded separately; while
              // executing, every method whose top names the executed action
};

struct ApprenticeConfig {
  EvalConfig eval;
  KStarParams kstar;
  double match_epsilon = kDefaultMatchEpsilon;
  WeightFeedback feedback = WeightFeedback::PerMethod;
};

/// Result of learning from one observed snapshot.
struct LearnRecord {
  Snapshot snapshot;
  std::optional<RankedProposal> best;
  bool proposal_matched = false;
};

class Apprentice {
 public:
  Apprentice(std::string id, StaticImage image, ApprenticeConfig cfg)
      : id_(std::move(id)), image_(std::move(image)), cfg_(std::move(cfg)),
        memory_(cfg_.match_epsilon), live_(std::make_shared<std::deque<Snapshot>>()) {
    cfg_.eval.validate();
    cfg_.kstar.validate();
  }

  Apprentice(const Apprentice&) = delete;
  Apprentice& operator=(const Apprentice&) = delete;

  const std::string& id() const { return id_; }
  const StaticImage& image() const { return image_; }

  // -- observation --------------------------------------------------------

  /// Experts this apprentice may observe.
  std::vector<std::string> discover(const ImageIndex& index, const std::optional<Designation>& task,
                                    const TaskOntology& ont) const {
    return index.find_candidates(image_, task, ont, id_);
  }

  /// Picks an expert for a new observation period: a random candidate other
  /// than the one observed last, when there is a choice.
  std::optional<std::string> choose_expert(const std::vector<std::string>& candidates,
                                           Rng& rng) const {
    if (candidates.empty()) return std::nullopt;
    std::vector<std::string> pool;
    for (const auto& c : candidates)
      if (!last_expert_ || c != *last_expert_) pool.push_back(c);
    if (pool.empty()) pool = candidates;
    return pool[rng.below(pool.size())];
  }

  /// Subscribes to the expert and queues its history ahead of anything that
  /// arrives live. Starts a new observed sequence in memory.
  void begin_observation(ImageIndex& index, const std::string& expert) {
    end_observation(index);
    live_->clear();
    auto buffer = live_;
    subscription_ = index.subscribe(expert, [buffer](const Snapshot& s) { buffer->push_back(s); });
    auto history = index.dynamic_image(expert)->read_history();
    pending_.assign(history.begin(), history.end());
    last_history_seq_ = history.empty() ? std::nullopt : std::optional(history.back().seq);
    observed_expert_ = expert;
    last_expert_ = expert;
    memory_.reset_sequence_anchor();
    previous_observed_.reset();
    ++observation_periods_;
  }

  void end_observation(ImageIndex& index) {
    if (subscription_) index.unsubscribe(*subscription_);
    subscription_.reset();
    observed_expert_.reset();
    pending_.clear();
    live_->clear();
  }

  bool observing() const { return observed_expert_.has_value(); }
  const std::optional<std::string>& observed_expert() const { return observed_expert_; }
  int observation_periods() const { return observation_periods_; }

  /// Next snapshot in observation order: history first, then live ones.
  std::optional<Snapshot> next_observed() {
    if (!pending_.empty()) {
      Snapshot s = std::move(pending_.front());
      pending_.pop_front();
      return s;
    }
    while (!live_->empty()) {
      Snapshot s = std::move(live_->front());
      live_->pop_front();
      if (last_history_seq_ && s.seq <= *last_history_seq_) continue;
      return s;
    }
    return std::nullopt;
  }

  std::size_t buffered() const { return pending_.size() + live_->size(); }

  // -- learning and acting ------------------------------------------------

  /// Proposals for `current`, anchored on the last action (observed while
  /// learning, executed while acting). Identical in both phases.
  ProposalSet proposals_for(const ConditionSet& current,
                            const std::optional<std::pair<ConditionSet, ActionSpec>>& last) const {
    std::optional<ExperienceId> ref;
    if (last) ref = memory_.discover_reference_experience(last->first, last->second);
    return propose(memory_, ref, current, state_.weights, cfg_.kstar);
  }

  /// Tries to predict the observed action, grades the attempt, then stores
  /// the snapshot.
  LearnRecord learn_from(const Snapshot& s) {
    const ProposalSet props = proposals_for(s.conditions, previous_observed_);
    const std::vector<Proposal> tops = graded_tops(props);
    state_ = assess_learning(state_, props.best, s.action, tops);
    memory_.store_experience(s.conditions, s.action);
    previous_observed_ = std::pair(s.conditions, s.action);
    return LearnRecord{s, props.best, props.best && props.best->proposal.action == s.action};
  }

  /// Proposals for `current` while acting; `best` is the action to execute,
  /// absent when memory has nothing to offer.
  ProposalSet decide(const ConditionSet& current) const {
    return proposals_for(current, previous_executed_);
  }

  bool familiar(const ConditionSet& current) const { return is_familiar(memory_, current); }

  /// Records the execution of `decision.best` and the monitor's verdict.
  void executed(const ConditionSet& conditions, const ProposalSet& decision, bool ok,
                bool familiar) {
    if (!decision.best) throw InvalidArgument("executed: decision has no proposal");
    state_ = assess_execution(state_, *decision.best, ok, familiar, cfg_.eval,
                              graded_tops(decision));
    previous_executed_ = std::pair(conditions, decision.best->proposal.action);
  }

  /// Applies the threshold rule. Returns true when the phase changed.
  bool apply_transition() {
    const Phase before = state_.phase;
    state_ = transition(state_, cfg_.eval);
    return state_.phase != before;
  }

  const EvalState& state() const { return state_; }
  const ExperienceTree& memory() const { return memory_; }
  const ApprenticeConfig& config() const { return cfg_; }

 private:
  std::vector<Proposal> graded_tops(const ProposalSet& props) const {
    std::vector<Proposal> tops;
    if (cfg_.feedback == WeightFeedback::PerMethod) {
      for (auto m : {Method::Recall, Method::Classification})
        if (const auto* t = props.top(m)) tops.push_back(*t);
    }
    return tops;
  }

  std::string id_;
  StaticImage image_;
  ApprenticeConfig cfg_;
  ExperienceTree memory_;
  EvalState state_;

  std::shared_ptr<std::deque<Snapshot>> live_;
  std::deque<Snapshot> pending_;
  std::optional<std::uint64_t> last_history_seq_;
  std::optional<Subscription> subscription_;
  std::optional<std::string> observed_expert_;
  std::optional<std::string> last_expert_;
  int observation_periods_ = 0;

  std::optional<std::pair<ConditionSet, ActionSpec>> previous_observed_;
  std::optional<std::pair<ConditionSet, ActionSpec>> previous_executed_;
};

}  // namespace lbo
