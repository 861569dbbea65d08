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

// Virtual hand that signs the numbers 1-5, fed by a resettable number source.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lbo/errors.hpp"
#include "lbo/rng.hpp"
#include "lbo/software_image.hpp"

namespace lbo::hand {

enum class Finger { Thumb = 0, Index, Middle, Ring, Pinky };
enum class FingerState { Down, Up };

inline constexpr std::array<Finger, 5> kFingers = {Finger::Thumb, Finger::Index, Finger::Middle,
                                                   Finger::Ring, Finger::Pinky};

inline const char* finger_name(Finger f) {
  static constexpr const char* names[] = {"thumb", "index", "middle", "ring", "pinky"};
  return names[static_cast<int>(f)];
}

// Designations shared by the experts and the apprentice. The hand is exposed
// as one visible attribute per finger, named "hand-<finger>".
inline constexpr const char* kNumberSensor = "number";
inline constexpr const char* kSourceSensor = "source-state";
inline constexpr const char* kResetAction = "reset-source";
inline constexpr const char* kHandSignAction = "sign";
inline constexpr const char* kActive = "active";
inline constexpr const char* kInactive = "inactive";

struct HandState {
  std::array<FingerState, 5> fingers{};  // all Down

  FingerState operator[](Finger f) const { return fingers[static_cast<std::size_t>(f)]; }
  void toggle(Finger f) {
    auto& s = fingers[static_cast<std::size_t>(f)];
    s = s == FingerState::Up ? FingerState::Down : FingerState::Up;
  }

  /// Thumb to pinky, `U` or `D`.
  std::string to_string() const {
    std::string out;
    for (auto s : fingers) out += s == FingerState::Up ? 'U' : 'D';
    return out;
  }

  friend bool operator==(const HandState&, const HandState&) = default;
};

/// Fingers go up in the order index, middle, ring, pinky, thumb.
inline HandState hand_target(int n) {
  if (n < 1 || n > 5) throw std::out_of_range("hand can only show 1..5, got " + std::to_string(n));
  static constexpr std::array<Finger, 5> raise_order = {Finger::Index, Finger::Middle,
                                                        Finger::Ring, Finger::Pinky, Finger::Thumb};
  HandState h;
  for (int i = 0; i < n; ++i) h.toggle(raise_order[static_cast<std::size_t>(i)]);
  return h;
}

/// Fingers that differ from the sign for `n`, thumb first.
inline std::vector<Finger> hand_expert_actions(const HandState& current, int n) {
  const HandState target = hand_target(n);
  std::vector<Finger> out;
  for (auto f : kFingers)
    if (current[f] != target[f]) out.push_back(f);
  return out;
}

inline std::string finger_attribute(Finger f) { return std::string("hand-") + finger_name(f); }

inline ActionSpec finger_action(Finger f) {
  return ActionSpec::simple(Designation(finger_name(f)));
}
inline ActionSpec reset_action() { return ActionSpec::simple(Designation(kResetAction)); }

/// Toggles performed in one decision, wrapped as a single composite action.
inline ActionSpec sign_action(const std::vector<Finger>& toggles) {
  std::vector<ActionSpec> steps;
  for (auto f : toggles) steps.push_back(finger_action(f));
  return ActionSpec::composite(Designation(kHandSignAction), std::move(steps));
}

/// Parts, sensors, attributes and actions of every hand-scenario agent.
inline StaticImage hand_static_image() {
  std::vector<ActionSpec> fingers;
  std::vector<Designation> attributes;
  for (auto f : kFingers) {
    fingers.push_back(finger_action(f));
    attributes.emplace_back(finger_attribute(f));
  }
  return StaticImage({
      PartSpec{Designation("hand-controller"),
               {Designation(kNumberSensor)},
               std::move(attributes),
               {ActuatorSpec{Designation("fingers"), std::move(fingers)}}},
      PartSpec{Designation("source-manager"),
               {Designation(kSourceSensor)},
               {},
               {ActuatorSpec{Designation("source-control"), {reset_action()}}}},
  });
}

// ---------------------------------------------------------------------------

enum class SourceStatus { Active, Inactive };

/// Plays a fixed sequence once, then stays inactive until reset.
class NumberSource {
 public:
  explicit NumberSource(std::vector<int> sequence) : sequence_(std::move(sequence)) {
    if (sequence_.empty()) throw InvalidArgument("number sequence must not be empty");
    for (int n : sequence_)
      if (n < 1 || n > 5) throw InvalidArgument("number sequence values must be in 1..5");
  }

  std::optional<int> step() {
    if (status() == SourceStatus::Inactive) return std::nullopt;
    return sequence_[cursor_++];
  }

  void reset() { cursor_ = 0; }

  SourceStatus status() const {
    return cursor_ >= sequence_.size() ? SourceStatus::Inactive : SourceStatus::Active;
  }
  std::size_t cursor() const { return cursor_; }
  const std::vector<int>& sequence() const { return sequence_; }

 private:
  std::vector<int> sequence_;
  std::size_t cursor_ = 0;
};

/// How the expert changes the hand: one finger per decision, or all toggles
/// at once as a composite action.
enum class ActionMode { Finger, Composite };

/// Which needed finger a finger-mode expert moves: the first in thumb to
/// pinky order, or one drawn at random.
enum class ExpertChoice { FirstInOrder, Random };

/// One agent's surroundings: its source, its hand and the number the hand
/// still has to show. A number is consumed once the hand shows it, so the
/// number sensor reads "none" while the source is inactive and nothing is
/// pending.
class HandWorld {
 public:
  explicit HandWorld(std::vector<int> sequence, ActionMode mode = ActionMode::Finger)
      : source_(std::move(sequence)), mode_(mode) {}

  /// Consumes shown numbers and pulls the next one while the source is active.
  void prepare() {
    for (;;) {
      if (number_ && hand_ == hand_target(*number_)) number_.reset();
      if (number_ || source_.status() == SourceStatus::Inactive) return;
      number_ = source_.step();
    }
  }

  ConditionSet conditions() const {
    ConditionSet c;
    c.set(kNumberSensor, number_ ? std::to_string(*number_) : std::string("none"));
    for (auto f : kFingers)
      c.set(finger_attribute(f), hand_[f] == FingerState::Up ? "up" : "down");
    c.set(kSourceSensor, source_.status() == SourceStatus::Active ? kActive : kInactive);
    return c;
  }

  /// What the expert does here: work toward the pending number, else reset
  /// the exhausted source.
  ActionSpec expert_action() const {
    if (number_ && !shows_number()) {
      const auto toggles = hand_expert_actions(hand_, *number_);
      return mode_ == ActionMode::Composite ? sign_action(toggles) : finger_action(toggles.front());
    }
    return reset_action();
  }

  /// Like expert_action(), but in finger mode the toggled finger is drawn
  /// uniformly from the needed ones.
  ActionSpec expert_action(Rng& rng) const {
    if (mode_ == ActionMode::Finger && number_ && !shows_number()) {
      const auto toggles = hand_expert_actions(hand_, *number_);
      return finger_action(toggles[rng.below(toggles.size())]);
    }
    return expert_action();
  }

  /// True iff `action` is one the expert policy allows here: the reset when
  /// the expert would reset, otherwise (finger mode) any single needed
  /// toggle or (composite mode) exactly the expert's composite.
  bool is_appropriate(const ActionSpec& action) const {
    const ActionSpec expert = expert_action();
    if (mode_ == ActionMode::Composite || expert.designation().str() == kResetAction)
      return action == expert;
    if (!action.is_simple()) return false;
    for (auto f : hand_expert_actions(hand_, *number_))
      if (action == finger_action(f)) return true;
    return false;
  }

  /// Applies an action and returns the execution monitor's verdict: a reset
  /// must revive an inactive source; finger toggles must each move a finger
  /// toward the sign of the current number.
  bool execute(const ActionSpec& action) {
    if (action.designation().str() == kResetAction && action.is_simple()) {
      const bool was_inactive = source_.status() == SourceStatus::Inactive;
      source_.reset();
      return was_inactive;
    }
    bool ok = number_.has_value();
    const HandState target = number_ ? hand_target(*number_) : HandState{};
    for (const auto& step : flatten(action)) {
      std::optional<Finger> finger;
      for (auto f : kFingers)
        if (step.designation().str() == finger_name(f)) finger = f;
      if (!finger) return false;
      hand_.toggle(*finger);
      if (hand_[*finger] != target[*finger]) ok = false;
    }
    return ok;
  }

  bool shows_number() const { return number_ && hand_ == hand_target(*number_); }
  const HandState& hand() const { return hand_; }
  const NumberSource& source() const { return source_; }
  std::optional<int> number() const { return number_; }
  ActionMode mode() const { return mode_; }

 private:
  NumberSource source_;
  ActionMode mode_;
  HandState hand_;
  std::optional<int> number_;
};

}  // namespace lbo::hand
