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

// Mountain car: an underpowered car in a sinusoidal valley.

#include <algorithm>
#include <cmath>
#include <string>

#include "lbo/errors.hpp"
#include "lbo/software_image.hpp"

namespace lbo::mountain {

struct PhysicsParams {
  double x_min = -1.2;
  double x_max = 0.6;
  double v_max = 0.07;
  double force = 0.001;
  double gravity_coeff = 0.0025;
  double goal_position = 0.5;
  double start_position = -0.5;

  void validate() const {
    if (!(x_min < goal_position && goal_position <= x_max))
      throw InvalidArgument("mountain: need x_min < goal_position <= x_max");
    if (!(force > 0 && gravity_coeff > 0 && v_max > 0))
      throw InvalidArgument("mountain: force, gravity_coeff and v_max must be positive");
    if (!(start_position >= x_min && start_position <= x_max))
      throw InvalidArgument("mountain: start position out of bounds");
  }
};

struct MountainState {
  double position = 0.0;
  double velocity = 0.0;
  friend bool operator==(const MountainState&, const MountainState&) = default;
};

inline MountainState start_state(const PhysicsParams& p) { return {p.start_position, 0.0}; }

/// Throttle -1 (backward), 0 or +1 (forward).
inline MountainState mountain_step(MountainState st, int throttle, const PhysicsParams& p) {
  double v = st.velocity + p.force * throttle - p.gravity_coeff * std::cos(3.0 * st.position);
  v = std::clamp(v, -p.v_max, p.v_max);
  double x = std::clamp(st.position + v, p.x_min, p.x_max);
  if (x <= p.x_min && v < 0) v = 0.0;
  return {x, v};
}

inline bool at_goal(const MountainState& st, const PhysicsParams& p) {
  return st.position >= p.goal_position;
}

/// Push in the direction of motion; from rest, push backward.
inline int mountain_expert_action(const MountainState& st, const PhysicsParams& p) {
  if (at_goal(st, p)) return 0;
  if (st.velocity > 0) return 1;
  return -1;
}

inline constexpr const char* kPositionSensor = "position";
inline constexpr const char* kVelocitySensor = "velocity";

inline const char* throttle_name(int throttle) {
  if (throttle < 0) return "accelerate-backward";
  if (throttle > 0) return "accelerate-forward";
  return "maintain";
}

inline ActionSpec throttle_action(int throttle) {
  return ActionSpec::simple(Designation(throttle_name(throttle)));
}

/// Inverse of throttle_action(); throws for anything else.
inline int throttle_of(const ActionSpec& a) {
  for (int t = -1; t <= 1; ++t)
    if (a.is_simple() && a.designation().str() == throttle_name(t)) return t;
  throw InvalidArgument("not a mountain car action: " + a.to_string());
}

inline ConditionSet conditions_of(const MountainState& st) {
  ConditionSet c;
  c.set(kPositionSensor, st.position);
  c.set(kVelocitySensor, st.velocity);
  return c;
}

inline StaticImage mountain_static_image() {
  return StaticImage({PartSpec{Designation("car"),
                               {Designation(kPositionSensor), Designation(kVelocitySensor)},
                               {},
                               {ActuatorSpec{Designation("engine"),
                                             {throttle_action(-1), throttle_action(0),
                                              throttle_action(1)}}}}});
}

}  // namespace lbo::mountain
