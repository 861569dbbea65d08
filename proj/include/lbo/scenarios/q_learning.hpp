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

// Tabular Q-learning over a discretized mountain car state.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "lbo/errors.hpp"
#include "lbo/rng.hpp"
#include "lbo/scenarios/mountain.hpp"

namespace lbo::mountain {

struct QParams {
  double alpha = 0.2;
  double gamma = 0.9;
  double decay = 0.999;     // per attempt, applied to both alpha and epsilon
  double epsilon = 0.3;     // initial exploration rate
  double initial_q = 1.0;   // optimistic: the largest return the goal reward allows
  int position_bins = 40;
  int velocity_bins = 40;

  void validate() const {
    if (!(alpha > 0 && alpha <= 1)) throw InvalidArgument("q: alpha must be in (0, 1]");
    if (!(gamma >= 0 && gamma < 1)) throw InvalidArgument("q: gamma must be in [0, 1)");
    if (!(decay > 0 && decay <= 1)) throw InvalidArgument("q: decay must be in (0, 1]");
    if (!(epsilon >= 0 && epsilon <= 1)) throw InvalidArgument("q: epsilon must be in [0, 1]");
    if (!std::isfinite(initial_q)) throw InvalidArgument("q: initial value must be finite");
    if (position_bins <= 0 || velocity_bins <= 0) throw InvalidArgument("q: bins must be positive");
  }
};

inline constexpr int kActionCount = 3;

/// Action index 0, 1, 2 maps to throttle -1, 0, +1.
inline int throttle_of_index(int a) { return a - 1; }

class QTable {
 public:
  QTable(const QParams& q, const PhysicsParams& p)
      : q_(q), p_(p),
        values_(static_cast<std::size_t>(q.position_bins * q.velocity_bins * kActionCount),
                q.initial_q) {
    q_.validate();
  }

  std::size_t state_count() const {
    return static_cast<std::size_t>(q_.position_bins * q_.velocity_bins);
  }

  std::size_t discretize(const MountainState& st) const {
    auto bin = [](double v, double lo, double hi, int n) {
      int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * n));
      return std::clamp(b, 0, n - 1);
    };
    const int xb = bin(st.position, p_.x_min, p_.x_max, q_.position_bins);
    const int vb = bin(st.velocity, -p_.v_max, p_.v_max, q_.velocity_bins);
    return static_cast<std::size_t>(xb * q_.velocity_bins + vb);
  }

  double& at(std::size_t s, int a) {
    return values_[s * kActionCount + static_cast<std::size_t>(a)];
  }
  double at(std::size_t s, int a) const {
    return values_[s * kActionCount + static_cast<std::size_t>(a)];
  }

  double max_value(std::size_t s) const {
    double m = at(s, 0);
    for (int a = 1; a < kActionCount; ++a) m = std::max(m, at(s, a));
    return m;
  }

  /// Lowest action index among the maxima.
  int greedy(std::size_t s) const {
    int best = 0;
    for (int a = 1; a < kActionCount; ++a)
      if (at(s, a) > at(s, best)) best = a;
    return best;
  }

  double alpha_at(long long step) const { return q_.alpha * std::pow(q_.decay, double(step)); }
  double epsilon_at(long long step) const { return q_.epsilon * std::pow(q_.decay, double(step)); }

  /// One-step Q-learning backup with the learning rate decayed to `step`.
  /// A terminal transition does not bootstrap from `next`.
  void update(std::size_t s, int a, double reward, std::size_t next, long long step,
              bool terminal = false) {
    double& q = at(s, a);
    const double target = terminal ? reward : reward + q_.gamma * max_value(next);
    q += alpha_at(step) * (target - q);
  }

  /// Epsilon-greedy choice.
  int select(std::size_t s, Rng& rng, double epsilon) const {
    if (epsilon > 0.0 && rng.unit() < epsilon) return static_cast<int>(rng.below(kActionCount));
    return greedy(s);
  }

  const QParams& params() const { return q_; }

 private:
  QParams q_;
  PhysicsParams p_;
  std::vector<double> values_;
};

}  // namespace lbo::mountain
