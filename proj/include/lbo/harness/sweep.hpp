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

// Confidence-threshold sweep: one full hand run per (lower, upper) cell,
// all under the base configuration's seed.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "lbo/errors.hpp"
#include "lbo/harness/bucket.hpp"
#include "lbo/harness/hand_sim.hpp"
#include "lbo/harness/metrics.hpp"

namespace lbo::harness {

struct SweepCell {
  double lower = 0.0;
  double upper = 0.0;
  std::optional<HandSummary> summary;  // empty when the pair was skipped
  std::string status;                  // "ok" or the reason for skipping
};

inline const CsvRow& sweep_header() {
  static const CsvRow h = {"lower",          "upper",          "total_correct_actions",
                           "initial_learning_steps", "total_executed", "status"};
  return h;
}

inline CsvRow to_csv(const SweepCell& c) {
  if (!c.summary) return {csv_num(c.lower), csv_num(c.upper), "", "", "", c.status};
  return {csv_num(c.lower),
          csv_num(c.upper),
          csv_num(c.summary->correct_executed),
          csv_num(c.summary->initial_learning_steps),
          csv_num(c.summary->executed),
          c.status};
}

/// Parses "A..B" (step 1), "A..B:STEP" or a comma list "a,b,c".
inline std::vector<double> parse_range(const std::string& text) {
  auto number = [&](const std::string& s) {
    auto v = detail::parse_number(s);
    if (!v || !std::isfinite(*v)) throw ConfigError("bad number '" + s + "' in range " + text);
    return *v;
  };
  std::vector<double> out;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const auto colon = text.find(':', dots);
    const double a = number(text.substr(0, dots));
    const double b = number(text.substr(dots + 2, colon == std::string::npos ? std::string::npos
                                                                              : colon - dots - 2));
    const double step = colon == std::string::npos ? 1.0 : number(text.substr(colon + 1));
    if (!(step > 0.0)) throw ConfigError("range step must be positive: " + text);
    if (b < a) throw ConfigError("range end is below its start: " + text);
    const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    out.push_back(number(text.substr(start, comma == std::string::npos ? std::string::npos
                                                                       : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

/// Every (lower, upper) pair, lower-major. With `gaps`, upper runs over
/// lower + gap instead of `uppers`.
inline std::vector<std::pair<double, double>> sweep_pairs(const std::vector<double>& lowers,
                                                          const std::vector<double>& uppers,
                                                          const std::vector<double>& gaps = {}) {
  if (lowers.empty()) throw ConfigError("sweep: lower range is empty");
  if (uppers.empty() && gaps.empty()) throw ConfigError("sweep: upper range is empty");
  std::vector<std::pair<double, double>> out;
  for (double lo : lowers) {
    if (!gaps.empty()) {
      for (double g : gaps) out.emplace_back(lo, lo + g);
    } else {
      for (double up : uppers) out.emplace_back(lo, up);
    }
  }
  return out;
}

/// Runs one cell. The unfamiliar reference keeps the base configuration's
/// distance below the lower threshold.
inline SweepCell run_sweep_cell(const HandConfig& base, double lower, double upper) {
  SweepCell cell{lower, upper, std::nullopt, "ok"};
  if (!(lower < upper)) {
    cell.status = "skipped: lower must be below upper";
    return cell;
  }
  HandConfig cfg = base;
  const double offset =
      base.apprentice.eval.lower_threshold - base.apprentice.eval.unfamiliar_reference;
  cfg.apprentice.eval.lower_threshold = lower;
  cfg.apprentice.eval.upper_threshold = upper;
  cfg.apprentice.eval.unfamiliar_reference = lower - offset;
  cell.summary = run_hand(cfg).summary;
  return cell;
}

/// Runs every pair; cells are independent, so up to `jobs` run at once.
/// Output order is the pair order whatever `jobs` is.
inline std::vector<SweepCell> sweep_thresholds(const HandConfig& base,
                                               const std::vector<std::pair<double, double>>& pairs,
                                               unsigned jobs = 1) {
  base.validate();
  std::vector<SweepCell> cells(pairs.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(pairs.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < pairs.size(); i = next++) {
      try {
        cells[i] = run_sweep_cell(base, pairs[i].first, pairs[i].second);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(pairs.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return cells;
}

}  // namespace lbo::harness
