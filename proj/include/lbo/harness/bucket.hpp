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

// Groups a metrics table into fixed-size buckets of consecutive rows, e.g.
// 100 steps or 100 attempts, for plotting.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include "lbo/errors.hpp"
#include "lbo/harness/metrics.hpp"

namespace lbo::harness {

namespace detail {

inline std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

/// One output row per bucket: `bucket` (0-based), `first` and `rows`, then
/// the sum and the mean of every column whose cells are all numeric. The
/// first column (the step or attempt index) is not aggregated.
inline CsvTable bucket_metrics(const CsvTable& in, std::size_t size) {
  if (size == 0) throw InvalidArgument("bucket size must be positive");
  if (in.header.empty()) throw InvalidArgument("bucket: table has no columns");

  std::vector<std::size_t> numeric;
  for (std::size_t c = 1; c < in.header.size(); ++c) {
    bool all = true;
    for (const auto& r : in.rows)
      if (!detail::parse_number(r[c])) {
        all = false;
        break;
      }
    if (all) numeric.push_back(c);
  }

  CsvTable out;
  out.header = {"bucket", "first", "rows"};
  for (auto c : numeric) {
    out.header.push_back(in.header[c] + "_sum");
    out.header.push_back(in.header[c] + "_mean");
  }
  for (std::size_t start = 0, b = 0; start < in.rows.size(); start += size, ++b) {
    const std::size_t stop = std::min(in.rows.size(), start + size);
    const auto n = static_cast<double>(stop - start);
    CsvRow row = {std::to_string(b), in.rows[start][0], std::to_string(stop - start)};
    for (auto c : numeric) {
      double sum = 0.0;
      for (std::size_t i = start; i < stop; ++i) sum += *detail::parse_number(in.rows[i][c]);
      row.push_back(csv_num(sum));
      row.push_back(csv_num(sum / n));
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace lbo::harness
