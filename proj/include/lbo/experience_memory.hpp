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

// The apprentice's memory: experiences (conditions -> action) linked in the
// order they were observed.
//
// A pair of (conditions, action) is stored once. Seeing it again only adds a
// link from the previously stored experience, so sequences observed from
// different experts merge into one graph instead of fragmenting. Nodes can
// have several parents and the child graph may contain cycles; traversal is
// always single-step, so nothing here walks it recursively.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lbo/errors.hpp"
#include "lbo/software_image.hpp"

namespace lbo {

using ExperienceId = std::int64_t;

inline constexpr double kDefaultMatchEpsilon = 1e-9;

struct Experience {
  ExperienceId id = 0;
  ConditionSet conditions;
  ActionSpec action;
  std::vector<ExperienceId> children;
};

/// Fraction of condition entries whose values match. Both sets must carry the
/// same keys.
inline double similarity_between(const ConditionSet& a, const ConditionSet& b,
                                 double eps = kDefaultMatchEpsilon) {
  if (!a.same_keys(b)) throw KeyMismatch();
  if (a.empty()) return 1.0;
  std::size_t matched = 0;
  auto ib = b.entries().begin();
  for (const auto& [key, va] : a.entries()) {
    if (values_match(va, ib->second, eps)) ++matched;
    ++ib;
  }
  return static_cast<double>(matched) / static_cast<double>(a.size());
}

class ExperienceTree {
 public:
  explicit ExperienceTree(double match_eps = kDefaultMatchEpsilon) : eps_(match_eps) {
    if (!(eps_ >= 0.0)) throw InvalidArgument("match epsilon must be >= 0");
  }

  /// Stores the pair unless it already exists, then links it under the
  /// previously stored experience. Returns the id of the (new or existing)
  /// experience, which becomes the new anchor.
  ExperienceId store_experience(const ConditionSet& conditions, const ActionSpec& action) {
    std::optional<ExperienceId> found;
    for (const auto& e : experiences_) {
      if (e.action == action && same_conditions(e.conditions, conditions, eps_)) {
        found = e.id;
        break;
      }
    }
    ExperienceId id;
    if (found) {
      id = *found;
    } else {
      id = static_cast<ExperienceId>(experiences_.size());
      experiences_.push_back(Experience{id, conditions, action, {}});
      if (!last_stored_) roots_.push_back(id);
    }
    if (last_stored_) {
      auto& kids = experiences_[static_cast<std::size_t>(*last_stored_)].children;
      if (std::find(kids.begin(), kids.end(), id) == kids.end()) kids.push_back(id);
    }
    last_stored_ = id;
    return id;
  }

  /// Breaks the observed sequence: the next stored experience gets no parent.
  void reset_sequence_anchor() { last_stored_.reset(); }

  /// The experience with `action` whose conditions equal `conditions`, or
  /// failing that the most similar one with that action. Equal similarity
  /// keeps the earliest stored. Absent when `action` was never stored.
  std::optional<ExperienceId> discover_reference_experience(const ConditionSet& conditions,
                                                            const ActionSpec& action) const {
    std::optional<ExperienceId> best;
    double best_sim = 0.0;
    for (const auto& e : experiences_) {
      if (!(e.action == action)) continue;
      if (same_conditions(e.conditions, conditions, eps_)) return e.id;
      const double sim = similarity_between(e.conditions, conditions, eps_);
      // The first candidate is kept even at similarity 0, so an experience
      // with the right action is always found.
      if (!best || sim > best_sim) {
        best = e.id;
        best_sim = sim;
      }
    }
    return best;
  }

  std::vector<Experience> children_of(ExperienceId ref) const {
    const auto& node = at(ref);
    std::vector<Experience> out;
    out.reserve(node.children.size());
    for (auto c : node.children) out.push_back(experiences_[static_cast<std::size_t>(c)]);
    return out;
  }

  const Experience& at(ExperienceId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= experiences_.size()) throw UnknownId(id);
    return experiences_[static_cast<std::size_t>(id)];
  }

  /// True iff some stored experience has exactly these conditions.
  bool contains_conditions(const ConditionSet& conditions) const {
    return std::any_of(experiences_.begin(), experiences_.end(), [&](const Experience& e) {
      return same_conditions(e.conditions, conditions, eps_);
    });
  }

  const std::vector<Experience>& experiences() const { return experiences_; }
  const std::vector<ExperienceId>& roots() const { return roots_; }
  std::optional<ExperienceId> last_stored() const { return last_stored_; }
  std::size_t size() const { return experiences_.size(); }
  bool empty() const { return experiences_.empty(); }
  double match_epsilon() const { return eps_; }

  /// One tab-separated record per experience, in id order:
  ///   id <TAB> key=value;key=value <TAB> action <TAB> child,child
  /// preceded by a `#` header line. Conditions are in key order, numbers in
  /// shortest round-trip form, actions in ActionSpec::to_string form.
  void dump(std::ostream& os) const {
    os << "# id\tconditions\taction\tchildren\n";
    for (const auto& e : experiences_) {
      os << e.id << '\t' << e.conditions.to_string() << '\t' << e.action.to_string() << '\t';
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i) os << ',';
        os << e.children[i];
      }
      os << '\n';
    }
  }

  void write_dump(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path + " for writing");
    dump(out);
    if (!out) throw Error("write failed: " + path);
  }

 private:
  double eps_;
  std::vector<Experience> experiences_;
  std::vector<ExperienceId> roots_;
  std::optional<ExperienceId> last_stored_;
};

}  // namespace lbo
