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

// Action proposal methods and their combination.
//
// Recall follows the links out of a reference experience; classification is
// an instance-based K* classifier over every stored experience. Both return
// proposals with a reliability in [0, 1]. combine() weighs each reliability
// by its method's weight factor and picks the best action. The whole
// pipeline is a pure function, so observing and acting go through the same
// code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lbo/errors.hpp"
#include "lbo/experience_memory.hpp"
#include "lbo/software_image.hpp"

namespace lbo {

enum class Method { Recall = 0, Classification = 1 };

inline const char* to_string(Method m) {
  return m == Method::Recall ? "recall" : "classification";
}

struct Proposal {
  ActionSpec action;
  double reliability = 0.0;
  Method method = Method::Recall;
  std::optional<ExperienceId> source_experience;
};

struct MethodWeights {
  double recall = 0.0;
  double classification = 0.0;

  double of(Method m) const { return m == Method::Recall ? recall : classification; }
  double& of(Method m) { return m == Method::Recall ? recall : classification; }

  friend bool operator==(const MethodWeights&, const MethodWeights&) = default;
};

struct RankedProposal {
  Proposal proposal;
  double final_reliability = 0.0;
};

/// Parameters of the entropic distance.
///
/// Symbolic attributes use the stop-probability model: staying on the same
/// value costs nothing, moving to another of the attribute's `n` values costs
/// log2(1 + blend * n / (1 - blend)) bits. Numeric attributes use the
/// exponential model: |x - y| / (scale * ln 2) bits.
struct KStarParams {
  double blend = 0.20;
  /// Per-attribute scale for numeric attributes. Missing entries are fitted
  /// from memory by fit_kstar(); 1.0 when used unfitted.
  std::map<std::string, double> numeric_scale;
  /// Per-attribute number of distinct symbolic values. Missing entries count
  /// as 2 (the smallest cardinality with a mismatch).
  std::map<std::string, std::size_t> symbolic_cardinality;
  /// Numeric values closer than this are the same value.
  double match_epsilon = kDefaultMatchEpsilon;

  void validate() const {
    if (!(blend > 0.0 && blend <= 1.0)) throw InvalidArgument("kstar blend must be in (0, 1]");
    for (const auto& [k, s] : numeric_scale)
      if (!(s > 0.0) || !std::isfinite(s))
        throw InvalidArgument("kstar numeric scale for " + k + " must be positive");
  }
};

namespace detail {

inline double symbolic_cost(std::size_t cardinality, double blend) {
  if (blend >= 1.0) return std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(std::max<std::size_t>(cardinality, 2));
  return std::log2(1.0 + blend * n / (1.0 - blend));
}

inline double attribute_distance(const std::string& key, const ConditionValue& a,
                                 const ConditionValue& b, const KStarParams& p) {
  if (a.index() != b.index())
    throw InvalidArgument("attribute " + key + " mixes symbolic and numeric values");
  if (const auto* sa = std::get_if<std::string>(&a)) {
    if (*sa == std::get<std::string>(b)) return 0.0;
    auto it = p.symbolic_cardinality.find(key);
    return symbolic_cost(it == p.symbolic_cardinality.end() ? 2 : it->second, p.blend);
  }
  const double diff = std::fabs(std::get<double>(a) - std::get<double>(b));
  if (diff <= p.match_epsilon) return 0.0;
  auto it = p.numeric_scale.find(key);
  const double scale = it == p.numeric_scale.end() ? 1.0 : it->second;
  return diff / (scale * std::numbers::ln2);
}

}  // namespace detail

/// Transformation complexity in bits from `a` to `b`, summed over attributes.
/// Zero iff every attribute matches.
inline double kstar_distance(const ConditionSet& a, const ConditionSet& b, const KStarParams& p) {
  if (!a.same_keys(b)) throw KeyMismatch();
  double total = 0.0;
  auto ib = b.entries().begin();
  for (const auto& [key, va] : a.entries()) {
    total += detail::attribute_distance(key, va, ib->second, p);
    ++ib;
  }
  return total;
}

/// Fills in what `base` leaves open from the stored experiences: numeric
/// scales become the mean absolute deviation of each attribute, symbolic
/// cardinalities the number of distinct values (the current value included).
inline KStarParams fit_kstar(const ExperienceTree& tree, const ConditionSet& current,
                             KStarParams base) {
  base.match_epsilon = tree.match_epsilon();
  std::map<std::string, std::vector<double>> numeric;
  std::map<std::string, std::set<std::string>> symbolic;
  auto collect = [&](const ConditionSet& c) {
    for (const auto& [k, v] : c.entries()) {
      if (const auto* s = std::get_if<std::string>(&v))
        symbolic[k].insert(*s);
      else
        numeric[k].push_back(std::get<double>(v));
    }
  };
  for (const auto& e : tree.experiences()) collect(e.conditions);
  collect(current);

  for (const auto& [k, vals] : numeric) {
    if (base.numeric_scale.contains(k)) continue;
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double mad = 0.0;
    for (double v : vals) mad += std::fabs(v - mean);
    mad /= static_cast<double>(vals.size());
    base.numeric_scale[k] = mad > 0.0 ? mad : 1.0;
  }
  for (const auto& [k, vals] : symbolic)
    if (!base.symbolic_cardinality.contains(k)) base.symbolic_cardinality[k] = vals.size();
  return base;
}

/// One proposal per child of `ref`, scored by how closely the child's
/// conditions resemble `current`. Highest reliability first; equal
/// reliabilities keep the lower experience id first.
inline std::vector<Proposal> recall_propose(const ExperienceTree& tree,
                                            std::optional<ExperienceId> ref,
                                            const ConditionSet& current) {
  std::vector<Proposal> out;
  if (!ref) return out;
  for (const auto& child : tree.children_of(*ref)) {
    out.push_back(Proposal{child.action,
                           similarity_between(child.conditions, current, tree.match_epsilon()),
                           Method::Recall, child.id});
  }
  std::stable_sort(out.begin(), out.end(), [](const Proposal& a, const Proposal& b) {
    if (a.reliability != b.reliability) return a.reliability > b.reliability;
    return *a.source_experience < *b.source_experience;
  });
  return out;
}

/// K* over all experiences, one proposal per distinct action.
///
/// Each experience contributes 2^-distance (its transformation probability
/// relative to staying put). An action's reliability is the contribution of
/// its closest experience, so an exact condition match gives exactly 1.
/// Ties are broken by the action's summed contribution, then by the action's
/// text form.
inline std::vector<Proposal> classify_propose(const ExperienceTree& tree,
                                              const ConditionSet& current,
                                              const KStarParams& params) {
  std::vector<Proposal> out;
  if (tree.empty()) return out;
  params.validate();
  const KStarParams fitted = fit_kstar(tree, current, params);

  struct Votes {
    ActionSpec action;
    double nearest = -1.0;
    double mass = 0.0;
    ExperienceId source = 0;
  };
  std::map<std::string, Votes> by_action;
  for (const auto& e : tree.experiences()) {
    const bool exact = same_conditions(e.conditions, current, tree.match_epsilon());
    const double p = exact ? 1.0 : std::exp2(-kstar_distance(e.conditions, current, fitted));
    auto [it, inserted] = by_action.try_emplace(e.action.to_string(), Votes{e.action});
    Votes& v = it->second;
    v.mass += p;
    if (p > v.nearest) {
      v.nearest = p;
      v.source = e.id;
    }
  }

  struct Ranked {
    std::string key;
    double mass;
    Proposal proposal;
  };
  std::vector<Ranked> ranked;
  for (auto& [key, v] : by_action)
    ranked.push_back({key, v.mass,
                      Proposal{v.action, std::clamp(v.nearest, 0.0, 1.0), Method::Classification,
                               v.source}});
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.proposal.reliability != b.proposal.reliability)
      return a.proposal.reliability > b.proposal.reliability;
    if (a.mass != b.mass) return a.mass > b.mass;
    return a.key < b.key;
  });
  out.reserve(ranked.size());
  for (auto& r : ranked) out.push_back(std::move(r.proposal));
  return out;
}

namespace detail {

// Total order used by combine(): final reliability, then raw reliability,
// then recall before classification, then lowest experience id (recall) or
// action text (classification).
inline bool ranks_before(const RankedProposal& a, const RankedProposal& b) {
  if (a.final_reliability != b.final_reliability)
    return a.final_reliability > b.final_reliability;
  const auto& pa = a.proposal;
  const auto& pb = b.proposal;
  if (pa.reliability != pb.reliability) return pa.reliability > pb.reliability;
  if (pa.method != pb.method) return pa.method == Method::Recall;
  if (pa.method == Method::Recall) return pa.source_experience < pb.source_experience;
  return pa.action.to_string() < pb.action.to_string();
}

}  // namespace detail

/// Best proposal by reliability x method weight. When every weighted score
/// is equal (weights start at zero), the raw reliability decides.
inline std::optional<RankedProposal> combine(std::span<const Proposal> recall,
                                             std::span<const Proposal> classification,
                                             const MethodWeights& w) {
  std::optional<RankedProposal> best;
  auto consider = [&](const Proposal& p) {
    RankedProposal r{p, p.reliability * w.of(p.method)};
    if (!best || detail::ranks_before(r, *best)) best = std::move(r);
  };
  for (const auto& p : recall) consider(p);
  for (const auto& p : classification) consider(p);
  return best;
}

enum class Outcome { Appropriate, Inappropriate };

/// Appropriate adds the reliability to the method's weight, inappropriate
/// subtracts it. Weights never drop below zero.
inline MethodWeights update_weight(MethodWeights w, Method m, Outcome outcome, double reliability) {
  if (!(reliability >= 0.0 && reliability <= 1.0))
    throw InvalidArgument("reliability must be in [0, 1]");
  double& weight = w.of(m);
  if (outcome == Outcome::Appropriate)
    weight += reliability;
  else
    weight = std::max(0.0, weight - reliability);
  return w;
}

/// Everything both methods proposed for one set of conditions, plus the
/// combined choice.
struct ProposalSet {
  std::vector<Proposal> recall;
  std::vector<Proposal> classification;
  std::optional<RankedProposal> best;

  /// Highest-reliability proposal of one method, if it proposed anything.
  const Proposal* top(Method m) const {
    const auto& v = m == Method::Recall ? recall : classification;
    return v.empty() ? nullptr : &v.front();
  }
};

/// The full proposal pipeline. Used unchanged while observing and while
/// acting.
inline ProposalSet propose(const ExperienceTree& tree, std::optional<ExperienceId> ref,
                           const ConditionSet& current, const MethodWeights& weights,
                           const KStarParams& params) {
  ProposalSet out;
  out.recall = recall_propose(tree, ref, current);
  out.classification = classify_propose(tree, current, params);
  out.best = combine(out.recall, out.classification, weights);
  return out;
}

}  // namespace lbo
