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

// JSON run configuration. Every key is optional; absent keys keep the
// built-in defaults, unknown keys are errors.
//
//   {
//     "seed": 1, "history_capacity": 500, "match_epsilon": 1e-9,
//     "feedback": "per-method" | "best-only",
//     "eval":  {"lower": 10, "upper": 15, "unfamiliar_reference": 0, "unfamiliar_limit": 5},
//     "kstar": {"blend": 0.2, "numeric_scale": {...}, "symbolic_cardinality": {...}},
//     "ontology": {"tasks": {"<task>": ["<designation>", ...]}},
//     "hand": {...}, "mountain": {...}
//   }

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lbo/errors.hpp"
#include "lbo/harness/hand_sim.hpp"
#include "lbo/harness/mountain_sim.hpp"

namespace lbo::harness {

using Json = nlohmann::json;

inline Json load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path);
  try {
    Json j = Json::parse(in);
    if (!j.is_object()) throw ConfigError(path + ": top level must be an object");
    return j;
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

namespace detail {

inline void only_keys(const Json& j, const std::string& where,
                      std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key " + where + "." + key);
  }
}

template <class T>
void read(const Json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <class E>
void read_enum(const Json& j, const char* key, E& out, const std::string& where,
               std::initializer_list<std::pair<const char*, E>> names) {
  if (!j.contains(key)) return;
  std::string s;
  read(j, key, s, where);
  for (const auto& [n, v] : names)
    if (s == n) {
      out = v;
      return;
    }
  throw ConfigError(where + "." + key + ": unknown value " + s);
}

inline void apply_common(const Json& j, ApprenticeConfig& a, std::uint64_t& seed,
                         std::size_t& history) {
  read(j, "seed", seed, "config");
  read(j, "history_capacity", history, "config");
  read(j, "match_epsilon", a.match_epsilon, "config");
  a.kstar.match_epsilon = a.match_epsilon;
  read_enum(j, "feedback", a.feedback, "config",
            {{"per-method", WeightFeedback::PerMethod}, {"best-only", WeightFeedback::BestOnly}});
  if (j.contains("eval")) {
    const Json& e = j.at("eval");
    only_keys(e, "eval", {"lower", "upper", "unfamiliar_reference", "unfamiliar_limit"});
    read(e, "lower", a.eval.lower_threshold, "eval");
    read(e, "upper", a.eval.upper_threshold, "eval");
    read(e, "unfamiliar_reference", a.eval.unfamiliar_reference, "eval");
    read(e, "unfamiliar_limit", a.eval.unfamiliar_limit, "eval");
  }
  if (j.contains("kstar")) {
    const Json& k = j.at("kstar");
    only_keys(k, "kstar", {"blend", "numeric_scale", "symbolic_cardinality"});
    read(k, "blend", a.kstar.blend, "kstar");
    read(k, "numeric_scale", a.kstar.numeric_scale, "kstar");
    read(k, "symbolic_cardinality", a.kstar.symbolic_cardinality, "kstar");
  }
}

}  // namespace detail

inline void check_top_level(const Json& j) {
  detail::only_keys(j, "config",
                    {"seed", "history_capacity", "match_epsilon", "feedback", "eval", "kstar",
                     "ontology", "hand", "mountain"});
}

/// Overlays `j` on `cfg`. Validation is left to the caller.
inline void apply_config(const Json& j, HandConfig& cfg) {
  check_top_level(j);
  detail::apply_common(j, cfg.apprentice, cfg.seed, cfg.history_capacity);
  if (j.contains("ontology")) {
    const Json& o = j.at("ontology");
    detail::only_keys(o, "ontology", {"tasks"});
    std::map<std::string, std::set<std::string>> tasks;
    detail::read(o, "tasks", tasks, "ontology");
    try {
      cfg.ontology = TaskOntology(std::move(tasks));
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("ontology: ") + e.what());
    }
  }
  if (!j.contains("hand")) return;
  const Json& h = j.at("hand");
  const std::string w = "hand";
  detail::only_keys(h, w,
                    {"setting", "steps", "experts", "action_mode", "expert_choice",
                     "min_sequence_length", "max_sequence_length", "apprentice_sequence",
                     "expert_sequences", "task"});
  detail::read_enum(h, "setting", cfg.setting, w,
                    {{"exp1", HandSetting::Exp1}, {"exp2", HandSetting::Exp2}});
  detail::read(h, "steps", cfg.steps, w);
  detail::read(h, "experts", cfg.experts, w);
  detail::read_enum(h, "action_mode", cfg.action_mode, w,
                    {{"finger", hand::ActionMode::Finger},
                     {"composite", hand::ActionMode::Composite}});
  detail::read_enum(h, "expert_choice", cfg.expert_choice, w,
                    {{"random", hand::ExpertChoice::Random},
                     {"first", hand::ExpertChoice::FirstInOrder}});
  detail::read(h, "min_sequence_length", cfg.min_sequence_length, w);
  detail::read(h, "max_sequence_length", cfg.max_sequence_length, w);
  if (h.contains("apprentice_sequence")) {
    std::vector<int> s;
    detail::read(h, "apprentice_sequence", s, w);
    cfg.apprentice_sequence = std::move(s);
  }
  detail::read(h, "expert_sequences", cfg.expert_sequences, w);
  if (h.contains("task")) {
    std::string t;
    detail::read(h, "task", t, w);
    cfg.task = t;
  }
}

inline void apply_config(const Json& j, MountainConfig& cfg) {
  check_top_level(j);
  detail::apply_common(j, cfg.apprentice, cfg.seed, cfg.history_capacity);
  if (!j.contains("mountain")) return;
  const Json& m = j.at("mountain");
  const std::string w = "mountain";
  detail::only_keys(m, w, {"agent", "attempts", "max_steps", "experts", "physics", "q"});
  detail::read_enum(m, "agent", cfg.agent, w,
                    {{"expert", MountainAgent::Expert},
                     {"lbo", MountainAgent::Lbo},
                     {"rl", MountainAgent::Rl}});
  detail::read(m, "attempts", cfg.attempts, w);
  detail::read(m, "max_steps", cfg.max_steps, w);
  detail::read(m, "experts", cfg.experts, w);
  if (m.contains("physics")) {
    const Json& p = m.at("physics");
    const std::string pw = "mountain.physics";
    detail::only_keys(p, pw,
                      {"x_min", "x_max", "v_max", "force", "gravity_coeff", "goal_position",
                       "start_position"});
    auto& ph = cfg.physics;
    detail::read(p, "x_min", ph.x_min, pw);
    detail::read(p, "x_max", ph.x_max, pw);
    detail::read(p, "v_max", ph.v_max, pw);
    detail::read(p, "force", ph.force, pw);
    detail::read(p, "gravity_coeff", ph.gravity_coeff, pw);
    detail::read(p, "goal_position", ph.goal_position, pw);
    detail::read(p, "start_position", ph.start_position, pw);
  }
  if (m.contains("q")) {
    const Json& q = m.at("q");
    const std::string qw = "mountain.q";
    detail::only_keys(q, qw,
                      {"alpha", "gamma", "decay", "epsilon", "initial_q", "position_bins",
                       "velocity_bins"});
    detail::read(q, "alpha", cfg.q.alpha, qw);
    detail::read(q, "gamma", cfg.q.gamma, qw);
    detail::read(q, "decay", cfg.q.decay, qw);
    detail::read(q, "epsilon", cfg.q.epsilon, qw);
    detail::read(q, "initial_q", cfg.q.initial_q, qw);
    detail::read(q, "position_bins", cfg.q.position_bins, qw);
    detail::read(q, "velocity_bins", cfg.q.velocity_bins, qw);
  }
}

}  // namespace lbo::harness
