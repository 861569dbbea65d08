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

// Observable self-description of an agent.
//
// The static image lists the agent's parts with their sensors, visible
// attributes and actuators. The dynamic image is a bounded history of
// snapshots (conditions + action) plus a notification channel that delivers
// every new snapshot to its subscribers. The ImageIndex is the shared
// discovery registry where agents publish both.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "lbo/detail/format.hpp"
#include "lbo/errors.hpp"

namespace lbo {

/// Ontology term naming a part, sensor, attribute, actuator, action or task.
class Designation {
 public:
  explicit Designation(std::string name) : name_(std::move(name)) {
    if (name_.empty()) throw InvalidArgument("designation must not be empty");
  }

  const std::string& str() const { return name_; }

  friend bool operator==(const Designation&, const Designation&) = default;
  friend auto operator<=>(const Designation&, const Designation&) = default;

 private:
  std::string name_;
};

// ---------------------------------------------------------------------------
// Actions

/// A simple action, or a composite made of an ordered, non-empty sequence of
/// actions. Composites may nest.
class ActionSpec {
 public:
  static ActionSpec simple(Designation d) { return ActionSpec(std::move(d), {}); }

  static ActionSpec composite(Designation d, std::vector<ActionSpec> steps) {
    if (steps.empty()) throw InvalidArgument("composite action " + d.str() + " has no steps");
    return ActionSpec(std::move(d), std::move(steps));
  }

  const Designation& designation() const { return designation_; }
  bool is_simple() const { return steps_.empty(); }
  const std::vector<ActionSpec>& steps() const { return steps_; }

  /// Canonical text form: `name` for a simple action, `name(a,b,...)` for a
  /// composite. Two actions are equal iff their canonical forms are equal.
  std::string to_string() const {
    std::string out = designation_.str();
    if (!steps_.empty()) {
      out += '(';
      for (std::size_t i = 0; i < steps_.size(); ++i) {
        if (i) out += ',';
        out += steps_[i].to_string();
      }
      out += ')';
    }
    return out;
  }

  friend bool operator==(const ActionSpec& a, const ActionSpec& b) {
    if (a.designation_ != b.designation_ || a.steps_.size() != b.steps_.size()) return false;
    for (std::size_t i = 0; i < a.steps_.size(); ++i)
      if (!(a.steps_[i] == b.steps_[i])) return false;
    return true;
  }

 private:
  ActionSpec(Designation d, std::vector<ActionSpec> steps)
      : designation_(std::move(d)), steps_(std::move(steps)) {}

  Designation designation_;
  std::vector<ActionSpec> steps_;
};

namespace detail {
inline void flatten_into(const ActionSpec& a, std::vector<ActionSpec>& out) {
  if (a.is_simple()) {
    out.push_back(a);
    return;
  }
  for (const auto& s : a.steps()) flatten_into(s, out);
}
}  // namespace detail

/// Depth-first, left-to-right expansion into simple actions.
inline std::vector<ActionSpec> flatten(const ActionSpec& action) {
  std::vector<ActionSpec> out;
  detail::flatten_into(action, out);
  return out;
}

// ---------------------------------------------------------------------------
// Static image

struct ActuatorSpec {
  Designation designation;
  std::vector<ActionSpec> actions;
};

struct PartSpec {
  Designation designation;
  std::vector<Designation> sensors;
  std::vector<Designation> visible_attributes;
  std::vector<ActuatorSpec> actuators;
};

namespace detail {
template <typename T, typename Key>
void require_unique(const std::vector<T>& items, Key key, const std::string& what) {
  std::set<std::string> seen;
  for (const auto& it : items)
    if (!seen.insert(key(it)).second) throw InvalidArgument("duplicate " + what + ": " + key(it));
}
}  // namespace detail

class StaticImage {
 public:
  explicit StaticImage(std::vector<PartSpec> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) throw InvalidArgument("static image needs at least one part");
    auto name = [](const auto& x) { return x.designation.str(); };
    auto plain = [](const Designation& d) { return d.str(); };
    detail::require_unique(parts_, name, "part");
    for (const auto& p : parts_) {
      detail::require_unique(p.sensors, plain, "sensor in part " + p.designation.str());
      detail::require_unique(p.visible_attributes, plain,
                             "visible attribute in part " + p.designation.str());
      detail::require_unique(p.actuators, name, "actuator in part " + p.designation.str());
      for (const auto& act : p.actuators)
        detail::require_unique(act.actions,
                               [](const ActionSpec& a) { return a.designation().str(); },
                               "action in actuator " + act.designation.str());
    }
  }

  const std::vector<PartSpec>& parts() const { return parts_; }

  /// Keys every ConditionSet produced by this agent must carry: all sensor
  /// and visible-attribute designations.
  std::set<std::string> condition_keys() const {
    std::set<std::string> keys;
    for (const auto& p : parts_) {
      for (const auto& s : p.sensors) keys.insert(s.str());
      for (const auto& v : p.visible_attributes) keys.insert(v.str());
    }
    return keys;
  }

  /// Every designation appearing anywhere in the image, actions included
  /// (composite steps too).
  std::set<std::string> elements() const {
    std::set<std::string> out;
    for (const auto& p : parts_) {
      out.insert(p.designation.str());
      for (const auto& s : p.sensors) out.insert(s.str());
      for (const auto& v : p.visible_attributes) out.insert(v.str());
      for (const auto& act : p.actuators) {
        out.insert(act.designation.str());
        for (const auto& a : act.actions) add_action(a, out);
      }
    }
    return out;
  }

  /// Order-insensitive structural form used for image comparison.
  std::string canonical() const {
    std::vector<std::string> parts;
    for (const auto& p : parts_) {
      auto sorted = [](const std::vector<Designation>& ds) {
        std::vector<std::string> v;
        for (const auto& d : ds) v.push_back(d.str());
        std::sort(v.begin(), v.end());
        return join(v);
      };
      std::vector<std::string> acts;
      for (const auto& act : p.actuators) {
        std::vector<std::string> as;
        for (const auto& a : act.actions) as.push_back(a.to_string());
        std::sort(as.begin(), as.end());
        acts.push_back(act.designation.str() + "{" + join(as) + "}");
      }
      std::sort(acts.begin(), acts.end());
      parts.push_back(p.designation.str() + "[s:" + sorted(p.sensors) +
                      "|v:" + sorted(p.visible_attributes) + "|a:" + join(acts) + "]");
    }
    std::sort(parts.begin(), parts.end());
    return join(parts);
  }

 private:
  static void add_action(const ActionSpec& a, std::set<std::string>& out) {
    out.insert(a.designation().str());
    for (const auto& s : a.steps()) add_action(s, out);
  }

  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ';';
      out += v[i];
    }
    return out;
  }

  std::vector<PartSpec> parts_;
};

/// True iff both images have the same structure and designations at every
/// level, ignoring the order of items within each collection.
inline bool compare_static(const StaticImage& a, const StaticImage& b) {
  return a.canonical() == b.canonical();
}

/// Task name -> designations an agent pair must share to learn the task.
class TaskOntology {
 public:
  TaskOntology() = default;
  explicit TaskOntology(std::map<std::string, std::set<std::string>> requirements)
      : requirements_(std::move(requirements)) {
    for (const auto& [task, reqs] : requirements_) {
      Designation check(task);
      for (const auto& r : reqs) Designation check_req(r);
    }
  }

  void add_task(const Designation& task, std::set<std::string> required) {
    for (const auto& r : required) Designation check(r);
    requirements_[task.str()] = std::move(required);
  }

  bool has_task(const Designation& task) const { return requirements_.contains(task.str()); }

  const std::set<std::string>& required(const Designation& task) const {
    auto it = requirements_.find(task.str());
    if (it == requirements_.end()) throw UnknownTask(task.str());
    return it->second;
  }

  const std::map<std::string, std::set<std::string>>& tasks() const { return requirements_; }

 private:
  std::map<std::string, std::set<std::string>> requirements_;
};

/// True iff every designation the task requires appears in both images.
inline bool supports_task(const StaticImage& a, const StaticImage& b, const Designation& task,
                          const TaskOntology& ont) {
  const auto& req = ont.required(task);
  if (req.empty()) return true;
  const auto ea = a.elements();
  const auto eb = b.elements();
  return std::all_of(req.begin(), req.end(),
                     [&](const std::string& r) { return ea.contains(r) && eb.contains(r); });
}

// ---------------------------------------------------------------------------
// Conditions and snapshots

/// A symbolic (string) or numeric reading.
using ConditionValue = std::variant<std::string, double>;

inline bool values_match(const ConditionValue& a, const ConditionValue& b, double eps) {
  if (a.index() != b.index()) return false;
  if (const auto* s = std::get_if<std::string>(&a)) return *s == std::get<std::string>(b);
  return std::fabs(std::get<double>(a) - std::get<double>(b)) <= eps;
}

inline std::string value_to_string(const ConditionValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return detail::format_double(std::get<double>(v));
}

/// Readings of every sensor and visible attribute, keyed by designation.
class ConditionSet {
 public:
  ConditionSet() = default;
  ConditionSet(std::initializer_list<std::pair<const std::string, ConditionValue>> init) {
    for (const auto& [k, v] : init) set(k, v);
  }

  ConditionSet& set(const std::string& key, ConditionValue value) {
    Designation check(key);
    if (const auto* d = std::get_if<double>(&value); d && !std::isfinite(*d))
      throw InvalidArgument("numeric condition " + key + " is not finite");
    entries_.insert_or_assign(key, std::move(value));
    return *this;
  }

  const std::map<std::string, ConditionValue>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const ConditionValue& at(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw InvalidArgument("no condition named " + key);
    return it->second;
  }

  bool same_keys(const ConditionSet& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    return std::equal(entries_.begin(), entries_.end(), other.entries_.begin(),
                      [](const auto& x, const auto& y) { return x.first == y.first; });
  }

  std::set<std::string> keys() const {
    std::set<std::string> out;
    for (const auto& [k, v] : entries_) out.insert(k);
    return out;
  }

  /// `key=value;key=value` in key order.
  std::string to_string() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
      if (!out.empty()) out += ';';
      out += k + '=' + value_to_string(v);
    }
    return out;
  }

  friend bool operator==(const ConditionSet&, const ConditionSet&) = default;

 private:
  std::map<std::string, ConditionValue> entries_;
};

/// Same keys and every value matching within `eps`.
inline bool same_conditions(const ConditionSet& a, const ConditionSet& b, double eps) {
  if (!a.same_keys(b)) return false;
  auto ib = b.entries().begin();
  for (const auto& [k, va] : a.entries()) {
    if (!values_match(va, ib->second, eps)) return false;
    ++ib;
  }
  return true;
}

inline void validate_conditions(const StaticImage& image, const ConditionSet& c) {
  if (c.keys() != image.condition_keys())
    throw InvalidArgument("conditions {" + c.to_string() + "} do not match the image's sensors");
}

struct Snapshot {
  std::uint64_t seq = 0;
  ActionSpec action;
  ConditionSet conditions;
};

// ---------------------------------------------------------------------------
// Dynamic image

using SnapshotCallback = std::function<void(const Snapshot&)>;

/// Bounded snapshot history with synchronous notification. Subscribers are
/// called while the image lock is held, so a callback must not call back into
/// the same image.
class DynamicImage {
 public:
  static constexpr std::size_t kDefaultCapacity = 500;

  explicit DynamicImage(std::size_t capacity = kDefaultCapacity,
                        std::optional<std::set<std::string>> condition_keys = std::nullopt)
      : capacity_(capacity), condition_keys_(std::move(condition_keys)) {
    if (capacity_ == 0) throw InvalidArgument("history capacity must be positive");
  }

  DynamicImage(const DynamicImage&) = delete;
  DynamicImage& operator=(const DynamicImage&) = delete;

  std::uint64_t record_snapshot(ActionSpec action, ConditionSet conditions) {
    if (condition_keys_ && conditions.keys() != *condition_keys_)
      throw InvalidArgument("snapshot conditions do not match the owner's sensors");
    std::lock_guard lock(mu_);
    Snapshot s{next_seq_++, std::move(action), std::move(conditions)};
    if (history_.size() == capacity_) history_.pop_front();
    history_.push_back(s);
    for (auto& [id, cb] : subscribers_) cb(s);
    return s.seq;
  }

  std::vector<Snapshot> read_history() const {
    std::lock_guard lock(mu_);
    return {history_.begin(), history_.end()};
  }

  std::uint64_t subscribe(SnapshotCallback cb) {
    std::lock_guard lock(mu_);
    const auto id = next_sub_++;
    subscribers_.emplace(id, std::move(cb));
    return id;
  }

  /// Returns false when the id was not subscribed.
  bool unsubscribe(std::uint64_t id) {
    std::lock_guard lock(mu_);
    return subscribers_.erase(id) > 0;
  }

  std::size_t subscriber_count() const {
    std::lock_guard lock(mu_);
    return subscribers_.size();
  }

  std::size_t capacity() const { return capacity_; }

  std::uint64_t next_seq() const {
    std::lock_guard lock(mu_);
    return next_seq_;
  }

 private:
  mutable std::mutex mu_;
  std::size_t capacity_;
  std::optional<std::set<std::string>> condition_keys_;
  std::deque<Snapshot> history_;
  std::uint64_t next_seq_ = 0;
  std::map<std::uint64_t, SnapshotCallback> subscribers_;
  std::uint64_t next_sub_ = 0;
};

// ---------------------------------------------------------------------------
// Discovery index

struct Subscription {
  std::string target;
  std::uint64_t id = 0;
};

/// Shared registry of software images. Readers run concurrently; mutations
/// are serialized.
class ImageIndex {
 public:
  void register_image(const std::string& agent_id, StaticImage image,
                      std::shared_ptr<DynamicImage> dynamic) {
    if (!dynamic) throw InvalidArgument("null dynamic image for " + agent_id);
    std::unique_lock lock(mu_);
    if (find_entry(agent_id)) throw DuplicateRegistration(agent_id);
    entries_.push_back(Entry{agent_id, std::move(image), std::move(dynamic), {}});
  }

  void deregister(const std::string& agent_id) {
    std::unique_lock lock(mu_);
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [&](const Entry& e) { return e.id == agent_id; });
    if (it == entries_.end()) throw UnknownAgent(agent_id);
    for (auto sub : it->subscriptions) it->dynamic->unsubscribe(sub);
    entries_.erase(it);
  }

  bool contains(const std::string& agent_id) const {
    std::shared_lock lock(mu_);
    return find_entry(agent_id) != nullptr;
  }

  /// Registered agents the observer could learn from, in registration order.
  /// Without a task the images must match exactly; with a task they only
  /// need to share the task's required elements.
  std::vector<std::string> find_candidates(const StaticImage& observer,
                                           const std::optional<Designation>& task,
                                           const TaskOntology& ont,
                                           std::string_view observer_id = {}) const {
    std::shared_lock lock(mu_);
    std::vector<std::string> out;
    for (const auto& e : entries_) {
      if (e.id == observer_id) continue;
      const bool ok = task ? supports_task(observer, e.image, *task, ont)
                           : compare_static(observer, e.image);
      if (ok) out.push_back(e.id);
    }
    return out;
  }

  Subscription subscribe(const std::string& target, SnapshotCallback cb) {
    std::unique_lock lock(mu_);
    Entry* e = find_entry(target);
    if (!e) throw UnknownAgent(target);
    const auto id = e->dynamic->subscribe(std::move(cb));
    e->subscriptions.push_back(id);
    return {target, id};
  }

  void unsubscribe(const Subscription& sub) {
    std::unique_lock lock(mu_);
    Entry* e = find_entry(sub.target);
    if (!e) return;
    std::erase(e->subscriptions, sub.id);
    e->dynamic->unsubscribe(sub.id);
  }

  std::shared_ptr<DynamicImage> dynamic_image(const std::string& agent_id) const {
    std::shared_lock lock(mu_);
    const Entry* e = find_entry(agent_id);
    if (!e) throw UnknownAgent(agent_id);
    return e->dynamic;
  }

  StaticImage static_image(const std::string& agent_id) const {
    std::shared_lock lock(mu_);
    const Entry* e = find_entry(agent_id);
    if (!e) throw UnknownAgent(agent_id);
    return e->image;
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return entries_.size();
  }

 private:
  struct Entry {
    std::string id;
    StaticImage image;
    std::shared_ptr<DynamicImage> dynamic;
    std::vector<std::uint64_t> subscriptions;
  };

  Entry* find_entry(std::string_view id) {
    for (auto& e : entries_)
      if (e.id == id) return &e;
    return nullptr;
  }
  const Entry* find_entry(std::string_view id) const {
    for (const auto& e : entries_)
      if (e.id == id) return &e;
    return nullptr;
  }

  mutable std::shared_mutex mu_;
  std::vector<Entry> entries_;
};

}  // namespace lbo
