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

#include <stdexcept>
#include <string>

namespace lbo {

// Base of every error raised by the library. Callers that do not care about
// the kind can catch this one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownTask : public Error {
 public:
  explicit UnknownTask(const std::string& task) : Error("unknown task: " + task) {}
};

class DuplicateRegistration : public Error {
 public:
  explicit DuplicateRegistration(const std::string& id)
      : Error("agent already registered: " + id) {}
};

class UnknownAgent : public Error {
 public:
  explicit UnknownAgent(const std::string& id) : Error("unknown agent: " + id) {}
};

class KeyMismatch : public Error {
 public:
  KeyMismatch() : Error("condition sets have different keys") {}
};

class UnknownId : public Error {
 public:
  explicit UnknownId(long long id) : Error("unknown experience id: " + std::to_string(id)) {}
};

class PhaseViolation : public Error {
 public:
  explicit PhaseViolation(const std::string& what) : Error("phase violation: " + what) {}
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace lbo
