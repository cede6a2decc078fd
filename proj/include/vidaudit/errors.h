// Copyright 2026 The vidaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VIDAUDIT_ERRORS_H_
#define VIDAUDIT_ERRORS_H_

#include <stdexcept>
#include <string>
#include <utility>

namespace vidaudit {

// Root of every error thrown by the library. The `kind()` string is stable
// and is what the CLI prints in its machine-readable diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

// Tensor or field dimensions disagree.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& message) : Error("shape", message) {}
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message)
      : Error("domain", message) {}
};

// Invalid or vacuous audit configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error("config", message) {}
};

// Malformed on-disk data (bad magic, truncated payload, bad JSON).
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& message)
      : Error("format", message) {}
};

// Manifest, dataset and pair disagree about which samples exist.
class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& message)
      : Error("integrity", message) {}
};

// An oracle could not answer a query.
class QueryError : public Error {
 public:
  explicit QueryError(const std::string& message, bool retryable = false)
      : Error("query", message), retryable_(retryable) {}

  bool retryable() const { return retryable_; }

 protected:
  QueryError(std::string kind, const std::string& message)
      : Error(std::move(kind), message), retryable_(false) {}

 private:
  bool retryable_;
};

// A file-backed oracle has no entry for the requested key.
class MissingPredictionError : public QueryError {
 public:
  explicit MissingPredictionError(const std::string& key)
      : QueryError("missing_prediction",
                   "no stored prediction for '" + key + "'"),
        key_(key) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// The per-audit query budget is exhausted.
class BudgetError : public Error {
 public:
  explicit BudgetError(const std::string& message)
      : Error("budget", message) {}
};

}  // namespace vidaudit

#endif  // VIDAUDIT_ERRORS_H_
