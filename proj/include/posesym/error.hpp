// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The posesym Authors

#pragma once

#include <stdexcept>
#include <string>

namespace posesym {

/// Failure categories. The numeric values double as CLI exit codes.
enum class ErrorKind : int {
  usage = 1,      // bad arguments or configuration
  data = 2,       // malformed or inconsistent input data
  numerical = 3,  // solver divergence, ambiguous projection, etc.
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::numerical, what) {}
};

}  // namespace posesym
