// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace windcast {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A numeric argument is outside its domain (lo >= hi, negative rate, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Input file is structurally malformed (missing header column, bad magic).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Input data is well-formed but unusable (all-missing feature, constant feature).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Configuration validation failed. Carries every problem found, not just the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  explicit ConfigError(const std::string& problem) : ConfigError(std::vector<std::string>{problem}) {}

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Training loss became non-finite.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t epoch, const std::string& detail);

  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

}  // namespace windcast
