// SPDX-License-Identifier: Apache-2.0
#include "windcast/error.hpp"

namespace windcast {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out;
  for (const auto& p : problems) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error(join_problems(problems)), problems_(std::move(problems)) {}

DivergenceError::DivergenceError(std::size_t epoch, const std::string& detail)
    : Error("training diverged in epoch " + std::to_string(epoch) + ": " + detail),
      epoch_(epoch) {}

}  // namespace windcast
