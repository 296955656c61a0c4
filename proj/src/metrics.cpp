// SPDX-License-Identifier: Apache-2.0
#include "windcast/metrics.hpp"

#include <cmath>
#include <string>

#include "windcast/error.hpp"

namespace windcast {

double mse(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size()) {
    throw DimensionError("mse: " + std::to_string(predicted.size()) + " predictions vs " +
                         std::to_string(actual.size()) + " actual values");
  }
  if (predicted.empty()) throw ParameterError("mse: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - actual[i];
    sum += d * d;
  }
  return sum / static_cast<double>(predicted.size());
}

double rmse(std::span<const double> predicted, std::span<const double> actual) {
  return std::sqrt(mse(predicted, actual));
}

}  // namespace windcast
