// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

namespace windcast {

/// Mean of squared differences. Throws DimensionError on length mismatch and
/// ParameterError on empty input.
double mse(std::span<const double> predicted, std::span<const double> actual);
double rmse(std::span<const double> predicted, std::span<const double> actual);

}  // namespace windcast
