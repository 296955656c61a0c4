// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "windcast/network.hpp"

namespace windcast {

/// Offset added to one scalar parameter, by canonical index (ParameterSet::tensors order).
struct Perturbation {
  std::size_t index = 0;
  long double delta = 0.0L;
};

/// Squared-error loss of `model` on `w`, evaluated by a plain scalar-loop
/// implementation of the cell equations in extended precision, starting from
/// `initial_states`. Shares no code with forward_window; it is the numeric side
/// of gradient checking.
long double reference_loss(const StackedModel& model, const Window& w,
                           std::span<const CellState> initial_states,
                           std::optional<Perturbation> perturbation = std::nullopt);

/// Prediction from the same scalar-loop path.
long double reference_prediction(const StackedModel& model, const Window& w,
                                 std::span<const CellState> initial_states,
                                 std::optional<Perturbation> perturbation = std::nullopt);

}  // namespace windcast
