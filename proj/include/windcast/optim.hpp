// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "windcast/network.hpp"
#include "windcast/tensor.hpp"

namespace windcast {

struct AdamHyper {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

/// First/second moment estimates, one pair per parameter tensor.
class AdamState {
 public:
  explicit AdamState(std::span<const Tensor2* const> shapes);
  explicit AdamState(const ParameterSet& params) : AdamState(params.tensors()) {}

  std::uint64_t step() const noexcept { return step_; }
  const std::vector<Tensor2>& first_moment() const noexcept { return m_; }
  const std::vector<Tensor2>& second_moment() const noexcept { return v_; }

 private:
  friend void adam_step(std::span<Tensor2* const>, std::span<const Tensor2* const>, AdamState&,
                        const AdamHyper&);

  std::vector<Tensor2> m_;
  std::vector<Tensor2> v_;
  std::uint64_t step_ = 0;
};

/// One bias-corrected Adam update of every tensor in `params`.
void adam_step(std::span<Tensor2* const> params, std::span<const Tensor2* const> grads,
               AdamState& state, const AdamHyper& hp);
void adam_step(ParameterSet& params, const ParameterSet& grads, AdamState& state,
               const AdamHyper& hp);

double global_norm(std::span<const Tensor2* const> tensors);

/// Scales all tensors jointly so their global L2 norm is at most `max_norm`.
/// Returns the norm before clipping. Tensors are untouched when already within bounds.
double clip_global_norm(std::span<Tensor2* const> grads, double max_norm);
double clip_global_norm(ParameterSet& grads, double max_norm);

using GradientFn = std::function<WindowGradients(StackedModel&, const Window&)>;

struct GradCheckOptions {
  double epsilon = 1e-5;
  /// Models with more scalars than this are checked on a random subsample.
  std::size_t full_check_limit = 5000;
  std::size_t sample_size = 200;
  std::uint64_t sample_seed = 1;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t parameters_checked = 0;
  /// Canonical scalar index (see ParameterSet::tensors) of the worst entry.
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// Compares analytic gradients against central differences
/// (loss(theta + eps) - loss(theta - eps)) / 2 eps, scalar by scalar, reporting
/// max |a - n| / max(|a|, |n|, 1e-8). Losses for the differences come from
/// reference_loss (extended precision). Every evaluation starts from the
/// model's current persisted states; the model itself is not modified.
GradCheckResult grad_check(const StackedModel& model, const Window& w, GradCheckOptions options = {},
                           const GradientFn& analytic = bptt_window);

}  // namespace windcast
