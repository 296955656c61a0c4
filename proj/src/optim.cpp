// SPDX-License-Identifier: Apache-2.0
#include "windcast/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "windcast/error.hpp"
#include "windcast/reference.hpp"
#include "windcast/rng.hpp"

namespace windcast {

void AdamHyper::validate() const {
  std::vector<std::string> problems;
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    problems.push_back("learning rate must be > 0");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0)) problems.push_back("beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) problems.push_back("beta2 must lie in [0, 1)");
  if (!(epsilon > 0.0)) problems.push_back("epsilon must be > 0");
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

AdamState::AdamState(std::span<const Tensor2* const> shapes) {
  m_.reserve(shapes.size());
  v_.reserve(shapes.size());
  for (const Tensor2* t : shapes) {
    m_.push_back(Tensor2::zeros_like(*t));
    v_.push_back(Tensor2::zeros_like(*t));
  }
}

void adam_step(std::span<Tensor2* const> params, std::span<const Tensor2* const> grads,
               AdamState& state, const AdamHyper& hp) {
  if (params.size() != grads.size() || params.size() != state.m_.size()) {
    throw DimensionError("adam_step: " + std::to_string(params.size()) + " parameters, " +
                         std::to_string(grads.size()) + " gradients, " +
                         std::to_string(state.m_.size()) + " moment slots");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->same_shape(*grads[i]) || !params[i]->same_shape(state.m_[i])) {
      throw DimensionError("adam_step: tensor " + std::to_string(i) + " shape mismatch " +
                           params[i]->shape_string() + " vs gradient " + grads[i]->shape_string());
    }
  }

  ++state.step_;
  const double t = static_cast<double>(state.step_);
  const double correction1 = 1.0 - std::pow(hp.beta1, t);
  const double correction2 = 1.0 - std::pow(hp.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto theta = params[i]->data();
    const auto g = grads[i]->data();
    auto m = state.m_[i].data();
    auto v = state.v_[i].data();
    for (std::size_t j = 0; j < theta.size(); ++j) {
      m[j] = hp.beta1 * m[j] + (1.0 - hp.beta1) * g[j];
      v[j] = hp.beta2 * v[j] + (1.0 - hp.beta2) * g[j] * g[j];
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      theta[j] -= hp.learning_rate * m_hat / (std::sqrt(v_hat) + hp.epsilon);
    }
  }
}

void adam_step(ParameterSet& params, const ParameterSet& grads, AdamState& state,
               const AdamHyper& hp) {
  const auto p = params.tensors();
  const auto g = grads.tensors();
  adam_step(std::span<Tensor2* const>(p), std::span<const Tensor2* const>(g), state, hp);
}

double global_norm(std::span<const Tensor2* const> tensors) {
  double sum = 0.0;
  for (const Tensor2* t : tensors) sum += squared_norm(*t);
  return std::sqrt(sum);
}

double clip_global_norm(std::span<Tensor2* const> grads, double max_norm) {
  if (!(max_norm > 0.0)) throw ParameterError("clip_global_norm: max_norm must be > 0");
  double sum = 0.0;
  for (const Tensor2* t : grads) sum += squared_norm(*t);
  const double norm = std::sqrt(sum);
  if (norm <= max_norm) return norm;
  const double scale = max_norm / norm;
  for (Tensor2* t : grads) {
    for (double& v : t->data()) v *= scale;
  }
  return norm;
}

double clip_global_norm(ParameterSet& grads, double max_norm) {
  const auto g = grads.tensors();
  return clip_global_norm(std::span<Tensor2* const>(g), max_norm);
}

GradCheckResult grad_check(const StackedModel& model, const Window& w, GradCheckOptions options,
                           const GradientFn& analytic) {
  if (!(options.epsilon > 0.0)) throw ParameterError("grad_check: epsilon must be > 0");

  const std::vector<CellState> initial_states = model.persisted_states();
  StackedModel probe = model;
  const WindowGradients reference = analytic(probe, w);

  std::vector<double> flat_grads;
  for (const Tensor2* t : reference.grads.tensors()) {
    flat_grads.insert(flat_grads.end(), t->data().begin(), t->data().end());
  }
  const std::size_t n_params = model.params().scalar_count();
  if (flat_grads.size() != n_params) {
    throw DimensionError("grad_check: gradient count does not match parameter count");
  }

  std::vector<std::size_t> indices(n_params);
  std::iota(indices.begin(), indices.end(), 0);
  if (indices.size() > options.full_check_limit) {
    // Partial Fisher-Yates: the first sample_size entries become a uniform sample.
    Rng rng(options.sample_seed);
    const std::size_t n = std::min(options.sample_size, indices.size());
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i + rng.below(indices.size() - i);
      std::swap(indices[i], indices[j]);
    }
    indices.resize(n);
    std::sort(indices.begin(), indices.end());
  }

  // Losses are evaluated in extended precision by the scalar reference path, so
  // round-off stays far below the truncation error of the central difference.
  const long double eps = options.epsilon;
  GradCheckResult result;
  for (std::size_t index : indices) {
    const long double plus = reference_loss(model, w, initial_states, Perturbation{index, eps});
    const long double minus = reference_loss(model, w, initial_states, Perturbation{index, -eps});
    const double numeric = static_cast<double>((plus - minus) / (2.0L * eps));
    const double a = flat_grads[index];
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
    const double rel = std::abs(a - numeric) / denom;
    if (rel > result.max_relative_error || result.parameters_checked == 0) {
      result.max_relative_error = rel;
      result.worst_index = index;
      result.worst_analytic = a;
      result.worst_numeric = numeric;
    }
    ++result.parameters_checked;
  }
  return result;
}

}  // namespace windcast
