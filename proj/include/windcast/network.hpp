// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "windcast/cells.hpp"
#include "windcast/tensor.hpp"

namespace windcast {

enum class CellKind { Lstm, Gru };
enum class StateMode { Stateless, Stateful };

std::string_view to_string(CellKind kind) noexcept;
std::string_view to_string(StateMode mode) noexcept;
/// Case-insensitive; throws ConfigError listing the allowed values.
CellKind parse_cell_kind(std::string_view text);
StateMode parse_state_mode(std::string_view text);

struct ModelConfig {
  CellKind cell = CellKind::Lstm;
  StateMode mode = StateMode::Stateless;
  std::size_t layers = 10;
  std::size_t input_width = 9;
  std::size_t hidden_width = 32;
  std::size_t lookback = 24;
  std::uint64_t seed = 42;

  /// Throws ConfigError naming every violated constraint.
  void validate() const;
  /// "Stateless LSTM", "Stateful GRU", ...
  std::string label() const;
};

using LayerParams = std::variant<LstmParams, GruParams>;

/// Every trainable tensor of a stacked model. The same type carries gradients.
///
/// tensors() fixes the canonical parameter order used by the optimizer,
/// checkpoints and gradient checking: for each layer, each gate in declaration
/// order (input, recurrent, bias), then the head weights, then the head bias.
struct ParameterSet {
  std::vector<LayerParams> layers;
  Tensor2 head_weights;  // 1 x d_h
  Tensor2 head_bias;     // 1 x 1

  std::vector<Tensor2*> tensors();
  std::vector<const Tensor2*> tensors() const;
  std::size_t scalar_count() const;

  static ParameterSet zeros_like(const ParameterSet& other);
};

/// One training example: T consecutive hours of features and the next hour's target.
struct Window {
  Tensor2 features;  // T x d_i
  double target = 0.0;
  std::chrono::sys_seconds target_time{};
};

class StackedModel {
 public:
  StackedModel(ModelConfig config, ParameterSet params);

  const ModelConfig& config() const noexcept { return config_; }
  ParameterSet& params() noexcept { return params_; }
  const ParameterSet& params() const noexcept { return params_; }

  /// Per-layer states carried between windows. All zero in stateless mode.
  const std::vector<CellState>& persisted_states() const noexcept { return states_; }
  /// Throws DimensionError unless there is one state per layer with the model's shapes.
  void set_persisted_states(std::vector<CellState> states);

 private:
  ModelConfig config_;
  ParameterSet params_;
  std::vector<CellState> states_;
};

using StepCache = std::variant<LstmCache, GruCache>;

struct WindowPass {
  double prediction = 0.0;
  /// caches[layer][t]
  std::vector<std::vector<StepCache>> caches;
  Tensor2 top_hidden;
};

struct WindowGradients {
  double loss = 0.0;
  double prediction = 0.0;
  ParameterSet grads;
};

/// Weights uniform in [-1/sqrt(d_h), 1/sqrt(d_h)), biases zero, states zero.
StackedModel build_model(const ModelConfig& config);

/// Runs the stack over the window's T rows. Stateless models start from zero
/// state; stateful models start from the persisted states and store the final
/// step's states back.
WindowPass forward_window(StackedModel& model, const Window& w);
double predict(StackedModel& model, const Window& w);
void reset_states(StackedModel& model);

/// Forward pass plus backpropagation through all T steps and all layers of the
/// loss (prediction - target)^2. The incoming persisted state of a stateful
/// model is treated as a constant.
WindowGradients bptt_window(StackedModel& model, const Window& w);

/// Features and target uniform in [0, 1); used by gradient checks and tests.
Window random_window(std::uint64_t seed, std::size_t lookback, std::size_t input_width);

}  // namespace windcast
