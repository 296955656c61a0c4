// SPDX-License-Identifier: Apache-2.0
#include "windcast/network.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "windcast/error.hpp"
#include "windcast/rng.hpp"

namespace windcast {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

template <typename Params>
void push_gate_tensors(Params& p, auto& out) {
  for (auto* g : p.gates()) {
    out.push_back(&g->input);
    out.push_back(&g->recurrent);
    out.push_back(&g->bias);
  }
}

GateParams random_gate(Rng& rng, std::size_t d_in, std::size_t d_h, double bound) {
  GateParams g;
  g.input = rng.uniform_tensor(d_h, d_in, -bound, bound);
  g.recurrent = rng.uniform_tensor(d_h, d_h, -bound, bound);
  g.bias = Tensor2(d_h, 1);
  return g;
}

std::size_t layer_input_width(const ModelConfig& c, std::size_t layer) {
  return layer == 0 ? c.input_width : c.hidden_width;
}

std::vector<CellState> zero_states(const ModelConfig& c) {
  return std::vector<CellState>(c.layers, CellState::zeros(c.hidden_width, c.cell == CellKind::Lstm));
}

}  // namespace

std::string_view to_string(CellKind kind) noexcept {
  return kind == CellKind::Lstm ? "LSTM" : "GRU";
}

std::string_view to_string(StateMode mode) noexcept {
  return mode == StateMode::Stateless ? "stateless" : "stateful";
}

CellKind parse_cell_kind(std::string_view text) {
  const std::string u = upper(text);
  if (u == "LSTM") return CellKind::Lstm;
  if (u == "GRU") return CellKind::Gru;
  throw ConfigError("unknown cell kind \"" + std::string(text) + "\" (allowed: LSTM, GRU)");
}

StateMode parse_state_mode(std::string_view text) {
  const std::string u = upper(text);
  if (u == "STATELESS") return StateMode::Stateless;
  if (u == "STATEFUL") return StateMode::Stateful;
  throw ConfigError("unknown state mode \"" + std::string(text) +
                    "\" (allowed: stateless, stateful)");
}

void ModelConfig::validate() const {
  std::vector<std::string> problems;
  if (layers < 1) problems.push_back("model.layers must be >= 1");
  if (input_width < 1) problems.push_back("model.input_width must be >= 1");
  if (hidden_width < 1) problems.push_back("model.hidden must be >= 1");
  if (lookback < 1) problems.push_back("model.lookback must be >= 1");
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

std::string ModelConfig::label() const {
  return std::string(mode == StateMode::Stateless ? "Stateless " : "Stateful ") +
         std::string(to_string(cell));
}

std::vector<Tensor2*> ParameterSet::tensors() {
  std::vector<Tensor2*> out;
  for (auto& layer : layers) {
    std::visit([&](auto& p) { push_gate_tensors(p, out); }, layer);
  }
  out.push_back(&head_weights);
  out.push_back(&head_bias);
  return out;
}

std::vector<const Tensor2*> ParameterSet::tensors() const {
  std::vector<const Tensor2*> out;
  for (const auto& layer : layers) {
    std::visit([&](const auto& p) { push_gate_tensors(p, out); }, layer);
  }
  out.push_back(&head_weights);
  out.push_back(&head_bias);
  return out;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const Tensor2* t : tensors()) n += t->size();
  return n;
}

ParameterSet ParameterSet::zeros_like(const ParameterSet& other) {
  ParameterSet out;
  out.layers.reserve(other.layers.size());
  for (const auto& layer : other.layers) {
    std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          out.layers.emplace_back(P::zeros(p.input_width(), p.hidden_width()));
        },
        layer);
  }
  out.head_weights = Tensor2::zeros_like(other.head_weights);
  out.head_bias = Tensor2::zeros_like(other.head_bias);
  return out;
}

StackedModel::StackedModel(ModelConfig config, ParameterSet params)
    : config_(config), params_(std::move(params)), states_(zero_states(config_)) {
  config_.validate();
  if (params_.layers.size() != config_.layers) {
    throw DimensionError("model has " + std::to_string(params_.layers.size()) +
                         " layers, config says " + std::to_string(config_.layers));
  }
  for (std::size_t k = 0; k < params_.layers.size(); ++k) {
    const bool is_lstm = std::holds_alternative<LstmParams>(params_.layers[k]);
    if (is_lstm != (config_.cell == CellKind::Lstm)) {
      throw DimensionError("layer " + std::to_string(k) + " cell kind does not match config");
    }
    std::visit(
        [&](const auto& p) {
          if (p.input_width() != layer_input_width(config_, k) ||
              p.hidden_width() != config_.hidden_width) {
            throw DimensionError("layer " + std::to_string(k) + " has input width " +
                                 std::to_string(p.input_width()) + " and hidden width " +
                                 std::to_string(p.hidden_width()) + ", inconsistent with config");
          }
        },
        params_.layers[k]);
  }
  if (params_.head_weights.rows() != 1 || params_.head_weights.cols() != config_.hidden_width ||
      params_.head_bias.rows() != 1 || params_.head_bias.cols() != 1) {
    throw DimensionError("head shapes " + params_.head_weights.shape_string() + " / " +
                         params_.head_bias.shape_string() + " inconsistent with config");
  }
}

void StackedModel::set_persisted_states(std::vector<CellState> states) {
  if (states.size() != config_.layers) {
    throw DimensionError("expected " + std::to_string(config_.layers) + " layer states, got " +
                         std::to_string(states.size()));
  }
  const bool with_cell = config_.cell == CellKind::Lstm;
  for (const auto& s : states) {
    const bool h_ok = s.h.rows() == config_.hidden_width && s.h.cols() == 1;
    const bool c_ok = with_cell ? (s.c.rows() == config_.hidden_width && s.c.cols() == 1) : s.c.empty();
    if (!h_ok || !c_ok) {
      throw DimensionError("layer state shapes h" + s.h.shape_string() + " c" +
                           s.c.shape_string() + " inconsistent with config");
    }
  }
  states_ = std::move(states);
}

StackedModel build_model(const ModelConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(config.hidden_width));
  ParameterSet params;
  params.layers.reserve(config.layers);
  for (std::size_t k = 0; k < config.layers; ++k) {
    const std::size_t d_in = layer_input_width(config, k);
    const std::size_t d_h = config.hidden_width;
    if (config.cell == CellKind::Lstm) {
      LstmParams p;
      for (GateParams* g : p.gates()) *g = random_gate(rng, d_in, d_h, bound);
      params.layers.emplace_back(std::move(p));
    } else {
      GruParams p;
      for (GateParams* g : p.gates()) *g = random_gate(rng, d_in, d_h, bound);
      params.layers.emplace_back(std::move(p));
    }
  }
  params.head_weights = rng.uniform_tensor(1, config.hidden_width, -bound, bound);
  params.head_bias = Tensor2(1, 1);
  return StackedModel(config, std::move(params));
}

WindowPass forward_window(StackedModel& model, const Window& w) {
  const ModelConfig& cfg = model.config();
  if (w.features.rows() != cfg.lookback || w.features.cols() != cfg.input_width) {
    throw DimensionError("forward_window: window features " + w.features.shape_string() +
                         " do not match lookback x input width (" + std::to_string(cfg.lookback) +
                         "x" + std::to_string(cfg.input_width) + ")");
  }
  std::vector<CellState> states =
      cfg.mode == StateMode::Stateful ? model.persisted_states() : zero_states(cfg);

  WindowPass pass;
  pass.caches.resize(cfg.layers);
  for (auto& per_layer : pass.caches) per_layer.reserve(cfg.lookback);

  const auto& layers = model.params().layers;
  for (std::size_t t = 0; t < cfg.lookback; ++t) {
    Tensor2 x = w.features.row_as_column(t);
    for (std::size_t k = 0; k < cfg.layers; ++k) {
      if (const auto* lstm = std::get_if<LstmParams>(&layers[k])) {
        LstmStep step = lstm_forward(x, states[k], *lstm);
        pass.caches[k].emplace_back(std::move(step.cache));
        states[k] = std::move(step.next);
      } else {
        GruStep step = gru_forward(x, states[k], std::get<GruParams>(layers[k]));
        pass.caches[k].emplace_back(std::move(step.cache));
        states[k] = std::move(step.next);
      }
      x = states[k].h;
    }
  }

  pass.top_hidden = states.back().h;
  pass.prediction = matmul(model.params().head_weights, pass.top_hidden)[0] +
                    model.params().head_bias[0];
  if (cfg.mode == StateMode::Stateful) model.set_persisted_states(std::move(states));
  return pass;
}

double predict(StackedModel& model, const Window& w) { return forward_window(model, w).prediction; }

void reset_states(StackedModel& model) { model.set_persisted_states(zero_states(model.config())); }

WindowGradients bptt_window(StackedModel& model, const Window& w) {
  WindowPass pass = forward_window(model, w);
  const ModelConfig& cfg = model.config();
  const ParameterSet& params = model.params();

  WindowGradients out;
  out.prediction = pass.prediction;
  const double residual = pass.prediction - w.target;
  out.loss = residual * residual;
  out.grads = ParameterSet::zeros_like(params);

  const double dpred = 2.0 * residual;
  for (std::size_t j = 0; j < cfg.hidden_width; ++j) {
    out.grads.head_weights[j] = dpred * pass.top_hidden[j];
  }
  out.grads.head_bias[0] = dpred;

  const std::size_t d_h = cfg.hidden_width;
  std::vector<Tensor2> dh_carry(cfg.layers, Tensor2(d_h, 1));
  std::vector<Tensor2> dc_carry(cfg.layers, Tensor2(d_h, 1));
  const Tensor2 no_gradient(d_h, 1);

  for (std::size_t t = cfg.lookback; t-- > 0;) {
    Tensor2 from_above =
        t + 1 == cfg.lookback ? scaled(transpose(params.head_weights), dpred) : no_gradient;
    for (std::size_t k = cfg.layers; k-- > 0;) {
      Tensor2 dh = dh_carry[k] + from_above;
      StepInputGradients in;
      if (const auto* lstm = std::get_if<LstmParams>(&params.layers[k])) {
        in = lstm_backward_accumulate(std::get<LstmCache>(pass.caches[k][t]), dh, dc_carry[k],
                                      *lstm, std::get<LstmParams>(out.grads.layers[k]));
        dc_carry[k] = std::move(in.dprev.c);
      } else {
        in = gru_backward_accumulate(std::get<GruCache>(pass.caches[k][t]), dh,
                                     std::get<GruParams>(params.layers[k]),
                                     std::get<GruParams>(out.grads.layers[k]));
      }
      dh_carry[k] = std::move(in.dprev.h);
      from_above = std::move(in.dx);
    }
  }
  return out;
}

Window random_window(std::uint64_t seed, std::size_t lookback, std::size_t input_width) {
  Rng rng(seed);
  Window w;
  w.features = rng.uniform_tensor(lookback, input_width, 0.0, 1.0);
  w.target = rng.uniform01();
  return w;
}

}  // namespace windcast
