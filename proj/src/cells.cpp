// SPDX-License-Identifier: Apache-2.0
#include "windcast/cells.hpp"

#include <cmath>
#include <string>

#include "windcast/error.hpp"

namespace windcast {

namespace {

void check_gate(const char* cell, const GateParams& g, std::size_t d_in, std::size_t d_h) {
  if (g.input.rows() != d_h || g.input.cols() != d_in || g.recurrent.rows() != d_h ||
      g.recurrent.cols() != d_h || g.bias.rows() != d_h || g.bias.cols() != 1) {
    throw DimensionError(std::string(cell) + ": inconsistent gate shapes W" +
                         g.input.shape_string() + " U" + g.recurrent.shape_string() + " b" +
                         g.bias.shape_string());
  }
}

void check_column(const char* cell, const char* name, const Tensor2& v, std::size_t n) {
  if (v.rows() != n || v.cols() != 1) {
    throw DimensionError(std::string(cell) + ": " + name + " has shape " + v.shape_string() +
                         ", expected (" + std::to_string(n) + "x1)");
  }
}

template <typename Params>
void check_params(const char* cell, const Params& p) {
  const std::size_t d_in = p.input_width();
  const std::size_t d_h = p.hidden_width();
  for (const GateParams* g : p.gates()) check_gate(cell, *g, d_in, d_h);
}

// W x + U h + b
Tensor2 preactivation(const GateParams& g, const Tensor2& x, const Tensor2& h) {
  Tensor2 a = matmul(g.input, x);
  add_in_place(a, matmul(g.recurrent, h));
  add_in_place(a, g.bias);
  return a;
}

void accumulate_gate(GateParams& acc, const Tensor2& da, const Tensor2& x, const Tensor2& h) {
  add_outer_product(acc.input, da, x);
  add_outer_product(acc.recurrent, da, h);
  add_in_place(acc.bias, da);
}

}  // namespace

GateParams GateParams::zeros(std::size_t input_width, std::size_t hidden_width) {
  return {Tensor2(hidden_width, input_width), Tensor2(hidden_width, hidden_width),
          Tensor2(hidden_width, 1)};
}

LstmParams LstmParams::zeros(std::size_t input_width, std::size_t hidden_width) {
  return {GateParams::zeros(input_width, hidden_width), GateParams::zeros(input_width, hidden_width),
          GateParams::zeros(input_width, hidden_width), GateParams::zeros(input_width, hidden_width)};
}

GruParams GruParams::zeros(std::size_t input_width, std::size_t hidden_width) {
  return {GateParams::zeros(input_width, hidden_width), GateParams::zeros(input_width, hidden_width),
          GateParams::zeros(input_width, hidden_width)};
}

CellState CellState::zeros(std::size_t hidden_width, bool with_cell) {
  CellState s;
  s.h = Tensor2(hidden_width, 1);
  if (with_cell) s.c = Tensor2(hidden_width, 1);
  return s;
}

LstmStep lstm_forward(const Tensor2& x, const CellState& prev, const LstmParams& p) {
  check_params("lstm_forward", p);
  const std::size_t d_h = p.hidden_width();
  check_column("lstm_forward", "x", x, p.input_width());
  check_column("lstm_forward", "h", prev.h, d_h);
  check_column("lstm_forward", "c", prev.c, d_h);

  LstmStep step;
  LstmCache& k = step.cache;
  k.x = x;
  k.h_prev = prev.h;
  k.c_prev = prev.c;
  k.input_gate = sigmoid(preactivation(p.input_gate, x, prev.h));
  k.forget_gate = sigmoid(preactivation(p.forget_gate, x, prev.h));
  k.candidate = tanh(preactivation(p.candidate, x, prev.h));
  k.output_gate = sigmoid(preactivation(p.output_gate, x, prev.h));

  Tensor2 c(d_h, 1);
  for (std::size_t j = 0; j < d_h; ++j) {
    c[j] = k.forget_gate[j] * prev.c[j] + k.input_gate[j] * k.candidate[j];
  }
  k.tanh_c = tanh(c);
  step.next.h = hadamard(k.output_gate, k.tanh_c);
  step.next.c = std::move(c);
  return step;
}

GruStep gru_forward(const Tensor2& x, const CellState& prev, const GruParams& p) {
  check_params("gru_forward", p);
  const std::size_t d_h = p.hidden_width();
  check_column("gru_forward", "x", x, p.input_width());
  check_column("gru_forward", "h", prev.h, d_h);

  GruStep step;
  GruCache& k = step.cache;
  k.x = x;
  k.h_prev = prev.h;
  k.update_gate = sigmoid(preactivation(p.update_gate, x, prev.h));
  k.reset_gate = sigmoid(preactivation(p.reset_gate, x, prev.h));
  k.reset_h = hadamard(k.reset_gate, prev.h);
  k.candidate = tanh(preactivation(p.candidate, x, k.reset_h));

  Tensor2 h(d_h, 1);
  for (std::size_t j = 0; j < d_h; ++j) {
    const double z = k.update_gate[j];
    h[j] = (1.0 - z) * prev.h[j] + z * k.candidate[j];
  }
  step.next.h = std::move(h);
  return step;
}

StepInputGradients lstm_backward_accumulate(const LstmCache& k, const Tensor2& dh,
                                            const Tensor2& dc, const LstmParams& p,
                                            LstmParams& accum) {
  check_params("lstm_backward", p);
  const std::size_t d_h = p.hidden_width();
  check_column("lstm_backward", "dh", dh, d_h);
  check_column("lstm_backward", "dc", dc, d_h);
  check_column("lstm_backward", "cache.x", k.x, p.input_width());
  check_column("lstm_backward", "cache.h_prev", k.h_prev, d_h);

  Tensor2 da_i(d_h, 1), da_f(d_h, 1), da_g(d_h, 1), da_o(d_h, 1);
  StepInputGradients out;
  out.dprev.c = Tensor2(d_h, 1);
  for (std::size_t j = 0; j < d_h; ++j) {
    const double i = k.input_gate[j], f = k.forget_gate[j], g = k.candidate[j],
                 o = k.output_gate[j], tc = k.tanh_c[j];
    const double dc_total = dc[j] + dh[j] * o * (1.0 - tc * tc);
    da_o[j] = dh[j] * tc * o * (1.0 - o);
    da_i[j] = dc_total * g * i * (1.0 - i);
    da_f[j] = dc_total * k.c_prev[j] * f * (1.0 - f);
    da_g[j] = dc_total * i * (1.0 - g * g);
    out.dprev.c[j] = dc_total * f;
  }

  accumulate_gate(accum.input_gate, da_i, k.x, k.h_prev);
  accumulate_gate(accum.forget_gate, da_f, k.x, k.h_prev);
  accumulate_gate(accum.candidate, da_g, k.x, k.h_prev);
  accumulate_gate(accum.output_gate, da_o, k.x, k.h_prev);

  out.dx = matmul_at(p.input_gate.input, da_i);
  add_in_place(out.dx, matmul_at(p.forget_gate.input, da_f));
  add_in_place(out.dx, matmul_at(p.candidate.input, da_g));
  add_in_place(out.dx, matmul_at(p.output_gate.input, da_o));

  out.dprev.h = matmul_at(p.input_gate.recurrent, da_i);
  add_in_place(out.dprev.h, matmul_at(p.forget_gate.recurrent, da_f));
  add_in_place(out.dprev.h, matmul_at(p.candidate.recurrent, da_g));
  add_in_place(out.dprev.h, matmul_at(p.output_gate.recurrent, da_o));
  return out;
}

StepInputGradients gru_backward_accumulate(const GruCache& k, const Tensor2& dh,
                                           const GruParams& p, GruParams& accum) {
  check_params("gru_backward", p);
  const std::size_t d_h = p.hidden_width();
  check_column("gru_backward", "dh", dh, d_h);
  check_column("gru_backward", "cache.x", k.x, p.input_width());
  check_column("gru_backward", "cache.h_prev", k.h_prev, d_h);

  Tensor2 da_z(d_h, 1), da_h(d_h, 1);
  for (std::size_t j = 0; j < d_h; ++j) {
    const double z = k.update_gate[j], cand = k.candidate[j];
    da_z[j] = dh[j] * (cand - k.h_prev[j]) * z * (1.0 - z);
    da_h[j] = dh[j] * z * (1.0 - cand * cand);
  }
  const Tensor2 d_reset_h = matmul_at(p.candidate.recurrent, da_h);
  Tensor2 da_r(d_h, 1);
  for (std::size_t j = 0; j < d_h; ++j) {
    const double r = k.reset_gate[j];
    da_r[j] = d_reset_h[j] * k.h_prev[j] * r * (1.0 - r);
  }

  accumulate_gate(accum.update_gate, da_z, k.x, k.h_prev);
  accumulate_gate(accum.reset_gate, da_r, k.x, k.h_prev);
  accumulate_gate(accum.candidate, da_h, k.x, k.reset_h);

  StepInputGradients out;
  out.dx = matmul_at(p.update_gate.input, da_z);
  add_in_place(out.dx, matmul_at(p.reset_gate.input, da_r));
  add_in_place(out.dx, matmul_at(p.candidate.input, da_h));

  out.dprev.h = matmul_at(p.update_gate.recurrent, da_z);
  add_in_place(out.dprev.h, matmul_at(p.reset_gate.recurrent, da_r));
  for (std::size_t j = 0; j < d_h; ++j) {
    out.dprev.h[j] += dh[j] * (1.0 - k.update_gate[j]) + d_reset_h[j] * k.reset_gate[j];
  }
  return out;
}

LstmGradients lstm_backward(const LstmCache& cache, const Tensor2& dh, const Tensor2& dc,
                            const LstmParams& p) {
  LstmGradients out;
  out.params = LstmParams::zeros(p.input_width(), p.hidden_width());
  auto in = lstm_backward_accumulate(cache, dh, dc, p, out.params);
  out.dx = std::move(in.dx);
  out.dprev = std::move(in.dprev);
  return out;
}

GruGradients gru_backward(const GruCache& cache, const Tensor2& dh, const GruParams& p) {
  GruGradients out;
  out.params = GruParams::zeros(p.input_width(), p.hidden_width());
  auto in = gru_backward_accumulate(cache, dh, p, out.params);
  out.dx = std::move(in.dx);
  out.dprev = std::move(in.dprev);
  return out;
}

}  // namespace windcast
