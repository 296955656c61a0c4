// SPDX-License-Identifier: Apache-2.0
//
// Single-timestep LSTM and GRU cells with hand-derived backward passes.
//
// All vectors are columns. With x the (d_in x 1) input, h/c the prior state:
//
// LSTM (no peepholes):
//   i  = sigmoid(W_i x + U_i h + b_i)      input gate
//   f  = sigmoid(W_f x + U_f h + b_f)      forget gate
//   g  = tanh   (W_g x + U_g h + b_g)      candidate
//   o  = sigmoid(W_o x + U_o h + b_o)      output gate
//   c' = f*c + i*g
//   h' = o*tanh(c')
//
// GRU (reset applied to h before the recurrent product):
//   z  = sigmoid(W_z x + U_z h + b_z)      update gate
//   r  = sigmoid(W_r x + U_r h + b_r)      reset gate
//   h~ = tanh   (W_h x + U_h (r*h) + b_h)  candidate
//   h' = (1 - z)*h + z*h~
//
// `*` is the elementwise product. The backward passes follow by the chain rule;
// with upstream gradients dh (and dc for the LSTM):
//
// LSTM:
//   dc_tot = dc + dh*o*(1 - tanh(c')^2)
//   da_o = dh*tanh(c')*o*(1-o)     da_i = dc_tot*g*i*(1-i)
//   da_f = dc_tot*c*f*(1-f)        da_g = dc_tot*i*(1-g^2)
//   dW_k += da_k x^T,  dU_k += da_k h^T,  db_k += da_k
//   dx = sum_k W_k^T da_k,  dh_prev = sum_k U_k^T da_k,  dc_prev = dc_tot*f
//
// GRU:
//   da_h = dh*z*(1 - h~^2)          d(r*h) = U_h^T da_h
//   da_z = dh*(h~ - h)*z*(1-z)      da_r = d(r*h)*h*r*(1-r)
//   dW_h += da_h x^T,  dU_h += da_h (r*h)^T,  dW_{z,r} += da x^T, dU_{z,r} += da h^T
//   dx = W_z^T da_z + W_r^T da_r + W_h^T da_h
//   dh_prev = dh*(1-z) + d(r*h)*r + U_z^T da_z + U_r^T da_r
#pragma once

#include <array>
#include <cstddef>

#include "windcast/tensor.hpp"

namespace windcast {

/// Input weights (d_h x d_in), recurrent weights (d_h x d_h), bias (d_h x 1) of one gate.
struct GateParams {
  Tensor2 input;
  Tensor2 recurrent;
  Tensor2 bias;

  static GateParams zeros(std::size_t input_width, std::size_t hidden_width);
};

struct LstmParams {
  GateParams input_gate;
  GateParams forget_gate;
  GateParams candidate;
  GateParams output_gate;

  static LstmParams zeros(std::size_t input_width, std::size_t hidden_width);

  std::array<GateParams*, 4> gates() { return {&input_gate, &forget_gate, &candidate, &output_gate}; }
  std::array<const GateParams*, 4> gates() const {
    return {&input_gate, &forget_gate, &candidate, &output_gate};
  }
  std::size_t input_width() const noexcept { return input_gate.input.cols(); }
  std::size_t hidden_width() const noexcept { return input_gate.input.rows(); }
};

struct GruParams {
  GateParams update_gate;
  GateParams reset_gate;
  GateParams candidate;

  static GruParams zeros(std::size_t input_width, std::size_t hidden_width);

  std::array<GateParams*, 3> gates() { return {&update_gate, &reset_gate, &candidate}; }
  std::array<const GateParams*, 3> gates() const { return {&update_gate, &reset_gate, &candidate}; }
  std::size_t input_width() const noexcept { return update_gate.input.cols(); }
  std::size_t hidden_width() const noexcept { return update_gate.input.rows(); }
};

/// Recurrent state of one layer. `c` is empty for GRU layers.
struct CellState {
  Tensor2 h;
  Tensor2 c;

  static CellState zeros(std::size_t hidden_width, bool with_cell);
};

struct LstmCache {
  Tensor2 x;
  Tensor2 h_prev;
  Tensor2 c_prev;
  Tensor2 input_gate;
  Tensor2 forget_gate;
  Tensor2 candidate;
  Tensor2 output_gate;
  Tensor2 tanh_c;
};

struct GruCache {
  Tensor2 x;
  Tensor2 h_prev;
  Tensor2 update_gate;
  Tensor2 reset_gate;
  Tensor2 reset_h;  // r * h_prev
  Tensor2 candidate;
};

struct LstmStep {
  CellState next;
  LstmCache cache;
};

struct GruStep {
  CellState next;
  GruCache cache;
};

/// Gradients flowing out of a step towards its inputs.
struct StepInputGradients {
  Tensor2 dx;
  CellState dprev;
};

struct LstmGradients {
  LstmParams params;
  Tensor2 dx;
  CellState dprev;
};

struct GruGradients {
  GruParams params;
  Tensor2 dx;
  CellState dprev;
};

LstmStep lstm_forward(const Tensor2& x, const CellState& prev, const LstmParams& p);
GruStep gru_forward(const Tensor2& x, const CellState& prev, const GruParams& p);

LstmGradients lstm_backward(const LstmCache& cache, const Tensor2& dh, const Tensor2& dc,
                            const LstmParams& p);
GruGradients gru_backward(const GruCache& cache, const Tensor2& dh, const GruParams& p);

/// As lstm_backward, but adds the parameter gradients into `accum` instead of
/// returning a fresh set. BPTT uses this to sum over timesteps.
StepInputGradients lstm_backward_accumulate(const LstmCache& cache, const Tensor2& dh,
                                            const Tensor2& dc, const LstmParams& p,
                                            LstmParams& accum);
StepInputGradients gru_backward_accumulate(const GruCache& cache, const Tensor2& dh,
                                           const GruParams& p, GruParams& accum);

}  // namespace windcast
