// SPDX-License-Identifier: Apache-2.0
#include "windcast/reference.hpp"

#include <cmath>
#include <vector>

#include "windcast/error.hpp"

namespace windcast {

namespace {

using Real = long double;
using Vec = std::vector<Real>;

Real sig(Real x) { return 1.0L / (1.0L + std::exp(-x)); }

// W x + U h + b for gate rows, with W (d_h x d_in) and U (d_h x d_h) flat row-major.
Vec affine(const Vec& w, const Vec& u, const Vec& b, const Vec& x, const Vec& h) {
  const std::size_t d_h = b.size(), d_in = x.size();
  Vec out(d_h);
  for (std::size_t r = 0; r < d_h; ++r) {
    Real s = b[r];
    for (std::size_t c = 0; c < d_in; ++c) s += w[r * d_in + c] * x[c];
    for (std::size_t c = 0; c < d_h; ++c) s += u[r * d_h + c] * h[c];
    out[r] = s;
  }
  return out;
}

Vec widen(const Tensor2& t) { return Vec(t.data().begin(), t.data().end()); }

}  // namespace

long double reference_prediction(const StackedModel& model, const Window& w,
                                 std::span<const CellState> initial_states,
                                 std::optional<Perturbation> perturbation) {
  const ModelConfig& cfg = model.config();
  if (initial_states.size() != cfg.layers) {
    throw DimensionError("reference_prediction: need one initial state per layer");
  }
  if (w.features.rows() != cfg.lookback || w.features.cols() != cfg.input_width) {
    throw DimensionError("reference_prediction: window shape " + w.features.shape_string());
  }

  std::vector<Vec> p;
  for (const Tensor2* t : model.params().tensors()) p.push_back(widen(*t));
  if (perturbation) {
    std::size_t index = perturbation->index;
    bool applied = false;
    for (Vec& v : p) {
      if (index < v.size()) {
        v[index] += perturbation->delta;
        applied = true;
        break;
      }
      index -= v.size();
    }
    if (!applied) throw DimensionError("reference_prediction: perturbation index out of range");
  }

  const bool lstm = cfg.cell == CellKind::Lstm;
  const std::size_t per_layer = lstm ? 12 : 9;
  const std::size_t d_h = cfg.hidden_width;

  std::vector<Vec> h(cfg.layers), c(cfg.layers);
  for (std::size_t k = 0; k < cfg.layers; ++k) {
    h[k] = widen(initial_states[k].h);
    c[k] = lstm ? widen(initial_states[k].c) : Vec(d_h, 0.0L);
  }

  for (std::size_t t = 0; t < cfg.lookback; ++t) {
    Vec x(cfg.input_width);
    for (std::size_t j = 0; j < cfg.input_width; ++j) x[j] = w.features(t, j);
    for (std::size_t k = 0; k < cfg.layers; ++k) {
      const Vec* g = &p[k * per_layer];
      if (lstm) {
        const Vec ai = affine(g[0], g[1], g[2], x, h[k]);
        const Vec af = affine(g[3], g[4], g[5], x, h[k]);
        const Vec ag = affine(g[6], g[7], g[8], x, h[k]);
        const Vec ao = affine(g[9], g[10], g[11], x, h[k]);
        for (std::size_t j = 0; j < d_h; ++j) {
          c[k][j] = sig(af[j]) * c[k][j] + sig(ai[j]) * std::tanh(ag[j]);
          h[k][j] = sig(ao[j]) * std::tanh(c[k][j]);
        }
      } else {
        const Vec az = affine(g[0], g[1], g[2], x, h[k]);
        const Vec ar = affine(g[3], g[4], g[5], x, h[k]);
        Vec rh(d_h);
        for (std::size_t j = 0; j < d_h; ++j) rh[j] = sig(ar[j]) * h[k][j];
        const Vec ah = affine(g[6], g[7], g[8], x, rh);
        for (std::size_t j = 0; j < d_h; ++j) {
          const Real z = sig(az[j]);
          h[k][j] = (1.0L - z) * h[k][j] + z * std::tanh(ah[j]);
        }
      }
      x = h[k];
    }
  }

  const Vec& head_w = p[p.size() - 2];
  Real out = p.back()[0];
  for (std::size_t j = 0; j < d_h; ++j) out += head_w[j] * h.back()[j];
  return out;
}

long double reference_loss(const StackedModel& model, const Window& w,
                           std::span<const CellState> initial_states,
                           std::optional<Perturbation> perturbation) {
  const Real r = reference_prediction(model, w, initial_states, perturbation) - w.target;
  return r * r;
}

}  // namespace windcast
