// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "windcast/cells.hpp"
#include "windcast/error.hpp"

using namespace windcast;

namespace {

constexpr std::size_t kIn = 3;
constexpr std::size_t kHidden = 4;

LstmParams random_lstm(std::mt19937_64& gen, double scale = 1.0) {
  LstmParams p = LstmParams::zeros(kIn, kHidden);
  for (GateParams* g : p.gates()) oracle::randomize(*g, gen, scale);
  return p;
}

GruParams random_gru(std::mt19937_64& gen, double scale = 1.0) {
  GruParams p = GruParams::zeros(kIn, kHidden);
  for (GateParams* g : p.gates()) oracle::randomize(*g, gen, scale);
  return p;
}

CellState random_state(std::mt19937_64& gen, bool with_cell) {
  return {oracle::random_tensor(gen, kHidden, 1, 1.0),
          with_cell ? oracle::random_tensor(gen, kHidden, 1, 1.0) : Tensor2{}};
}

bool all_zero(const Tensor2& t) {
  for (double v : t.data()) {
    if (v != 0.0) return false;
  }
  return true;
}

template <typename Params>
bool params_all_zero(const Params& p) {
  for (const GateParams* g : p.gates()) {
    if (!all_zero(g->input) || !all_zero(g->recurrent) || !all_zero(g->bias)) return false;
  }
  return true;
}

template <typename Params>
bool params_bitwise_equal(const Params& a, const Params& b) {
  const auto ga = a.gates();
  const auto gb = b.gates();
  for (std::size_t k = 0; k < ga.size(); ++k) {
    if (!bitwise_equal(ga[k]->input, gb[k]->input) || !bitwise_equal(ga[k]->recurrent, gb[k]->recurrent) ||
        !bitwise_equal(ga[k]->bias, gb[k]->bias)) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("lstm zero parameters") {
  const LstmParams p = LstmParams::zeros(kIn, kHidden);
  const Tensor2 x = Tensor2::from_rows({{0.3}, {-1.2}, {4.0}});
  {
    const LstmStep s = lstm_forward(x, CellState::zeros(kHidden, true), p);
    CHECK(all_zero(s.next.h));
    CHECK(all_zero(s.next.c));
  }
  {
    const CellState prev{Tensor2(kHidden, 1), Tensor2(kHidden, 1, 1.0)};
    const LstmStep s = lstm_forward(x, prev, p);
    for (std::size_t k = 0; k < kHidden; ++k) {
      CHECK(s.next.c[k] == doctest::Approx(0.5).epsilon(1e-15));
      CHECK(s.next.h[k] == doctest::Approx(0.5 * std::tanh(0.5)).epsilon(1e-15));
      CHECK(std::fabs(s.next.h[k] - 0.231) < 5e-4);
    }
  }
}

TEST_CASE("gru zero parameters and saturated update gate") {
  GruParams p = GruParams::zeros(kIn, kHidden);
  const Tensor2 x = Tensor2::from_rows({{0.3}, {-1.2}, {4.0}});
  const CellState prev{Tensor2(kHidden, 1, 1.0), Tensor2{}};
  const GruStep s = gru_forward(x, prev, p);
  for (std::size_t k = 0; k < kHidden; ++k) CHECK(s.next.h[k] == 0.5);
  CHECK(s.next.c.empty());

  p.update_gate.bias = Tensor2(kHidden, 1, 50.0);
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 10; ++trial) {
    const CellState any{oracle::random_tensor(gen, kHidden, 1, 5.0), Tensor2{}};
    const GruStep t = gru_forward(x, any, p);
    for (std::size_t k = 0; k < kHidden; ++k) CHECK(std::fabs(t.next.h[k]) < 1e-15);
  }
}

TEST_CASE("lstm memory carry with saturated gates") {
  LstmParams p = LstmParams::zeros(kIn, kHidden);
  p.forget_gate.bias = Tensor2(kHidden, 1, 50.0);
  p.input_gate.bias = Tensor2(kHidden, 1, -50.0);
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 10; ++trial) {
    const CellState prev = random_state(gen, true);
    const LstmStep s = lstm_forward(oracle::random_tensor(gen, kIn, 1, 1.0), prev, p);
    for (std::size_t k = 0; k < kHidden; ++k) CHECK(std::fabs(s.next.c[k] - prev.c[k]) < 1e-9);
  }
}

TEST_CASE("cells match the scalar-loop oracle") {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 20; ++trial) {
    const LstmParams lp = random_lstm(gen);
    const CellState prev = random_state(gen, true);
    const Tensor2 x = oracle::random_tensor(gen, kIn, 1, 2.0);
    const LstmStep s = lstm_forward(x, prev, lp);
    const oracle::LState ref = oracle::lstm_step(lp, oracle::to_lvec(x), {oracle::to_lvec(prev.h), oracle::to_lvec(prev.c)});
    for (std::size_t k = 0; k < kHidden; ++k) {
      CHECK(std::fabs(s.next.h[k] - static_cast<double>(ref.h[k])) < 1e-12);
      CHECK(std::fabs(s.next.c[k] - static_cast<double>(ref.c[k])) < 1e-12);
    }

    const GruParams gp = random_gru(gen);
    const CellState gprev = random_state(gen, false);
    const GruStep g = gru_forward(x, gprev, gp);
    const oracle::LVec gref = oracle::gru_step(gp, oracle::to_lvec(x), oracle::to_lvec(gprev.h));
    for (std::size_t k = 0; k < kHidden; ++k) CHECK(std::fabs(g.next.h[k] - static_cast<double>(gref[k])) < 1e-12);
  }
}

// Pre-activations here stay below 11 in magnitude; double rounds tanh to +-1
// from about 19.1 on, so strictness is only checked where it is representable.
TEST_CASE("gate activations stay strictly inside their ranges") {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 200; ++trial) {
    const LstmParams lp = random_lstm(gen, 1.0);
    const Tensor2 x = oracle::random_tensor(gen, kIn, 1, 2.0);
    const LstmStep s = lstm_forward(x, random_state(gen, true), lp);
    for (const Tensor2* gate : {&s.cache.input_gate, &s.cache.forget_gate, &s.cache.output_gate}) {
      for (double v : gate->data()) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
      }
    }
    for (double v : s.cache.candidate.data()) {
      CHECK(v > -1.0);
      CHECK(v < 1.0);
    }
    const GruStep g = gru_forward(x, random_state(gen, false), random_gru(gen, 1.0));
    for (const Tensor2* gate : {&g.cache.update_gate, &g.cache.reset_gate}) {
      for (double v : gate->data()) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
      }
    }
    for (double v : g.cache.candidate.data()) {
      CHECK(v > -1.0);
      CHECK(v < 1.0);
    }
  }
}

TEST_CASE("zero upstream gradient gives zero gradients") {
  std::mt19937_64 gen(3);
  const Tensor2 x = oracle::random_tensor(gen, kIn, 1, 1.0);
  const Tensor2 zero(kHidden, 1);

  const LstmParams lp = random_lstm(gen);
  const LstmStep s = lstm_forward(x, random_state(gen, true), lp);
  const LstmGradients lg = lstm_backward(s.cache, zero, zero, lp);
  CHECK(params_all_zero(lg.params));
  CHECK(all_zero(lg.dx));
  CHECK(all_zero(lg.dprev.h));
  CHECK(all_zero(lg.dprev.c));

  const GruParams gp = random_gru(gen);
  const GruStep g = gru_forward(x, random_state(gen, false), gp);
  const GruGradients gg = gru_backward(g.cache, zero, gp);
  CHECK(params_all_zero(gg.params));
  CHECK(all_zero(gg.dx));
  CHECK(all_zero(gg.dprev.h));
}

TEST_CASE("backward is linear in the upstream gradient") {
  std::mt19937_64 gen(31);
  const Tensor2 x = oracle::random_tensor(gen, kIn, 1, 1.0);
  const Tensor2 dh = oracle::random_tensor(gen, kHidden, 1, 1.0);
  const Tensor2 zero(kHidden, 1);

  auto doubled = [](const GateParams& a, const GateParams& b) {
    return bitwise_equal(scaled(a.input, 2.0), b.input) && bitwise_equal(scaled(a.recurrent, 2.0), b.recurrent) &&
           bitwise_equal(scaled(a.bias, 2.0), b.bias);
  };

  const LstmParams lp = random_lstm(gen);
  const LstmStep s = lstm_forward(x, random_state(gen, true), lp);
  const LstmGradients one = lstm_backward(s.cache, dh, zero, lp);
  const LstmGradients two = lstm_backward(s.cache, scaled(dh, 2.0), zero, lp);
  for (std::size_t k = 0; k < 4; ++k) CHECK(doubled(*one.params.gates()[k], *two.params.gates()[k]));
  CHECK(bitwise_equal(scaled(one.dx, 2.0), two.dx));
  CHECK(bitwise_equal(scaled(one.dprev.h, 2.0), two.dprev.h));
  CHECK(bitwise_equal(scaled(one.dprev.c, 2.0), two.dprev.c));

  const GruParams gp = random_gru(gen);
  const GruStep g = gru_forward(x, random_state(gen, false), gp);
  const GruGradients g1 = gru_backward(g.cache, dh, gp);
  const GruGradients g2 = gru_backward(g.cache, scaled(dh, 2.0), gp);
  for (std::size_t k = 0; k < 3; ++k) CHECK(doubled(*g1.params.gates()[k], *g2.params.gates()[k]));
  CHECK(bitwise_equal(scaled(g1.dx, 2.0), g2.dx));
  CHECK(bitwise_equal(scaled(g1.dprev.h, 2.0), g2.dprev.h));
}

TEST_CASE("gru previous-state gradient at zero weights is 1 - z") {
  std::mt19937_64 gen(12);
  GruParams p = GruParams::zeros(kIn, kHidden);
  p.update_gate.bias = oracle::random_tensor(gen, kHidden, 1, 2.0);
  p.reset_gate.bias = oracle::random_tensor(gen, kHidden, 1, 2.0);
  p.candidate.bias = oracle::random_tensor(gen, kHidden, 1, 2.0);
  const GruStep s = gru_forward(oracle::random_tensor(gen, kIn, 1, 1.0), random_state(gen, false), p);
  const GruGradients g = gru_backward(s.cache, Tensor2(kHidden, 1, 1.0), p);
  for (std::size_t k = 0; k < kHidden; ++k) {
    const double z = static_cast<double>(oracle::sig(p.update_gate.bias[k]));
    CHECK(std::fabs(g.dprev.h[k] - (1.0 - z)) < 1e-15);
  }
}

// Scalar objective sum(wh * h') + sum(wc * c') has upstream gradients (wh, wc);
// every analytic gradient is compared with a central difference of the oracle.
TEST_CASE("cell gradients match finite differences over 100 random instances") {
  std::mt19937_64 gen(2024);
  const double eps = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Tensor2 x = oracle::random_tensor(gen, kIn, 1, 1.0);
    const Tensor2 wh = oracle::random_tensor(gen, kHidden, 1, 1.0);
    const Tensor2 wc = oracle::random_tensor(gen, kHidden, 1, 1.0);

    // LSTM
    {
      LstmParams p = random_lstm(gen);
      CellState prev = random_state(gen, true);
      auto objective = [&]() -> long double {
        const oracle::LState n = oracle::lstm_step(p, oracle::to_lvec(x), {oracle::to_lvec(prev.h), oracle::to_lvec(prev.c)});
        long double s = 0.0L;
        for (std::size_t k = 0; k < kHidden; ++k) s += wh[k] * n.h[k] + wc[k] * n.c[k];
        return s;
      };
      const LstmStep step = lstm_forward(x, prev, p);
      const LstmGradients g = lstm_backward(step.cache, wh, wc, p);
      auto check = [&](Tensor2& value, const Tensor2& grad) {
        for (std::size_t i = 0; i < value.size(); ++i) {
          const double num = oracle::central_difference(value[i], eps, objective);
          const double err = oracle::relative_error(grad[i], num);
          worst = std::max(worst, err);
          CHECK(err < 1e-5);
        }
      };
      const auto pg = p.gates();
      const auto gg = g.params.gates();
      for (std::size_t k = 0; k < 4; ++k) {
        check(pg[k]->input, gg[k]->input);
        check(pg[k]->recurrent, gg[k]->recurrent);
        check(pg[k]->bias, gg[k]->bias);
      }
      check(x, g.dx);
      check(prev.h, g.dprev.h);
      check(prev.c, g.dprev.c);
    }

    // GRU
    {
      GruParams p = random_gru(gen);
      CellState prev = random_state(gen, false);
      auto objective = [&]() -> long double {
        const oracle::LVec n = oracle::gru_step(p, oracle::to_lvec(x), oracle::to_lvec(prev.h));
        long double s = 0.0L;
        for (std::size_t k = 0; k < kHidden; ++k) s += wh[k] * n[k];
        return s;
      };
      const GruStep step = gru_forward(x, prev, p);
      const GruGradients g = gru_backward(step.cache, wh, p);
      auto check = [&](Tensor2& value, const Tensor2& grad) {
        for (std::size_t i = 0; i < value.size(); ++i) {
          const double num = oracle::central_difference(value[i], eps, objective);
          const double err = oracle::relative_error(grad[i], num);
          worst = std::max(worst, err);
          CHECK(err < 1e-5);
        }
      };
      const auto pg = p.gates();
      const auto gg = g.params.gates();
      for (std::size_t k = 0; k < 3; ++k) {
        check(pg[k]->input, gg[k]->input);
        check(pg[k]->recurrent, gg[k]->recurrent);
        check(pg[k]->bias, gg[k]->bias);
      }
      check(x, g.dx);
      check(prev.h, g.dprev.h);
    }
  }
  MESSAGE("worst cell relative error: " << worst);
}

TEST_CASE("accumulating backward adds into existing gradients") {
  std::mt19937_64 gen(77);
  const Tensor2 x = oracle::random_tensor(gen, kIn, 1, 1.0);
  const Tensor2 dh = oracle::random_tensor(gen, kHidden, 1, 1.0);
  const Tensor2 dc = oracle::random_tensor(gen, kHidden, 1, 1.0);
  const LstmParams p = random_lstm(gen);
  const LstmStep s = lstm_forward(x, random_state(gen, true), p);
  const LstmGradients fresh = lstm_backward(s.cache, dh, dc, p);
  LstmParams acc = LstmParams::zeros(kIn, kHidden);
  const StepInputGradients in = lstm_backward_accumulate(s.cache, dh, dc, p, acc);
  CHECK(params_bitwise_equal(acc, fresh.params));
  CHECK(bitwise_equal(in.dx, fresh.dx));
  (void)lstm_backward_accumulate(s.cache, dh, dc, p, acc);
  CHECK(bitwise_equal(acc.forget_gate.input, scaled(fresh.params.forget_gate.input, 2.0)));
}

TEST_CASE("forward and backward leave their inputs untouched") {
  std::mt19937_64 gen(55);
  const Tensor2 x = oracle::random_tensor(gen, kIn, 1, 1.0);
  const Tensor2 x_copy = x;
  const LstmParams lp = random_lstm(gen);
  const LstmParams lp_copy = lp;
  const CellState prev = random_state(gen, true);
  const CellState prev_copy = prev;
  const Tensor2 dh = oracle::random_tensor(gen, kHidden, 1, 1.0);
  const Tensor2 dh_copy = dh;
  const LstmStep s = lstm_forward(x, prev, lp);
  const LstmCache cache_copy = s.cache;
  (void)lstm_backward(s.cache, dh, dh, lp);
  CHECK(bitwise_equal(x, x_copy));
  CHECK(params_bitwise_equal(lp, lp_copy));
  CHECK(bitwise_equal(prev.h, prev_copy.h));
  CHECK(bitwise_equal(prev.c, prev_copy.c));
  CHECK(bitwise_equal(dh, dh_copy));
  CHECK(bitwise_equal(s.cache.candidate, cache_copy.candidate));

  const GruParams gp = random_gru(gen);
  const GruParams gp_copy = gp;
  const CellState gprev = random_state(gen, false);
  const GruStep g = gru_forward(x, gprev, gp);
  (void)gru_backward(g.cache, dh, gp);
  CHECK(params_bitwise_equal(gp, gp_copy));
  CHECK(bitwise_equal(gprev.h, g.cache.h_prev));
  CHECK(bitwise_equal(x, x_copy));
}

TEST_CASE("cells reject mismatched shapes") {
  const LstmParams lp = LstmParams::zeros(kIn, kHidden);
  CHECK_THROWS_AS(lstm_forward(Tensor2(kIn + 1, 1), CellState::zeros(kHidden, true), lp), DimensionError);
  CHECK_THROWS_AS(lstm_forward(Tensor2(kIn, 1), CellState::zeros(kHidden + 1, true), lp), DimensionError);
  CHECK_THROWS_AS(lstm_forward(Tensor2(kIn, 1), CellState::zeros(kHidden, false), lp), DimensionError);
  const GruParams gp = GruParams::zeros(kIn, kHidden);
  CHECK_THROWS_AS(gru_forward(Tensor2(kIn, 2), CellState::zeros(kHidden, false), gp), DimensionError);
  const GruStep s = gru_forward(Tensor2(kIn, 1), CellState::zeros(kHidden, false), gp);
  CHECK_THROWS_AS(gru_backward(s.cache, Tensor2(kHidden + 1, 1), gp), DimensionError);
  const LstmStep t = lstm_forward(Tensor2(kIn, 1), CellState::zeros(kHidden, true), lp);
  CHECK_THROWS_AS(lstm_backward(t.cache, Tensor2(kHidden, 1), Tensor2(kHidden - 1, 1), lp), DimensionError);
}
