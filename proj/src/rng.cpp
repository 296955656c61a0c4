// SPDX-License-Identifier: Apache-2.0
#include "windcast/rng.hpp"

#include <cmath>
#include <string>

#include "windcast/error.hpp"

namespace windcast {

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  if (!(lo < hi)) {
    throw ParameterError("uniform: require lo < hi, got lo=" + std::to_string(lo) +
                         " hi=" + std::to_string(hi));
  }
  const double v = lo + (hi - lo) * uniform01();
  // Rounding in lo + (hi - lo) * u can land exactly on hi.
  return v < hi ? v : std::nextafter(hi, lo);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw ParameterError("below: n must be positive");
  // Rejection sampling keeps the result unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

Tensor2 Rng::uniform_tensor(std::size_t rows, std::size_t cols, double lo, double hi) {
  if (!(lo < hi)) {
    throw ParameterError("seeded_uniform: require lo < hi, got lo=" + std::to_string(lo) +
                         " hi=" + std::to_string(hi));
  }
  Tensor2 out(rows, cols);
  for (double& v : out.data()) v = uniform(lo, hi);
  return out;
}

Tensor2 seeded_uniform(std::uint64_t seed, std::size_t rows, std::size_t cols, double lo, double hi) {
  Rng rng(seed);
  return rng.uniform_tensor(rows, cols, lo, hi);
}

}  // namespace windcast
