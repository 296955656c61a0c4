// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

#include "windcast/tensor.hpp"

namespace windcast {

/// Seeded generator with a bit-exact output sequence on every platform.
///
/// The engine is std::mt19937_64, whose output sequence the C++ standard fixes
/// exactly. The standard distributions are *not* fixed, so conversion to
/// doubles is done here: uniform01() takes the top 53 bits of one engine draw
/// and multiplies by 2^-53, giving a value in [0, 1).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform01();
  /// Value in [lo, hi). Requires lo < hi.
  double uniform(double lo, double hi);
  /// Integer in [0, n). Requires n > 0.
  std::uint64_t below(std::uint64_t n);

  Tensor2 uniform_tensor(std::size_t rows, std::size_t cols, double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

/// A fresh generator seeded with `seed`, drawn row-major into a rows x cols tensor.
Tensor2 seeded_uniform(std::uint64_t seed, std::size_t rows, std::size_t cols, double lo, double hi);

}  // namespace windcast
