// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace windcast {

/// Dense row-major matrix of doubles. Column vectors are (n x 1).
///
/// A default-constructed Tensor2 is empty (0 x 0) and stands for an absent
/// tensor, e.g. the cell state of a GRU. Every shaped constructor requires
/// rows >= 1 and cols >= 1.
class Tensor2 {
 public:
  Tensor2() = default;
  Tensor2(std::size_t rows, std::size_t cols, double fill = 0.0);
  Tensor2(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Tensor2 from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor2 column(std::span<const double> values);
  static Tensor2 identity(std::size_t n);
  static Tensor2 zeros_like(const Tensor2& other);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  /// Row r as a (cols x 1) column vector.
  Tensor2 row_as_column(std::size_t r) const;

  bool same_shape(const Tensor2& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  std::string shape_string() const;

  /// Elementwise equality on values (so 0.0 == -0.0); use bitwise_equal for bit patterns.
  bool operator==(const Tensor2& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

bool bitwise_equal(const Tensor2& a, const Tensor2& b) noexcept;
bool all_finite(const Tensor2& t) noexcept;

/// Multiply-add accumulator for a measured region.
struct OpCounter {
  std::uint64_t multiply_adds = 0;
};

/// While alive, every matrix product on this thread adds its multiply-add
/// count to `counter`. Regions nest; the innermost one receives the counts.
class CountingRegion {
 public:
  explicit CountingRegion(OpCounter& counter) noexcept;
  ~CountingRegion();
  CountingRegion(const CountingRegion&) = delete;
  CountingRegion& operator=(const CountingRegion&) = delete;

 private:
  OpCounter* previous_;
};

/// a * b. Counts a.rows * a.cols * b.cols multiply-adds.
Tensor2 matmul(const Tensor2& a, const Tensor2& b);
/// transpose(a) * b without materializing the transpose.
Tensor2 matmul_at(const Tensor2& a, const Tensor2& b);
/// acc += a * transpose(b). Used for weight-gradient outer products.
void add_outer_product(Tensor2& acc, const Tensor2& a, const Tensor2& b);

Tensor2 transpose(const Tensor2& a);

enum class ElementOp { Sigmoid, Tanh, Add, Sub, Mul };

/// Unary ops (Sigmoid, Tanh). Passing a binary op throws ParameterError.
Tensor2 elementwise(ElementOp op, const Tensor2& a);
/// Binary ops (Add, Sub, Mul) on equal shapes. Passing a unary op throws ParameterError.
Tensor2 elementwise(ElementOp op, const Tensor2& a, const Tensor2& b);

double sigmoid(double x) noexcept;

Tensor2 sigmoid(const Tensor2& a);
Tensor2 tanh(const Tensor2& a);
Tensor2 operator+(const Tensor2& a, const Tensor2& b);
Tensor2 operator-(const Tensor2& a, const Tensor2& b);
Tensor2 hadamard(const Tensor2& a, const Tensor2& b);
Tensor2 scaled(const Tensor2& a, double s);

/// a += b
void add_in_place(Tensor2& a, const Tensor2& b);

double squared_norm(const Tensor2& a) noexcept;

}  // namespace windcast
