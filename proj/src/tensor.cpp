// SPDX-License-Identifier: Apache-2.0
#include "windcast/tensor.hpp"

#include <cmath>
#include <cstring>

#include "windcast/error.hpp"

namespace windcast {

namespace {

thread_local OpCounter* active_counter = nullptr;

void count(std::uint64_t n) noexcept {
  if (active_counter != nullptr) active_counter->multiply_adds += n;
}

void require_same_shape(const char* what, const Tensor2& a, const Tensor2& b) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(what) + ": shape mismatch " + a.shape_string() + " vs " +
                         b.shape_string());
  }
}

}  // namespace

Tensor2::Tensor2(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) {
    throw DimensionError("Tensor2 requires positive dimensions, got " + std::to_string(rows) +
                         "x" + std::to_string(cols));
  }
  data_.assign(rows * cols, fill);
}

Tensor2::Tensor2(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows == 0 || cols == 0) {
    throw DimensionError("Tensor2 requires positive dimensions, got " + std::to_string(rows) +
                         "x" + std::to_string(cols));
  }
  if (data_.size() != rows * cols) {
    throw DimensionError("Tensor2 data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_string());
  }
}

Tensor2 Tensor2::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("from_rows: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor2(r, c, std::move(data));
}

Tensor2 Tensor2::column(std::span<const double> values) {
  return Tensor2(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

Tensor2 Tensor2::identity(std::size_t n) {
  Tensor2 t(n, n);
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

Tensor2 Tensor2::zeros_like(const Tensor2& other) {
  if (other.empty()) return {};
  return Tensor2(other.rows(), other.cols());
}

Tensor2 Tensor2::row_as_column(std::size_t r) const {
  if (r >= rows_) {
    throw DimensionError("row " + std::to_string(r) + " out of range for " + shape_string());
  }
  const auto first = data_.begin() + static_cast<std::ptrdiff_t>(r * cols_);
  return Tensor2(cols_, 1, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(cols_)));
}

std::string Tensor2::shape_string() const {
  return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
}

bool bitwise_equal(const Tensor2& a, const Tensor2& b) noexcept {
  if (!a.same_shape(b)) return false;
  if (a.empty()) return true;
  return std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(double)) == 0;
}

bool all_finite(const Tensor2& t) noexcept {
  for (double v : t.data()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

CountingRegion::CountingRegion(OpCounter& counter) noexcept : previous_(active_counter) {
  active_counter = &counter;
}

CountingRegion::~CountingRegion() { active_counter = previous_; }

Tensor2 matmul(const Tensor2& a, const Tensor2& b) {
  if (a.cols() != b.rows() || a.empty() || b.empty()) {
    throw DimensionError("matmul: cannot multiply " + a.shape_string() + " by " +
                         b.shape_string());
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor2 out(m, n);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* po = out.data().data();
  if (n == 1) {
    // Four rows per pass for instruction-level parallelism. Each row still sums
    // p = 0..k-1 in order, so results match the plain loop bit for bit.
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
      const double* r0 = pa + i * k;
      const double* r1 = r0 + k;
      const double* r2 = r1 + k;
      const double* r3 = r2 + k;
      double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
      for (std::size_t p = 0; p < k; ++p) {
        const double x = pb[p];
        s0 += r0[p] * x;
        s1 += r1[p] * x;
        s2 += r2[p] * x;
        s3 += r3[p] * x;
      }
      po[i] = s0;
      po[i + 1] = s1;
      po[i + 2] = s2;
      po[i + 3] = s3;
    }
    for (; i < m; ++i) {
      const double* row = pa + i * k;
      double sum = 0.0;
      for (std::size_t p = 0; p < k; ++p) sum += row[p] * pb[p];
      po[i] = sum;
    }
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      double* orow = po + i * n;
      for (std::size_t p = 0; p < k; ++p) {
        const double av = pa[i * k + p];
        const double* brow = pb + p * n;
        for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
      }
    }
  }
  count(static_cast<std::uint64_t>(m) * k * n);
  return out;
}

Tensor2 matmul_at(const Tensor2& a, const Tensor2& b) {
  if (a.rows() != b.rows() || a.empty() || b.empty()) {
    throw DimensionError("matmul_at: cannot multiply transpose of " + a.shape_string() + " by " +
                         b.shape_string());
  }
  const std::size_t k = a.rows(), m = a.cols(), n = b.cols();
  Tensor2 out(m, n);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* po = out.data().data();
  if (n == 1) {
    for (std::size_t p = 0; p < k; ++p) {
      const double* arow = pa + p * m;
      const double bv = pb[p];
      for (std::size_t i = 0; i < m; ++i) po[i] += arow[i] * bv;
    }
  } else {
    for (std::size_t p = 0; p < k; ++p) {
      const double* arow = pa + p * m;
      const double* brow = pb + p * n;
      for (std::size_t i = 0; i < m; ++i) {
        const double av = arow[i];
        double* orow = po + i * n;
        for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
      }
    }
  }
  count(static_cast<std::uint64_t>(m) * k * n);
  return out;
}

void add_outer_product(Tensor2& acc, const Tensor2& a, const Tensor2& b) {
  if (a.cols() != b.cols() || acc.rows() != a.rows() || acc.cols() != b.rows()) {
    throw DimensionError("add_outer_product: " + acc.shape_string() + " += " + a.shape_string() +
                         " * transpose" + b.shape_string());
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* po = acc.data().data();
  if (k == 1) {
    for (std::size_t i = 0; i < m; ++i) {
      const double av = pa[i];
      double* orow = po + i * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += av * pb[j];
    }
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t p = 0; p < k; ++p) {
        const double av = pa[i * k + p];
        double* orow = po + i * n;
        for (std::size_t j = 0; j < n; ++j) orow[j] += av * pb[j * k + p];
      }
    }
  }
  count(static_cast<std::uint64_t>(m) * k * n);
}

Tensor2 transpose(const Tensor2& a) {
  if (a.empty()) return {};
  Tensor2 out(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = a(r, c);
  }
  return out;
}

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor2 elementwise(ElementOp op, const Tensor2& a) {
  Tensor2 out = a;
  switch (op) {
    case ElementOp::Sigmoid:
      for (double& v : out.data()) v = sigmoid(v);
      return out;
    case ElementOp::Tanh:
      for (double& v : out.data()) v = std::tanh(v);
      return out;
    default:
      throw ParameterError("elementwise: binary op applied to a single operand");
  }
}

Tensor2 elementwise(ElementOp op, const Tensor2& a, const Tensor2& b) {
  if (op == ElementOp::Sigmoid || op == ElementOp::Tanh) {
    throw ParameterError("elementwise: unary op applied to two operands");
  }
  require_same_shape("elementwise", a, b);
  Tensor2 out = a;
  auto o = out.data();
  const auto y = b.data();
  switch (op) {
    case ElementOp::Add:
      for (std::size_t i = 0; i < o.size(); ++i) o[i] += y[i];
      break;
    case ElementOp::Sub:
      for (std::size_t i = 0; i < o.size(); ++i) o[i] -= y[i];
      break;
    case ElementOp::Mul:
      for (std::size_t i = 0; i < o.size(); ++i) o[i] *= y[i];
      break;
    default:
      break;
  }
  return out;
}

Tensor2 sigmoid(const Tensor2& a) { return elementwise(ElementOp::Sigmoid, a); }
Tensor2 tanh(const Tensor2& a) { return elementwise(ElementOp::Tanh, a); }
Tensor2 operator+(const Tensor2& a, const Tensor2& b) { return elementwise(ElementOp::Add, a, b); }
Tensor2 operator-(const Tensor2& a, const Tensor2& b) { return elementwise(ElementOp::Sub, a, b); }
Tensor2 hadamard(const Tensor2& a, const Tensor2& b) { return elementwise(ElementOp::Mul, a, b); }

Tensor2 scaled(const Tensor2& a, double s) {
  Tensor2 out = a;
  for (double& v : out.data()) v *= s;
  return out;
}

void add_in_place(Tensor2& a, const Tensor2& b) {
  require_same_shape("add_in_place", a, b);
  auto o = a.data();
  const auto y = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += y[i];
}

double squared_norm(const Tensor2& a) noexcept {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return s;
}

}  // namespace windcast
