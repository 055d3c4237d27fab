#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace regraph {

struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dense row-major matrix, 64-bit throughout.
struct Tensor2 {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Tensor2() = default;
  Tensor2(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  Tensor2(std::size_t r, std::size_t c, std::vector<double> d);

  static Tensor2 zeros(std::size_t r, std::size_t c) { return Tensor2(r, c); }
  static Tensor2 identity(std::size_t n);

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }
  std::size_t size() const { return data.size(); }

  bool same_shape(const Tensor2& o) const { return rows == o.rows && cols == o.cols; }
};

std::string shape_str(const Tensor2& t);

// Throws ValidationError if any entry is NaN/Inf; ctx names the offender.
void check_finite(const Tensor2& t, const std::string& ctx);

// Dense product with fixed summation order (inner index ascending).
Tensor2 matmul(const Tensor2& a, const Tensor2& b);
// a * b^T
Tensor2 matmul_nt(const Tensor2& a, const Tensor2& b);
// a^T * b
Tensor2 matmul_tn(const Tensor2& a, const Tensor2& b);

Tensor2 transpose(const Tensor2& a);
Tensor2 add(const Tensor2& a, const Tensor2& b);
Tensor2 sub(const Tensor2& a, const Tensor2& b);
Tensor2 hadamard(const Tensor2& a, const Tensor2& b);
Tensor2 scale(const Tensor2& a, double s);
Tensor2 relu(const Tensor2& a);
// a + bias broadcast to every row; bias is 1 x a.cols
Tensor2 add_row_vector(const Tensor2& a, const Tensor2& bias);

// Numerically stable softmax per row (max-shift).
Tensor2 row_softmax(const Tensor2& a);
// Softmax per row restricted to positions where mask != 0; other positions 0.
// A row whose mask is all-zero stays all-zero.
Tensor2 masked_row_softmax(const Tensor2& a, const Tensor2& mask);

// Rows scaled to unit L2 norm; rows with norm < eps are divided by eps.
Tensor2 l2_normalize_rows(const Tensor2& a, double eps);

Tensor2 concat_cols(const std::vector<const Tensor2*>& parts);

}  // namespace regraph
