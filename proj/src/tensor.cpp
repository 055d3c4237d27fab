#include "regraph/tensor.hpp"

#include <cmath>

#include "regraph/kernels.hpp"

namespace regraph {

Tensor2::Tensor2(std::size_t r, std::size_t c, std::vector<double> d)
    : rows(r), cols(c), data(std::move(d)) {
  if (data.size() != rows * cols) {
    throw DimensionError("Tensor2: data length " + std::to_string(data.size()) +
                         " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Tensor2 Tensor2::identity(std::size_t n) {
  Tensor2 t(n, n);
  for (std::size_t i = 0; i < n; ++i) t.at(i, i) = 1.0;
  return t;
}

std::string shape_str(const Tensor2& t) {
  return std::to_string(t.rows) + "x" + std::to_string(t.cols);
}

void check_finite(const Tensor2& t, const std::string& ctx) {
  for (double v : t.data) {
    if (!std::isfinite(v)) {
      throw ValidationError(ctx + ": non-finite entry in " + shape_str(t) + " tensor");
    }
  }
}

Tensor2 matmul(const Tensor2& a, const Tensor2& b) {
  if (a.cols != b.rows) {
    throw DimensionError("matmul: " + shape_str(a) + " x " + shape_str(b));
  }
  Tensor2 c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double* ci = c.row(i);
    for (std::size_t k = 0; k < a.cols; ++k) {
      kernels::axpy(ci, a.at(i, k), b.row(k), b.cols);
    }
  }
  return c;
}

Tensor2 matmul_nt(const Tensor2& a, const Tensor2& b) {
  if (a.cols != b.cols) {
    throw DimensionError("matmul_nt: " + shape_str(a) + " x " + shape_str(b) + "^T");
  }
  Tensor2 c(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < b.rows; ++j) {
      const double* ai = a.row(i);
      const double* bj = b.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) s += ai[k] * bj[k];
      c.at(i, j) = s;
    }
  }
  return c;
}

Tensor2 matmul_tn(const Tensor2& a, const Tensor2& b) {
  if (a.rows != b.rows) {
    throw DimensionError("matmul_tn: " + shape_str(a) + "^T x " + shape_str(b));
  }
  Tensor2 c(a.cols, b.cols);
  for (std::size_t k = 0; k < a.rows; ++k) {
    const double* ak = a.row(k);
    for (std::size_t i = 0; i < a.cols; ++i) {
      kernels::axpy(c.row(i), ak[i], b.row(k), b.cols);
    }
  }
  return c;
}

Tensor2 transpose(const Tensor2& a) {
  Tensor2 t(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) t.at(j, i) = a.at(i, j);
  }
  return t;
}

Tensor2 add(const Tensor2& a, const Tensor2& b) {
  if (!a.same_shape(b)) {
    throw DimensionError("add: " + shape_str(a) + " vs " + shape_str(b));
  }
  Tensor2 c(a.rows, a.cols);
  kernels::add(c.data.data(), a.data.data(), b.data.data(), a.size());
  return c;
}

Tensor2 sub(const Tensor2& a, const Tensor2& b) {
  if (!a.same_shape(b)) {
    throw DimensionError("sub: " + shape_str(a) + " vs " + shape_str(b));
  }
  Tensor2 c(a.rows, a.cols);
  for (std::size_t i = 0; i < a.size(); ++i) c.data[i] = a.data[i] - b.data[i];
  return c;
}

Tensor2 hadamard(const Tensor2& a, const Tensor2& b) {
  if (!a.same_shape(b)) {
    throw DimensionError("hadamard: " + shape_str(a) + " vs " + shape_str(b));
  }
  Tensor2 c(a.rows, a.cols);
  kernels::hadamard(c.data.data(), a.data.data(), b.data.data(), a.size());
  return c;
}

Tensor2 scale(const Tensor2& a, double s) {
  Tensor2 c(a.rows, a.cols);
  kernels::scale(c.data.data(), s, a.data.data(), a.size());
  return c;
}

Tensor2 relu(const Tensor2& a) {
  Tensor2 c(a.rows, a.cols);
  kernels::relu(c.data.data(), a.data.data(), a.size());
  return c;
}

Tensor2 add_row_vector(const Tensor2& a, const Tensor2& bias) {
  if (bias.rows != 1 || bias.cols != a.cols) {
    throw DimensionError("add_row_vector: " + shape_str(a) + " + " + shape_str(bias));
  }
  Tensor2 c(a.rows, a.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    kernels::add(c.row(i), a.row(i), bias.row(0), a.cols);
  }
  return c;
}

Tensor2 row_softmax(const Tensor2& a) {
  check_finite(a, "row_softmax input");
  Tensor2 out(a.rows, a.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* x = a.row(i);
    double mx = x[0];
    for (std::size_t j = 1; j < a.cols; ++j) mx = std::max(mx, x[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) {
      out.at(i, j) = std::exp(x[j] - mx);
      sum += out.at(i, j);
    }
    for (std::size_t j = 0; j < a.cols; ++j) out.at(i, j) /= sum;
  }
  return out;
}

Tensor2 masked_row_softmax(const Tensor2& a, const Tensor2& mask) {
  if (!a.same_shape(mask)) {
    throw DimensionError("masked_row_softmax: " + shape_str(a) + " vs " + shape_str(mask));
  }
  check_finite(a, "masked_row_softmax input");
  Tensor2 out(a.rows, a.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* x = a.row(i);
    const double* m = mask.row(i);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < a.cols; ++j) {
      if (m[j] != 0.0) mx = std::max(mx, x[j]);
    }
    if (!std::isfinite(mx)) continue;  // empty row mask
    double sum = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) {
      if (m[j] != 0.0) {
        out.at(i, j) = std::exp(x[j] - mx);
        sum += out.at(i, j);
      }
    }
    for (std::size_t j = 0; j < a.cols; ++j) {
      if (m[j] != 0.0) out.at(i, j) /= sum;
    }
  }
  return out;
}

Tensor2 l2_normalize_rows(const Tensor2& a, double eps) {
  if (eps <= 0.0) throw ValidationError("l2_normalize_rows: eps must be > 0");
  Tensor2 out(a.rows, a.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double ss = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) ss += a.at(i, j) * a.at(i, j);
    double norm = std::sqrt(ss);
    double div = norm < eps ? eps : norm;
    kernels::scale(out.row(i), 1.0 / div, a.row(i), a.cols);
  }
  return out;
}

Tensor2 concat_cols(const std::vector<const Tensor2*>& parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no parts");
  std::size_t rows = parts[0]->rows;
  std::size_t cols = 0;
  for (const Tensor2* p : parts) {
    if (p->rows != rows) {
      throw DimensionError("concat_cols: row mismatch " + shape_str(*parts[0]) + " vs " +
                           shape_str(*p));
    }
    cols += p->cols;
  }
  Tensor2 out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    std::size_t off = 0;
    for (const Tensor2* p : parts) {
      for (std::size_t j = 0; j < p->cols; ++j) out.at(i, off + j) = p->at(i, j);
      off += p->cols;
    }
  }
  return out;
}

}  // namespace regraph
