#pragma once

#include <cstddef>

// Elementwise kernels with a scalar reference path and an AVX2 path chosen
// at runtime. Both paths perform the same per-element operations in the same
// order (mul then add, no FMA contraction), so results are bit-identical and
// the scalar/SIMD equivalence tests can assert exact equality.
namespace regraph::kernels {

enum class Isa { scalar, avx2 };

// ISA selected for this process (honours force_scalar()).
Isa active();

// Test hook: force the scalar reference path.
void force_scalar(bool on);

// y[i] += a * x[i]
void axpy(double* y, double a, const double* x, std::size_t n);

// y[i] = max(x[i], 0)
void relu(double* y, const double* x, std::size_t n);

// z[i] = x[i] * y[i]
void hadamard(double* z, const double* x, const double* y, std::size_t n);

// z[i] = x[i] + y[i]
void add(double* z, const double* x, const double* y, std::size_t n);

// y[i] = a * x[i]
void scale(double* y, double a, const double* x, std::size_t n);

// dx[i] += dy[i] where x[i] > 0  (ReLU backward)
void relu_backward(double* dx, const double* x, const double* dy, std::size_t n);

}  // namespace regraph::kernels
