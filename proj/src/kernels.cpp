#include "regraph/kernels.hpp"

#include <atomic>

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define REGRAPH_HAVE_AVX2_TARGET 1
#include <immintrin.h>
#endif

namespace regraph::kernels {

namespace {

std::atomic<bool> g_force_scalar{false};

bool cpu_has_avx2() {
#if defined(REGRAPH_HAVE_AVX2_TARGET)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

// --- scalar reference kernels ---

void axpy_scalar(double* y, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void relu_scalar(double* y, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void hadamard_scalar(double* z, const double* x, const double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] = x[i] * y[i];
}

void add_scalar(double* z, const double* x, const double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] = x[i] + y[i];
}

void scale_scalar(double* y, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i];
}

void relu_backward_scalar(double* dx, const double* x, const double* dy, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] > 0.0) dx[i] += dy[i];
  }
}

#if defined(REGRAPH_HAVE_AVX2_TARGET)

// mul+add kept as two rounded ops (no _mm256_fmadd_pd) so the AVX2 path is
// bit-identical to the scalar path.
__attribute__((target("avx2"))) void axpy_avx2(double* y, double a, const double* x,
                                               std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    __m256d vx = _mm256_loadu_pd(x + i);
    vy = _mm256_add_pd(vy, _mm256_mul_pd(va, vx));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

__attribute__((target("avx2"))) void relu_avx2(double* y, const double* x, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

__attribute__((target("avx2"))) void hadamard_avx2(double* z, const double* x, const double* y,
                                                   std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(z + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) z[i] = x[i] * y[i];
}

__attribute__((target("avx2"))) void add_avx2(double* z, const double* x, const double* y,
                                              std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(z + i, _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) z[i] = x[i] + y[i];
}

__attribute__((target("avx2"))) void scale_avx2(double* y, double a, const double* x,
                                                std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) y[i] = a * x[i];
}

__attribute__((target("avx2"))) void relu_backward_avx2(double* dx, const double* x,
                                                        const double* dy, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), zero, _CMP_GT_OQ);
    __m256d add = _mm256_and_pd(mask, _mm256_loadu_pd(dy + i));
    _mm256_storeu_pd(dx + i, _mm256_add_pd(_mm256_loadu_pd(dx + i), add));
  }
  for (; i < n; ++i) {
    if (x[i] > 0.0) dx[i] += dy[i];
  }
}

#endif  // REGRAPH_HAVE_AVX2_TARGET

bool use_avx2() {
  static const bool supported = cpu_has_avx2();
  return supported && !g_force_scalar.load(std::memory_order_relaxed);
}

}  // namespace

Isa active() { return use_avx2() ? Isa::avx2 : Isa::scalar; }

void force_scalar(bool on) { g_force_scalar.store(on, std::memory_order_relaxed); }

void axpy(double* y, double a, const double* x, std::size_t n) {
#if defined(REGRAPH_HAVE_AVX2_TARGET)
  if (use_avx2()) return axpy_avx2(y, a, x, n);
#endif
  axpy_scalar(y, a, x, n);
}

void relu(double* y, const double* x, std::size_t n) {
#if defined(REGRAPH_HAVE_AVX2_TARGET)
  if (use_avx2()) return relu_avx2(y, x, n);
#endif
  relu_scalar(y, x, n);
}

void hadamard(double* z, const double* x, const double* y, std::size_t n) {
#if defined(REGRAPH_HAVE_AVX2_TARGET)
  if (use_avx2()) return hadamard_avx2(z, x, y, n);
#endif
  hadamard_scalar(z, x, y, n);
}

void add(double* z, const double* x, const double* y, std::size_t n) {
#if defined(REGRAPH_HAVE_AVX2_TARGET)
  if (use_avx2()) return add_avx2(z, x, y, n);
#endif
  add_scalar(z, x, y, n);
}

void scale(double* y, double a, const double* x, std::size_t n) {
#if defined(REGRAPH_HAVE_AVX2_TARGET)
  if (use_avx2()) return scale_avx2(y, a, x, n);
#endif
  scale_scalar(y, a, x, n);
}

void relu_backward(double* dx, const double* x, const double* dy, std::size_t n) {
#if defined(REGRAPH_HAVE_AVX2_TARGET)
  if (use_avx2()) return relu_backward_avx2(dx, x, dy, n);
#endif
  relu_backward_scalar(dx, x, dy, n);
}

}  // namespace regraph::kernels
