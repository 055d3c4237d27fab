#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <vector>

#include "regraph/kernels.hpp"
#include "regraph/rng.hpp"

using namespace regraph;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// lengths that exercise the vector body and every remainder tail
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 17, 64, 1000, 1003};

}  // namespace

TEST_CASE("force_scalar switches the active ISA") {
  kernels::force_scalar(true);
  CHECK(kernels::active() == kernels::Isa::scalar);
  kernels::force_scalar(false);
  // active() is whatever the CPU supports; both values are legal here
  const kernels::Isa isa = kernels::active();
  CHECK((isa == kernels::Isa::scalar || isa == kernels::Isa::avx2));
}

TEST_CASE("axpy matches loop oracle and is bit-identical across ISAs") {
  Rng rng(11);
  for (std::size_t n : kLengths) {
    std::vector<double> y0 = random_vec(rng, n);
    std::vector<double> x = random_vec(rng, n);
    const double a = rng.normal();

    std::vector<double> expect = y0;
    for (std::size_t i = 0; i < n; ++i) expect[i] += a * x[i];

    kernels::force_scalar(true);
    std::vector<double> ys = y0;
    kernels::axpy(ys.data(), a, x.data(), n);
    kernels::force_scalar(false);
    std::vector<double> yv = y0;
    kernels::axpy(yv.data(), a, x.data(), n);

    CHECK(bit_equal(ys, expect));
    CHECK(bit_equal(ys, yv));
  }
}

TEST_CASE("relu matches oracle and ISAs agree bitwise") {
  Rng rng(12);
  for (std::size_t n : kLengths) {
    std::vector<double> x = random_vec(rng, n);
    if (n > 2) x[n / 2] = 0.0;  // exact zero stays zero

    std::vector<double> expect(n);
    for (std::size_t i = 0; i < n; ++i) expect[i] = x[i] > 0.0 ? x[i] : 0.0;

    kernels::force_scalar(true);
    std::vector<double> ys(n);
    kernels::relu(ys.data(), x.data(), n);
    kernels::force_scalar(false);
    std::vector<double> yv(n);
    kernels::relu(yv.data(), x.data(), n);

    CHECK(bit_equal(ys, expect));
    CHECK(bit_equal(ys, yv));
  }
}

TEST_CASE("hadamard, add, scale match oracles and ISAs agree bitwise") {
  Rng rng(13);
  for (std::size_t n : kLengths) {
    std::vector<double> x = random_vec(rng, n);
    std::vector<double> y = random_vec(rng, n);
    const double a = rng.normal();

    std::vector<double> had(n), sum(n), sc(n);
    for (std::size_t i = 0; i < n; ++i) {
      had[i] = x[i] * y[i];
      sum[i] = x[i] + y[i];
      sc[i] = a * x[i];
    }

    std::vector<double> zs(n), zv(n);
    kernels::force_scalar(true);
    kernels::hadamard(zs.data(), x.data(), y.data(), n);
    kernels::force_scalar(false);
    kernels::hadamard(zv.data(), x.data(), y.data(), n);
    CHECK(bit_equal(zs, had));
    CHECK(bit_equal(zs, zv));

    kernels::force_scalar(true);
    kernels::add(zs.data(), x.data(), y.data(), n);
    kernels::force_scalar(false);
    kernels::add(zv.data(), x.data(), y.data(), n);
    CHECK(bit_equal(zs, sum));
    CHECK(bit_equal(zs, zv));

    kernels::force_scalar(true);
    kernels::scale(zs.data(), a, x.data(), n);
    kernels::force_scalar(false);
    kernels::scale(zv.data(), a, x.data(), n);
    CHECK(bit_equal(zs, sc));
    CHECK(bit_equal(zs, zv));
  }
}

TEST_CASE("relu_backward gates on the forward input and accumulates") {
  Rng rng(14);
  for (std::size_t n : kLengths) {
    std::vector<double> x = random_vec(rng, n);
    std::vector<double> dy = random_vec(rng, n);
    std::vector<double> dx0 = random_vec(rng, n);
    if (n > 1) x[0] = 0.0;  // gradient must not pass through an exact zero

    std::vector<double> expect = dx0;
    for (std::size_t i = 0; i < n; ++i)
      if (x[i] > 0.0) expect[i] += dy[i];

    kernels::force_scalar(true);
    std::vector<double> dxs = dx0;
    kernels::relu_backward(dxs.data(), x.data(), dy.data(), n);
    kernels::force_scalar(false);
    std::vector<double> dxv = dx0;
    kernels::relu_backward(dxv.data(), x.data(), dy.data(), n);

    CHECK(bit_equal(dxs, expect));
    CHECK(bit_equal(dxs, dxv));
  }
}
