#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "regraph/autodiff.hpp"
#include "regraph/grad_check.hpp"
#include "regraph/rng.hpp"
#include "regraph/tensor.hpp"

using namespace regraph;

namespace {

Tensor2 random_tensor(Rng& rng, std::size_t r, std::size_t c) {
  Tensor2 t(r, c);
  for (double& v : t.data) v = rng.normal();
  return t;
}

double max_abs_diff(const Tensor2& a, const Tensor2& b) {
  REQUIRE(a.same_shape(b));
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a.data[i] - b.data[i]));
  return m;
}

}  // namespace

TEST_CASE("matmul small examples") {
  Tensor2 a(1, 2, {1, 2});
  Tensor2 b(2, 1, {3, 4});
  Tensor2 c = matmul(a, b);
  CHECK(c.rows == 1);
  CHECK(c.cols == 1);
  CHECK(c.at(0, 0) == doctest::Approx(11.0).epsilon(1e-15));

  Tensor2 id = Tensor2::identity(3);
  Rng rng(5);
  Tensor2 m = random_tensor(rng, 3, 3);
  CHECK(max_abs_diff(matmul(m, id), m) == 0.0);
  CHECK(max_abs_diff(matmul(id, m), m) == 0.0);
}

TEST_CASE("matmul_nt and matmul_tn agree with explicit transpose") {
  Rng rng(6);
  Tensor2 a = random_tensor(rng, 4, 3);
  Tensor2 b = random_tensor(rng, 5, 3);
  CHECK(max_abs_diff(matmul_nt(a, b), matmul(a, transpose(b))) < 1e-12);
  Tensor2 c = random_tensor(rng, 4, 5);
  CHECK(max_abs_diff(matmul_tn(a, c), matmul(transpose(a), c)) < 1e-12);
}

TEST_CASE("dimension mismatches throw") {
  Tensor2 a(2, 3);
  Tensor2 b(4, 2);
  CHECK_THROWS_AS(matmul(a, b), DimensionError);
  CHECK_THROWS_AS(add(a, b), DimensionError);
  CHECK_THROWS_AS(hadamard(a, b), DimensionError);
  CHECK_THROWS_AS(add_row_vector(a, Tensor2(1, 2)), DimensionError);
  CHECK_THROWS_AS(Tensor2(2, 2, {1.0, 2.0, 3.0}), DimensionError);
}

TEST_CASE("check_finite flags NaN and Inf") {
  Tensor2 t(1, 2, {1.0, 2.0});
  CHECK_NOTHROW(check_finite(t, "t"));
  t.at(0, 1) = std::nan("");
  CHECK_THROWS_AS(check_finite(t, "t"), ValidationError);
  t.at(0, 1) = INFINITY;
  CHECK_THROWS_AS(check_finite(t, "t"), ValidationError);
}

TEST_CASE("matmul associativity on random 3-chains") {
  Rng rng(7);
  for (int it = 0; it < 50; ++it) {
    std::size_t p = 1 + rng.uniform_index(8), q = 1 + rng.uniform_index(8);
    std::size_t r = 1 + rng.uniform_index(8), s = 1 + rng.uniform_index(8);
    Tensor2 a = random_tensor(rng, p, q);
    Tensor2 b = random_tensor(rng, q, r);
    Tensor2 c = random_tensor(rng, r, s);
    CHECK(max_abs_diff(matmul(matmul(a, b), c), matmul(a, matmul(b, c))) < 1e-9);
  }
}

TEST_CASE("row_softmax values, normalization, shift invariance, stability") {
  Tensor2 a(1, 2, {1.0, 2.0});
  Tensor2 s = row_softmax(a);
  CHECK(s.at(0, 0) == doctest::Approx(0.26894142137).epsilon(1e-5));
  CHECK(s.at(0, 1) == doctest::Approx(0.73105857863).epsilon(1e-5));

  Rng rng(8);
  Tensor2 x = random_tensor(rng, 5, 7);
  Tensor2 sx = row_softmax(x);
  for (std::size_t i = 0; i < sx.rows; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < sx.cols; ++j) sum += sx.at(i, j);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  Tensor2 shifted = x;
  for (std::size_t j = 0; j < shifted.cols; ++j) shifted.at(2, j) += 17.5;
  CHECK(max_abs_diff(row_softmax(shifted), sx) < 1e-12);

  Tensor2 big(1, 2, {1000.0, 0.0});
  Tensor2 sb = row_softmax(big);
  CHECK(std::isfinite(sb.at(0, 0)));
  CHECK(sb.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("masked_row_softmax respects the mask") {
  Tensor2 a(2, 3, {1.0, 2.0, 3.0, 4.0, 5.0, 6.0});
  Tensor2 mask(2, 3, {1.0, 0.0, 1.0, 0.0, 0.0, 0.0});
  Tensor2 s = masked_row_softmax(a, mask);
  CHECK(s.at(0, 1) == 0.0);
  CHECK(s.at(0, 0) + s.at(0, 2) == doctest::Approx(1.0).epsilon(1e-12));
  // softmax over {1,3} equals softmax([1,3])
  double e = 1.0 / (1.0 + std::exp(2.0));
  CHECK(s.at(0, 0) == doctest::Approx(e).epsilon(1e-12));
  // all-masked row stays zero
  CHECK(s.at(1, 0) == 0.0);
  CHECK(s.at(1, 1) == 0.0);
  CHECK(s.at(1, 2) == 0.0);
}

TEST_CASE("l2_normalize_rows example and idempotence") {
  Tensor2 a(1, 2, {3.0, 4.0});
  Tensor2 n = l2_normalize_rows(a, 1e-12);
  CHECK(n.at(0, 0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(n.at(0, 1) == doctest::Approx(0.8).epsilon(1e-12));

  Rng rng(9);
  Tensor2 x = random_tensor(rng, 6, 4);
  Tensor2 once = l2_normalize_rows(x, 1e-12);
  Tensor2 twice = l2_normalize_rows(once, 1e-12);
  CHECK(max_abs_diff(once, twice) < 1e-12);
}

TEST_CASE("concat_cols stitches parts in order") {
  Tensor2 a(2, 1, {1, 2});
  Tensor2 b(2, 2, {3, 4, 5, 6});
  Tensor2 c = concat_cols({&a, &b});
  CHECK(c.rows == 2);
  CHECK(c.cols == 3);
  CHECK(c.at(0, 0) == 1);
  CHECK(c.at(0, 2) == 4);
  CHECK(c.at(1, 1) == 5);
  Tensor2 bad(3, 1);
  CHECK_THROWS_AS(concat_cols({&a, &bad}), DimensionError);
}

TEST_CASE("grad_check: quadratic loss matches exactly enough") {
  ParamStore ps;
  ps.add("theta", Tensor2(1, 2, {1.0, 2.0}));
  LossFn fn = [](ParamStore& p, bool with_grad) {
    const Tensor2& th = p.value("theta");
    double loss = 0.0;
    for (double v : th.data) loss += v * v;
    if (with_grad) {
      Tensor2& g = p.grad("theta");
      for (std::size_t i = 0; i < th.size(); ++i) g.data[i] += 2.0 * th.data[i];
    }
    return loss;
  };
  GradCheckReport rep = grad_check(fn, ps, 1e-5, 1e-8);
  CHECK(rep.passed);
  CHECK(rep.max_rel_err < 1e-8);
}

TEST_CASE("grad_check: constant loss has zero gradients") {
  ParamStore ps;
  ps.add("theta", Tensor2(2, 2, {1, 2, 3, 4}));
  LossFn fn = [](ParamStore&, bool) { return 3.5; };
  GradCheckReport rep = grad_check(fn, ps, 1e-5, 1e-10);
  CHECK(rep.passed);
  CHECK(rep.max_rel_err == 0.0);
}

TEST_CASE("grad_check rejects h outside [1e-7, 1e-4]") {
  ParamStore ps;
  ps.add("theta", Tensor2(1, 1, {1.0}));
  LossFn fn = [](ParamStore&, bool) { return 0.0; };
  CHECK_THROWS_AS(grad_check(fn, ps, 1e-3, 1e-4), ValidationError);
  CHECK_THROWS_AS(grad_check(fn, ps, 1e-8, 1e-4), ValidationError);
}

TEST_CASE("grad_check detects a non-deterministic loss") {
  ParamStore ps;
  ps.add("theta", Tensor2(1, 1, {1.0}));
  int calls = 0;
  LossFn fn = [&calls](ParamStore&, bool) { return static_cast<double>(calls++); };
  CHECK_THROWS_AS(grad_check(fn, ps, 1e-5, 1e-4), DeterminismError);
}

TEST_CASE("grad_check flags a wrong analytic gradient") {
  ParamStore ps;
  ps.add("theta", Tensor2(1, 1, {2.0}));
  LossFn fn = [](ParamStore& p, bool with_grad) {
    double v = p.value("theta").at(0, 0);
    if (with_grad) p.grad("theta").at(0, 0) += 3.0 * v;  // wrong: should be 2v
    return v * v;
  };
  GradCheckReport rep = grad_check(fn, ps, 1e-5, 1e-4);
  CHECK_FALSE(rep.passed);
}

TEST_CASE("tape gradients for individual ops pass grad_check") {
  Rng rng(10);
  Tensor2 f = random_tensor(rng, 3, 4);
  Tensor2 target = random_tensor(rng, 3, 2);

  ParamStore ps;
  ps.add("w", random_tensor(rng, 4, 2));
  ps.add("b", random_tensor(rng, 1, 2));

  LossFn fn = [&](ParamStore& p, bool with_grad) {
    Tape tape;
    Tape::Var w = tape.leaf(p.value("w"));
    Tape::Var b = tape.leaf(p.value("b"));
    Tape::Var h = tape.relu(tape.add_row_vector(tape.const_matmul(f, w), b));
    Tape::Var s = tape.row_softmax(h);
    Tape::Var loss = tape.smooth_l1_mean(s, target);
    double value = tape.value(loss).at(0, 0);
    if (with_grad) {
      tape.backward(loss);
      for (std::size_t i = 0; i < p.value("w").size(); ++i)
        p.grad("w").data[i] += tape.grad(w).data[i];
      for (std::size_t i = 0; i < p.value("b").size(); ++i)
        p.grad("b").data[i] += tape.grad(b).data[i];
    }
    return value;
  };
  GradCheckReport rep = grad_check(fn, ps, 1e-5, 1e-4);
  CHECK(rep.passed);
}

TEST_CASE("rng draws are deterministic per seed and purpose-separated") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 16; ++i) {
    double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  CHECK(a.next_u64() != c.next_u64());
  CHECK(sub_seed(1, "dataset") != sub_seed(1, "params"));
  CHECK(sub_seed(1, "dataset") == sub_seed(1, "dataset"));
  CHECK(sub_seed(1, "dataset") != sub_seed(2, "dataset"));
}
