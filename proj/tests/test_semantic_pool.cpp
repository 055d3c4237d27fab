#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "regraph/rng.hpp"
#include "regraph/semantic_pool.hpp"

using namespace regraph;

namespace {

Tensor2 random_tensor(Rng& rng, std::size_t r, std::size_t c) {
  Tensor2 t(r, c);
  for (double& v : t.data) v = rng.normal();
  return t;
}

}  // namespace

TEST_CASE("refresh_pool lays out weight rows followed by the bias") {
  Tensor2 w(2, 3, {1, 2, 3, 4, 5, 6});
  Tensor2 b(1, 2, {7, 8});
  SemanticPool p = refresh_pool(w, b, "src");
  CHECK(p.domain_id == "src");
  CHECK(p.categories() == 2);
  CHECK(p.feature_dim() == 3);
  CHECK(p.pool.at(0, 0) == 1);
  CHECK(p.pool.at(0, 3) == 7);
  CHECK(p.pool.at(1, 2) == 6);
  CHECK(p.pool.at(1, 3) == 8);
  CHECK_THROWS_AS(refresh_pool(w, Tensor2(1, 3), "src"), DimensionError);
}

TEST_CASE("soft_map rows are stochastic and shift-invariant") {
  Rng rng(31);
  Tensor2 logits = random_tensor(rng, 6, 4);
  SoftMapping m = soft_map(logits);
  for (std::size_t i = 0; i < m.weights.rows; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < m.weights.cols; ++j) {
      CHECK(m.weights.at(i, j) > 0.0);
      sum += m.weights.at(i, j);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  Tensor2 shifted = logits;
  for (std::size_t j = 0; j < shifted.cols; ++j) shifted.at(3, j) += 100.0;
  SoftMapping ms = soft_map(shifted);
  for (std::size_t i = 0; i < logits.rows; ++i)
    for (std::size_t j = 0; j < logits.cols; ++j)
      CHECK(std::fabs(ms.weights.at(i, j) - m.weights.at(i, j)) < 1e-12);
}

TEST_CASE("assemble_nodes equals the M*P loop oracle") {
  Rng rng(32);
  for (int it = 0; it < 50; ++it) {
    std::size_t n = 1 + rng.uniform_index(8);
    std::size_t c = 2 + rng.uniform_index(3);
    std::size_t d = 1 + rng.uniform_index(6);
    SoftMapping m = soft_map(random_tensor(rng, n, c));
    SemanticPool pool =
        refresh_pool(random_tensor(rng, c, d), random_tensor(rng, 1, c), "dom");
    Tensor2 x = assemble_nodes(m, pool);
    REQUIRE(x.rows == n);
    REQUIRE(x.cols == d + 1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= d; ++j) {
        double want = 0.0;
        for (std::size_t k = 0; k < c; ++k)
          want += m.weights.at(i, k) * pool.pool.at(k, j);
        CHECK(std::fabs(x.at(i, j) - want) < 1e-12);
      }
    }
  }
}

TEST_CASE("one-hot-ish mapping selects the matching pool row") {
  Tensor2 logits(1, 3, {100.0, 0.0, 0.0});
  SoftMapping m = soft_map(logits);
  SemanticPool pool = refresh_pool(Tensor2(3, 2, {1, 2, 3, 4, 5, 6}),
                                   Tensor2(1, 3, {7, 8, 9}), "dom");
  Tensor2 x = assemble_nodes(m, pool);
  CHECK(x.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(x.at(0, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(x.at(0, 2) == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("assembled nodes stay in the convex hull of pool rows") {
  Rng rng(33);
  std::size_t c = 4, d = 5, n = 7;
  SoftMapping m = soft_map(random_tensor(rng, n, c));
  SemanticPool pool =
      refresh_pool(random_tensor(rng, c, d), random_tensor(rng, 1, c), "dom");
  Tensor2 x = assemble_nodes(m, pool);
  for (std::size_t j = 0; j <= d; ++j) {
    double lo = pool.pool.at(0, j), hi = lo;
    for (std::size_t k = 1; k < c; ++k) {
      lo = std::min(lo, pool.pool.at(k, j));
      hi = std::max(hi, pool.pool.at(k, j));
    }
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(x.at(i, j) >= lo - 1e-12);
      CHECK(x.at(i, j) <= hi + 1e-12);
    }
  }
}

TEST_CASE("pool serialization round-trips exactly") {
  Rng rng(34);
  SemanticPool p =
      refresh_pool(random_tensor(rng, 3, 4), random_tensor(rng, 1, 3), "target");
  std::stringstream ss;
  write_pool(ss, p);
  SemanticPool q = read_pool(ss);
  CHECK(q.domain_id == p.domain_id);
  REQUIRE(q.pool.same_shape(p.pool));
  for (std::size_t i = 0; i < p.pool.size(); ++i)
    CHECK(q.pool.data[i] == p.pool.data[i]);

  std::stringstream bad("nonsense");
  CHECK_THROWS_AS(read_pool(bad), ValidationError);
}
