#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "regraph/grad_check.hpp"
#include "regraph/model.hpp"
#include "regraph/rng.hpp"
#include "regraph/spatial_gcn.hpp"

using namespace regraph;

namespace {

Tensor2 random_tensor(Rng& rng, std::size_t r, std::size_t c) {
  Tensor2 t(r, c);
  for (double& v : t.data) v = rng.normal();
  return t;
}

std::vector<Box> random_boxes(Rng& rng, std::size_t n) {
  std::vector<Box> boxes;
  for (std::size_t i = 0; i < n; ++i) {
    double cx = rng.uniform(0.2, 0.8), cy = rng.uniform(0.2, 0.8);
    double w = rng.uniform(0.05, 0.3), h = rng.uniform(0.05, 0.3);
    boxes.push_back({cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2});
  }
  return boxes;
}

SpatialHeadParams random_head(Rng& rng, std::size_t hidden) {
  SpatialHeadParams p;
  p.w1 = random_tensor(rng, 4, hidden);
  p.b1 = random_tensor(rng, 1, hidden);
  p.w2 = random_tensor(rng, hidden, 1);
  p.b2 = random_tensor(rng, 1, 1);
  return p;
}

// independent scalar oracle for one head's spatial weight
double spatial_weight_oracle(const double* g, const SpatialHeadParams& p) {
  const std::size_t hdim = p.w1.cols;
  double out = p.b2.at(0, 0);
  for (std::size_t h = 0; h < hdim; ++h) {
    double pre = p.b1.at(0, h);
    for (std::size_t k = 0; k < 4; ++k) pre += g[k] * p.w1.at(k, h);
    out += std::max(pre, 0.0) * p.w2.at(h, 0);
  }
  return std::max(out, 0.0);
}

}  // namespace

TEST_CASE("geometry features: identical boxes") {
  std::vector<Box> boxes = {{0.2, 0.2, 0.4, 0.5}, {0.2, 0.2, 0.4, 0.5}};
  Tensor2 g = geometry_features(boxes);
  REQUIRE(g.rows == 4);
  REQUIRE(g.cols == 4);
  // pair (0,1): zero offsets and equal sizes
  CHECK(g.at(1, 0) == doctest::Approx(std::log(kGeometryEps)).epsilon(1e-12));
  CHECK(g.at(1, 1) == doctest::Approx(std::log(kGeometryEps)).epsilon(1e-12));
  CHECK(g.at(1, 2) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(g.at(1, 3) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("geometry features: size ratios and antisymmetry") {
  // same center; box 1 has double the width and equal height
  std::vector<Box> boxes = {{0.3, 0.3, 0.5, 0.5}, {0.2, 0.3, 0.6, 0.5}};
  Tensor2 g = geometry_features(boxes);
  CHECK(g.at(1, 2) == doctest::Approx(-std::log(2.0)).epsilon(1e-12));  // log(w_0/w_1)
  CHECK(g.at(2, 2) == doctest::Approx(std::log(2.0)).epsilon(1e-12));   // log(w_1/w_0)
  CHECK(g.at(1, 3) == doctest::Approx(0.0).epsilon(1e-12));

  Rng rng(41);
  std::vector<Box> rb = random_boxes(rng, 5);
  Tensor2 rg = geometry_features(rb);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      // components 3 and 4 are antisymmetric in (i, j)
      CHECK(rg.at(i * 5 + j, 2) == doctest::Approx(-rg.at(j * 5 + i, 2)).epsilon(1e-12));
      CHECK(rg.at(i * 5 + j, 3) == doctest::Approx(-rg.at(j * 5 + i, 3)).epsilon(1e-12));
    }
}

TEST_CASE("spatial_weights match the MLP oracle and are nonnegative") {
  Rng rng(42);
  for (int it = 0; it < 20; ++it) {
    std::size_t n = 2 + rng.uniform_index(6);
    std::vector<Box> boxes = random_boxes(rng, n);
    Tensor2 geom = geometry_features(boxes);
    SpatialHeadParams head = random_head(rng, 5);
    Tensor2 w = spatial_weights(geom, head, n);
    REQUIRE(w.rows == n);
    REQUIRE(w.cols == n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(w.at(i, j) >= 0.0);
        CHECK(std::fabs(w.at(i, j) - spatial_weight_oracle(geom.row(i * n + j), head)) <
              1e-12);
      }
  }
}

TEST_CASE("patch_operator equals the triple-loop oracle") {
  Rng rng(43);
  for (int it = 0; it < 100; ++it) {
    std::size_t n = 2 + rng.uniform_index(7);
    std::size_t d = 1 + rng.uniform_index(6);
    std::size_t t = 1 + rng.uniform_index(n);
    std::vector<Box> boxes = random_boxes(rng, n);
    Tensor2 geom = geometry_features(boxes);
    Tensor2 nodes = random_tensor(rng, n, d);
    SparseGraph graph = sparsify_topt(random_tensor(rng, n, n), t);
    std::vector<SpatialHeadParams> heads = {random_head(rng, 4), random_head(rng, 4)};

    std::vector<Tensor2> got = patch_operator(nodes, graph, geom, heads);
    REQUIRE(got.size() == heads.size());
    for (std::size_t k = 0; k < heads.size(); ++k) {
      REQUIRE(got[k].rows == n);
      REQUIRE(got[k].cols == d);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) {
          double want = 0.0;
          for (const auto& e : graph.rows[i]) {
            double wk = spatial_weight_oracle(geom.row(i * n + e.neighbor), heads[k]);
            want += wk * nodes.at(e.neighbor, c) * e.weight;
          }
          CHECK(std::fabs(got[k].at(i, c) - want) < 1e-12);
        }
    }
  }
}

TEST_CASE("patch_operator locality: only retained neighbors matter") {
  Rng rng(44);
  std::size_t n = 6, d = 3;
  std::vector<Box> boxes = random_boxes(rng, n);
  Tensor2 geom = geometry_features(boxes);
  Tensor2 nodes = random_tensor(rng, n, d);
  SparseGraph graph = sparsify_topt(random_tensor(rng, n, n), 2);
  std::vector<SpatialHeadParams> heads = {random_head(rng, 4)};
  std::vector<Tensor2> base = patch_operator(nodes, graph, geom, heads);

  for (std::size_t j = 0; j < n; ++j) {
    Tensor2 bumped = nodes;
    for (std::size_t c = 0; c < d; ++c) bumped.at(j, c) += 1.0;
    std::vector<Tensor2> out = patch_operator(bumped, graph, geom, heads);
    for (std::size_t i = 0; i < n; ++i) {
      // j influences i only when retained and its spatial weight is not clamped to 0
      double influence = 0.0;
      for (const auto& e : graph.rows[i])
        if (e.neighbor == j)
          influence =
              spatial_weight_oracle(geom.row(i * n + j), heads[0]) * e.weight;
      double delta = 0.0;
      for (std::size_t c = 0; c < d; ++c)
        delta = std::max(delta, std::fabs(out[0].at(i, c) - base[0].at(i, c)));
      if (influence > 0.0)
        CHECK(delta > 0.0);
      else
        CHECK(delta == 0.0);
    }
  }
}

TEST_CASE("zero nodes with zero biases give zero output") {
  Rng rng(45);
  std::size_t n = 4, d = 5;
  std::vector<Box> boxes = random_boxes(rng, n);
  Tensor2 geom = geometry_features(boxes);
  SparseGraph graph = sparsify_topt(random_tensor(rng, n, n), 2);
  GcnLayerParams layer;
  for (int k = 0; k < 2; ++k) {
    SpatialHeadParams h = random_head(rng, 4);
    layer.heads.push_back(h);
    layer.proj_w.push_back(random_tensor(rng, 3, d));
    layer.proj_b.push_back(Tensor2(1, 3));
  }
  Tensor2 out = gcn_layer(Tensor2(n, d), graph, geom, layer);
  for (double v : out.data) CHECK(v == 0.0);
}

TEST_CASE("single self-loop with unit weights reduces to ReLU of a projection") {
  // one node, graph = {0 -> 0 with weight 1 after softmax}; w_k forced to 1
  std::vector<Box> boxes = {{0.2, 0.2, 0.6, 0.6}};
  Tensor2 geom = geometry_features(boxes);
  SparseGraph graph = sparsify_topt(Tensor2(1, 1, {1.0}), 1);
  GcnLayerParams layer;
  SpatialHeadParams h;
  h.w1 = Tensor2(4, 2);
  h.b1 = Tensor2(1, 2);
  h.w2 = Tensor2(2, 1);
  h.b2 = Tensor2(1, 1, {1.0});  // constant output 1
  layer.heads.push_back(h);
  layer.proj_w.push_back(Tensor2(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1}));
  layer.proj_b.push_back(Tensor2(1, 3));
  Tensor2 nodes(1, 3, {2.0, -1.5, 0.5});
  Tensor2 out = gcn_layer(nodes, graph, geom, layer);
  CHECK(out.at(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(out.at(0, 1) == 0.0);  // ReLU clips the negative component
  CHECK(out.at(0, 2) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("enhance equals two stacked gcn_layer applications") {
  Rng rng(46);
  std::size_t n = 5, d = 4;
  std::vector<Box> boxes = random_boxes(rng, n);
  Tensor2 geom = geometry_features(boxes);
  Tensor2 nodes = random_tensor(rng, n, d);
  SparseGraph graph = sparsify_topt(random_tensor(rng, n, n), 2);

  auto make_layer = [&](std::size_t d_in, std::size_t e_out) {
    GcnLayerParams layer;
    for (int k = 0; k < 2; ++k) {
      layer.heads.push_back(random_head(rng, 4));
      layer.proj_w.push_back(random_tensor(rng, e_out, d_in));
      layer.proj_b.push_back(random_tensor(rng, 1, e_out));
    }
    return layer;
  };
  GcnLayerParams l1 = make_layer(d, 3);   // output width 6
  GcnLayerParams l2 = make_layer(6, 2);   // output width 4

  Tensor2 direct = enhance(nodes, graph, geom, l1, l2);
  Tensor2 staged = gcn_layer(gcn_layer(nodes, graph, geom, l1), graph, geom, l2);
  REQUIRE(direct.same_shape(staged));
  for (std::size_t i = 0; i < direct.size(); ++i)
    CHECK(std::fabs(direct.data[i] - staged.data[i]) < 1e-12);
}

TEST_CASE("gcn path gradients pass grad_check through the full intra forward") {
  ModelConfig mc;
  mc.feature_dim = 8;
  mc.latent_dim = 4;
  mc.top_t = 2;
  mc.heads = 2;
  mc.gcn_dim1 = 8;
  mc.gcn_dim2 = 4;
  mc.mlp_hidden = 4;
  mc.fine_classes = 8;
  mc.coarse_classes = 4;
  mc.variant = Variant::intra;

  DatasetConfig dc;
  dc.seed = 2;
  dc.scenes = 1;
  dc.proposals = 4;
  dc.feature_dim = 8;
  dc.fine_classes = 8;
  dc.coarse_classes = 4;
  SyntheticDataset ds = generate_dataset(dc);
  BatchInput batch = batch_from_scene(ds.train.empty() ? ds.test[0] : ds.train[0]);

  ParamStore params = init_params(mc, 2);
  Snapshot snap = make_snapshot(mc, params);
  LossFn fn = [&](ParamStore& p, bool g) { return model_loss(mc, p, batch, snap, g); };
  GradCheckReport rep = grad_check(fn, params, 1e-5, 1e-4);
  CHECK(rep.passed);
  CHECK(rep.max_rel_err < 1e-4);
}
