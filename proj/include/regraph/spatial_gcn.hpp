#pragma once

#include <vector>

#include "regraph/intra_graph.hpp"
#include "regraph/tensor.hpp"

namespace regraph {

// Axis-aligned box in normalized [0,1] image coordinates.
struct Box {
  double x1, y1, x2, y2;
  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double cx() const { return 0.5 * (x1 + x2); }
  double cy() const { return 0.5 * (y1 + y2); }
};

inline constexpr double kGeometryEps = 1e-3;

// 4-d relative geometry per ordered pair, returned as an (N*N) x 4 matrix
// with pair (i,j) at row i*N + j:
//   (log(|cx_i-cx_j|/w_i + eps), log(|cy_i-cy_j|/h_i + eps),
//    log(w_i/w_j), log(h_i/h_j))
Tensor2 geometry_features(const std::vector<Box>& boxes);

// 4 -> H -> 1 MLP, ReLU after the hidden layer and ReLU clamp on the output.
struct SpatialHeadParams {
  Tensor2 w1;  // 4 x H
  Tensor2 b1;  // 1 x H
  Tensor2 w2;  // H x 1
  Tensor2 b2;  // 1 x 1
};

inline constexpr std::size_t kSpatialHiddenDim = 16;

// w_k(g_ij) for all pairs, as an N x N matrix (nonnegative).
Tensor2 spatial_weights(const Tensor2& geometry, const SpatialHeadParams& head,
                        std::size_t n);

// One GCN layer: K heads, each with its own spatial MLP and projection.
struct GcnLayerParams {
  std::vector<SpatialHeadParams> heads;
  std::vector<Tensor2> proj_w;  // per head: E_out x D_in
  std::vector<Tensor2> proj_b;  // per head: 1 x E_out
  std::size_t head_count() const { return heads.size(); }
};

// Patch operator: per head k, f'_k(i) = sum_{j in Neighbour(i)} w_k(g_ij) x_j e_ij.
std::vector<Tensor2> patch_operator(const Tensor2& nodes, const SparseGraph& graph,
                                    const Tensor2& geometry,
                                    const std::vector<SpatialHeadParams>& heads);

// Per head: ReLU(L_k applied to patch-operator rows), concatenated in head order.
Tensor2 gcn_layer(const Tensor2& nodes, const SparseGraph& graph, const Tensor2& geometry,
                  const GcnLayerParams& params);

// Two stacked layers on the same graph/geometry.
Tensor2 enhance(const Tensor2& nodes, const SparseGraph& graph, const Tensor2& geometry,
                const GcnLayerParams& layer1, const GcnLayerParams& layer2);

}  // namespace regraph
