#include "regraph/spatial_gcn.hpp"

#include <cmath>

namespace regraph {

Tensor2 geometry_features(const std::vector<Box>& boxes) {
  const std::size_t n = boxes.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (boxes[i].width() <= 0.0 || boxes[i].height() <= 0.0) {
      throw ValidationError("geometry_features: degenerate box at index " + std::to_string(i));
    }
  }
  Tensor2 g(n * n, 4);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double* row = g.row(i * n + j);
      row[0] = std::log(std::fabs(boxes[i].cx() - boxes[j].cx()) / boxes[i].width() +
                        kGeometryEps);
      row[1] = std::log(std::fabs(boxes[i].cy() - boxes[j].cy()) / boxes[i].height() +
                        kGeometryEps);
      row[2] = std::log(boxes[i].width() / boxes[j].width());
      row[3] = std::log(boxes[i].height() / boxes[j].height());
    }
  }
  return g;
}

Tensor2 spatial_weights(const Tensor2& geometry, const SpatialHeadParams& head,
                        std::size_t n) {
  if (geometry.rows != n * n || geometry.cols != 4) {
    throw DimensionError("spatial_weights: geometry " + shape_str(geometry) + " for n=" +
                         std::to_string(n));
  }
  Tensor2 hidden = relu(add_row_vector(matmul(geometry, head.w1), head.b1));
  Tensor2 out = relu(add_row_vector(matmul(hidden, head.w2), head.b2));
  Tensor2 w(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) w.at(i, j) = out.at(i * n + j, 0);
  }
  return w;
}

std::vector<Tensor2> patch_operator(const Tensor2& nodes, const SparseGraph& graph,
                                    const Tensor2& geometry,
                                    const std::vector<SpatialHeadParams>& heads) {
  if (graph.size != nodes.rows) {
    throw DimensionError("patch_operator: graph size " + std::to_string(graph.size) +
                         " vs nodes " + shape_str(nodes));
  }
  const Tensor2 edges = graph.densify();
  std::vector<Tensor2> out;
  out.reserve(heads.size());
  for (const SpatialHeadParams& head : heads) {
    Tensor2 wk = spatial_weights(geometry, head, graph.size);
    out.push_back(matmul(hadamard(wk, edges), nodes));
  }
  return out;
}

Tensor2 gcn_layer(const Tensor2& nodes, const SparseGraph& graph, const Tensor2& geometry,
                  const GcnLayerParams& params) {
  if (params.proj_w.size() != params.head_count() ||
      params.proj_b.size() != params.head_count()) {
    throw DimensionError("gcn_layer: head/projection count mismatch");
  }
  std::vector<Tensor2> patched = patch_operator(nodes, graph, geometry, params.heads);
  std::vector<Tensor2> parts;
  parts.reserve(patched.size());
  for (std::size_t k = 0; k < patched.size(); ++k) {
    parts.push_back(
        relu(add_row_vector(matmul_nt(patched[k], params.proj_w[k]), params.proj_b[k])));
  }
  std::vector<const Tensor2*> ptrs;
  ptrs.reserve(parts.size());
  for (const Tensor2& p : parts) ptrs.push_back(&p);
  return concat_cols(ptrs);
}

Tensor2 enhance(const Tensor2& nodes, const SparseGraph& graph, const Tensor2& geometry,
                const GcnLayerParams& layer1, const GcnLayerParams& layer2) {
  Tensor2 h1 = gcn_layer(nodes, graph, geometry, layer1);
  return gcn_layer(h1, graph, geometry, layer2);
}

}  // namespace regraph
