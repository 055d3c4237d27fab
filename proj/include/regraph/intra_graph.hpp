#pragma once

#include <iosfwd>
#include <vector>

#include "regraph/tensor.hpp"

namespace regraph {

// Latent projection for region-to-region graph learning.
struct GraphLearnerParams {
  Tensor2 phi_weight;  // D x L
  Tensor2 phi_bias;    // 1 x L
  std::size_t latent_dim() const { return phi_weight.cols; }
};

// Row-sparse adjacency: each row keeps the top-t scores of the dense matrix,
// softmax-normalized over the retained entries.
struct SparseGraph {
  struct Edge {
    std::size_t neighbor;
    double weight;
  };
  std::size_t size = 0;
  std::size_t row_capacity = 0;  // t
  std::vector<std::vector<Edge>> rows;

  // Dense N x N view with zeros outside retained entries.
  Tensor2 densify() const;
  // 0/1 mask of retained positions.
  Tensor2 mask() const;
};

// features * phi_weight + phi_bias, rows L2-normalized (eps 1e-12).
Tensor2 project_latent(const Tensor2& features, const GraphLearnerParams& params);

// Z Z^T for row-normalized Z: cosine similarities with unit diagonal.
Tensor2 dense_similarity(const Tensor2& z);

// Retain the min(t, N) largest entries per row (ties -> lower column index),
// then softmax over the retained values.
SparseGraph sparsify_topt(const Tensor2& dense, std::size_t t);

// Retained top-t column indices per row, without normalization.
std::vector<std::vector<std::size_t>> topt_indices(const Tensor2& dense, std::size_t t);

// Text format: header "N_r t", then one line per row: "i j:w j:w ...".
void write_sparse_graph(std::ostream& os, const SparseGraph& g);
SparseGraph read_sparse_graph(std::istream& is);

}  // namespace regraph
