#include "regraph/intra_graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace regraph {

Tensor2 SparseGraph::densify() const {
  Tensor2 d(size, size);
  for (std::size_t i = 0; i < size; ++i) {
    for (const Edge& e : rows[i]) d.at(i, e.neighbor) = e.weight;
  }
  return d;
}

Tensor2 SparseGraph::mask() const {
  Tensor2 m(size, size);
  for (std::size_t i = 0; i < size; ++i) {
    for (const Edge& e : rows[i]) m.at(i, e.neighbor) = 1.0;
  }
  return m;
}

Tensor2 project_latent(const Tensor2& features, const GraphLearnerParams& params) {
  if (features.cols != params.phi_weight.rows) {
    throw DimensionError("project_latent: features " + shape_str(features) +
                         " vs phi " + shape_str(params.phi_weight));
  }
  Tensor2 z = add_row_vector(matmul(features, params.phi_weight), params.phi_bias);
  return l2_normalize_rows(z, 1e-12);
}

Tensor2 dense_similarity(const Tensor2& z) { return matmul_nt(z, z); }

std::vector<std::vector<std::size_t>> topt_indices(const Tensor2& dense, std::size_t t) {
  const std::size_t n = dense.rows;
  const std::size_t keep = std::min(t, n);
  std::vector<std::vector<std::size_t>> out(n);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), 0);
    // descending by score, ties broken by lower column index
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return dense.at(i, a) > dense.at(i, b);
    });
    out[i].assign(order.begin(), order.begin() + keep);
    std::sort(out[i].begin(), out[i].end());
  }
  return out;
}

SparseGraph sparsify_topt(const Tensor2& dense, std::size_t t) {
  if (dense.rows != dense.cols) {
    throw DimensionError("sparsify_topt: matrix must be square, got " + shape_str(dense));
  }
  if (t < 1) throw ValidationError("sparsify_topt: t must be >= 1");
  SparseGraph g;
  g.size = dense.rows;
  g.row_capacity = t;
  g.rows.resize(g.size);
  auto retained = topt_indices(dense, t);
  for (std::size_t i = 0; i < g.size; ++i) {
    // softmax over the retained scores of this row
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j : retained[i]) mx = std::max(mx, dense.at(i, j));
    double sum = 0.0;
    std::vector<double> e(retained[i].size());
    for (std::size_t k = 0; k < retained[i].size(); ++k) {
      e[k] = std::exp(dense.at(i, retained[i][k]) - mx);
      sum += e[k];
    }
    for (std::size_t k = 0; k < retained[i].size(); ++k) {
      g.rows[i].push_back({retained[i][k], e[k] / sum});
    }
  }
  return g;
}

void write_sparse_graph(std::ostream& os, const SparseGraph& g) {
  os << g.size << " " << g.row_capacity << "\n";
  for (std::size_t i = 0; i < g.size; ++i) {
    os << i;
    for (const SparseGraph::Edge& e : g.rows[i]) {
      os << " " << e.neighbor << ":";
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", e.weight);
      os << buf;
    }
    os << "\n";
  }
}

SparseGraph read_sparse_graph(std::istream& is) {
  SparseGraph g;
  if (!(is >> g.size >> g.row_capacity)) {
    throw ValidationError("read_sparse_graph: bad header");
  }
  std::string line;
  std::getline(is, line);
  g.rows.resize(g.size);
  for (std::size_t i = 0; i < g.size; ++i) {
    if (!std::getline(is, line)) {
      throw ValidationError("read_sparse_graph: missing row " + std::to_string(i));
    }
    std::istringstream ss(line);
    std::size_t row_idx;
    ss >> row_idx;
    if (row_idx != i) {
      throw ValidationError("read_sparse_graph: expected row " + std::to_string(i));
    }
    std::string tok;
    while (ss >> tok) {
      auto colon = tok.find(':');
      if (colon == std::string::npos) {
        throw ValidationError("read_sparse_graph: bad edge token '" + tok + "'");
      }
      SparseGraph::Edge e;
      e.neighbor = std::stoul(tok.substr(0, colon));
      e.weight = std::stod(tok.substr(colon + 1));
      if (e.neighbor >= g.size) {
        throw ValidationError("read_sparse_graph: neighbor " + std::to_string(e.neighbor) +
                              " out of range in row " + std::to_string(i));
      }
      g.rows[i].push_back(e);
    }
  }
  return g;
}

}  // namespace regraph
