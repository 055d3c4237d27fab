#include "regraph/semantic_pool.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

namespace regraph {

SemanticPool refresh_pool(const Tensor2& head_weight, const Tensor2& head_bias,
                          const std::string& domain_id) {
  if (head_bias.rows != 1 || head_bias.cols != head_weight.rows) {
    throw DimensionError("refresh_pool: weight " + shape_str(head_weight) + " vs bias " +
                         shape_str(head_bias));
  }
  SemanticPool p;
  p.domain_id = domain_id;
  p.pool = Tensor2(head_weight.rows, head_weight.cols + 1);
  for (std::size_t c = 0; c < head_weight.rows; ++c) {
    for (std::size_t j = 0; j < head_weight.cols; ++j) p.pool.at(c, j) = head_weight.at(c, j);
    p.pool.at(c, head_weight.cols) = head_bias.at(0, c);
  }
  return p;
}

SoftMapping soft_map(const Tensor2& logits) { return SoftMapping{row_softmax(logits)}; }

Tensor2 assemble_nodes(const SoftMapping& mapping, const SemanticPool& pool) {
  if (mapping.weights.cols != pool.categories()) {
    throw DimensionError("assemble_nodes: mapping " + shape_str(mapping.weights) +
                         " vs pool " + shape_str(pool.pool));
  }
  return matmul(mapping.weights, pool.pool);
}

void write_pool(std::ostream& os, const SemanticPool& pool) {
  os << pool.domain_id << " " << pool.categories() << " " << pool.feature_dim() << "\n";
  char buf[32];
  for (std::size_t c = 0; c < pool.pool.rows; ++c) {
    for (std::size_t j = 0; j < pool.pool.cols; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", pool.pool.at(c, j));
      os << (j ? " " : "") << buf;
    }
    os << "\n";
  }
}

SemanticPool read_pool(std::istream& is) {
  SemanticPool p;
  std::size_t c = 0, d = 0;
  if (!(is >> p.domain_id >> c >> d)) {
    throw ValidationError("read_pool: bad header");
  }
  p.pool = Tensor2(c, d + 1);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < d + 1; ++j) {
      if (!(is >> p.pool.at(i, j))) {
        throw ValidationError("read_pool: truncated at row " + std::to_string(i));
      }
    }
  }
  return p;
}

}  // namespace regraph
