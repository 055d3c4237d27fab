#pragma once

#include <iosfwd>
#include <string>

#include "regraph/tensor.hpp"

namespace regraph {

// Per-domain pool of classifier weight rows (weights ++ bias per category),
// refreshed as a detached snapshot each training iteration.
struct SemanticPool {
  std::string domain_id;
  Tensor2 pool;  // C x (D+1)

  std::size_t categories() const { return pool.rows; }
  std::size_t feature_dim() const { return pool.cols == 0 ? 0 : pool.cols - 1; }
};

// Row-stochastic soft assignment of regions to categories.
struct SoftMapping {
  Tensor2 weights;  // N_r x C
};

// pool row c = [head_weight row c, head_bias c].
SemanticPool refresh_pool(const Tensor2& head_weight, const Tensor2& head_bias,
                          const std::string& domain_id);

// Row softmax of classification logits.
SoftMapping soft_map(const Tensor2& logits);

// X = M P.
Tensor2 assemble_nodes(const SoftMapping& mapping, const SemanticPool& pool);

// Dump format: header "domain C D", then C lines of D+1 reals.
void write_pool(std::ostream& os, const SemanticPool& pool);
SemanticPool read_pool(std::istream& is);

}  // namespace regraph
