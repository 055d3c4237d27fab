#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "regraph/intra_graph.hpp"
#include "regraph/semantic_pool.hpp"
#include "regraph/tensor.hpp"

namespace regraph {

enum class TransferScheme { attribute, relationship, embedding, learned };

std::string scheme_name(TransferScheme s);
TransferScheme parse_scheme(const std::string& name);

// Category-to-category transfer weights between a source and target vocabulary.
struct TransferGraph {
  std::string source_domain;
  std::string target_domain;
  TransferScheme scheme = TransferScheme::learned;
  Tensor2 weights;  // C_S x C_T
};

// (C_S + C_T) x K_attr attribute frequency table.
struct AttributeTable {
  std::vector<std::string> categories;
  std::vector<std::string> attributes;
  Tensor2 counts;
};

// C_S x C_T co-occurrence counts.
struct CooccurrenceTable {
  std::vector<std::string> source_names;
  std::vector<std::string> target_names;
  Tensor2 counts;
};

// Fixed-dimension word vectors keyed by category name.
struct EmbeddingTable {
  std::size_t dim = 0;
  std::map<std::string, std::vector<double>> vectors;
};

// JS divergence with natural log; 0*log(0/x) terms are 0. Range [0, ln 2].
double js_divergence(const std::vector<double>& p, const std::vector<double>& q);

// Attribute scheme. Default stores the similarity 1 - JS/ln2; raw_js stores
// the literal divergence.
TransferGraph build_attribute_graph(const AttributeTable& table,
                                    const std::vector<std::string>& src_names,
                                    const std::vector<std::string>& tgt_names,
                                    bool raw_js = false);

// t_ij = f_ij / sqrt(d_ii d_jj), d_ii = row sum, d_jj = column sum.
TransferGraph build_relationship_graph(const CooccurrenceTable& table);

// Row softmax of pairwise cosine similarities.
TransferGraph build_embedding_graph(const std::vector<std::string>& src_names,
                                    const std::vector<std::string>& tgt_names,
                                    const EmbeddingTable& table);

// Learned scheme: cosine similarities between two row-unit-normalized latents,
// then top-t sparsification + row softmax (same post-processing as intra).
SparseGraph learned_transfer_edges(const Tensor2& z_src, const Tensor2& z_tgt, std::size_t t);

// E_{S->T} = M_S G M_T^T, then top-t + row softmax.
SparseGraph compose_region_edges(const SoftMapping& m_src, const TransferGraph& g,
                                 const SoftMapping& m_tgt, std::size_t t);
// Dense product only (no sparsification), for callers that post-process.
Tensor2 compose_region_edges_dense(const SoftMapping& m_src, const TransferGraph& g,
                                   const SoftMapping& m_tgt);

// File formats (see docs/file-formats.md)
AttributeTable read_attribute_table(std::istream& is);
CooccurrenceTable read_cooccurrence_table(std::istream& is);
EmbeddingTable read_embedding_table(std::istream& is);
void write_transfer_graph(std::ostream& os, const TransferGraph& g);
TransferGraph read_transfer_graph(std::istream& is);

}  // namespace regraph
