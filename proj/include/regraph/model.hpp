#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regraph/dataset.hpp"
#include "regraph/domain_transfer.hpp"
#include "regraph/param_store.hpp"
#include "regraph/semantic_pool.hpp"

namespace regraph {

enum class Variant { baseline, intra, intra_inter };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& name);

struct ModelConfig {
  std::size_t feature_dim = 32;    // D
  std::size_t latent_dim = 16;     // L
  std::size_t top_t = 8;           // t
  std::size_t heads = 4;           // K
  std::size_t fine_classes = 8;    // C_S
  std::size_t coarse_classes = 4;  // C_T
  std::size_t gcn_dim1 = 256;
  std::size_t gcn_dim2 = 128;
  std::size_t mlp_hidden = kSpatialHiddenDim;
  Variant variant = Variant::intra_inter;
  TransferScheme scheme = TransferScheme::learned;
  // Required for attribute/relationship/embedding schemes.
  std::optional<TransferGraph> transfer_graph;

  std::size_t target_head_width() const;
  void validate() const;
};

// Detached per-iteration copies of both classifier heads (weights restricted
// to the raw feature columns). Drives soft-mapping and node assembly; no
// gradient flows back through it.
struct Snapshot {
  SemanticPool source;
  SemanticPool target;
};

Snapshot make_snapshot(const ModelConfig& cfg, const ParamStore& params);

struct BatchInput {
  Tensor2 features;  // N_r x D
  std::vector<Box> boxes;
  std::vector<int> fine_labels;
  std::vector<int> coarse_labels;
  Tensor2 box_targets;  // N_r x 4
};

BatchInput batch_from_scene(const SyntheticScene& scene);

struct ModelOutput {
  Tensor2 target_logits;
  Tensor2 source_logits;
  Tensor2 target_box_deltas;
  SparseGraph intra_graph;  // empty for baseline
};

// Initializes every learnable tensor for the configured variant under the
// ParamStore naming convention (intra.layer{1,2}.head{k}.{mlp1,mlp2,proj}.{w,b},
// transfer.*, inter.*, head.{src,tgt}.{cls,box}.{w,b}).
ParamStore init_params(const ModelConfig& cfg, std::uint64_t seed);

// Full forward (and optionally backward, accumulating into params' grads).
// Returns the scalar training loss.
double model_loss(const ModelConfig& cfg, ParamStore& params, const BatchInput& batch,
                  const Snapshot& snapshot, bool with_grad, ModelOutput* out = nullptr);

// Classification logits used for soft-mapping: snapshot head applied to raw
// features (reasoning columns padded with zeros).
Tensor2 mapping_logits(const Tensor2& features, const SemanticPool& pool);

}  // namespace regraph
