#include "regraph/model.hpp"

#include <cmath>

#include "regraph/autodiff.hpp"

namespace regraph {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::baseline: return "baseline";
    case Variant::intra: return "intra";
    case Variant::intra_inter: return "intra_inter";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  if (name == "baseline") return Variant::baseline;
  if (name == "intra") return Variant::intra;
  if (name == "intra_inter") return Variant::intra_inter;
  throw ValidationError("unknown variant '" + name + "'");
}

std::size_t ModelConfig::target_head_width() const {
  switch (variant) {
    case Variant::baseline: return feature_dim;
    case Variant::intra: return feature_dim + gcn_dim2;
    case Variant::intra_inter: return feature_dim + 2 * gcn_dim2;
  }
  return feature_dim;
}

void ModelConfig::validate() const {
  if (fine_classes < coarse_classes || coarse_classes < 2) {
    throw ValidationError("model config: need C_S >= C_T >= 2");
  }
  if (heads == 0 || gcn_dim1 % heads != 0 || gcn_dim2 % heads != 0) {
    throw ValidationError("model config: K must divide both GCN layer widths");
  }
  if (top_t < 1) throw ValidationError("model config: t must be >= 1");
  if (latent_dim < 1) throw ValidationError("model config: L must be >= 1");
  if (variant == Variant::intra_inter && scheme != TransferScheme::learned &&
      !transfer_graph.has_value()) {
    throw ValidationError("model config: scheme '" + scheme_name(scheme) +
                          "' requires a transfer graph");
  }
}

namespace {

std::string layer_param(const std::string& module, std::size_t layer, std::size_t head,
                        const std::string& part, const std::string& wb) {
  return module + ".layer" + std::to_string(layer) + ".head" + std::to_string(head) + "." +
         part + "." + wb;
}

void init_gcn_module(ParamStore& ps, const std::string& module, const ModelConfig& cfg,
                     Rng& rng) {
  const std::size_t d_in[2] = {cfg.feature_dim + 1, cfg.gcn_dim1};
  const std::size_t e_out[2] = {cfg.gcn_dim1 / cfg.heads, cfg.gcn_dim2 / cfg.heads};
  for (std::size_t l = 0; l < 2; ++l) {
    for (std::size_t k = 1; k <= cfg.heads; ++k) {
      ps.add(layer_param(module, l + 1, k, "mlp1", "w"),
             glorot_uniform(4, cfg.mlp_hidden, 4, cfg.mlp_hidden, rng));
      ps.add(layer_param(module, l + 1, k, "mlp1", "b"), Tensor2(1, cfg.mlp_hidden));
      ps.add(layer_param(module, l + 1, k, "mlp2", "w"),
             glorot_uniform(cfg.mlp_hidden, 1, cfg.mlp_hidden, 1, rng));
      // small positive offset keeps every spatial head alive at init (an
      // all-zero head would park downstream ReLUs exactly on their kink)
      Tensor2 b2(1, 1);
      b2.at(0, 0) = 0.1;
      ps.add(layer_param(module, l + 1, k, "mlp2", "b"), std::move(b2));
      ps.add(layer_param(module, l + 1, k, "proj", "w"),
             glorot_uniform(e_out[l], d_in[l], d_in[l], e_out[l], rng));
      Tensor2 pb(1, e_out[l]);
      std::fill(pb.data.begin(), pb.data.end(), 0.01);
      ps.add(layer_param(module, l + 1, k, "proj", "b"), std::move(pb));
    }
  }
}

// Soft-mapping from a detached pool: softmax of (f W^T + b) over the pool's
// categories.
SoftMapping snapshot_mapping(const Tensor2& features, const SemanticPool& pool) {
  return soft_map(mapping_logits(features, pool));
}

struct ParamBinder {
  Tape& tape;
  ParamStore& ps;
  std::vector<std::pair<std::string, Tape::Var>> bound;

  Tape::Var operator()(const std::string& name) {
    Tape::Var v = tape.leaf(ps.value(name));
    bound.push_back({name, v});
    return v;
  }
};

// Two GCN layers on the tape; edges and nodes enter as tape vars.
Tape::Var gcn_branch(Tape& tape, ParamBinder& bind, const std::string& module,
                     const ModelConfig& cfg, Tape::Var edges, const Tensor2& geometry,
                     Tape::Var nodes, std::size_t n) {
  Tape::Var input = nodes;
  for (std::size_t l = 1; l <= 2; ++l) {
    std::vector<Tape::Var> parts;
    for (std::size_t k = 1; k <= cfg.heads; ++k) {
      Tape::Var hidden = tape.relu(tape.add_row_vector(
          tape.const_matmul(geometry, bind(layer_param(module, l, k, "mlp1", "w"))),
          bind(layer_param(module, l, k, "mlp1", "b"))));
      Tape::Var wk_flat = tape.relu(tape.add_row_vector(
          tape.matmul(hidden, bind(layer_param(module, l, k, "mlp2", "w"))),
          bind(layer_param(module, l, k, "mlp2", "b"))));
      Tape::Var wk = tape.reshape(wk_flat, n, n);
      Tape::Var patch = tape.matmul(tape.hadamard(wk, edges), input);
      parts.push_back(tape.relu(tape.add_row_vector(
          tape.matmul_nt(patch, bind(layer_param(module, l, k, "proj", "w"))),
          bind(layer_param(module, l, k, "proj", "b")))));
    }
    input = tape.concat_cols(parts);
  }
  return input;
}

// Latent projection -> cosine similarity -> top-t mask -> masked softmax.
// The selection mask is constant per forward pass.
Tape::Var learned_edges(Tape& tape, ParamBinder& bind, const std::string& phi_prefix,
                        Tape::Var features, std::size_t t, SparseGraph* out_graph) {
  Tape::Var z = tape.l2_normalize_rows(
      tape.add_row_vector(tape.matmul(features, bind(phi_prefix + ".w")),
                          bind(phi_prefix + ".b")),
      1e-12);
  Tape::Var sims = tape.matmul_nt(z, z);
  SparseGraph g = sparsify_topt(tape.value(sims), t);
  if (out_graph) *out_graph = g;
  return tape.masked_row_softmax(sims, g.mask());
}

}  // namespace

Snapshot make_snapshot(const ModelConfig& cfg, const ParamStore& params) {
  const std::size_t d = cfg.feature_dim;
  auto head_slice = [&](const std::string& prefix, const std::string& domain) {
    const Tensor2& w = params.value(prefix + ".w");
    const Tensor2& b = params.value(prefix + ".b");
    Tensor2 wd(w.rows, d);
    for (std::size_t i = 0; i < w.rows; ++i) {
      for (std::size_t j = 0; j < d; ++j) wd.at(i, j) = w.at(i, j);
    }
    return refresh_pool(wd, b, domain);
  };
  Snapshot snap;
  snap.source = head_slice("head.src.cls", "source");
  snap.target = head_slice("head.tgt.cls", "target");
  return snap;
}

Tensor2 mapping_logits(const Tensor2& features, const SemanticPool& pool) {
  if (features.cols != pool.feature_dim()) {
    throw DimensionError("mapping_logits: features " + shape_str(features) + " vs pool " +
                         shape_str(pool.pool));
  }
  Tensor2 logits(features.rows, pool.categories());
  for (std::size_t i = 0; i < features.rows; ++i) {
    for (std::size_t c = 0; c < pool.categories(); ++c) {
      double s = pool.pool.at(c, features.cols);  // bias
      for (std::size_t j = 0; j < features.cols; ++j) {
        s += features.at(i, j) * pool.pool.at(c, j);
      }
      logits.at(i, c) = s;
    }
  }
  return logits;
}

BatchInput batch_from_scene(const SyntheticScene& scene) {
  return BatchInput{scene.features, scene.boxes, scene.fine_labels, scene.coarse_labels,
                    scene.box_targets};
}

ParamStore init_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  ParamStore ps;
  Rng rng(sub_seed(seed, "params"));

  const std::size_t d = cfg.feature_dim;
  if (cfg.variant != Variant::baseline) {
    ps.add("intra.phi.w", glorot_uniform(d, cfg.latent_dim, d, cfg.latent_dim, rng));
    ps.add("intra.phi.b", Tensor2(1, cfg.latent_dim));
    init_gcn_module(ps, "intra", cfg, rng);
  }
  if (cfg.variant == Variant::intra_inter) {
    if (cfg.scheme == TransferScheme::learned) {
      ps.add("transfer.phi.w", glorot_uniform(d, cfg.latent_dim, d, cfg.latent_dim, rng));
      ps.add("transfer.phi.b", Tensor2(1, cfg.latent_dim));
    }
    init_gcn_module(ps, "inter", cfg, rng);
  }

  const std::size_t w_tgt = cfg.target_head_width();
  ps.add("head.src.cls.w", glorot_uniform(cfg.fine_classes, d, d, cfg.fine_classes, rng));
  ps.add("head.src.cls.b", Tensor2(1, cfg.fine_classes));
  ps.add("head.src.box.w", glorot_uniform(4, d, d, 4, rng));
  ps.add("head.src.box.b", Tensor2(1, 4));
  ps.add("head.tgt.cls.w",
         glorot_uniform(cfg.coarse_classes, w_tgt, w_tgt, cfg.coarse_classes, rng));
  ps.add("head.tgt.cls.b", Tensor2(1, cfg.coarse_classes));
  ps.add("head.tgt.box.w", glorot_uniform(4, w_tgt, w_tgt, 4, rng));
  ps.add("head.tgt.box.b", Tensor2(1, 4));
  return ps;
}

double model_loss(const ModelConfig& cfg, ParamStore& params, const BatchInput& batch,
                  const Snapshot& snapshot, bool with_grad, ModelOutput* out) {
  cfg.validate();
  const std::size_t n = batch.features.rows;
  if (batch.features.cols != cfg.feature_dim) {
    throw DimensionError("model_loss: features " + shape_str(batch.features) +
                         " vs configured D=" + std::to_string(cfg.feature_dim));
  }

  Tape tape;
  ParamBinder bind{tape, params, {}};

  Tape::Var f = tape.leaf(batch.features);
  std::vector<Tape::Var> enhanced_parts{f};
  SparseGraph intra_graph;

  if (cfg.variant != Variant::baseline) {
    const Tensor2 geometry = geometry_features(batch.boxes);

    // intra-domain reasoning
    Tape::Var intra_edges = learned_edges(tape, bind, "intra.phi", f, cfg.top_t, &intra_graph);
    SoftMapping m_tgt = snapshot_mapping(batch.features, snapshot.target);
    Tape::Var x_nodes = tape.leaf(assemble_nodes(m_tgt, snapshot.target));
    enhanced_parts.push_back(
        gcn_branch(tape, bind, "intra", cfg, intra_edges, geometry, x_nodes, n));

    // inter-domain transfer
    if (cfg.variant == Variant::intra_inter) {
      SoftMapping m_src = snapshot_mapping(batch.features, snapshot.source);
      Tape::Var inter_edges;
      if (cfg.scheme == TransferScheme::learned) {
        inter_edges = learned_edges(tape, bind, "transfer.phi", f, cfg.top_t, nullptr);
      } else {
        SparseGraph composed =
            compose_region_edges(m_src, *cfg.transfer_graph, m_tgt, cfg.top_t);
        inter_edges = tape.leaf(composed.densify());
      }
      Tape::Var y_nodes = tape.leaf(assemble_nodes(m_src, snapshot.source));
      enhanced_parts.push_back(
          gcn_branch(tape, bind, "inter", cfg, inter_edges, geometry, y_nodes, n));
    }
  }

  Tape::Var enhanced =
      enhanced_parts.size() == 1 ? enhanced_parts[0] : tape.concat_cols(enhanced_parts);

  Tape::Var tgt_logits = tape.add_row_vector(
      tape.matmul_nt(enhanced, bind("head.tgt.cls.w")), bind("head.tgt.cls.b"));
  Tape::Var tgt_box = tape.add_row_vector(tape.matmul_nt(enhanced, bind("head.tgt.box.w")),
                                          bind("head.tgt.box.b"));
  Tape::Var src_logits = tape.add_row_vector(tape.matmul_nt(f, bind("head.src.cls.w")),
                                             bind("head.src.cls.b"));
  Tape::Var src_box = tape.add_row_vector(tape.matmul_nt(f, bind("head.src.box.w")),
                                          bind("head.src.box.b"));

  Tape::Var loss = tape.add_scalars({
      tape.cross_entropy_mean(tgt_logits, batch.coarse_labels),
      tape.smooth_l1_mean(tgt_box, batch.box_targets),
      tape.cross_entropy_mean(src_logits, batch.fine_labels),
      tape.smooth_l1_mean(src_box, batch.box_targets),
  });

  if (with_grad) {
    tape.backward(loss);
    for (const auto& [name, var] : bind.bound) {
      Tensor2& g = params.grad(name);
      const Tensor2& tg = tape.grad(var);
      for (std::size_t i = 0; i < g.size(); ++i) g.data[i] += tg.data[i];
    }
  }

  if (out) {
    out->target_logits = tape.value(tgt_logits);
    out->source_logits = tape.value(src_logits);
    out->target_box_deltas = tape.value(tgt_box);
    out->intra_graph = std::move(intra_graph);
  }
  return tape.value(loss).at(0, 0);
}

}  // namespace regraph
