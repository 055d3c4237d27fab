#include "regraph/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace regraph {

namespace {

std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct SgdState {
  std::map<std::string, Tensor2> momentum;
};

void sgd_step(ParamStore& ps, SgdState& state, double lr, double momentum,
              double weight_decay) {
  for (auto& [name, entry] : ps.entries()) {
    auto [it, inserted] =
        state.momentum.try_emplace(name, Tensor2(entry.value.rows, entry.value.cols));
    Tensor2& buf = it->second;
    for (std::size_t i = 0; i < entry.value.size(); ++i) {
      const double g = entry.grad.data[i] + weight_decay * entry.value.data[i];
      buf.data[i] = momentum * buf.data[i] + g;
      entry.value.data[i] -= lr * buf.data[i];
    }
  }
}

struct EvalStats {
  double top1 = 0.0;
  double mean_per_class = 0.0;
  double box_l2 = 0.0;
};

EvalStats evaluate(const ModelConfig& cfg, ParamStore& ps, const Snapshot& snap,
                   const std::vector<SyntheticScene>& scenes) {
  std::size_t correct = 0, total = 0;
  std::vector<std::size_t> class_correct(cfg.coarse_classes, 0);
  std::vector<std::size_t> class_total(cfg.coarse_classes, 0);
  double box_err = 0.0;
  for (const SyntheticScene& scene : scenes) {
    ModelOutput out;
    BatchInput batch = batch_from_scene(scene);
    model_loss(cfg, ps, batch, snap, false, &out);
    for (std::size_t i = 0; i < out.target_logits.rows; ++i) {
      std::size_t arg = 0;
      for (std::size_t c = 1; c < out.target_logits.cols; ++c) {
        if (out.target_logits.at(i, c) > out.target_logits.at(i, arg)) arg = c;
      }
      const std::size_t truth = static_cast<std::size_t>(scene.coarse_labels[i]);
      ++total;
      ++class_total[truth];
      if (arg == truth) {
        ++correct;
        ++class_correct[truth];
      }
      double e2 = 0.0;
      for (std::size_t j = 0; j < 4; ++j) {
        const double d = out.target_box_deltas.at(i, j) - scene.box_targets.at(i, j);
        e2 += d * d;
      }
      box_err += std::sqrt(e2);
    }
  }
  EvalStats s;
  s.top1 = total ? static_cast<double>(correct) / total : 0.0;
  double sum = 0.0;
  std::size_t seen = 0;
  for (std::size_t c = 0; c < cfg.coarse_classes; ++c) {
    if (class_total[c]) {
      sum += static_cast<double>(class_correct[c]) / class_total[c];
      ++seen;
    }
  }
  s.mean_per_class = seen ? sum / seen : 0.0;
  s.box_l2 = total ? box_err / total : 0.0;
  return s;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs == 0) throw ValidationError("train config: epochs must be >= 1");
  if (batch_size == 0) throw ValidationError("train config: batch_size must be >= 1");
  if (lr < 0.0) throw ValidationError("train config: lr must be >= 0");
  if (data.fine_classes != model.fine_classes ||
      data.coarse_classes != model.coarse_classes ||
      data.feature_dim != model.feature_dim) {
    throw ValidationError("train config: data/model dimension mismatch");
  }
  model.validate();
}

std::string TrainConfig::canonical_text() const {
  std::ostringstream os;
  os << "seed=" << seed << "\nepochs=" << epochs << "\nbatch_size=" << batch_size
     << "\nlr=" << fmt_real(lr) << "\nmomentum=" << fmt_real(momentum)
     << "\nweight_decay=" << fmt_real(weight_decay) << "\nscenes=" << data.scenes
     << "\nn_r=" << data.proposals << "\nd=" << data.feature_dim
     << "\nc_s=" << data.fine_classes << "\nc_t=" << data.coarse_classes
     << "\ncontext_alpha=" << fmt_real(data.context_alpha)
     << "\nnoise_sigma=" << fmt_real(data.noise_sigma) << "\nl=" << model.latent_dim
     << "\nt=" << model.top_t << "\nk=" << model.heads << "\ngcn_dim1=" << model.gcn_dim1
     << "\ngcn_dim2=" << model.gcn_dim2 << "\nmlp_hidden=" << model.mlp_hidden
     << "\nscheme=" << scheme_name(model.scheme)
     << "\nvariant=" << variant_name(model.variant) << "\n";
  return os.str();
}

std::uint64_t TrainConfig::config_hash() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : canonical_text()) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

MetricsReport train(const TrainConfig& config, ParamStore* final_params,
                    SparseGraph* final_intra_graph) {
  config.validate();
  DatasetConfig dcfg = config.data;
  dcfg.seed = config.seed;
  SyntheticDataset ds = generate_dataset(dcfg);

  ParamStore ps = init_params(config.model, config.seed);
  SgdState sgd;

  MetricsReport report;
  report.variant = variant_name(config.model.variant);
  report.seed = config.seed;
  report.config_hash = config.config_hash();

  const std::size_t drop1 = config.epochs * 2 / 3;
  const std::size_t drop2 = config.epochs * 8 / 9;
  std::size_t iteration = 0;
  SparseGraph last_graph;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double lr = config.lr;
    if (epoch >= drop1) lr *= 0.1;
    if (epoch >= drop2) lr *= 0.1;

    double loss_sum = 0.0;
    std::size_t steps = 0;
    std::size_t in_batch = 0;
    Snapshot snap = make_snapshot(config.model, ps);
    ps.zero_grads();
    for (const SyntheticScene& scene : ds.train) {
      ++iteration;
      if (in_batch == 0) {
        // detached head copy taken before the forward pass of each step
        snap = make_snapshot(config.model, ps);
        ps.zero_grads();
      }
      BatchInput batch = batch_from_scene(scene);
      ModelOutput out;
      const double loss =
          model_loss(config.model, ps, batch, snap, true,
                     final_intra_graph ? &out : nullptr);
      if (!std::isfinite(loss)) {
        throw DivergenceError("train: non-finite loss at iteration " +
                              std::to_string(iteration));
      }
      if (final_intra_graph) last_graph = std::move(out.intra_graph);
      loss_sum += loss;
      ++steps;
      if (++in_batch == config.batch_size) {
        if (config.batch_size > 1) {
          for (auto& [name, entry] : ps.entries()) {
            for (double& g : entry.grad.data) g /= static_cast<double>(config.batch_size);
          }
        }
        sgd_step(ps, sgd, lr, config.momentum, config.weight_decay);
        in_batch = 0;
      }
    }
    if (in_batch > 0) {
      for (auto& [name, entry] : ps.entries()) {
        for (double& g : entry.grad.data) g /= static_cast<double>(in_batch);
      }
      sgd_step(ps, sgd, lr, config.momentum, config.weight_decay);
    }

    Snapshot eval_snap = make_snapshot(config.model, ps);
    EvalStats stats = evaluate(config.model, ps, eval_snap, ds.test);
    EpochMetrics em;
    em.epoch = epoch;
    em.train_loss = steps ? loss_sum / steps : 0.0;
    em.target_top1 = stats.top1;
    em.mean_per_class_acc = stats.mean_per_class;
    em.box_l2 = stats.box_l2;
    report.epochs.push_back(em);
  }

  if (final_params) *final_params = std::move(ps);
  if (final_intra_graph) *final_intra_graph = std::move(last_graph);
  return report;
}

void write_metrics_csv(std::ostream& os, const MetricsReport& report) {
  os << "epoch,variant,seed,config_hash,train_loss,target_top1,mean_per_class_acc,box_l2\n";
  for (const EpochMetrics& e : report.epochs) {
    os << e.epoch << "," << report.variant << "," << report.seed << "," << report.config_hash
       << "," << fmt_real(e.train_loss) << "," << fmt_real(e.target_top1) << ","
       << fmt_real(e.mean_per_class_acc) << "," << fmt_real(e.box_l2) << "\n";
  }
}

MetricsReport read_metrics_csv(std::istream& is) {
  MetricsReport r;
  std::string line;
  if (!std::getline(is, line) ||
      line != "epoch,variant,seed,config_hash,train_loss,target_top1,mean_per_class_acc,"
              "box_l2") {
    throw ValidationError("metrics csv: bad header");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) throw ValidationError("metrics csv: bad row '" + line + "'");
    EpochMetrics e;
    e.epoch = std::stoul(cells[0]);
    r.variant = cells[1];
    r.seed = std::stoull(cells[2]);
    r.config_hash = std::stoull(cells[3]);
    e.train_loss = std::stod(cells[4]);
    e.target_top1 = std::stod(cells[5]);
    e.mean_per_class_acc = std::stod(cells[6]);
    e.box_l2 = std::stod(cells[7]);
    r.epochs.push_back(e);
  }
  return r;
}

AblationResult run_ablation(const TrainConfig& base, const std::vector<std::uint64_t>& seeds) {
  if (seeds.size() < 3) throw ValidationError("run_ablation: need at least 3 seeds");
  AblationResult result;
  result.seeds = seeds;
  const Variant variants[] = {Variant::baseline, Variant::intra, Variant::intra_inter};
  for (Variant v : variants) {
    AblationRow row;
    row.variant = variant_name(v);
    for (std::uint64_t seed : seeds) {
      TrainConfig cfg = base;
      cfg.seed = seed;
      cfg.model.variant = v;
      row.per_seed_top1.push_back(train(cfg).final_top1());
    }
    double mean = 0.0;
    for (double x : row.per_seed_top1) mean += x;
    mean /= row.per_seed_top1.size();
    double var = 0.0;
    for (double x : row.per_seed_top1) var += (x - mean) * (x - mean);
    row.mean = mean;
    row.stddev = row.per_seed_top1.size() > 1
                     ? std::sqrt(var / (row.per_seed_top1.size() - 1))
                     : 0.0;
    result.rows.push_back(std::move(row));
  }
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    if (result.rows[2].per_seed_top1[s] >= result.rows[1].per_seed_top1[s] &&
        result.rows[1].per_seed_top1[s] >= result.rows[0].per_seed_top1[s]) {
      ++result.monotone_seeds;
    }
  }
  result.mean_monotone =
      result.rows[2].mean > result.rows[1].mean && result.rows[1].mean > result.rows[0].mean;
  return result;
}

void write_ablation_csv(std::ostream& os, const AblationResult& r) {
  os << "variant,mean,stddev";
  for (std::uint64_t s : r.seeds) os << ",seed_" << s;
  os << "\n";
  for (const AblationRow& row : r.rows) {
    os << row.variant << "," << fmt_real(row.mean) << ","
       << (r.seeds.size() > 1 ? fmt_real(row.stddev) : std::string("-"));
    for (double v : row.per_seed_top1) os << "," << fmt_real(v);
    os << "\n";
  }
}

void write_ablation_text(std::ostream& os, const AblationResult& r) {
  os << "variant        mean      stddev    (target-domain top-1, " << r.seeds.size()
     << " seeds)\n";
  for (const AblationRow& row : r.rows) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-13s %8.4f  %8.4f\n", row.variant.c_str(), row.mean,
                  row.stddev);
    os << buf;
  }
  os << "per-seed monotone ordering (intra_inter >= intra >= baseline): "
     << r.monotone_seeds << "/" << r.seeds.size() << "\n";
  os << "mean ordering " << (r.mean_monotone ? "holds" : "does NOT hold") << "\n";
}

AblationResult read_ablation_csv(std::istream& is) {
  AblationResult r;
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("ablation csv: empty file");
  {
    std::istringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 3 || cells[0] != "variant") {
      throw ValidationError("ablation csv: bad header");
    }
    for (std::size_t i = 3; i < cells.size(); ++i) {
      if (cells[i].rfind("seed_", 0) != 0) throw ValidationError("ablation csv: bad header");
      r.seeds.push_back(std::stoull(cells[i].substr(5)));
    }
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 3 + r.seeds.size()) {
      throw ValidationError("ablation csv: bad row '" + line + "'");
    }
    AblationRow row;
    row.variant = cells[0];
    row.mean = std::stod(cells[1]);
    row.stddev = cells[2] == "-" ? 0.0 : std::stod(cells[2]);
    for (std::size_t i = 3; i < cells.size(); ++i) {
      row.per_seed_top1.push_back(std::stod(cells[i]));
    }
    r.rows.push_back(std::move(row));
  }
  if (r.rows.size() == 3) {
    for (std::size_t s = 0; s < r.seeds.size(); ++s) {
      if (r.rows[2].per_seed_top1[s] >= r.rows[1].per_seed_top1[s] &&
          r.rows[1].per_seed_top1[s] >= r.rows[0].per_seed_top1[s]) {
        ++r.monotone_seeds;
      }
    }
    r.mean_monotone =
        r.rows[2].mean > r.rows[1].mean && r.rows[1].mean > r.rows[0].mean;
  }
  return r;
}

}  // namespace regraph
