#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "regraph/dataset.hpp"
#include "regraph/model.hpp"

namespace regraph {

struct TrainConfig {
  std::uint64_t seed = 1;
  std::size_t epochs = 12;
  std::size_t batch_size = 1;  // scenes per optimizer step
  double lr = 0.02;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  DatasetConfig data;
  ModelConfig model;

  void validate() const;
  // Canonical key=value text of the effective config; hashed for reports.
  std::string canonical_text() const;
  std::uint64_t config_hash() const;
};

struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double target_top1 = 0.0;       // test-split accuracy over proposals
  double mean_per_class_acc = 0.0;
  double box_l2 = 0.0;
};

struct MetricsReport {
  std::string variant;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::vector<EpochMetrics> epochs;

  double final_top1() const { return epochs.empty() ? 0.0 : epochs.back().target_top1; }
};

// SGD with momentum and weight decay; lr x0.1 at 2/3 and 8/9 of total epochs.
// The pool snapshot is refreshed before every optimizer step.
MetricsReport train(const TrainConfig& config, ParamStore* final_params = nullptr,
                    SparseGraph* final_intra_graph = nullptr);

// CSV: one row per epoch; header documented in docs/file-formats.md.
void write_metrics_csv(std::ostream& os, const MetricsReport& report);
MetricsReport read_metrics_csv(std::istream& is);

struct AblationRow {
  std::string variant;
  std::vector<double> per_seed_top1;
  double mean = 0.0;
  double stddev = 0.0;
};

struct AblationResult {
  std::vector<std::uint64_t> seeds;
  std::vector<AblationRow> rows;  // baseline, intra, intra_inter
  std::size_t monotone_seeds = 0;  // seeds with intra_inter >= intra >= baseline
  bool mean_monotone = false;
};

AblationResult run_ablation(const TrainConfig& base, const std::vector<std::uint64_t>& seeds);

void write_ablation_csv(std::ostream& os, const AblationResult& r);
void write_ablation_text(std::ostream& os, const AblationResult& r);
AblationResult read_ablation_csv(std::istream& is);

}  // namespace regraph
