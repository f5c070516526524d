#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pcgcn/config.hpp"
#include "pcgcn/dataset.hpp"
#include "pcgcn/gcn_trainer.hpp"
#include "pcgcn/partition.hpp"
#include "pcgcn/policy.hpp"

namespace pcgcn {

struct SearchRecord {
  int step = 0;
  double epsilon = 0.0;
  std::vector<std::int64_t> action_hist;
  double reward = 0.0;
  double val_f1 = 0.0;
  bool best = false;
  /// 0 unless timing is enabled.
  double wall_ms = 0.0;
  bool skipped = false;
};

struct SearchResult {
  ClusterConfig best;
  double best_val_f1 = -std::numeric_limits<double>::infinity();
  int best_step = -1;
  /// GCN trained at the best step.
  nn::GcnModel best_model;
  PolicyModel policy;
  std::vector<SearchRecord> log;
};

/// Node embeddings used in edge states: leading singular vectors of the
/// training graph.
Matrix state_embeddings(const Dataset& data, const DataOptions& options);

/// The policy-driven cluster search on the training graph. `on_step` sees
/// every record as soon as it is produced.
SearchResult search(const SearchConfig& cfg, const Dataset& data, const Matrix& embeddings,
                    const std::function<void(const SearchRecord&)>& on_step = {});

/// Options of the inner or final GCN training derived from the config.
TrainOptions train_options(const SearchConfig& cfg, int epochs);

struct FinalResult {
  nn::GcnModel model;
  double test_f1 = 0.0;
  double best_val_f1 = 0.0;
  int best_epoch = 0;
  std::vector<double> loss_trace;
};

/// Trains for final_epochs on `clusters`, keeps the parameters of the epoch
/// with the highest validation micro-F1 and scores them on the test graph.
FinalResult final_train(const ClusterConfig& clusters, const SearchConfig& cfg, const Dataset& data);

struct BaselineResult {
  ClusterConfig clusters;
  FinalResult final;
};

/// Same training on a single partition of the unit-weight training graph.
BaselineResult baseline_clustergcn(const SearchConfig& cfg, const Dataset& data);

/// LFR graph from config.lfr with SVD node features and a stratified split.
Dataset make_lfr_dataset(const Config& config);
/// Loads config.data.dir, or generates an LFR dataset when it is empty.
Dataset load_or_generate(const Config& config);

/// `step,epsilon,reward,val_f1,best,action_hist_0..p,wall_ms`.
std::string metrics_csv(const std::vector<SearchRecord>& log, int p);

/// Writes metrics.csv, best_clusters.tsv, policy.ckpt, gcn.ckpt and config.resolved.
void save_run(const std::filesystem::path& dir, const Config& config, const SearchResult& result);

/// Shortest round-trip decimal form ("nan" for NaN).
std::string format_number(double v);

}  // namespace pcgcn
