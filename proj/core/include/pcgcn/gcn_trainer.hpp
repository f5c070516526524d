#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "pcgcn/graph.hpp"
#include "pcgcn/nn.hpp"
#include "pcgcn/partition.hpp"

namespace pcgcn {

struct TrainOptions {
  /// Epochs; every epoch visits each batch once.
  int iters = 50;
  double lr = 0.01;
  int hidden = 128;
  nn::LayerKind kind = nn::LayerKind::kGcn;
  int num_layers = 2;
  double dropout = 0.0;
  /// Drives model initialization, batch order and dropout.
  std::uint64_t seed = 1;
  /// Clusters merged into one batch.
  int bsize = 1;
};

struct TrainReport {
  /// Mean batch loss of the last epoch.
  double final_loss = 0.0;
  /// Loss of every optimizer step, in order.
  std::vector<double> loss_trace;
  /// 0/1 predictions for every node of the training graph.
  Matrix predictions;
  /// Micro-F1 on the validation graph, NaN when none was given.
  double val_f1 = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  int skipped_batches = 0;
};

struct TrainResult {
  nn::GcnModel model;
  TrainReport report;
};

struct TrainExtras {
  /// Scored into TrainReport::val_f1 after training.
  const Graph* val = nullptr;
  /// Warm start from this model instead of a fresh initialization.
  const nn::GcnModel* init = nullptr;
  /// Per training node flag; empty means every node is labeled.
  std::span<const char> labeled;
  /// Called after every epoch with the 1-based epoch number.
  std::function<void(int, const nn::GcnModel&)> on_epoch;
};

/// ClusterGCN training on `train` (features, labels and edge weights taken
/// from the graph). Each epoch permutes the clusters and walks them in
/// groups of `bsize`; a group is the subgraph induced by its clusters, so
/// edges between clusters of the same group are kept. Batches without
/// labeled nodes are skipped; if a whole epoch is skipped this throws.
TrainResult train_clustergcn(const Graph& train, const ClusterConfig& cfg, const TrainOptions& options,
                             const TrainExtras& extras = {});

/// Plain full-graph training with the same initialization and optimizer.
TrainResult train_full_batch(const Graph& train, const TrainOptions& options, const TrainExtras& extras = {});

/// Thresholded (multilabel, p >= 0.5) or arg-max one-hot (multiclass)
/// predictions of the model on a whole graph.
Matrix predict(const nn::GcnModel& model, const Graph& g);

/// Micro-averaged F1 pooled over all (node, label) pairs of `rows`. Returns 1
/// when there are no positives in either matrix.
double micro_f1(const Matrix& pred, const Matrix& truth, std::span<const NodeId> rows);
double micro_f1(const Matrix& pred, const Matrix& truth);

/// Micro-F1 of the model's predictions against the graph's labels.
double evaluate(const nn::GcnModel& model, const Graph& g);

struct EdgeRewards {
  /// Score per undirected edge, indexed by edge id.
  std::vector<double> scores;
  double mean = 0.0;
};

/// Node score: +1 per correctly predicted label and -1 per wrong one (the
/// class as a whole for multiclass). Edge score: sum of its endpoint scores.
/// The mean is taken over undirected edges and is 0 for an edgeless graph.
EdgeRewards edge_rewards(const Graph& g, const Matrix& predictions);
EdgeRewards edge_rewards(const nn::GcnModel& model, const Graph& g);

}  // namespace pcgcn
