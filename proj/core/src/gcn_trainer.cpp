#include "pcgcn/gcn_trainer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pcgcn {
namespace {

// Borrows features and labels from the whole graph when `x_ref` is set,
// otherwise owns copies for a subgraph.
struct Batch {
  SparseMatrix adj;
  std::vector<NodeId> mask;
  const Matrix* x_ref = nullptr;
  const Labels* labels_ref = nullptr;
  Matrix x_own;
  Labels labels_own;

  const Matrix& x() const { return x_ref ? *x_ref : x_own; }
  const Labels& labels() const { return labels_ref ? *labels_ref : labels_own; }
};

std::vector<NodeId> labeled_rows(std::span<const NodeId> to_parent, std::span<const char> labeled) {
  std::vector<NodeId> rows;
  for (std::size_t i = 0; i < to_parent.size(); ++i) {
    if (labeled.empty() || labeled[static_cast<std::size_t>(to_parent[i])]) rows.push_back(static_cast<NodeId>(i));
  }
  return rows;
}

Batch batch_of(Subgraph sub, std::span<const char> labeled) {
  Batch b;
  b.adj = normalize_adjacency(sub.graph);
  b.mask = labeled_rows(sub.to_parent, labeled);
  b.x_own = sub.graph.features();
  b.labels_own = sub.graph.labels();
  return b;
}

void check_inputs(const Graph& train, const TrainOptions& o, const TrainExtras& e) {
  if (o.iters < 1) throw std::invalid_argument("iters must be >= 1");
  if (!(o.lr > 0.0)) throw std::invalid_argument("lr must be positive");
  if (o.hidden < 1) throw std::invalid_argument("hidden width must be >= 1");
  if (!(o.dropout >= 0.0 && o.dropout < 1.0)) throw std::invalid_argument("dropout must lie in [0, 1)");
  if (train.num_nodes() == 0) throw std::invalid_argument("training graph is empty");
  if (train.features().rows() != train.num_nodes() || train.features().cols() == 0) {
    throw std::invalid_argument("training graph has no features");
  }
  if (train.labels().num_nodes() != train.num_nodes()) throw std::invalid_argument("training graph has no labels");
  if (!e.labeled.empty() && e.labeled.size() != static_cast<std::size_t>(train.num_nodes())) {
    throw std::invalid_argument("labeled mask does not match the training graph");
  }
}

nn::GcnModel initial_model(const Graph& train, const TrainOptions& o, const TrainExtras& e) {
  if (e.init) {
    if (e.init->layers.front().in_dim() != train.features().cols() ||
        e.init->layers.back().out_dim() != train.labels().num_labels()) {
      throw std::invalid_argument("warm-start model does not fit the training graph");
    }
    return *e.init;
  }
  Rng init_rng(derive_seed(o.seed, 0));
  return nn::GcnModel::create(o.kind, train.features().cols(), o.hidden, train.labels().num_labels(),
                              nn::head_for(train.labels().kind()), init_rng, o.num_layers);
}

// Shared epoch loop; `epoch_batches` yields the batches of one epoch in order.
template <typename NextEpoch>
TrainResult run_training(const Graph& train, const TrainOptions& o, const TrainExtras& e, Rng& rng,
                         NextEpoch&& epoch_batches) {
  TrainResult result{initial_model(train, o, e), {}};
  nn::AdamState adam;
  const nn::Dropout dropout{o.dropout, o.dropout > 0.0 ? &rng : nullptr};
  for (int epoch = 1; epoch <= o.iters; ++epoch) {
    const std::vector<const Batch*> batches = epoch_batches(rng);
    double epoch_loss = 0.0;
    int used = 0;
    for (const Batch* b : batches) {
      if (b->mask.empty()) {
        ++result.report.skipped_batches;
        continue;
      }
      auto lg = nn::loss_and_grad(result.model, b->adj, b->x(), b->labels(), b->mask, dropout);
      auto params = result.model.parameters();
      nn::adam_step(params, lg.grads, adam, o.lr);
      result.report.loss_trace.push_back(lg.loss);
      epoch_loss += lg.loss;
      ++used;
    }
    if (used == 0) throw std::runtime_error("no labeled nodes in any batch");
    result.report.final_loss = epoch_loss / used;
    result.report.iterations = epoch;
    if (e.on_epoch) e.on_epoch(epoch, result.model);
  }
  result.report.predictions = predict(result.model, train);
  if (e.val) result.report.val_f1 = evaluate(result.model, *e.val);
  return result;
}

}  // namespace

TrainResult train_clustergcn(const Graph& train, const ClusterConfig& cfg, const TrainOptions& options,
                             const TrainExtras& extras) {
  check_inputs(train, options, extras);
  if (cfg.assign.size() != static_cast<std::size_t>(train.num_nodes())) {
    throw std::invalid_argument("cluster assignment does not match the training graph");
  }
  if (options.bsize < 1 || options.bsize > cfg.k) {
    throw std::invalid_argument("bsize must lie in [1, k], got " + std::to_string(options.bsize));
  }
  for (NodeId size : cfg.cluster_sizes()) {
    if (size == 0) throw std::invalid_argument("cluster configuration has an empty cluster");
  }
  Rng rng(derive_seed(options.seed, 1));
  std::vector<int> order(static_cast<std::size_t>(cfg.k));
  for (int c = 0; c < cfg.k; ++c) order[static_cast<std::size_t>(c)] = c;

  if (options.bsize == 1) {
    std::vector<Batch> clusters;
    for (auto& sub : cluster_subgraphs(train, cfg)) clusters.push_back(batch_of(std::move(sub), extras.labeled));
    return run_training(train, options, extras, rng, [&](Rng& r) {
      shuffle(order, r);
      std::vector<const Batch*> out;
      for (int c : order) out.push_back(&clusters[static_cast<std::size_t>(c)]);
      return out;
    });
  }

  std::vector<Batch> scratch;
  return run_training(train, options, extras, rng, [&](Rng& r) {
    shuffle(order, r);
    scratch.clear();
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(options.bsize)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(options.bsize));
      const std::span<const int> group(order.data() + start, end - start);
      scratch.push_back(batch_of(merge_clusters(train, cfg, group), extras.labeled));
    }
    std::vector<const Batch*> out;
    for (const auto& b : scratch) out.push_back(&b);
    return out;
  });
}

TrainResult train_full_batch(const Graph& train, const TrainOptions& options, const TrainExtras& extras) {
  check_inputs(train, options, extras);
  Rng rng(derive_seed(options.seed, 1));
  Batch whole;
  whole.adj = normalize_adjacency(train);
  whole.x_ref = &train.features();
  whole.labels_ref = &train.labels();
  std::vector<NodeId> all(static_cast<std::size_t>(train.num_nodes()));
  for (NodeId v = 0; v < train.num_nodes(); ++v) all[static_cast<std::size_t>(v)] = v;
  whole.mask = labeled_rows(all, extras.labeled);
  return run_training(train, options, extras, rng, [&](Rng&) { return std::vector<const Batch*>{&whole}; });
}

Matrix predict(const nn::GcnModel& model, const Graph& g) {
  const Matrix probs = nn::forward(model, normalize_adjacency(g), g.features());
  Matrix out = Matrix::Zero(probs.rows(), probs.cols());
  if (model.head == nn::Head::kSoftmax) {
    for (Eigen::Index i = 0; i < probs.rows(); ++i) {
      Eigen::Index best = 0;
      for (Eigen::Index j = 1; j < probs.cols(); ++j) {
        if (probs(i, j) > probs(i, best)) best = j;
      }
      out(i, best) = 1.0;
    }
  } else {
    out = (probs.array() >= 0.5).cast<double>().matrix();
  }
  return out;
}

double micro_f1(const Matrix& pred, const Matrix& truth, std::span<const NodeId> rows) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols()) {
    throw std::invalid_argument("micro_f1: prediction and truth shapes differ");
  }
  double tp = 0, fp = 0, fn = 0;
  for (NodeId r : rows) {
    if (r < 0 || r >= pred.rows()) throw std::invalid_argument("micro_f1: row out of range");
    for (Eigen::Index j = 0; j < pred.cols(); ++j) {
      const bool p = pred(r, j) > 0.5;
      const bool t = truth(r, j) > 0.5;
      tp += p && t;
      fp += p && !t;
      fn += !p && t;
    }
  }
  if (tp + fp + fn == 0) return 1.0;
  return 2.0 * tp / (2.0 * tp + fp + fn);
}

double micro_f1(const Matrix& pred, const Matrix& truth) {
  std::vector<NodeId> rows(static_cast<std::size_t>(pred.rows()));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<NodeId>(i);
  return micro_f1(pred, truth, rows);
}

double evaluate(const nn::GcnModel& model, const Graph& g) {
  return micro_f1(predict(model, g), g.labels().to_matrix());
}

EdgeRewards edge_rewards(const Graph& g, const Matrix& predictions) {
  const Labels& labels = g.labels();
  if (predictions.rows() != g.num_nodes() || predictions.cols() != labels.num_labels()) {
    throw std::invalid_argument("edge_rewards: predictions do not match the graph");
  }
  std::vector<double> node_score(static_cast<std::size_t>(g.num_nodes()), 0.0);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (labels.kind() == TaskKind::kMulticlass) {
      node_score[static_cast<std::size_t>(v)] = predictions(v, labels.class_of(v)) > 0.5 ? 1.0 : -1.0;
    } else {
      double s = 0.0;
      for (int j = 0; j < labels.num_labels(); ++j) s += (predictions(v, j) > 0.5) == labels.value(v, j) ? 1.0 : -1.0;
      node_score[static_cast<std::size_t>(v)] = s;
    }
  }
  EdgeRewards out;
  out.scores.resize(g.num_edges());
  double total = 0.0;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const auto [u, v] = g.endpoints(static_cast<EdgeId>(e));
    out.scores[e] = node_score[static_cast<std::size_t>(u)] + node_score[static_cast<std::size_t>(v)];
    total += out.scores[e];
  }
  out.mean = g.num_edges() == 0 ? 0.0 : total / static_cast<double>(g.num_edges());
  return out;
}

EdgeRewards edge_rewards(const nn::GcnModel& model, const Graph& g) { return edge_rewards(g, predict(model, g)); }

}  // namespace pcgcn
