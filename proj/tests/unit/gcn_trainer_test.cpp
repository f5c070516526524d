#include <doctest.h>

#include "../support/oracles.hpp"
#include "pcgcn/gcn_trainer.hpp"
#include "pcgcn/lfr.hpp"
#include "pcgcn/svd.hpp"

using namespace pcgcn;

namespace {

// Two dense communities with noisy community-indicator features.
Graph two_communities(Rng& rng) {
  const NodeId n = 40;
  std::vector<WeightedEdge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      const bool same = (u < n / 2) == (v < n / 2);
      if (uniform01(rng) < (same ? 0.3 : 0.02)) edges.push_back({u, v, 1});
    }
  }
  Graph g = Graph::from_edges(n, edges);
  Matrix x = oracle::random_matrix(n, 4, rng, 0.5);
  std::vector<int> classes(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v) {
    classes[static_cast<std::size_t>(v)] = v < n / 2 ? 0 : 1;
    x(v, 0) += v < n / 2 ? 1.0 : -1.0;
  }
  g.set_features(x);
  g.set_labels(Labels::multiclass(classes, 2));
  return g;
}

Graph lfr_graph(NodeId n, std::uint64_t seed) {
  LfrParams p;
  p.n = n;
  p.min_community = 20;
  p.seed = seed;
  Graph g = generate_lfr(p);
  SvdOptions o;
  o.dim = 8;
  g.set_features(svd_features(g, o));
  return g;
}

TrainOptions small_options(int iters = 20) {
  TrainOptions o;
  o.iters = iters;
  o.hidden = 16;
  o.seed = 5;
  return o;
}

bool same_model(const nn::GcnModel& a, const nn::GcnModel& b) {
  const auto pa = a.parameters();
  const auto pb = b.parameters();
  if (pa.size() != pb.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (*pa[i] != *pb[i]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("one cluster is full-batch training") {
  const Graph g = lfr_graph(200, 3);
  const ClusterConfig one = make_cluster_config(g, 1, std::vector<int>(200, 0));
  for (auto kind : {nn::LayerKind::kGcn, nn::LayerKind::kHogcn}) {
    TrainOptions o = small_options();
    o.kind = kind;
    const TrainResult a = train_clustergcn(g, one, o);
    const TrainResult b = train_full_batch(g, o);
    CHECK(same_model(a.model, b.model));
    CHECK(a.report.loss_trace == b.report.loss_trace);
    CHECK(a.report.predictions == b.report.predictions);
  }
}

TEST_CASE("training loss decreases on a separable toy graph") {
  Rng rng(1);
  const Graph g = two_communities(rng);
  TrainOptions o = small_options(60);
  const TrainResult r = train_full_batch(g, o);
  int upticks = 0;
  for (std::size_t i = 1; i < r.report.loss_trace.size(); ++i) {
    upticks += r.report.loss_trace[i] > r.report.loss_trace[i - 1] + 1e-12;
  }
  CHECK(upticks <= 1);
  CHECK(r.report.loss_trace.back() < r.report.loss_trace.front());
  CHECK(evaluate(r.model, g) > 0.9);
}

TEST_CASE("invalid options and determinism") {
  const Graph g = lfr_graph(200, 4);
  PartitionOptions po;
  po.k = 4;
  const ClusterConfig cfg = partition(g, po);
  TrainOptions o = small_options(0);
  CHECK_THROWS_AS(train_clustergcn(g, cfg, o), std::invalid_argument);
  o = small_options(5);
  const TrainResult a = train_clustergcn(g, cfg, o);
  const TrainResult b = train_clustergcn(g, cfg, o);
  CHECK(same_model(a.model, b.model));
  CHECK(a.report.loss_trace.size() == 20);
  CHECK(a.report.iterations == 5);
}

TEST_CASE("micro f1") {
  Matrix truth(3, 2);
  truth << 1, 0, 0, 1, 1, 1;
  CHECK(micro_f1(truth, truth) == 1.0);
  CHECK(micro_f1(Matrix::Zero(3, 2), Matrix::Zero(3, 2)) == 1.0);
  CHECK(micro_f1(Matrix::Zero(3, 2), truth) == 0.0);
  Matrix pred(3, 2);
  pred << 1, 1, 0, 0, 1, 1;  // tp 3, fp 1, fn 1
  CHECK(micro_f1(pred, truth) == doctest::Approx(0.75));
  const std::vector<NodeId> rows{1};
  CHECK(micro_f1(pred, truth, rows) == 0.0);

  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix p(10, 4), t(10, 4);
    for (Eigen::Index i = 0; i < 40; ++i) {
      p.data()[i] = uniform01(rng) < 0.4;
      t.data()[i] = uniform01(rng) < 0.4;
    }
    double tp = 0, fp = 0, fn = 0;
    for (Eigen::Index i = 0; i < 10; ++i) {
      for (Eigen::Index j = 0; j < 4; ++j) {
        tp += p(i, j) == 1 && t(i, j) == 1;
        fp += p(i, j) == 1 && t(i, j) == 0;
        fn += p(i, j) == 0 && t(i, j) == 1;
      }
    }
    const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    const double expected = tp + fp + fn == 0 ? 1.0
                            : precision + recall == 0 ? 0.0
                                                      : 2 * precision * recall / (precision + recall);
    CHECK(micro_f1(p, t) == doctest::Approx(expected));
  }
}

TEST_CASE("edge rewards") {
  Graph g = Graph::from_edges(3, std::vector<WeightedEdge>{{0, 1, 1}, {1, 2, 1}});
  SUBCASE("multiclass") {
    g.set_labels(Labels::multiclass({0, 1, 1}, 2));
    Matrix pred(3, 2);
    pred << 1, 0, 0, 1, 1, 0;  // node 2 wrong
    const EdgeRewards r = edge_rewards(g, pred);
    CHECK(r.scores == std::vector<double>{2.0, 0.0});
    CHECK(r.mean == 1.0);
  }
  SUBCASE("multilabel") {
    g.set_labels(Labels::multilabel({1, 0, 1, 1, 0, 0}, 3, 2));
    Matrix pred(3, 2);
    pred << 1, 0, 0, 1, 1, 1;  // node0 +2, node1 0, node2 -2
    const EdgeRewards r = edge_rewards(g, pred);
    CHECK(r.scores == std::vector<double>{2.0, -2.0});
    CHECK(r.mean == 0.0);
  }
  SUBCASE("edgeless graph") {
    const Graph lonely = [] {
      Graph h = Graph::from_edges(2, std::vector<WeightedEdge>{});
      h.set_labels(Labels::multiclass({0, 1}, 2));
      return h;
    }();
    CHECK(edge_rewards(lonely, Matrix::Zero(2, 2)).mean == 0.0);
  }
}

TEST_CASE("edge rewards stay within bounds and ignore the clustering") {
  const Graph g = lfr_graph(200, 5);
  for (int k : {2, 5}) {
    PartitionOptions po;
    po.k = k;
    const ClusterConfig cfg = partition(g, po);
    const TrainResult r = train_clustergcn(g, cfg, small_options(3));
    const EdgeRewards from_model = edge_rewards(r.model, g);
    const EdgeRewards from_preds = edge_rewards(g, predict(r.model, g));
    CHECK(from_model.scores == from_preds.scores);
    for (double s : from_model.scores) {
      CHECK(s >= -2.0);
      CHECK(s <= 2.0);
    }
  }
}

TEST_CASE("larger batches and unlabeled clusters") {
  const Graph g = lfr_graph(200, 6);
  PartitionOptions po;
  po.k = 6;
  const ClusterConfig cfg = partition(g, po);
  SUBCASE("bsize 3 takes two steps per epoch") {
    TrainOptions o = small_options(4);
    o.bsize = 3;
    const TrainResult r = train_clustergcn(g, cfg, o);
    CHECK(r.report.loss_trace.size() == 8);
  }
  SUBCASE("clusters without labeled nodes are skipped") {
    std::vector<char> labeled(200, 0);
    for (NodeId v = 0; v < 200; ++v) labeled[static_cast<std::size_t>(v)] = cfg.assign[static_cast<std::size_t>(v)] == 0;
    const TrainResult r = train_clustergcn(g, cfg, small_options(3), TrainExtras{nullptr, nullptr, labeled, {}});
    CHECK(r.report.skipped_batches == 15);
    CHECK(r.report.loss_trace.size() == 3);
  }
  SUBCASE("no labeled node at all") {
    std::vector<char> labeled(200, 0);
    CHECK_THROWS(train_clustergcn(g, cfg, small_options(3), TrainExtras{nullptr, nullptr, labeled, {}}));
  }
  SUBCASE("validation score and epoch callback") {
    int calls = 0;
    TrainExtras extras;
    extras.val = &g;
    extras.on_epoch = [&](int epoch, const nn::GcnModel&) { CHECK(epoch == ++calls); };
    const TrainResult r = train_clustergcn(g, cfg, small_options(3), extras);
    CHECK(calls == 3);
    CHECK(r.report.val_f1 == doctest::Approx(evaluate(r.model, g)));
  }
}
