#include <doctest.h>

#include <sstream>

#include "../support/oracles.hpp"
#include "pcgcn/analysis.hpp"

using namespace pcgcn;

TEST_CASE("label entropy") {
  const Labels classes = Labels::multiclass({0, 0, 1, 1, 2, 2, 0, 0}, 3);
  const std::vector<NodeId> pure{0, 1};
  CHECK(label_entropy(pure, classes) == 0.0);
  const std::vector<NodeId> half{0, 2};
  // Two classes each at 1/2 contribute one bit, the absent class nothing.
  CHECK(label_entropy(half, classes) == doctest::Approx(2.0));
  const Labels bits = Labels::multilabel({1, 0, 1, 1}, 2, 2);
  const std::vector<NodeId> both{0, 1};
  CHECK(label_entropy(both, bits) == doctest::Approx(1.0));
}

TEST_CASE("entropy matches a histogram count") {
  Rng rng(1);
  std::vector<int> c(300);
  for (auto& v : c) v = static_cast<int>(uniform_index(rng, 5));
  const Labels multiclass = Labels::multiclass(c, 5);
  std::vector<std::uint8_t> b(300 * 4);
  for (auto& v : b) v = uniform01(rng) < 0.3;
  const Labels multilabel = Labels::multilabel(b, 300, 4);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<NodeId> cluster;
    for (NodeId v = 0; v < 300; ++v) {
      if (uniform01(rng) < 0.05) cluster.push_back(v);
    }
    if (cluster.empty()) cluster.push_back(0);
    const Labels& labels = trial % 2 ? multiclass : multilabel;
    const double h = label_entropy(cluster, labels);
    CHECK(h == doctest::Approx(oracle::histogram_entropy(cluster, labels)));
    CHECK(h >= 0.0);
    CHECK(h <= labels.num_labels() + 1e-12);
    std::vector<NodeId> reversed(cluster.rbegin(), cluster.rend());
    CHECK(label_entropy(reversed, labels) == doctest::Approx(h));
  }
}

TEST_CASE("cluster entropy reports") {
  const Graph g = Graph::from_edges(4, std::vector<WeightedEdge>{{0, 1, 1}, {2, 3, 1}});
  const Labels labels = Labels::multiclass({0, 0, 0, 1}, 2);
  const ClusterConfig cfg = make_cluster_config(g, 2, {0, 0, 1, 1});
  const EntropyReport r = cluster_entropies("a", cfg, labels);
  CHECK(r.k == 2);
  CHECK(r.entropies == std::vector<double>{0.0, 2.0});
  const std::vector<EntropyReport> reports{r, cluster_entropies("b", cfg, labels)};
  const std::string csv = entropy_csv(reports);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "run,cluster,entropy");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
  CHECK(csv.find("a,1,2\n") != std::string::npos);
}

TEST_CASE("summary statistics") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(mean(v) == 2.5);
  CHECK(variance(v) == doctest::Approx(1.25));
  CHECK(variance(std::vector<double>{3.0}) == 0.0);
}
