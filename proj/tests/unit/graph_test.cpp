#include <doctest.h>

#include <fstream>
#include <numeric>
#include <set>

#include "../support/oracles.hpp"
#include "../support/temp_dir.hpp"
#include "pcgcn/dataset.hpp"
#include "pcgcn/graph.hpp"
#include "pcgcn/graph_io.hpp"
#include "pcgcn/lfr.hpp"
#include "pcgcn/svd.hpp"

using namespace pcgcn;

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::vector<NodeId> range_nodes(NodeId n) {
  std::vector<NodeId> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

TEST_CASE("path graph degrees") {
  TempDir dir;
  write_file(dir / "e.tsv", "0\t1\n1\t2\n");
  const Graph g = load_graph(dir / "e.tsv", {}, {}, TaskKind::kMulticlass);
  CHECK(g.num_nodes() == 3);
  CHECK(g.degree(0) == 1);
  CHECK(g.degree(1) == 2);
  CHECK(g.degree(2) == 1);
  g.validate();
}

TEST_CASE("reversed duplicates keep the larger weight") {
  TempDir dir;
  write_file(dir / "e.tsv", "# comment\n0\t1\t2\n1\t0\t5\n2\t2\t3\n");
  const Graph g = load_graph(dir / "e.tsv", {}, {}, TaskKind::kMulticlass);
  REQUIRE(g.num_edges() == 1);
  CHECK(g.neighbor_weights(0)[0] == 5);
  CHECK(g.neighbor_weights(1)[0] == 5);
  CHECK(g.degree(2) == 0);
}

TEST_CASE("parse errors carry line numbers") {
  TempDir dir;
  write_file(dir / "e.tsv", "0\t1\n\n1\tx\n");
  try {
    load_graph(dir / "e.tsv", {}, {}, TaskKind::kMulticlass);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  write_file(dir / "w.tsv", "0\t1\t0\n");
  CHECK_THROWS_AS(load_graph(dir / "w.tsv", {}, {}, TaskKind::kMulticlass), ParseError);
}

TEST_CASE("dimension mismatch and empty graph are rejected") {
  TempDir dir;
  write_file(dir / "e.tsv", "0\t1\n1\t2\n");
  write_file(dir / "f.csv", "node,f0\n0,1\n1,2\n2,3\n3,4\n");
  write_file(dir / "l.csv", "node,class\n0,0\n1,1\n2,0\n");
  CHECK_THROWS(load_graph(dir / "e.tsv", dir / "f.csv", dir / "l.csv", TaskKind::kMulticlass));
  write_file(dir / "empty.tsv", "# nothing\n");
  CHECK_THROWS(load_graph(dir / "empty.tsv", {}, {}, TaskKind::kMulticlass));
}

TEST_CASE("random graph survives a save/load round trip") {
  Rng rng(7);
  Graph g = oracle::random_graph(50, 0.1, 9, rng);
  g.set_features(oracle::random_matrix(50, 3, rng));
  std::vector<int> classes(50);
  for (auto& c : classes) c = static_cast<int>(uniform_index(rng, 4));
  g.set_labels(Labels::multiclass(classes, 4));
  TempDir dir;
  write_edge_list(dir / "e.tsv", g);
  write_features(dir / "f.csv", g.features());
  write_labels(dir / "l.csv", g.labels());
  const Graph back = load_graph(dir / "e.tsv", dir / "f.csv", dir / "l.csv", TaskKind::kMulticlass);
  CHECK(back.same_structure(g));
  CHECK(std::equal(back.row_ptr().begin(), back.row_ptr().end(), g.row_ptr().begin(), g.row_ptr().end()));
  CHECK(std::equal(back.col_idx().begin(), back.col_idx().end(), g.col_idx().begin(), g.col_idx().end()));
  CHECK(back.features() == g.features());
  CHECK(back.labels() == g.labels());
}

TEST_CASE("multilabel labels round trip") {
  std::vector<std::uint8_t> bits{1, 0, 1, 0, 0, 1, 1, 1, 0};
  Graph g = Graph::from_edges(3, std::vector<WeightedEdge>{{0, 1, 1}, {1, 2, 1}});
  g.set_labels(Labels::multilabel(bits, 3, 3));
  TempDir dir;
  write_edge_list(dir / "e.tsv", g);
  write_labels(dir / "l.csv", g.labels());
  const Graph back = load_graph(dir / "e.tsv", {}, dir / "l.csv", TaskKind::kMultilabel);
  CHECK(back.labels() == g.labels());
}

TEST_CASE("graph invariants hold on random graphs") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const NodeId n = 1 + static_cast<NodeId>(uniform_index(rng, 30));
    std::vector<WeightedEdge> edges;
    for (int i = 0; i < 3 * n; ++i) {
      edges.push_back({static_cast<NodeId>(uniform_index(rng, n)), static_cast<NodeId>(uniform_index(rng, n)),
                       1 + static_cast<Weight>(uniform_index(rng, 5))});
    }
    const Graph g = Graph::from_edges(n, edges);
    CHECK_NOTHROW(g.validate());
    CHECK(g.row_ptr().back() == static_cast<std::int64_t>(2 * g.num_edges()));
    for (EdgeId e = 0; e < static_cast<EdgeId>(g.num_edges()); ++e) CHECK(g.edge_weight(e) >= 1);
  }
}

TEST_CASE("induced subgraph") {
  const Graph tri = Graph::from_edges(3, std::vector<WeightedEdge>{{0, 1, 1}, {1, 2, 1}, {0, 2, 1}});
  SUBCASE("triangle restricted to two nodes") {
    const std::vector<NodeId> mask{0, 1};
    const Subgraph s = induced_subgraph(tri, mask);
    CHECK(s.graph.num_nodes() == 2);
    CHECK(s.graph.num_edges() == 1);
  }
  SUBCASE("all nodes is the identity") {
    const Subgraph s = induced_subgraph(tri, range_nodes(3));
    CHECK(s.graph.same_structure(tri));
  }
  SUBCASE("empty mask is rejected") { CHECK_THROWS(induced_subgraph(tri, std::vector<NodeId>{})); }
  SUBCASE("random graphs match a brute-force filter") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      const Graph g = oracle::random_graph(20, 0.3, 4, rng);
      std::set<NodeId> mask;
      for (NodeId v = 0; v < 20; ++v) {
        if (uniform01(rng) < 0.5) mask.insert(v);
      }
      if (mask.empty()) mask.insert(0);
      const std::vector<NodeId> nodes(mask.begin(), mask.end());
      const Subgraph s = induced_subgraph(g, nodes);
      CHECK(oracle::parent_edges(s) == oracle::filtered_edges(g, mask));
      CHECK(s.to_parent == nodes);
    }
  }
  SUBCASE("nested extraction equals one-shot extraction") {
    Rng rng(12);
    const Graph g = oracle::random_graph(25, 0.25, 3, rng);
    std::vector<NodeId> outer, inner;
    for (NodeId v = 0; v < 25; ++v) {
      if (uniform01(rng) < 0.7) {
        outer.push_back(v);
        if (uniform01(rng) < 0.6) inner.push_back(v);
      }
    }
    const Subgraph first = induced_subgraph(g, outer);
    std::vector<NodeId> inner_local;
    for (std::size_t i = 0; i < first.to_parent.size(); ++i) {
      if (std::find(inner.begin(), inner.end(), first.to_parent[i]) != inner.end()) {
        inner_local.push_back(static_cast<NodeId>(i));
      }
    }
    const Subgraph nested = induced_subgraph(first.graph, inner_local);
    const Subgraph direct = induced_subgraph(g, inner);
    CHECK(nested.graph.same_structure(direct.graph));
  }
}

TEST_CASE("normalized adjacency") {
  SUBCASE("single unit edge") {
    const Graph g = Graph::from_edges(2, std::vector<WeightedEdge>{{0, 1, 1}});
    const Matrix a = Matrix(normalize_adjacency(g));
    CHECK(a.isApprox(Matrix::Constant(2, 2, 0.5)));
  }
  SUBCASE("isolated node") {
    const Graph g = Graph::from_edges(1, std::vector<WeightedEdge>{});
    const Matrix a = Matrix(normalize_adjacency(g));
    CHECK(a(0, 0) == doctest::Approx(1.0));
  }
  SUBCASE("matches the entrywise formula and has spectral radius one") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
      const NodeId n = trial < 5 ? 10 : 50;
      const Graph g = oracle::random_graph(n, 0.2, 5, rng);
      const Matrix a = Matrix(normalize_adjacency(g));
      CHECK((a - a.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((a - oracle::dense_normalized(g)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(a.minCoeff() >= 0.0);
      if (n == 10) CHECK(oracle::power_iteration(a) == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("svd features") {
  SUBCASE("triangle") {
    const Graph g = Graph::from_edges(3, std::vector<WeightedEdge>{{0, 1, 1}, {1, 2, 1}, {0, 2, 1}});
    SvdOptions o;
    o.dim = 1;
    const SvdResult r = truncated_svd(adjacency_matrix(g), o);
    CHECK(r.values(0) == doctest::Approx(2.0));
    for (int i = 0; i < 3; ++i) CHECK(svd_features(g, o)(i, 0) == doctest::Approx(1.0 / std::sqrt(3.0)));
  }
  SUBCASE("pads with zero columns") {
    const Graph g = Graph::from_edges(3, std::vector<WeightedEdge>{{0, 1, 1}, {1, 2, 2}});
    const Matrix u = svd_features(g);
    REQUIRE(u.cols() == 16);
    CHECK(u.rightCols(13).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("orthonormal columns with positive dominant entries") {
    Rng rng(9);
    const Graph g = oracle::random_graph(60, 0.1, 3, rng);
    const Matrix u = svd_features(g);
    const Matrix gram = u.transpose() * u;
    CHECK((gram - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-6);
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      Eigen::Index idx = 0;
      u.col(j).cwiseAbs().maxCoeff(&idx);
      CHECK(u(idx, j) > 0.0);
    }
  }
  SUBCASE("reconstruction error matches a dense Jacobi oracle") {
    Rng rng(21);
    for (int trial = 0; trial < 5; ++trial) {
      const Graph g = oracle::random_graph(30, 0.2, 4, rng);
      const Matrix a = oracle::dense_adjacency(g);
      SvdOptions o;
      o.dim = 4;
      const SvdResult r = truncated_svd(adjacency_matrix(g), o);
      const auto [eig, vecs] = oracle::jacobi_eigen(a);
      std::vector<double> sv;
      for (double e : eig) sv.push_back(std::abs(e));
      std::sort(sv.rbegin(), sv.rend());
      double tail = 0.0;
      for (std::size_t i = 4; i < sv.size(); ++i) tail += sv[i] * sv[i];
      Matrix approx = Matrix::Zero(30, 30);
      for (int j = 0; j < 4; ++j) {
        CHECK(r.values(j) == doctest::Approx(sv[static_cast<std::size_t>(j)]).epsilon(1e-8));
        const Eigen::VectorXd uj = r.vectors.col(j);
        const double theta = uj.dot(a * uj);  // signed eigenvalue; right vector is sign(theta) u
        approx += theta * uj * uj.transpose();
      }
      CHECK((a - approx).norm() == doctest::Approx(std::sqrt(tail)).epsilon(1e-5));
    }
  }
  SUBCASE("non-convergence names the tolerance") {
    Rng rng(4);
    const Graph g = oracle::random_graph(80, 0.1, 3, rng);
    SvdOptions o;
    o.max_iterations = 1;
    o.oversample = 0;
    o.tolerance = 1e-14;
    try {
      svd_features(g, o);
      FAIL("expected non-convergence");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("1e-14") != std::string::npos);
    }
  }
}

TEST_CASE("lfr generator") {
  SUBCASE("mu = 0 has no inter-community edges") {
    LfrParams p;
    p.n = 400;
    p.mu = 0.0;
    const Graph g = generate_lfr(p);
    CHECK(inter_community_fraction(g) == 0.0);
  }
  SUBCASE("mixing fraction at n = 500") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      LfrParams p;
      p.n = 500;
      p.mu = 0.2;
      p.seed = seed;
      const Graph g = generate_lfr(p);
      // Direct scan of edges against community labels.
      std::size_t cut = 0;
      for (const auto& e : g.edges()) cut += g.labels().class_of(e.u) != g.labels().class_of(e.v);
      const double frac = static_cast<double>(cut) / static_cast<double>(g.num_edges());
      CHECK(frac == doctest::Approx(0.2).epsilon(0.25));  // +-0.05
      CHECK(std::abs(frac - 0.2) <= 0.05);
    }
  }
  SUBCASE("large benchmark parameters") {
    for (double mu : {0.1, 0.25, 0.4}) {
      LfrParams p;
      p.n = 5000;
      p.avg_degree = 5;
      p.min_community = 50;
      p.degree_exponent = 3;
      p.community_exponent = 1.5;
      p.mu = mu;
      const Graph g = generate_lfr(p);
      const double mean_degree = 2.0 * static_cast<double>(g.num_edges()) / g.num_nodes();
      CHECK(std::abs(mean_degree - 5.0) <= 0.75);
      CHECK(std::abs(inter_community_fraction(g) - mu) <= 0.03);
      std::vector<int> sizes(static_cast<std::size_t>(g.labels().num_labels()), 0);
      for (NodeId v = 0; v < g.num_nodes(); ++v) ++sizes[static_cast<std::size_t>(g.labels().class_of(v))];
      CHECK(*std::min_element(sizes.begin(), sizes.end()) >= 50);
      CHECK(std::accumulate(sizes.begin(), sizes.end(), 0) == 5000);
    }
  }
  SUBCASE("bit reproducible") {
    LfrParams p;
    p.n = 300;
    p.seed = 17;
    const Graph a = generate_lfr(p);
    const Graph b = generate_lfr(p);
    CHECK(a.same_structure(b));
    CHECK(a.labels() == b.labels());
  }
  SUBCASE("infeasible parameters") {
    LfrParams p;
    p.n = 80;
    p.min_community = 50;
    CHECK_THROWS_AS(generate_lfr(p), std::invalid_argument);
    p.n = 500;
    p.mu = 1.0;
    CHECK_THROWS_AS(generate_lfr(p), std::invalid_argument);
  }
}

TEST_CASE("splits") {
  LfrParams p;
  p.n = 400;
  const Graph g = generate_lfr(p);
  const SplitMasks s = stratified_split(g.labels(), 0.6, 0.1, 3);
  CHECK_NOTHROW(s.validate());
  const auto train = s.nodes(Split::kTrain);
  const auto val = s.nodes(Split::kVal);
  const auto test = s.nodes(Split::kTest);
  CHECK(train.size() + val.size() + test.size() == 400);
  CHECK(std::abs(static_cast<double>(train.size()) / 400.0 - 0.6) < 0.03);
  TempDir dir;
  write_splits(dir / "s.tsv", s);
  const SplitMasks back = read_splits(dir / "s.tsv", 400);
  CHECK(back.assignment() == s.assignment());
  write_file(dir / "bad.tsv", "0\ttrain\n0\tval\n");
  CHECK_THROWS_AS(read_splits(dir / "bad.tsv", 400), ParseError);
}
