#pragma once
// Independent reference implementations used by the tests. Nothing here
// calls into the library's numeric code paths.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "pcgcn/graph.hpp"

namespace oracle {

using pcgcn::Graph;
using pcgcn::Matrix;
using pcgcn::NodeId;
using pcgcn::Rng;
using pcgcn::Weight;
using pcgcn::WeightedEdge;

/// Erdos-Renyi style graph with integer weights in [1, max_weight].
inline Graph random_graph(NodeId n, double p, Weight max_weight, Rng& rng) {
  std::vector<WeightedEdge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (pcgcn::uniform01(rng) < p) {
        edges.push_back({u, v, 1 + static_cast<Weight>(pcgcn::uniform_index(rng, static_cast<std::uint64_t>(max_weight)))});
      }
    }
  }
  return Graph::from_edges(n, edges);
}

inline Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double scale = 1.0) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * (2.0 * pcgcn::uniform01(rng) - 1.0);
  return m;
}

inline Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  }
  return out;
}

/// Dense weighted adjacency built from the edge list.
inline Matrix dense_adjacency(const Graph& g) {
  Matrix a = Matrix::Zero(g.num_nodes(), g.num_nodes());
  for (const auto& e : g.edges()) {
    a(e.u, e.v) = static_cast<double>(e.w);
    a(e.v, e.u) = static_cast<double>(e.w);
  }
  return a;
}

/// D^-1/2 (A + I) D^-1/2 evaluated entry by entry.
inline Matrix dense_normalized(const Graph& g) {
  Matrix a = dense_adjacency(g);
  for (NodeId i = 0; i < g.num_nodes(); ++i) a(i, i) += 1.0;
  std::vector<double> d(static_cast<std::size_t>(g.num_nodes()), 0.0);
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    for (NodeId j = 0; j < g.num_nodes(); ++j) d[static_cast<std::size_t>(i)] += a(i, j);
  }
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    for (NodeId j = 0; j < g.num_nodes(); ++j) {
      a(i, j) /= std::sqrt(d[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(j)]);
    }
  }
  return a;
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Returns
/// eigenvalues and eigenvectors (columns), unsorted.
inline std::pair<std::vector<double>, Matrix> jacobi_eigen(Matrix a) {
  const auto n = a.rows();
  Matrix v = Matrix::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off < 1e-30) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<double> values(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = a(i, i);
  return {values, v};
}

/// Largest eigenvalue magnitude by power iteration.
inline double power_iteration(const Matrix& a, int iterations = 2000) {
  Eigen::VectorXd x = Eigen::VectorXd::Ones(a.rows());
  double lambda = 0.0;
  for (int i = 0; i < iterations; ++i) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(a.rows());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      for (Eigen::Index c = 0; c < a.cols(); ++c) y(r) += a(r, c) * x(c);
    }
    lambda = y.norm() / x.norm();
    x = y / y.norm();
  }
  return lambda;
}

/// Cut weight of an assignment computed from the edge list.
inline Weight cut_weight(const Graph& g, const std::vector<int>& assign) {
  Weight cut = 0;
  for (const auto& e : g.edges()) {
    if (assign[static_cast<std::size_t>(e.u)] != assign[static_cast<std::size_t>(e.v)]) cut += e.w;
  }
  return cut;
}

/// Minimum cut weight over all 2-partitions with both sides nonempty.
inline Weight min_two_way_cut(const Graph& g) {
  const NodeId n = g.num_nodes();
  Weight best = std::numeric_limits<Weight>::max();
  // Node n-1 fixed on side 0 to skip mirrored partitions.
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
    std::vector<int> assign(static_cast<std::size_t>(n), 0);
    for (NodeId v = 0; v < n - 1; ++v) assign[static_cast<std::size_t>(v)] = (mask >> v) & 1 ? 1 : 0;
    best = std::min(best, cut_weight(g, assign));
  }
  return best;
}

/// Edge set {(u, v, w)} of the subgraph of g induced by `nodes`, in parent ids.
inline std::set<std::tuple<NodeId, NodeId, Weight>> filtered_edges(const Graph& g, const std::set<NodeId>& nodes) {
  std::set<std::tuple<NodeId, NodeId, Weight>> out;
  for (const auto& e : g.edges()) {
    if (nodes.count(e.u) && nodes.count(e.v)) out.emplace(e.u, e.v, e.w);
  }
  return out;
}

/// Edge set of a subgraph mapped back to parent ids.
inline std::set<std::tuple<NodeId, NodeId, Weight>> parent_edges(const pcgcn::Subgraph& sub) {
  std::set<std::tuple<NodeId, NodeId, Weight>> out;
  for (const auto& e : sub.graph.edges()) {
    NodeId a = sub.to_parent[static_cast<std::size_t>(e.u)];
    NodeId b = sub.to_parent[static_cast<std::size_t>(e.v)];
    if (a > b) std::swap(a, b);
    out.emplace(a, b, e.w);
  }
  return out;
}

/// Label entropy by tallying a histogram of each label column.
inline double histogram_entropy(const std::vector<NodeId>& cluster, const pcgcn::Labels& labels) {
  double total = 0.0;
  for (int j = 0; j < labels.num_labels(); ++j) {
    std::map<int, int> counts;
    for (NodeId v : cluster) ++counts[labels.value(v, j) ? 1 : 0];
    for (const auto& [value, count] : counts) {
      const double p = static_cast<double>(count) / static_cast<double>(cluster.size());
      total -= p * std::log(p) / std::log(2.0);
    }
  }
  return total;
}

}  // namespace oracle
