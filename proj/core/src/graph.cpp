#include "pcgcn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pcgcn {

Labels Labels::multiclass(std::vector<int> classes, int num_classes) {
  if (num_classes < 1) throw std::invalid_argument("multiclass labels need at least one class");
  for (int c : classes) {
    if (c < 0 || c >= num_classes) {
      throw std::invalid_argument("class id " + std::to_string(c) + " outside [0, " +
                                  std::to_string(num_classes) + ")");
    }
  }
  Labels l;
  l.kind_ = TaskKind::kMulticlass;
  l.num_nodes_ = static_cast<NodeId>(classes.size());
  l.num_labels_ = num_classes;
  l.classes_ = std::move(classes);
  return l;
}

Labels Labels::multilabel(std::vector<std::uint8_t> bits, NodeId num_nodes, int num_labels) {
  if (num_labels < 1) throw std::invalid_argument("multilabel labels need at least one label");
  if (bits.size() != static_cast<std::size_t>(num_nodes) * static_cast<std::size_t>(num_labels)) {
    throw std::invalid_argument("multilabel bit matrix has wrong size");
  }
  for (auto& b : bits) b = b ? 1 : 0;
  Labels l;
  l.kind_ = TaskKind::kMultilabel;
  l.num_nodes_ = num_nodes;
  l.num_labels_ = num_labels;
  l.bits_ = std::move(bits);
  return l;
}

bool Labels::value(NodeId node, int label) const {
  if (kind_ == TaskKind::kMulticlass) return classes_[static_cast<std::size_t>(node)] == label;
  return bits_[static_cast<std::size_t>(node) * static_cast<std::size_t>(num_labels_) +
               static_cast<std::size_t>(label)] != 0;
}

Labels Labels::subset(std::span<const NodeId> nodes) const {
  if (kind_ == TaskKind::kMulticlass) {
    std::vector<int> out;
    out.reserve(nodes.size());
    for (NodeId v : nodes) out.push_back(classes_[static_cast<std::size_t>(v)]);
    return multiclass(std::move(out), num_labels_);
  }
  std::vector<std::uint8_t> out;
  out.reserve(nodes.size() * static_cast<std::size_t>(num_labels_));
  for (NodeId v : nodes) {
    auto first = bits_.begin() + static_cast<std::ptrdiff_t>(v) * num_labels_;
    out.insert(out.end(), first, first + num_labels_);
  }
  return multilabel(std::move(out), static_cast<NodeId>(nodes.size()), num_labels_);
}

Matrix Labels::to_matrix() const {
  Matrix m = Matrix::Zero(num_nodes_, num_labels_);
  for (NodeId v = 0; v < num_nodes_; ++v) {
    for (int j = 0; j < num_labels_; ++j) m(v, j) = value(v, j) ? 1.0 : 0.0;
  }
  return m;
}

Graph Graph::from_edges(NodeId num_nodes, std::span<const WeightedEdge> edges) {
  if (num_nodes < 0) throw std::invalid_argument("negative node count");
  std::vector<WeightedEdge> directed;
  directed.reserve(edges.size() * 2);
  for (const auto& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= num_nodes || e.v >= num_nodes) {
      throw std::invalid_argument("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                                  ") references a node outside [0, " + std::to_string(num_nodes) + ")");
    }
    if (e.w < 1) throw std::invalid_argument("edge weights must be positive integers");
    if (e.u == e.v) continue;
    directed.push_back({e.u, e.v, e.w});
    directed.push_back({e.v, e.u, e.w});
  }
  std::sort(directed.begin(), directed.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    if (a.u != b.u) return a.u < b.u;
    if (a.v != b.v) return a.v < b.v;
    return a.w > b.w;
  });
  // After sorting, the first entry of each (u, v) run has the max weight.
  directed.erase(std::unique(directed.begin(), directed.end(),
                             [](const WeightedEdge& a, const WeightedEdge& b) {
                               return a.u == b.u && a.v == b.v;
                             }),
                 directed.end());

  Graph g;
  g.num_nodes_ = num_nodes;
  g.row_ptr_.assign(static_cast<std::size_t>(num_nodes) + 1, 0);
  g.col_idx_.reserve(directed.size());
  g.weights_.reserve(directed.size());
  for (const auto& e : directed) {
    ++g.row_ptr_[static_cast<std::size_t>(e.u) + 1];
    g.col_idx_.push_back(e.v);
    g.weights_.push_back(e.w);
  }
  for (std::size_t i = 1; i < g.row_ptr_.size(); ++i) g.row_ptr_[i] += g.row_ptr_[i - 1];
  g.index_edges();
  return g;
}

void Graph::index_edges() {
  slot_edge_.assign(col_idx_.size(), -1);
  edge_endpoints_.clear();
  edge_slot_.clear();
  edge_endpoints_.reserve(col_idx_.size() / 2);
  edge_slot_.reserve(col_idx_.size() / 2);
  for (NodeId u = 0; u < num_nodes_; ++u) {
    for (auto s = row_ptr_[u]; s < row_ptr_[u + 1]; ++s) {
      const NodeId v = col_idx_[static_cast<std::size_t>(s)];
      if (u < v) {
        slot_edge_[static_cast<std::size_t>(s)] = static_cast<EdgeId>(edge_endpoints_.size());
        edge_endpoints_.emplace_back(u, v);
        edge_slot_.push_back(s);
      }
    }
  }
  // Reverse slots: look up (v, u) in row v.
  for (NodeId u = 0; u < num_nodes_; ++u) {
    for (auto s = row_ptr_[u]; s < row_ptr_[u + 1]; ++s) {
      const NodeId v = col_idx_[static_cast<std::size_t>(s)];
      if (u > v) {
        const auto row = neighbors(v);
        const auto it = std::lower_bound(row.begin(), row.end(), u);
        const auto fwd = row_ptr_[v] + (it - row.begin());
        slot_edge_[static_cast<std::size_t>(s)] = slot_edge_[static_cast<std::size_t>(fwd)];
      }
    }
  }
}

std::span<const NodeId> Graph::neighbors(NodeId u) const {
  const auto b = static_cast<std::size_t>(row_ptr_[u]);
  const auto e = static_cast<std::size_t>(row_ptr_[u + 1]);
  return std::span<const NodeId>(col_idx_).subspan(b, e - b);
}

std::span<const Weight> Graph::neighbor_weights(NodeId u) const {
  const auto b = static_cast<std::size_t>(row_ptr_[u]);
  const auto e = static_cast<std::size_t>(row_ptr_[u + 1]);
  return std::span<const Weight>(weights_).subspan(b, e - b);
}

Weight Graph::edge_weight(EdgeId e) const {
  return weights_[static_cast<std::size_t>(edge_slot_[static_cast<std::size_t>(e)])];
}

std::vector<Weight> Graph::edge_weights() const {
  std::vector<Weight> out(num_edges());
  for (std::size_t e = 0; e < out.size(); ++e) out[e] = weights_[static_cast<std::size_t>(edge_slot_[e])];
  return out;
}

std::vector<WeightedEdge> Graph::edges() const {
  std::vector<WeightedEdge> out;
  out.reserve(num_edges());
  for (std::size_t e = 0; e < edge_endpoints_.size(); ++e) {
    out.push_back({edge_endpoints_[e].first, edge_endpoints_[e].second,
                   weights_[static_cast<std::size_t>(edge_slot_[e])]});
  }
  return out;
}

Graph Graph::with_edge_weights(std::span<const Weight> edge_weights) const {
  if (edge_weights.size() != num_edges()) {
    throw std::invalid_argument("with_edge_weights: expected " + std::to_string(num_edges()) +
                                " weights, got " + std::to_string(edge_weights.size()));
  }
  Graph g = *this;
  for (std::size_t s = 0; s < g.weights_.size(); ++s) {
    const Weight w = edge_weights[static_cast<std::size_t>(slot_edge_[s])];
    if (w < 1) throw std::invalid_argument("edge weights must be positive integers");
    g.weights_[s] = w;
  }
  return g;
}

void Graph::set_features(Matrix features) {
  if (features.size() > 0 && features.rows() != num_nodes_) {
    throw std::invalid_argument("feature rows (" + std::to_string(features.rows()) +
                                ") != node count (" + std::to_string(num_nodes_) + ")");
  }
  features_ = std::move(features);
}

void Graph::set_labels(Labels labels) {
  if (!labels.empty() && labels.num_nodes() != num_nodes_) {
    throw std::invalid_argument("label rows (" + std::to_string(labels.num_nodes()) +
                                ") != node count (" + std::to_string(num_nodes_) + ")");
  }
  labels_ = std::move(labels);
}

void Graph::validate() const {
  if (row_ptr_.size() != static_cast<std::size_t>(num_nodes_) + 1 || row_ptr_.front() != 0 ||
      row_ptr_.back() != static_cast<std::int64_t>(col_idx_.size()) ||
      col_idx_.size() != 2 * num_edges()) {
    throw std::logic_error("graph: inconsistent CSR sizes");
  }
  for (NodeId u = 0; u < num_nodes_; ++u) {
    if (row_ptr_[u] > row_ptr_[u + 1]) throw std::logic_error("graph: row_ptr not monotone");
    const auto row = neighbors(u);
    const auto w = neighbor_weights(u);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i] == u) throw std::logic_error("graph: self loop stored");
      if (i > 0 && row[i - 1] >= row[i]) throw std::logic_error("graph: row not strictly sorted");
      if (w[i] < 1) throw std::logic_error("graph: non-positive weight");
      const auto back = neighbors(row[i]);
      const auto it = std::lower_bound(back.begin(), back.end(), u);
      if (it == back.end() || *it != u) throw std::logic_error("graph: asymmetric edge");
      if (neighbor_weights(row[i])[static_cast<std::size_t>(it - back.begin())] != w[i]) {
        throw std::logic_error("graph: asymmetric weight");
      }
    }
  }
}

bool Graph::same_topology(const Graph& other) const {
  return num_nodes_ == other.num_nodes_ && row_ptr_ == other.row_ptr_ && col_idx_ == other.col_idx_;
}

bool Graph::same_structure(const Graph& other) const {
  return same_topology(other) && weights_ == other.weights_;
}

Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes) {
  if (nodes.empty()) throw std::invalid_argument("induced_subgraph: empty node set");
  std::vector<NodeId> sorted(nodes.begin(), nodes.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.front() < 0 || sorted.back() >= g.num_nodes()) {
    throw std::invalid_argument("induced_subgraph: node id out of range");
  }
  std::vector<NodeId> local(static_cast<std::size_t>(g.num_nodes()), -1);
  for (std::size_t i = 0; i < sorted.size(); ++i) local[static_cast<std::size_t>(sorted[i])] = static_cast<NodeId>(i);

  std::vector<WeightedEdge> edges;
  for (NodeId u : sorted) {
    const auto row = g.neighbors(u);
    const auto w = g.neighbor_weights(u);
    for (std::size_t i = 0; i < row.size(); ++i) {
      const NodeId lv = local[static_cast<std::size_t>(row[i])];
      if (u < row[i] && lv >= 0) edges.push_back({local[static_cast<std::size_t>(u)], lv, w[i]});
    }
  }
  Subgraph out;
  out.graph = Graph::from_edges(static_cast<NodeId>(sorted.size()), edges);
  if (g.features().size() > 0) {
    Matrix f(static_cast<Eigen::Index>(sorted.size()), g.features().cols());
    for (std::size_t i = 0; i < sorted.size(); ++i) f.row(static_cast<Eigen::Index>(i)) = g.features().row(sorted[i]);
    out.graph.set_features(std::move(f));
  }
  if (!g.labels().empty()) out.graph.set_labels(g.labels().subset(sorted));
  out.to_parent = std::move(sorted);
  return out;
}

SparseMatrix adjacency_matrix(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  SparseMatrix a(n, n);
  a.reserve(static_cast<Eigen::Index>(g.num_directed_edges()));
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    a.startVec(u);
    const auto row = g.neighbors(u);
    const auto w = g.neighbor_weights(u);
    for (std::size_t i = 0; i < row.size(); ++i) a.insertBack(u, row[i]) = static_cast<double>(w[i]);
  }
  a.finalize();
  return a;
}

SparseMatrix normalize_adjacency(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  std::vector<double> inv_sqrt(static_cast<std::size_t>(n));
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    double d = 1.0;
    for (Weight w : g.neighbor_weights(u)) d += static_cast<double>(w);
    inv_sqrt[static_cast<std::size_t>(u)] = 1.0 / std::sqrt(d);
  }
  SparseMatrix a(n, n);
  a.reserve(static_cast<Eigen::Index>(g.num_directed_edges()) + n);
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    a.startVec(u);
    const auto row = g.neighbors(u);
    const auto w = g.neighbor_weights(u);
    const double su = inv_sqrt[static_cast<std::size_t>(u)];
    bool diag_done = false;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!diag_done && row[i] > u) {
        a.insertBack(u, u) = su * su;
        diag_done = true;
      }
      a.insertBack(u, row[i]) = static_cast<double>(w[i]) * su * inv_sqrt[static_cast<std::size_t>(row[i])];
    }
    if (!diag_done) a.insertBack(u, u) = su * su;
  }
  a.finalize();
  return a;
}

}  // namespace pcgcn
