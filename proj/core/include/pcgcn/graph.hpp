#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pcgcn/types.hpp"

namespace pcgcn {

enum class TaskKind { kMultilabel, kMulticlass };

/// Node labels. Multiclass labels hold one class id per node; multilabel
/// labels hold an n x q 0/1 matrix. Multiclass labels behave as a one-hot
/// n x q matrix wherever a binary view is needed.
class Labels {
 public:
  Labels() = default;

  static Labels multiclass(std::vector<int> classes, int num_classes);
  static Labels multilabel(std::vector<std::uint8_t> bits, NodeId num_nodes, int num_labels);

  TaskKind kind() const { return kind_; }
  NodeId num_nodes() const { return num_nodes_; }
  /// q: number of labels (multilabel) or classes (multiclass).
  int num_labels() const { return num_labels_; }
  bool empty() const { return num_nodes_ == 0; }

  /// Binary view, one-hot for multiclass.
  bool value(NodeId node, int label) const;
  /// Class id; multiclass only.
  int class_of(NodeId node) const { return classes_[static_cast<std::size_t>(node)]; }

  const std::vector<int>& classes() const { return classes_; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  /// Labels of `nodes`, in the given order.
  Labels subset(std::span<const NodeId> nodes) const;

  /// n x q 0/1 matrix (one-hot for multiclass).
  Matrix to_matrix() const;

  friend bool operator==(const Labels&, const Labels&) = default;

 private:
  TaskKind kind_ = TaskKind::kMulticlass;
  NodeId num_nodes_ = 0;
  int num_labels_ = 0;
  std::vector<int> classes_;
  std::vector<std::uint8_t> bits_;
};

struct WeightedEdge {
  NodeId u = 0;
  NodeId v = 0;
  Weight w = 1;

  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

/// Immutable undirected graph in CSR form. Both directions of every edge are
/// stored, rows are sorted, there are no self loops and all weights are >= 1.
/// Undirected edges carry ids 0..num_edges()-1, ordered by (min endpoint,
/// max endpoint).
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from an arbitrary edge list. Self loops are dropped and
  /// duplicate or reversed edges are merged keeping the maximum weight.
  static Graph from_edges(NodeId num_nodes, std::span<const WeightedEdge> edges);

  NodeId num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return edge_endpoints_.size(); }
  std::size_t num_directed_edges() const { return col_idx_.size(); }

  std::span<const std::int64_t> row_ptr() const { return row_ptr_; }
  std::span<const NodeId> col_idx() const { return col_idx_; }
  std::span<const Weight> weights() const { return weights_; }

  std::span<const NodeId> neighbors(NodeId u) const;
  std::span<const Weight> neighbor_weights(NodeId u) const;
  std::int64_t degree(NodeId u) const { return row_ptr_[u + 1] - row_ptr_[u]; }

  /// Undirected edge id of CSR slot `slot`.
  EdgeId edge_of_slot(std::int64_t slot) const { return slot_edge_[static_cast<std::size_t>(slot)]; }
  /// Endpoints (u < v) of undirected edge `e`.
  std::pair<NodeId, NodeId> endpoints(EdgeId e) const { return edge_endpoints_[static_cast<std::size_t>(e)]; }
  /// Weight of undirected edge `e`.
  Weight edge_weight(EdgeId e) const;
  /// Weights of all undirected edges, indexed by edge id.
  std::vector<Weight> edge_weights() const;
  /// Edge list with u < v, in edge id order.
  std::vector<WeightedEdge> edges() const;

  /// Same topology, features and labels; new weight per undirected edge.
  Graph with_edge_weights(std::span<const Weight> edge_weights) const;

  const Matrix& features() const { return features_; }
  const Labels& labels() const { return labels_; }
  void set_features(Matrix features);
  void set_labels(Labels labels);

  /// Throws std::logic_error if any structural invariant is violated.
  void validate() const;

  /// Same topology and weights (features and labels ignored).
  bool same_structure(const Graph& other) const;
  bool same_topology(const Graph& other) const;

 private:
  void index_edges();

  NodeId num_nodes_ = 0;
  std::vector<std::int64_t> row_ptr_{0};
  std::vector<NodeId> col_idx_;
  std::vector<Weight> weights_;
  std::vector<EdgeId> slot_edge_;
  std::vector<std::pair<NodeId, NodeId>> edge_endpoints_;
  std::vector<std::int64_t> edge_slot_;  // forward (u < v) slot of each edge
  Matrix features_;
  Labels labels_;
};

/// Induced subgraph plus the mapping from local ids back to the parent graph.
struct Subgraph {
  Graph graph;
  std::vector<NodeId> to_parent;
};

/// Subgraph on `nodes` (any order, duplicates ignored) keeping edges whose
/// endpoints both lie in `nodes`. Local ids follow ascending parent id.
Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes);

/// D^-1/2 (A + I) D^-1/2 with D = diag(rowsum(A + I)), using the graph's
/// edge weights.
SparseMatrix normalize_adjacency(const Graph& g);

/// Weighted adjacency as a sparse matrix (no self loops).
SparseMatrix adjacency_matrix(const Graph& g);

}  // namespace pcgcn
