#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "pcgcn/graph.hpp"

namespace pcgcn {

/// Node -> cluster assignment for k clusters plus the ids of cut edges.
struct ClusterConfig {
  int k = 0;
  std::vector<int> assign;
  std::vector<EdgeId> cut_edges;

  /// Nodes of each cluster in ascending id order.
  std::vector<std::vector<NodeId>> members() const;
  std::vector<NodeId> cluster_sizes() const;
  Weight cut_weight(const Graph& g) const;

  friend bool operator==(const ClusterConfig&, const ClusterConfig&) = default;
};

/// Validates `assign` against g (ids in [0, k), every cluster nonempty) and
/// fills in cut edges.
ClusterConfig make_cluster_config(const Graph& g, int k, std::vector<int> assign);

enum class PartitionObjective {
  /// Maximize sum over clusters of assoc(c, c) / vol(c) (normalized cut).
  kNormalizedCut,
  /// Minimize total cut weight.
  kEdgeCut,
};

std::string_view objective_name(PartitionObjective o);
PartitionObjective parse_objective(std::string_view name);

struct PartitionOptions {
  int k = 2;
  std::uint64_t seed = 1;
  PartitionObjective objective = PartitionObjective::kEdgeCut;
  /// Coarsening stops at max(coarsen_factor * k, 2k) nodes.
  int coarsen_factor = 30;
  /// Coarsening also stops when a level shrinks the graph by less than this fraction.
  double min_shrink = 0.05;
  /// Independent base clusterings tried on the coarsest graph.
  int base_restarts = 16;
  /// Boundary refinement sweeps per level (and local-search passes at the base).
  int refine_sweeps = 10;
};

/// Multilevel imbalance-tolerant partitioning of a weighted graph:
/// heavy-edge-matching coarsening, seeded greedy growth plus local search on
/// the coarsest graph (best of several restarts), then projection with
/// boundary refinement at every level. Empty clusters are repaired by
/// splitting the largest cluster at its weakest internal edge, so the result
/// always has exactly k nonempty clusters. Deterministic in (g, options).
ClusterConfig partition(const Graph& g, const PartitionOptions& options);

/// Objective value of an assignment (higher is better for both objectives:
/// normalized association, or minus the cut weight).
double partition_objective(const Graph& g, std::span<const int> assign, int k, PartitionObjective objective);

/// Copy of `reweighted` carrying the weights of `original` on every edge.
/// Cut edges are restored too. Throws std::invalid_argument on topology mismatch.
Graph restore_weights(const Graph& reweighted, const Graph& original, const ClusterConfig& cfg);

/// One induced subgraph per cluster (cut edges dropped).
std::vector<Subgraph> cluster_subgraphs(const Graph& g, const ClusterConfig& cfg);

/// Subgraph induced by the union of `clusters`, keeping the edges between
/// them.
Subgraph merge_clusters(const Graph& g, const ClusterConfig& cfg, std::span<const int> clusters);

/// Uniformly samples `bsize` distinct clusters and merges them.
Subgraph sample_batch(const Graph& g, const ClusterConfig& cfg, int bsize, Rng& rng);

/// `node_id<TAB>cluster_id` per line.
void write_clusters(const std::filesystem::path& path, const ClusterConfig& cfg);
/// Reads an assignment written by write_clusters; k is one past the largest id.
ClusterConfig read_clusters(const std::filesystem::path& path, const Graph& g);

namespace multilevel {

/// Weighted graph used inside the multilevel scheme. Coarse nodes keep the
/// weight of edges collapsed into them as `self_weight` (counted over ordered
/// pairs) and their volume as `node_weight`.
struct WeightedGraph {
  std::vector<std::int64_t> row_ptr{0};
  std::vector<std::int32_t> col;
  std::vector<double> weight;
  std::vector<double> node_weight;
  std::vector<double> self_weight;

  std::int32_t num_nodes() const { return static_cast<std::int32_t>(node_weight.size()); }
  static WeightedGraph from_graph(const Graph& g);
};

struct CoarseLevel {
  WeightedGraph graph;
  /// Fine node -> coarse node.
  std::vector<std::int32_t> map;
};

/// One round of heavy-edge matching in random visiting order.
CoarseLevel coarsen(const WeightedGraph& fine, Rng& rng);

/// Objective of `assign` on a weighted graph (higher is better).
double objective(const WeightedGraph& g, std::span<const int> assign, int k, PartitionObjective objective);

/// Greedy boundary refinement; returns the number of moves made. When
/// `trace` is given, the objective after every move is appended.
int refine_boundary(const WeightedGraph& g, std::vector<int>& assign, int k, PartitionObjective objective,
                    int max_sweeps, std::vector<double>* trace = nullptr);

}  // namespace multilevel
}  // namespace pcgcn
