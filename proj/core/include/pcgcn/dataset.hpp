#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string_view>

#include "pcgcn/graph.hpp"

namespace pcgcn {

enum class Split : std::uint8_t { kNone, kTrain, kVal, kTest };

std::string_view split_name(Split s);

/// Disjoint train/val/test node sets. Nodes may belong to no split.
class SplitMasks {
 public:
  SplitMasks() = default;
  explicit SplitMasks(std::vector<Split> assignment);

  NodeId num_nodes() const { return static_cast<NodeId>(assignment_.size()); }
  Split of(NodeId v) const { return assignment_[static_cast<std::size_t>(v)]; }
  std::vector<NodeId> nodes(Split s) const;
  const std::vector<Split>& assignment() const { return assignment_; }

  /// Throws std::invalid_argument unless every split is nonempty.
  void validate() const;

 private:
  std::vector<Split> assignment_;
};

/// `node_id<TAB>{train|val|test}` per line; unlisted nodes belong to no split.
SplitMasks read_splits(const std::filesystem::path& path, NodeId num_nodes);
void write_splits(const std::filesystem::path& path, const SplitMasks& splits);

/// Random split with the given train/val fractions (test gets the rest),
/// stratified by class for multiclass labels and by first positive label for
/// multilabel. Every class with at least three nodes contributes to all three
/// splits.
SplitMasks stratified_split(const Labels& labels, double train_fraction, double val_fraction, std::uint64_t seed);

/// A graph with features, labels and splits, plus the three split-induced
/// subgraphs the pipeline trains and evaluates on.
struct Dataset {
  Graph graph;
  SplitMasks splits;
  Subgraph train;
  Subgraph val;
  Subgraph test;

  static Dataset from_parts(Graph graph, SplitMasks splits);
};

/// Loads `edges.tsv`, `features.csv`, `labels.csv` and `splits.tsv` from a
/// directory written by save_dataset (or by hand).
Dataset load_dataset(const std::filesystem::path& dir, TaskKind task);
void save_dataset(const std::filesystem::path& dir, const Graph& graph, const SplitMasks& splits);

}  // namespace pcgcn
