#pragma once

#include <cstdint>

#include "pcgcn/graph.hpp"

namespace pcgcn {

/// Parameters of the LFR-style community benchmark.
struct LfrParams {
  NodeId n = 1000;
  double avg_degree = 5.0;
  /// 0 picks max(ceil(avg_degree) + 1, n / 10), capped at n - 1.
  NodeId max_degree = 0;
  NodeId min_community = 50;
  /// 0 picks max(min_community, n / 5).
  NodeId max_community = 0;
  double mu = 0.1;
  double degree_exponent = 3.0;
  double community_exponent = 1.5;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument when the parameters are infeasible.
  void validate() const;
};

/// Generates a simple undirected graph with power-law degrees and power-law
/// community sizes. Each node sends about (1 - mu) of its stubs inside its
/// community and mu outside; stubs are paired by configuration-model matching
/// within an intra-community pool per community and one global
/// inter-community pool. Self loops, duplicates and (in the inter pool)
/// same-community pairs are re-paired a bounded number of times and then
/// dropped. Labels are the community ids (multiclass); features are left
/// empty. Bit-reproducible for a fixed seed.
Graph generate_lfr(const LfrParams& params);

/// Fraction of undirected edges whose endpoints carry different class labels.
double inter_community_fraction(const Graph& g);

}  // namespace pcgcn
