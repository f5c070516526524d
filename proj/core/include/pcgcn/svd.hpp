#pragma once

#include <cstdint>

#include "pcgcn/graph.hpp"

namespace pcgcn {

struct SvdOptions {
  int dim = 16;
  std::uint64_t seed = 0x5eed;
  double tolerance = 1e-8;
  int max_iterations = 300;
  /// Extra block columns carried beyond `dim` to speed up convergence.
  int oversample = 16;
};

/// Leading left singular vectors of the weighted adjacency matrix, one column
/// per vector in descending singular value order. Each column has its
/// largest-magnitude entry positive. When the graph has fewer than `dim`
/// nodes the remaining columns are zero.
///
/// Uses randomized block subspace iteration with Rayleigh-Ritz extraction and
/// throws std::runtime_error when the Ritz residuals do not fall below
/// `tolerance` (relative to the top singular value) within `max_iterations`.
Matrix svd_features(const Graph& g, const SvdOptions& options = {});

/// Singular values matching the columns returned by svd_features.
struct SvdResult {
  Matrix vectors;
  Vector values;
  int iterations = 0;
};
SvdResult truncated_svd(const SparseMatrix& symmetric, const SvdOptions& options);

}  // namespace pcgcn
