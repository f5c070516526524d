#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pcgcn/graph.hpp"
#include "pcgcn/partition.hpp"

namespace pcgcn {

/// Sum over labels of the Bernoulli entropy (bits) of the label's prevalence
/// among `cluster`. Multiclass labels count as one-hot. 0 log 0 = 0.
double label_entropy(std::span<const NodeId> cluster, const Labels& labels);

struct EntropyReport {
  std::string run;
  int k = 0;
  /// One entry per cluster, in cluster id order.
  std::vector<double> entropies;
};

EntropyReport cluster_entropies(const std::string& run, const ClusterConfig& cfg, const Labels& labels);

/// `run,cluster,entropy` rows ordered by (run, cluster).
void write_entropy_csv(const std::filesystem::path& path, std::span<const EntropyReport> reports);
std::string entropy_csv(std::span<const EntropyReport> reports);

/// Population variance (0 for fewer than two values).
double variance(std::span<const double> values);
double mean(std::span<const double> values);

}  // namespace pcgcn
