#include "pcgcn/analysis.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pcgcn {

double label_entropy(std::span<const NodeId> cluster, const Labels& labels) {
  if (cluster.empty()) throw std::invalid_argument("label_entropy: empty cluster");
  const double size = static_cast<double>(cluster.size());
  double total = 0.0;
  for (int j = 0; j < labels.num_labels(); ++j) {
    std::size_t positive = 0;
    for (NodeId v : cluster) positive += labels.value(v, j) ? 1 : 0;
    const double p = static_cast<double>(positive) / size;
    if (p > 0.0 && p < 1.0) total -= p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p);
  }
  return total;
}

EntropyReport cluster_entropies(const std::string& run, const ClusterConfig& cfg, const Labels& labels) {
  if (labels.num_nodes() != static_cast<NodeId>(cfg.assign.size())) {
    throw std::invalid_argument("cluster assignment and labels cover different node counts");
  }
  EntropyReport report{run, cfg.k, {}};
  for (const auto& members : cfg.members()) report.entropies.push_back(label_entropy(members, labels));
  return report;
}

std::string entropy_csv(std::span<const EntropyReport> reports) {
  std::ostringstream out;
  out.precision(17);
  out << "run,cluster,entropy\n";
  for (const auto& r : reports) {
    for (std::size_t c = 0; c < r.entropies.size(); ++c) out << r.run << ',' << c << ',' << r.entropies[c] << '\n';
  }
  return out.str();
}

void write_entropy_csv(const std::filesystem::path& path, std::span<const EntropyReport> reports) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << entropy_csv(reports);
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double variance(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mu = mean(values);
  double acc = 0.0;
  for (double v : values) acc += (v - mu) * (v - mu);
  return acc / static_cast<double>(values.size());
}

}  // namespace pcgcn
