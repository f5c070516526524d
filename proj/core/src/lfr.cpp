#include "pcgcn/lfr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace pcgcn {
namespace {

// Truncated continuous power law x^-exponent on [lo, hi), sampled by inverse CDF.
struct PowerLaw {
  double lo;
  double hi;
  double exponent;

  double cdf(double x) const {
    const double a = 1.0 - exponent;
    return (std::pow(lo, a) - std::pow(x, a)) / (std::pow(lo, a) - std::pow(hi, a));
  }

  double sample(Rng& rng) const {
    const double a = 1.0 - exponent;
    const double lo_a = std::pow(lo, a);
    const double x = std::pow(lo_a - uniform01(rng) * (lo_a - std::pow(hi, a)), 1.0 / a);
    return std::min(x, std::nextafter(hi, lo));
  }

  /// E[floor(x)].
  double mean_floor() const {
    double mean = 0.0;
    for (auto k = static_cast<long>(std::floor(lo)); static_cast<double>(k) < hi; ++k) {
      const double a = std::max(static_cast<double>(k), lo);
      const double b = std::min(static_cast<double>(k + 1), hi);
      if (b > a) mean += static_cast<double>(k) * (cdf(b) - cdf(a));
    }
    return mean;
  }
};

NodeId resolved_max_degree(const LfrParams& p) {
  NodeId k = p.max_degree;
  if (k <= 0) k = std::max<NodeId>(static_cast<NodeId>(std::ceil(p.avg_degree)) + 1, p.n / 10);
  return std::min<NodeId>(k, p.n - 1);
}

NodeId resolved_max_community(const LfrParams& p) {
  NodeId c = p.max_community;
  if (c <= 0) c = std::max<NodeId>(p.min_community, p.n / 5);
  return std::min<NodeId>(c, p.n);
}

std::vector<NodeId> sample_degrees(const LfrParams& p, Rng& rng) {
  const double hi = static_cast<double>(resolved_max_degree(p)) + 1.0;
  // Bisection on the lower cutoff so that E[degree] matches avg_degree.
  double lo = 1.0;
  double up = hi - 1.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + up);
    if (PowerLaw{mid, hi, p.degree_exponent}.mean_floor() < p.avg_degree) {
      lo = mid;
    } else {
      up = mid;
    }
  }
  const PowerLaw law{0.5 * (lo + up), hi, p.degree_exponent};
  std::vector<NodeId> degrees(static_cast<std::size_t>(p.n));
  for (auto& d : degrees) d = static_cast<NodeId>(std::floor(law.sample(rng)));
  return degrees;
}

std::vector<NodeId> sample_community_sizes(const LfrParams& p, Rng& rng) {
  const PowerLaw law{static_cast<double>(p.min_community), static_cast<double>(resolved_max_community(p)) + 1.0,
                     p.community_exponent};
  std::vector<NodeId> sizes;
  NodeId total = 0;
  while (total < p.n) {
    const auto s = static_cast<NodeId>(std::floor(law.sample(rng)));
    if (total + s <= p.n) {
      sizes.push_back(s);
      total += s;
      continue;
    }
    const NodeId rest = p.n - total;
    if (rest >= p.min_community) {
      sizes.push_back(rest);
    } else {
      // Spread the remainder over random communities.
      for (NodeId i = 0; i < rest; ++i) ++sizes[uniform_index(rng, sizes.size())];
    }
    total = p.n;
  }
  return sizes;
}

class EdgeSet {
 public:
  explicit EdgeSet(NodeId n) : n_(static_cast<std::uint64_t>(n)) {}
  bool contains(NodeId u, NodeId v) const { return keys_.count(key(u, v)) != 0; }
  void insert(NodeId u, NodeId v) { keys_.insert(key(u, v)); }
  void erase(NodeId u, NodeId v) { keys_.erase(key(u, v)); }

 private:
  std::uint64_t key(NodeId u, NodeId v) const {
    if (u > v) std::swap(u, v);
    return static_cast<std::uint64_t>(u) * n_ + static_cast<std::uint64_t>(v);
  }
  std::uint64_t n_;
  std::unordered_set<std::uint64_t> keys_;
};

// Pairs stubs uniformly at random. Invalid pairs are repaired by swapping
// endpoints with a random accepted edge of the same pool, else dropped.
template <typename Allowed>
void match_stubs(std::vector<NodeId> stubs, const Allowed& allowed, EdgeSet& seen,
                 std::vector<WeightedEdge>& out, Rng& rng) {
  constexpr int kRepairAttempts = 50;
  shuffle(stubs, rng);
  std::vector<std::pair<NodeId, NodeId>> pool;
  std::vector<std::pair<NodeId, NodeId>> bad;
  auto ok = [&](NodeId u, NodeId v) { return u != v && allowed(u, v) && !seen.contains(u, v); };
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
    const NodeId u = stubs[i];
    const NodeId v = stubs[i + 1];
    if (ok(u, v)) {
      seen.insert(u, v);
      pool.emplace_back(u, v);
    } else {
      bad.emplace_back(u, v);
    }
  }
  for (const auto& [a, b] : bad) {
    for (int attempt = 0; attempt < kRepairAttempts && !pool.empty(); ++attempt) {
      const auto j = uniform_index(rng, pool.size());
      auto [c, d] = pool[j];
      if (uniform01(rng) < 0.5) std::swap(c, d);
      seen.erase(c, d);
      if (ok(a, c) && ok(b, d) && !(std::minmax(a, c) == std::minmax(b, d))) {
        seen.insert(a, c);
        seen.insert(b, d);
        pool[j] = {a, c};
        pool.emplace_back(b, d);
        break;
      }
      seen.insert(c, d);
    }
  }
  for (const auto& [u, v] : pool) out.push_back({u, v, 1});
}

// Makes the stub total even by removing one stub from a random node.
void make_even(std::vector<NodeId>& stub_counts, std::span<const NodeId> members, Rng& rng) {
  long total = 0;
  for (NodeId v : members) total += stub_counts[static_cast<std::size_t>(v)];
  if (total % 2 == 0) return;
  std::vector<NodeId> candidates;
  for (NodeId v : members) {
    if (stub_counts[static_cast<std::size_t>(v)] > 0) candidates.push_back(v);
  }
  --stub_counts[static_cast<std::size_t>(candidates[uniform_index(rng, candidates.size())])];
}

}  // namespace

void LfrParams::validate() const {
  if (n < 2) throw std::invalid_argument("lfr: n must be >= 2");
  if (min_community < 1) throw std::invalid_argument("lfr: min_community must be >= 1");
  if (min_community > n) throw std::invalid_argument("lfr: min_community exceeds n");
  if (n < 2 * min_community) {
    throw std::invalid_argument("lfr: n must be at least 2 * min_community (n=" + std::to_string(n) +
                                ", min_community=" + std::to_string(min_community) + ")");
  }
  if (max_community != 0 && max_community < min_community) {
    throw std::invalid_argument("lfr: max_community below min_community");
  }
  if (!(mu >= 0.0 && mu < 1.0)) throw std::invalid_argument("lfr: mu must lie in [0, 1)");
  if (!(degree_exponent > 1.0) || !(community_exponent > 1.0)) {
    throw std::invalid_argument("lfr: power-law exponents must exceed 1");
  }
  if (!(avg_degree >= 1.0) || avg_degree >= static_cast<double>(resolved_max_degree(*this))) {
    throw std::invalid_argument("lfr: avg_degree must lie in [1, max_degree)");
  }
}

Graph generate_lfr(const LfrParams& p) {
  p.validate();
  Rng rng(p.seed);
  std::vector<NodeId> degree = sample_degrees(p, rng);
  const std::vector<NodeId> sizes = sample_community_sizes(p, rng);

  // Split each degree into internal / external stubs (stochastic rounding
  // keeps the expected external fraction at mu).
  std::vector<NodeId> internal(degree.size());
  for (std::size_t v = 0; v < degree.size(); ++v) {
    const double target = (1.0 - p.mu) * degree[v];
    const double base = std::floor(target);
    internal[v] = static_cast<NodeId>(base) + (uniform01(rng) < target - base ? 1 : 0);
  }

  // Assign nodes to communities, largest internal degree first, each to a
  // random free slot among communities large enough to host it.
  std::vector<NodeId> order(degree.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return internal[static_cast<std::size_t>(a)] > internal[static_cast<std::size_t>(b)]; });
  std::vector<NodeId> free_slots = sizes;
  std::vector<int> community(degree.size(), -1);
  for (NodeId v : order) {
    auto& kin = internal[static_cast<std::size_t>(v)];
    long eligible = 0;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
      if (free_slots[c] > 0 && sizes[c] - 1 >= kin) eligible += free_slots[c];
    }
    std::size_t chosen = sizes.size();
    if (eligible > 0) {
      auto slot = static_cast<long>(uniform_index(rng, static_cast<std::uint64_t>(eligible)));
      for (std::size_t c = 0; c < sizes.size(); ++c) {
        if (free_slots[c] > 0 && sizes[c] - 1 >= kin) {
          if (slot < free_slots[c]) {
            chosen = c;
            break;
          }
          slot -= free_slots[c];
        }
      }
    } else {
      // No community is large enough: take the largest with room and cap.
      for (std::size_t c = 0; c < sizes.size(); ++c) {
        if (free_slots[c] > 0 && (chosen == sizes.size() || sizes[c] > sizes[chosen])) chosen = c;
      }
      kin = std::min(kin, sizes[chosen] - 1);
    }
    community[static_cast<std::size_t>(v)] = static_cast<int>(chosen);
    --free_slots[chosen];
  }

  std::vector<NodeId> external(degree.size());
  for (std::size_t v = 0; v < degree.size(); ++v) external[v] = degree[v] - internal[v];

  std::vector<std::vector<NodeId>> members(sizes.size());
  for (NodeId v = 0; v < p.n; ++v) members[static_cast<std::size_t>(community[static_cast<std::size_t>(v)])].push_back(v);

  EdgeSet seen(p.n);
  std::vector<WeightedEdge> edges;
  for (const auto& group : members) {
    make_even(internal, group, rng);
    std::vector<NodeId> stubs;
    for (NodeId v : group) stubs.insert(stubs.end(), static_cast<std::size_t>(internal[static_cast<std::size_t>(v)]), v);
    match_stubs(std::move(stubs), [](NodeId, NodeId) { return true; }, seen, edges, rng);
  }
  std::vector<NodeId> everyone(static_cast<std::size_t>(p.n));
  std::iota(everyone.begin(), everyone.end(), 0);
  make_even(external, everyone, rng);
  std::vector<NodeId> stubs;
  for (NodeId v = 0; v < p.n; ++v) stubs.insert(stubs.end(), static_cast<std::size_t>(external[static_cast<std::size_t>(v)]), v);
  match_stubs(
      std::move(stubs),
      [&](NodeId u, NodeId v) { return community[static_cast<std::size_t>(u)] != community[static_cast<std::size_t>(v)]; },
      seen, edges, rng);

  Graph g = Graph::from_edges(p.n, edges);
  g.set_labels(Labels::multiclass(std::vector<int>(community.begin(), community.end()), static_cast<int>(sizes.size())));
  return g;
}

double inter_community_fraction(const Graph& g) {
  if (g.num_edges() == 0) return 0.0;
  std::size_t cut = 0;
  for (const auto& e : g.edges()) {
    for (int j = 0; j < g.labels().num_labels(); ++j) {
      if (g.labels().value(e.u, j) != g.labels().value(e.v, j)) {
        ++cut;
        break;
      }
    }
  }
  return static_cast<double>(cut) / static_cast<double>(g.num_edges());
}

}  // namespace pcgcn
