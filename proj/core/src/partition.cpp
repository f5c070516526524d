#include "pcgcn/partition.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

#include "pcgcn/graph_io.hpp"

namespace pcgcn {
namespace multilevel {
namespace {

constexpr double kEps = 1e-12;
// A base local-search pass stops after this many moves without a new best.
constexpr int kFruitlessMoves = 50;

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

// Per-cluster statistics for incremental gain evaluation. assoc counts
// internal weight over ordered pairs (so collapsed self weight included).
class ClusterState {
 public:
  ClusterState(const WeightedGraph& g, std::vector<int>& assign, int k, PartitionObjective objective)
      : g_(g), assign_(assign), k_(k), objective_(objective),
        assoc_(static_cast<std::size_t>(k), 0.0), vol_(static_cast<std::size_t>(k), 0.0),
        size_(static_cast<std::size_t>(k), 0), links_(static_cast<std::size_t>(k), 0.0) {
    for (std::int32_t v = 0; v < g.num_nodes(); ++v) {
      const int c = assign_[static_cast<std::size_t>(v)];
      if (c < 0) continue;
      vol_[static_cast<std::size_t>(c)] += g.node_weight[static_cast<std::size_t>(v)];
      assoc_[static_cast<std::size_t>(c)] += g.self_weight[static_cast<std::size_t>(v)];
      ++size_[static_cast<std::size_t>(c)];
      for (auto s = g.row_ptr[static_cast<std::size_t>(v)]; s < g.row_ptr[static_cast<std::size_t>(v) + 1]; ++s) {
        if (assign_[static_cast<std::size_t>(g.col[static_cast<std::size_t>(s)])] == c) {
          assoc_[static_cast<std::size_t>(c)] += g.weight[static_cast<std::size_t>(s)];
        }
      }
    }
  }

  int k() const { return k_; }
  int size(int c) const { return size_[static_cast<std::size_t>(c)]; }
  double vol(int c) const { return vol_[static_cast<std::size_t>(c)]; }
  int cluster(std::int32_t v) const { return assign_[static_cast<std::size_t>(v)]; }

  // Fills the link weights of v towards each cluster; returns them.
  const std::vector<double>& links(std::int32_t v) {
    std::fill(links_.begin(), links_.end(), 0.0);
    for (auto s = g_.row_ptr[static_cast<std::size_t>(v)]; s < g_.row_ptr[static_cast<std::size_t>(v) + 1]; ++s) {
      const int c = assign_[static_cast<std::size_t>(g_.col[static_cast<std::size_t>(s)])];
      if (c >= 0) links_[static_cast<std::size_t>(c)] += g_.weight[static_cast<std::size_t>(s)];
    }
    return links_;
  }

  // Objective change of moving v (currently in `from`, or unassigned when
  // from < 0) to `to`, given links from links(v).
  double gain(std::int32_t v, int from, int to, const std::vector<double>& links) const {
    const double lt = links[static_cast<std::size_t>(to)];
    if (objective_ == PartitionObjective::kEdgeCut) {
      return from < 0 ? lt : lt - links[static_cast<std::size_t>(from)];
    }
    const double d = g_.node_weight[static_cast<std::size_t>(v)];
    const double self = g_.self_weight[static_cast<std::size_t>(v)];
    const auto t = static_cast<std::size_t>(to);
    double delta = ratio(assoc_[t] + 2.0 * lt + self, vol_[t] + d) - ratio(assoc_[t], vol_[t]);
    if (from >= 0) {
      const auto f = static_cast<std::size_t>(from);
      delta += ratio(assoc_[f] - 2.0 * links[f] - self, vol_[f] - d) - ratio(assoc_[f], vol_[f]);
    }
    return delta;
  }

  // Moves v to `to` (from its current cluster, if any). `links` must be
  // links(v) computed against the current assignment.
  void move(std::int32_t v, int to, const std::vector<double>& links) {
    const double d = g_.node_weight[static_cast<std::size_t>(v)];
    const double self = g_.self_weight[static_cast<std::size_t>(v)];
    const int from = assign_[static_cast<std::size_t>(v)];
    if (from >= 0) {
      const auto f = static_cast<std::size_t>(from);
      assoc_[f] -= 2.0 * links[f] + self;
      vol_[f] -= d;
      --size_[f];
    }
    const auto t = static_cast<std::size_t>(to);
    assoc_[t] += 2.0 * links[t] + self;
    vol_[t] += d;
    ++size_[t];
    assign_[static_cast<std::size_t>(v)] = to;
  }

 private:
  const WeightedGraph& g_;
  std::vector<int>& assign_;
  int k_;
  PartitionObjective objective_;
  std::vector<double> assoc_;
  std::vector<double> vol_;
  std::vector<int> size_;
  std::vector<double> links_;
};

// Greedy growth: repeatedly assigns the unassigned node (restricted to
// `eligible`) with the strongest link into an allowed cluster, picking the
// allowed cluster with the best objective gain. Nodes not reachable from any
// allowed cluster go to the allowed cluster with the smallest volume.
void grow(const WeightedGraph& g, std::vector<int>& assign, int k, PartitionObjective objective,
          const std::vector<char>& eligible, const std::vector<char>& allowed) {
  ClusterState state(g, assign, k, objective);
  const auto n = static_cast<std::size_t>(g.num_nodes());
  std::vector<double> strength(n, 0.0);
  using Entry = std::pair<double, std::int32_t>;
  auto cmp = [](const Entry& a, const Entry& b) {
    return a.first < b.first || (a.first == b.first && a.second > b.second);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);

  auto push_neighbors = [&](std::int32_t v) {
    for (auto s = g.row_ptr[static_cast<std::size_t>(v)]; s < g.row_ptr[static_cast<std::size_t>(v) + 1]; ++s) {
      const auto u = g.col[static_cast<std::size_t>(s)];
      if (!eligible[static_cast<std::size_t>(u)] || assign[static_cast<std::size_t>(u)] >= 0) continue;
      const auto& l = state.links(u);
      double best = 0.0;
      for (int c = 0; c < k; ++c) {
        if (allowed[static_cast<std::size_t>(c)]) best = std::max(best, l[static_cast<std::size_t>(c)]);
      }
      if (best > strength[static_cast<std::size_t>(u)]) {
        strength[static_cast<std::size_t>(u)] = best;
        heap.emplace(best, u);
      }
    }
  };

  std::size_t remaining = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (eligible[v] && assign[v] < 0) ++remaining;
  }
  for (std::int32_t v = 0; v < g.num_nodes(); ++v) {
    const int c = assign[static_cast<std::size_t>(v)];
    if (c >= 0 && allowed[static_cast<std::size_t>(c)]) push_neighbors(v);
  }
  std::int32_t scan = 0;
  while (remaining > 0) {
    std::int32_t v = -1;
    while (!heap.empty()) {
      const auto [key, u] = heap.top();
      heap.pop();
      if (assign[static_cast<std::size_t>(u)] < 0 && key == strength[static_cast<std::size_t>(u)]) {
        v = u;
        break;
      }
    }
    int target = -1;
    if (v >= 0) {
      const auto& l = state.links(v);
      double best = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        if (!allowed[static_cast<std::size_t>(c)] || l[static_cast<std::size_t>(c)] <= 0.0) continue;
        const double gain = state.gain(v, -1, c, l);
        if (gain > best + kEps) {
          best = gain;
          target = c;
        }
      }
    } else {
      while (assign[static_cast<std::size_t>(scan)] >= 0 || !eligible[static_cast<std::size_t>(scan)]) ++scan;
      v = scan;
      for (int c = 0; c < k; ++c) {
        if (!allowed[static_cast<std::size_t>(c)]) continue;
        if (target < 0 || state.vol(c) < state.vol(target) ||
            (state.vol(c) == state.vol(target) && state.size(c) < state.size(target))) {
          target = c;
        }
      }
    }
    state.move(v, target, state.links(v));
    --remaining;
    push_neighbors(v);
  }
}

// Local search on the coarsest graph: passes of tentative best moves (any
// node to any other cluster, each node at most once per pass) rolled back to
// the best prefix. Never empties a cluster.
void local_search(const WeightedGraph& g, std::vector<int>& assign, int k, PartitionObjective objective,
                  int max_passes) {
  ClusterState state(g, assign, k, objective);
  const auto n = g.num_nodes();
  for (int pass = 0; pass < max_passes; ++pass) {
    std::vector<char> locked(static_cast<std::size_t>(n), 0);
    std::vector<std::pair<std::int32_t, int>> moves;  // node, previous cluster
    double current = 0.0;
    double best = 0.0;
    std::size_t best_len = 0;
    int fruitless = 0;
    while (fruitless < kFruitlessMoves) {
      double best_gain = -std::numeric_limits<double>::infinity();
      std::int32_t best_v = -1;
      int best_to = -1;
      for (std::int32_t v = 0; v < n; ++v) {
        const int from = state.cluster(v);
        if (locked[static_cast<std::size_t>(v)] || state.size(from) <= 1) continue;
        const auto& l = state.links(v);
        for (int c = 0; c < k; ++c) {
          if (c == from) continue;
          const double gain = state.gain(v, from, c, l);
          if (gain > best_gain + kEps) {
            best_gain = gain;
            best_v = v;
            best_to = c;
          }
        }
      }
      if (best_v < 0) break;
      moves.emplace_back(best_v, state.cluster(best_v));
      state.move(best_v, best_to, state.links(best_v));
      locked[static_cast<std::size_t>(best_v)] = 1;
      current += best_gain;
      if (current > best + kEps) {
        best = current;
        best_len = moves.size();
        fruitless = 0;
      } else {
        ++fruitless;
      }
    }
    while (moves.size() > best_len) {
      const auto [v, prev] = moves.back();
      moves.pop_back();
      state.move(v, prev, state.links(v));
    }
    if (best_len == 0) break;
  }
}

std::vector<int> base_clustering(const WeightedGraph& g, int k, const PartitionOptions& options, Rng& rng) {
  const auto n = static_cast<std::size_t>(g.num_nodes());
  const std::vector<char> eligible(n, 1);
  const std::vector<char> allowed(static_cast<std::size_t>(k), 1);
  std::vector<int> best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(options.base_restarts, 1); ++r) {
    std::vector<int> assign(n, -1);
    // k distinct seeds, sampled proportionally to node weight.
    std::vector<std::int32_t> pool(n);
    for (std::size_t v = 0; v < n; ++v) pool[v] = static_cast<std::int32_t>(v);
    for (int c = 0; c < k; ++c) {
      double total = 0.0;
      for (auto v : pool) total += g.node_weight[static_cast<std::size_t>(v)];
      std::size_t pick = 0;
      if (total > 0.0) {
        double x = uniform01(rng) * total;
        pick = pool.size() - 1;
        for (std::size_t i = 0; i < pool.size(); ++i) {
          x -= g.node_weight[static_cast<std::size_t>(pool[i])];
          if (x < 0.0) {
            pick = i;
            break;
          }
        }
        while (g.node_weight[static_cast<std::size_t>(pool[pick])] <= 0.0) --pick;
      } else {
        pick = uniform_index(rng, pool.size());
      }
      assign[static_cast<std::size_t>(pool[pick])] = c;
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    grow(g, assign, k, options.objective, eligible, allowed);
    local_search(g, assign, k, options.objective, options.refine_sweeps);
    const double value = objective(g, assign, k, options.objective);
    if (value > best_value + kEps) {
      best_value = value;
      best = std::move(assign);
    }
  }
  return best;
}

// Splits the largest cluster at its weakest internal edge until no cluster is empty.
void repair_empty(const WeightedGraph& g, std::vector<int>& assign, int k, PartitionObjective objective) {
  const auto n = static_cast<std::size_t>(g.num_nodes());
  for (;;) {
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int c : assign) ++sizes[static_cast<std::size_t>(c)];
    const auto empty = std::find(sizes.begin(), sizes.end(), 0);
    if (empty == sizes.end()) return;
    const int target = static_cast<int>(empty - sizes.begin());
    const int largest = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    if (sizes[static_cast<std::size_t>(largest)] < 2) throw std::logic_error("partition: cannot repair, k > n");

    std::int32_t wu = -1, wv = -1;
    double weakest = std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < n; ++u) {
      if (assign[u] != largest) continue;
      for (auto s = g.row_ptr[u]; s < g.row_ptr[u + 1]; ++s) {
        const auto v = g.col[static_cast<std::size_t>(s)];
        if (static_cast<std::size_t>(v) > u && assign[static_cast<std::size_t>(v)] == largest &&
            g.weight[static_cast<std::size_t>(s)] < weakest) {
          weakest = g.weight[static_cast<std::size_t>(s)];
          wu = static_cast<std::int32_t>(u);
          wv = v;
        }
      }
    }
    if (wu < 0) {
      // No internal edges: move the highest-id member.
      for (std::size_t v = n; v-- > 0;) {
        if (assign[v] == largest) {
          assign[v] = target;
          break;
        }
      }
      continue;
    }
    std::vector<char> eligible(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
      if (assign[v] == largest) {
        eligible[v] = 1;
        assign[v] = -1;
      }
    }
    assign[static_cast<std::size_t>(wu)] = largest;
    assign[static_cast<std::size_t>(wv)] = target;
    std::vector<char> allowed(static_cast<std::size_t>(k), 0);
    allowed[static_cast<std::size_t>(largest)] = 1;
    allowed[static_cast<std::size_t>(target)] = 1;
    grow(g, assign, k, objective, eligible, allowed);
  }
}

}  // namespace

WeightedGraph WeightedGraph::from_graph(const Graph& g) {
  WeightedGraph w;
  w.row_ptr.assign(g.row_ptr().begin(), g.row_ptr().end());
  w.col.assign(g.col_idx().begin(), g.col_idx().end());
  w.weight.reserve(g.weights().size());
  for (Weight x : g.weights()) w.weight.push_back(static_cast<double>(x));
  w.node_weight.assign(static_cast<std::size_t>(g.num_nodes()), 0.0);
  w.self_weight.assign(static_cast<std::size_t>(g.num_nodes()), 0.0);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    for (Weight x : g.neighbor_weights(v)) w.node_weight[static_cast<std::size_t>(v)] += static_cast<double>(x);
  }
  return w;
}

CoarseLevel coarsen(const WeightedGraph& fine, Rng& rng) {
  const auto n = static_cast<std::size_t>(fine.num_nodes());
  std::vector<std::int32_t> order(n);
  for (std::size_t v = 0; v < n; ++v) order[v] = static_cast<std::int32_t>(v);
  shuffle(order, rng);

  std::vector<std::int32_t> mate(n, -1);
  for (auto v : order) {
    if (mate[static_cast<std::size_t>(v)] >= 0) continue;
    std::int32_t best = -1;
    double best_w = 0.0;
    for (auto s = fine.row_ptr[static_cast<std::size_t>(v)]; s < fine.row_ptr[static_cast<std::size_t>(v) + 1]; ++s) {
      const auto u = fine.col[static_cast<std::size_t>(s)];
      const double w = fine.weight[static_cast<std::size_t>(s)];
      if (mate[static_cast<std::size_t>(u)] >= 0) continue;
      if (best < 0 || w > best_w || (w == best_w && u < best)) {
        best = u;
        best_w = w;
      }
    }
    if (best >= 0) {
      mate[static_cast<std::size_t>(v)] = best;
      mate[static_cast<std::size_t>(best)] = v;
    } else {
      mate[static_cast<std::size_t>(v)] = v;
    }
  }

  CoarseLevel level;
  level.map.assign(n, -1);
  std::int32_t next = 0;
  std::vector<std::int32_t> first_member;
  for (std::size_t v = 0; v < n; ++v) {
    if (level.map[v] >= 0) continue;
    level.map[v] = next;
    level.map[static_cast<std::size_t>(mate[v])] = next;
    first_member.push_back(static_cast<std::int32_t>(v));
    ++next;
  }

  auto& coarse = level.graph;
  const auto cn = static_cast<std::size_t>(next);
  coarse.node_weight.assign(cn, 0.0);
  coarse.self_weight.assign(cn, 0.0);
  coarse.row_ptr.assign(1, 0);
  std::vector<double> acc(cn, 0.0);
  std::vector<std::int32_t> touched;
  for (std::size_t c = 0; c < cn; ++c) {
    const auto a = static_cast<std::size_t>(first_member[c]);
    const auto b = static_cast<std::size_t>(mate[a]);
    touched.clear();
    for (const auto v : {a, b}) {
      coarse.node_weight[c] += fine.node_weight[v];
      coarse.self_weight[c] += fine.self_weight[v];
      for (auto s = fine.row_ptr[v]; s < fine.row_ptr[v + 1]; ++s) {
        const auto cu = static_cast<std::size_t>(level.map[static_cast<std::size_t>(fine.col[static_cast<std::size_t>(s)])]);
        if (cu == c) {
          coarse.self_weight[c] += fine.weight[static_cast<std::size_t>(s)];
          continue;
        }
        if (acc[cu] == 0.0) touched.push_back(static_cast<std::int32_t>(cu));
        acc[cu] += fine.weight[static_cast<std::size_t>(s)];
      }
      if (a == b) break;
    }
    std::sort(touched.begin(), touched.end());
    for (auto cu : touched) {
      coarse.col.push_back(cu);
      coarse.weight.push_back(acc[static_cast<std::size_t>(cu)]);
      acc[static_cast<std::size_t>(cu)] = 0.0;
    }
    coarse.row_ptr.push_back(static_cast<std::int64_t>(coarse.col.size()));
  }
  return level;
}

double objective(const WeightedGraph& g, std::span<const int> assign, int k, PartitionObjective objective) {
  std::vector<double> assoc(static_cast<std::size_t>(k), 0.0);
  std::vector<double> vol(static_cast<std::size_t>(k), 0.0);
  double cut = 0.0;
  for (std::int32_t v = 0; v < g.num_nodes(); ++v) {
    const auto c = static_cast<std::size_t>(assign[static_cast<std::size_t>(v)]);
    vol[c] += g.node_weight[static_cast<std::size_t>(v)];
    assoc[c] += g.self_weight[static_cast<std::size_t>(v)];
    for (auto s = g.row_ptr[static_cast<std::size_t>(v)]; s < g.row_ptr[static_cast<std::size_t>(v) + 1]; ++s) {
      if (static_cast<std::size_t>(assign[static_cast<std::size_t>(g.col[static_cast<std::size_t>(s)])]) == c) {
        assoc[c] += g.weight[static_cast<std::size_t>(s)];
      } else {
        cut += g.weight[static_cast<std::size_t>(s)];
      }
    }
  }
  if (objective == PartitionObjective::kEdgeCut) return -0.5 * cut;
  double total = 0.0;
  for (std::size_t c = 0; c < assoc.size(); ++c) total += ratio(assoc[c], vol[c]);
  return total;
}

int refine_boundary(const WeightedGraph& g, std::vector<int>& assign, int k, PartitionObjective objective_kind,
                    int max_sweeps, std::vector<double>* trace) {
  ClusterState state(g, assign, k, objective_kind);
  int moves = 0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool moved = false;
    for (std::int32_t v = 0; v < g.num_nodes(); ++v) {
      const int from = state.cluster(v);
      if (state.size(from) <= 1) continue;
      const auto& l = state.links(v);
      int best_to = -1;
      double best_gain = kEps;
      for (int c = 0; c < k; ++c) {
        if (c == from || l[static_cast<std::size_t>(c)] <= 0.0) continue;
        const double gain = state.gain(v, from, c, l);
        if (gain > best_gain) {
          best_gain = gain;
          best_to = c;
        }
      }
      if (best_to < 0) continue;
      state.move(v, best_to, l);
      ++moves;
      moved = true;
      if (trace) trace->push_back(objective(g, assign, k, objective_kind));
    }
    if (!moved) break;
  }
  return moves;
}

}  // namespace multilevel

std::vector<std::vector<NodeId>> ClusterConfig::members() const {
  std::vector<std::vector<NodeId>> out(static_cast<std::size_t>(k));
  for (std::size_t v = 0; v < assign.size(); ++v) out[static_cast<std::size_t>(assign[v])].push_back(static_cast<NodeId>(v));
  return out;
}

std::vector<NodeId> ClusterConfig::cluster_sizes() const {
  std::vector<NodeId> out(static_cast<std::size_t>(k), 0);
  for (int c : assign) ++out[static_cast<std::size_t>(c)];
  return out;
}

Weight ClusterConfig::cut_weight(const Graph& g) const {
  Weight total = 0;
  for (EdgeId e : cut_edges) total += g.edge_weight(e);
  return total;
}

ClusterConfig make_cluster_config(const Graph& g, int k, std::vector<int> assign) {
  if (k < 1) throw std::invalid_argument("cluster config: k must be >= 1");
  if (assign.size() != static_cast<std::size_t>(g.num_nodes())) {
    throw std::invalid_argument("cluster config: assignment size != node count");
  }
  std::vector<char> used(static_cast<std::size_t>(k), 0);
  for (int c : assign) {
    if (c < 0 || c >= k) throw std::invalid_argument("cluster config: cluster id out of range");
    used[static_cast<std::size_t>(c)] = 1;
  }
  if (std::find(used.begin(), used.end(), 0) != used.end()) {
    throw std::invalid_argument("cluster config: empty cluster");
  }
  ClusterConfig cfg;
  cfg.k = k;
  for (EdgeId e = 0; e < static_cast<EdgeId>(g.num_edges()); ++e) {
    const auto [u, v] = g.endpoints(e);
    if (assign[static_cast<std::size_t>(u)] != assign[static_cast<std::size_t>(v)]) cfg.cut_edges.push_back(e);
  }
  cfg.assign = std::move(assign);
  return cfg;
}

std::string_view objective_name(PartitionObjective o) {
  return o == PartitionObjective::kEdgeCut ? "edge-cut" : "normalized-cut";
}

PartitionObjective parse_objective(std::string_view name) {
  if (name == "edge-cut") return PartitionObjective::kEdgeCut;
  if (name == "normalized-cut") return PartitionObjective::kNormalizedCut;
  throw std::invalid_argument("unknown partition objective `" + std::string(name) + "`");
}

ClusterConfig partition(const Graph& g, const PartitionOptions& options) {
  const int k = options.k;
  if (k < 1) throw std::invalid_argument("partition: k must be >= 1");
  if (k > g.num_nodes()) {
    throw std::invalid_argument("partition: k (" + std::to_string(k) + ") exceeds node count (" +
                                std::to_string(g.num_nodes()) + ")");
  }
  if (k == 1) return make_cluster_config(g, 1, std::vector<int>(static_cast<std::size_t>(g.num_nodes()), 0));

  Rng rng(options.seed);
  std::vector<multilevel::CoarseLevel> levels;
  multilevel::WeightedGraph finest = multilevel::WeightedGraph::from_graph(g);
  const auto threshold = static_cast<std::int32_t>(std::max(options.coarsen_factor * k, 2 * k));
  const multilevel::WeightedGraph* current = &finest;
  while (current->num_nodes() > threshold) {
    auto level = multilevel::coarsen(*current, rng);
    const auto before = current->num_nodes();
    const auto after = level.graph.num_nodes();
    if (after == before) break;
    levels.push_back(std::move(level));
    current = &levels.back().graph;
    if (static_cast<double>(after) > (1.0 - options.min_shrink) * static_cast<double>(before)) break;
  }

  std::vector<int> assign = multilevel::base_clustering(*current, k, options, rng);
  for (std::size_t i = levels.size(); i-- > 0;) {
    const auto& fine = i == 0 ? finest : levels[i - 1].graph;
    std::vector<int> projected(static_cast<std::size_t>(fine.num_nodes()));
    for (std::size_t v = 0; v < projected.size(); ++v) {
      projected[v] = assign[static_cast<std::size_t>(levels[i].map[v])];
    }
    assign = std::move(projected);
    multilevel::refine_boundary(fine, assign, k, options.objective, options.refine_sweeps);
  }
  multilevel::repair_empty(finest, assign, k, options.objective);
  return make_cluster_config(g, k, std::move(assign));
}

double partition_objective(const Graph& g, std::span<const int> assign, int k, PartitionObjective objective) {
  return multilevel::objective(multilevel::WeightedGraph::from_graph(g), assign, k, objective);
}

Graph restore_weights(const Graph& reweighted, const Graph& original, const ClusterConfig& cfg) {
  if (!reweighted.same_topology(original)) throw std::invalid_argument("restore_weights: topology mismatch");
  if (cfg.assign.size() != static_cast<std::size_t>(original.num_nodes())) {
    throw std::invalid_argument("restore_weights: cluster config does not match graph");
  }
  // Non-cut edges must carry the original weight; cut edges are dropped by
  // cluster subgraphs anyway and are restored as well.
  return reweighted.with_edge_weights(original.edge_weights());
}

std::vector<Subgraph> cluster_subgraphs(const Graph& g, const ClusterConfig& cfg) {
  std::vector<Subgraph> out;
  for (const auto& nodes : cfg.members()) out.push_back(induced_subgraph(g, nodes));
  return out;
}

Subgraph merge_clusters(const Graph& g, const ClusterConfig& cfg, std::span<const int> clusters) {
  std::vector<char> chosen(static_cast<std::size_t>(cfg.k), 0);
  for (int c : clusters) {
    if (c < 0 || c >= cfg.k) throw std::invalid_argument("merge_clusters: cluster id out of range");
    chosen[static_cast<std::size_t>(c)] = 1;
  }
  std::vector<NodeId> nodes;
  for (std::size_t v = 0; v < cfg.assign.size(); ++v) {
    if (chosen[static_cast<std::size_t>(cfg.assign[v])]) nodes.push_back(static_cast<NodeId>(v));
  }
  return induced_subgraph(g, nodes);
}

Subgraph sample_batch(const Graph& g, const ClusterConfig& cfg, int bsize, Rng& rng) {
  if (bsize < 1 || bsize > cfg.k) {
    throw std::invalid_argument("sample_batch: bsize " + std::to_string(bsize) + " outside [1, " +
                                std::to_string(cfg.k) + "]");
  }
  std::vector<int> ids(static_cast<std::size_t>(cfg.k));
  for (int c = 0; c < cfg.k; ++c) ids[static_cast<std::size_t>(c)] = c;
  // Partial Fisher-Yates: the first bsize entries are a uniform sample.
  for (int i = 0; i < bsize; ++i) {
    const auto j = static_cast<std::size_t>(i) + uniform_index(rng, static_cast<std::uint64_t>(cfg.k - i));
    std::swap(ids[static_cast<std::size_t>(i)], ids[j]);
  }
  ids.resize(static_cast<std::size_t>(bsize));
  return merge_clusters(g, cfg, ids);
}

void write_clusters(const std::filesystem::path& path, const ClusterConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t v = 0; v < cfg.assign.size(); ++v) out << v << '\t' << cfg.assign[v] << '\n';
}

ClusterConfig read_clusters(const std::filesystem::path& path, const Graph& g) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<int> assign(static_cast<std::size_t>(g.num_nodes()), -1);
  std::string line;
  std::size_t lineno = 0;
  int k = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(path, lineno, "expected `node_id<TAB>cluster_id`");
    long v = -1;
    long c = -1;
    try {
      v = std::stol(line.substr(0, tab));
      c = std::stol(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw ParseError(path, lineno, "bad integer");
    }
    if (v < 0 || v >= g.num_nodes() || c < 0) throw ParseError(path, lineno, "id out of range");
    assign[static_cast<std::size_t>(v)] = static_cast<int>(c);
    k = std::max(k, static_cast<int>(c) + 1);
  }
  if (std::find(assign.begin(), assign.end(), -1) != assign.end()) {
    throw ParseError(path, lineno, "not every node is assigned");
  }
  return make_cluster_config(g, k, std::move(assign));
}

}  // namespace pcgcn
