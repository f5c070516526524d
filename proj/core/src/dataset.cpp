#include "pcgcn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <string>

#include "pcgcn/graph_io.hpp"

namespace pcgcn {

std::string_view split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
    case Split::kNone: break;
  }
  return "none";
}

SplitMasks::SplitMasks(std::vector<Split> assignment) : assignment_(std::move(assignment)) {}

std::vector<NodeId> SplitMasks::nodes(Split s) const {
  std::vector<NodeId> out;
  for (std::size_t v = 0; v < assignment_.size(); ++v) {
    if (assignment_[v] == s) out.push_back(static_cast<NodeId>(v));
  }
  return out;
}

void SplitMasks::validate() const {
  for (Split s : {Split::kTrain, Split::kVal, Split::kTest}) {
    if (std::find(assignment_.begin(), assignment_.end(), s) == assignment_.end()) {
      throw std::invalid_argument("split `" + std::string(split_name(s)) + "` is empty");
    }
  }
}

SplitMasks read_splits(const std::filesystem::path& path, NodeId num_nodes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<Split> assignment(static_cast<std::size_t>(num_nodes), Split::kNone);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(path, lineno, "expected `node_id<TAB>split`");
    NodeId v = -1;
    try {
      std::size_t used = 0;
      v = static_cast<NodeId>(std::stol(line.substr(0, tab), &used));
      if (used != tab) v = -1;
    } catch (const std::exception&) {
      v = -1;
    }
    if (v < 0 || v >= num_nodes) throw ParseError(path, lineno, "node id out of range");
    const std::string name = line.substr(tab + 1);
    Split s = Split::kNone;
    if (name == "train") s = Split::kTrain;
    else if (name == "val") s = Split::kVal;
    else if (name == "test") s = Split::kTest;
    else throw ParseError(path, lineno, "unknown split `" + name + "`");
    if (assignment[static_cast<std::size_t>(v)] != Split::kNone) {
      throw ParseError(path, lineno, "node listed in more than one split");
    }
    assignment[static_cast<std::size_t>(v)] = s;
  }
  return SplitMasks(std::move(assignment));
}

void write_splits(const std::filesystem::path& path, const SplitMasks& splits) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (NodeId v = 0; v < splits.num_nodes(); ++v) {
    if (splits.of(v) != Split::kNone) out << v << '\t' << split_name(splits.of(v)) << '\n';
  }
}

SplitMasks stratified_split(const Labels& labels, double train_fraction, double val_fraction, std::uint64_t seed) {
  if (train_fraction <= 0 || val_fraction <= 0 || train_fraction + val_fraction >= 1) {
    throw std::invalid_argument("split fractions must be positive and leave room for a test split");
  }
  std::map<int, std::vector<NodeId>> strata;
  for (NodeId v = 0; v < labels.num_nodes(); ++v) {
    int key = -1;
    if (labels.kind() == TaskKind::kMulticlass) {
      key = labels.class_of(v);
    } else {
      for (int j = 0; j < labels.num_labels() && key < 0; ++j) {
        if (labels.value(v, j)) key = j;
      }
    }
    strata[key].push_back(v);
  }
  Rng rng(seed);
  std::vector<Split> assignment(static_cast<std::size_t>(labels.num_nodes()), Split::kNone);
  for (auto& [key, members] : strata) {
    shuffle(members, rng);
    const auto size = static_cast<double>(members.size());
    auto n_train = static_cast<std::size_t>(std::llround(train_fraction * size));
    auto n_val = static_cast<std::size_t>(std::llround(val_fraction * size));
    if (members.size() >= 3) {
      n_val = std::max<std::size_t>(n_val, 1);
      n_train = std::clamp<std::size_t>(n_train, 1, members.size() - n_val - 1);
    } else {
      n_val = 0;
      n_train = members.size();
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
      const Split s = i < n_train ? Split::kTrain : (i < n_train + n_val ? Split::kVal : Split::kTest);
      assignment[static_cast<std::size_t>(members[i])] = s;
    }
  }
  return SplitMasks(std::move(assignment));
}

Dataset Dataset::from_parts(Graph graph, SplitMasks splits) {
  if (splits.num_nodes() != graph.num_nodes()) {
    throw std::invalid_argument("splits cover " + std::to_string(splits.num_nodes()) + " nodes, graph has " +
                                std::to_string(graph.num_nodes()));
  }
  splits.validate();
  if (graph.labels().empty()) throw std::invalid_argument("dataset graph has no labels");
  if (graph.features().size() == 0) throw std::invalid_argument("dataset graph has no features");
  Dataset d;
  d.train = induced_subgraph(graph, splits.nodes(Split::kTrain));
  d.val = induced_subgraph(graph, splits.nodes(Split::kVal));
  d.test = induced_subgraph(graph, splits.nodes(Split::kTest));
  d.graph = std::move(graph);
  d.splits = std::move(splits);
  return d;
}

Dataset load_dataset(const std::filesystem::path& dir, TaskKind task) {
  Graph g = load_graph(dir / "edges.tsv", dir / "features.csv", dir / "labels.csv", task);
  SplitMasks s = read_splits(dir / "splits.tsv", g.num_nodes());
  return Dataset::from_parts(std::move(g), std::move(s));
}

void save_dataset(const std::filesystem::path& dir, const Graph& graph, const SplitMasks& splits) {
  std::filesystem::create_directories(dir);
  write_edge_list(dir / "edges.tsv", graph);
  if (graph.features().size() > 0) write_features(dir / "features.csv", graph.features());
  if (!graph.labels().empty()) write_labels(dir / "labels.csv", graph.labels());
  write_splits(dir / "splits.tsv", splits);
}

}  // namespace pcgcn
