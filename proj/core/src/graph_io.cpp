#include "pcgcn/graph_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <string_view>

namespace pcgcn {
namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_int(std::string_view s, T& out) {
  s = trim(s);
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

// Reads `node,<values...>` rows after a header; returns header columns
// (without `node`) and rows keyed by node id.
struct CsvTable {
  std::vector<std::string> columns;
  std::map<NodeId, std::pair<std::size_t, std::vector<std::string>>> rows;
};

CsvTable read_node_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto view = trim(line);
    if (view.empty()) continue;
    auto cells = split(view, ',');
    if (!header) {
      if (trim(cells[0]) != "node") throw ParseError(path, lineno, "header must start with `node`");
      for (std::size_t i = 1; i < cells.size(); ++i) t.columns.emplace_back(trim(cells[i]));
      header = true;
      continue;
    }
    if (cells.size() != t.columns.size() + 1) {
      throw ParseError(path, lineno, "expected " + std::to_string(t.columns.size() + 1) + " fields, got " +
                                         std::to_string(cells.size()));
    }
    NodeId id = 0;
    if (!parse_int(cells[0], id) || id < 0) throw ParseError(path, lineno, "bad node id");
    std::vector<std::string> values;
    for (std::size_t i = 1; i < cells.size(); ++i) values.emplace_back(trim(cells[i]));
    if (!t.rows.emplace(id, std::pair{lineno, std::move(values)}).second) throw ParseError(path, lineno, "duplicate node id");
  }
  if (!header) throw ParseError(path, lineno, "missing header");
  if (!t.rows.empty() && t.rows.rbegin()->first != static_cast<NodeId>(t.rows.size()) - 1) {
    throw ParseError(path, lineno, "node ids must cover 0..n-1");
  }
  return t;
}

}  // namespace

ParseError::ParseError(const std::filesystem::path& path, std::size_t line, const std::string& what)
    : std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + what), line_(line) {}

std::vector<WeightedEdge> read_edge_list(const std::filesystem::path& path, NodeId* max_id) {
  auto in = open_in(path);
  std::vector<WeightedEdge> edges;
  std::string line;
  std::size_t lineno = 0;
  NodeId largest = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hint = trim(line); hint.starts_with("# nodes ")) {
      NodeId declared = 0;
      if (parse_int(hint.substr(8), declared) && declared > 0) largest = std::max(largest, declared - 1);
    }
    auto view = line.find('#') == std::string::npos ? std::string_view(line)
                                                    : std::string_view(line).substr(0, line.find('#'));
    view = trim(view);
    if (view.empty()) continue;
    auto cells = split(view, '\t');
    if (cells.size() != 2 && cells.size() != 3) {
      throw ParseError(path, lineno, "expected `u<TAB>v[<TAB>w]`");
    }
    WeightedEdge e;
    if (!parse_int(cells[0], e.u) || !parse_int(cells[1], e.v) || e.u < 0 || e.v < 0) {
      throw ParseError(path, lineno, "bad node id");
    }
    if (cells.size() == 3 && (!parse_int(cells[2], e.w) || e.w < 1)) {
      throw ParseError(path, lineno, "weight must be a positive integer");
    }
    largest = std::max({largest, e.u, e.v});
    edges.push_back(e);
  }
  if (max_id) *max_id = largest;
  return edges;
}

void write_edge_list(const std::filesystem::path& path, const Graph& g) {
  auto out = open_out(path);
  out << "# nodes " << g.num_nodes() << "\n";
  for (const auto& e : g.edges()) out << e.u << '\t' << e.v << '\t' << e.w << '\n';
}

Matrix read_features(const std::filesystem::path& path) {
  const auto t = read_node_csv(path);
  Matrix f(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(t.columns.size()));
  for (const auto& [id, row] : t.rows) {
    const auto& [lineno, values] = row;
    for (std::size_t j = 0; j < values.size(); ++j) {
      double x = 0;
      if (!parse_double(values[j], x)) {
        throw ParseError(path, lineno, "bad feature value `" + values[j] + "`");
      }
      f(id, static_cast<Eigen::Index>(j)) = x;
    }
  }
  return f;
}

void write_features(const std::filesystem::path& path, const Matrix& features) {
  auto out = open_out(path);
  out << "node";
  for (Eigen::Index j = 0; j < features.cols(); ++j) out << ",f" << j;
  out << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < features.cols(); ++j) out << ',' << features(i, j);
    out << '\n';
  }
}

Labels read_labels(const std::filesystem::path& path, TaskKind task) {
  const auto t = read_node_csv(path);
  const auto n = static_cast<NodeId>(t.rows.size());
  if (task == TaskKind::kMulticlass) {
    if (t.columns.size() != 1) throw ParseError(path, 1, "multiclass labels need a single `class` column");
    std::vector<int> classes;
    classes.reserve(t.rows.size());
    int max_class = 0;
    for (const auto& [id, row] : t.rows) {
    const auto& [lineno, values] = row;
      int c = 0;
      if (!parse_int(values[0], c) || c < 0) {
        throw ParseError(path, lineno, "bad class id `" + values[0] + "`");
      }
      max_class = std::max(max_class, c);
      classes.push_back(c);
    }
    return Labels::multiclass(std::move(classes), max_class + 1);
  }
  if (t.columns.empty()) throw ParseError(path, 1, "multilabel labels need at least one column");
  std::vector<std::uint8_t> bits;
  bits.reserve(t.rows.size() * t.columns.size());
  for (const auto& [id, row] : t.rows) {
    const auto& [lineno, values] = row;
    for (const auto& v : values) {
      if (v != "0" && v != "1") throw ParseError(path, lineno, "label values must be 0 or 1");
      bits.push_back(v == "1" ? 1 : 0);
    }
  }
  return Labels::multilabel(std::move(bits), n, static_cast<int>(t.columns.size()));
}

void write_labels(const std::filesystem::path& path, const Labels& labels) {
  auto out = open_out(path);
  if (labels.kind() == TaskKind::kMulticlass) {
    out << "node,class\n";
    for (NodeId v = 0; v < labels.num_nodes(); ++v) out << v << ',' << labels.class_of(v) << '\n';
    return;
  }
  out << "node";
  for (int j = 0; j < labels.num_labels(); ++j) out << ",l" << j;
  out << '\n';
  for (NodeId v = 0; v < labels.num_nodes(); ++v) {
    out << v;
    for (int j = 0; j < labels.num_labels(); ++j) out << ',' << (labels.value(v, j) ? 1 : 0);
    out << '\n';
  }
}

Graph load_graph(const std::filesystem::path& edge_list, const std::filesystem::path& features,
                 const std::filesystem::path& labels, TaskKind task) {
  NodeId max_id = -1;
  const auto edges = read_edge_list(edge_list, &max_id);
  Matrix f;
  Labels l;
  if (!features.empty()) f = read_features(features);
  if (!labels.empty()) l = read_labels(labels, task);

  NodeId n = max_id + 1;
  if (!features.empty()) n = std::max(n, static_cast<NodeId>(f.rows()));
  if (!labels.empty()) n = std::max(n, l.num_nodes());
  if (n == 0) throw std::runtime_error("empty graph: " + edge_list.string());
  if (!features.empty() && f.rows() != n) {
    throw std::runtime_error("dimension mismatch: " + features.string() + " has " + std::to_string(f.rows()) +
                             " rows but the graph has " + std::to_string(n) + " nodes");
  }
  if (!labels.empty() && l.num_nodes() != n) {
    throw std::runtime_error("dimension mismatch: " + labels.string() + " has " + std::to_string(l.num_nodes()) +
                             " rows but the graph has " + std::to_string(n) + " nodes");
  }
  Graph g = Graph::from_edges(n, edges);
  if (!features.empty()) g.set_features(std::move(f));
  if (!labels.empty()) g.set_labels(std::move(l));
  return g;
}

}  // namespace pcgcn
