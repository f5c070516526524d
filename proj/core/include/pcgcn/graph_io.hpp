#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "pcgcn/graph.hpp"

namespace pcgcn {

/// Input file could not be parsed; the message carries path and line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::filesystem::path& path, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Reads a `u<TAB>v[<TAB>w]` edge list (0-based ids, `#` comments). The node
/// count is the largest id seen plus one, raised by a `# nodes N` comment or
/// by the row count of the feature and label files when those are given.
/// Features and labels paths may be empty.
Graph load_graph(const std::filesystem::path& edge_list, const std::filesystem::path& features,
                 const std::filesystem::path& labels, TaskKind task);

std::vector<WeightedEdge> read_edge_list(const std::filesystem::path& path, NodeId* max_id = nullptr);
void write_edge_list(const std::filesystem::path& path, const Graph& g);

/// CSV with header `node,f0,f1,...`; rows may come in any node order.
Matrix read_features(const std::filesystem::path& path);
void write_features(const std::filesystem::path& path, const Matrix& features);

/// Multiclass: header `node,class`. Multilabel: header `node,l0,l1,...` of 0/1.
Labels read_labels(const std::filesystem::path& path, TaskKind task);
void write_labels(const std::filesystem::path& path, const Labels& labels);

}  // namespace pcgcn
