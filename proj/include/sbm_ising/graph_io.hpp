#pragma once

// Edge-list text format:
//   line 1:      "n m"
//   m lines:     "u v" with 0 <= u < v < n
// Labels live in a sidecar file with n lines, each "0" or "1".

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"

namespace sbm_ising {

namespace detail {

inline std::vector<std::uint64_t> parse_uints(std::string_view line, std::size_t line_no) {
  std::vector<std::uint64_t> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + line.size(), v);
    if (ec != std::errc() || ptr == line.data() + i)
      throw parse_error("expected a nonnegative integer in \"" + std::string(line) + "\"", line_no);
    i = static_cast<std::size_t>(ptr - line.data());
    if (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r')
      throw parse_error("unexpected character in \"" + std::string(line) + "\"", line_no);
    out.push_back(v);
  }
  return out;
}

inline bool blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

}  // namespace detail

inline void write_graph(const SparseGraph& g, std::ostream& os) {
  os << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (const auto& [u, v] : g.edges()) os << u << ' ' << v << '\n';
}

inline std::string graph_to_string(const SparseGraph& g) {
  std::ostringstream os;
  write_graph(g, os);
  return os.str();
}

inline SparseGraph read_graph(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  std::uint64_t n = 0, m = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (detail::blank(line)) continue;
    const auto head = detail::parse_uints(line, line_no);
    if (head.size() != 2) throw parse_error("header must be \"n m\"", line_no);
    n = head[0];
    m = head[1];
    have_header = true;
    break;
  }
  if (!have_header) throw parse_error("missing \"n m\" header", line_no);
  if (n > UINT32_MAX) throw parse_error("n too large", line_no);

  std::vector<Edge> edges;
  edges.reserve(m);
  std::set<Edge> seen;
  while (std::getline(is, line)) {
    ++line_no;
    if (detail::blank(line)) continue;
    const auto uv = detail::parse_uints(line, line_no);
    if (uv.size() != 2) throw parse_error("edge line must be \"u v\"", line_no);
    if (uv[0] >= n || uv[1] >= n)
      throw parse_error("vertex index out of range for n=" + std::to_string(n), line_no);
    if (uv[0] == uv[1]) throw parse_error("self-loop at vertex " + std::to_string(uv[0]), line_no);
    Edge e{static_cast<Vertex>(std::min(uv[0], uv[1])), static_cast<Vertex>(std::max(uv[0], uv[1]))};
    if (!seen.insert(e).second)
      throw parse_error("duplicate edge " + std::to_string(e.first) + " " + std::to_string(e.second),
                        line_no);
    if (edges.size() == m) throw parse_error("more edge lines than the header's m", line_no);
    edges.push_back(e);
  }
  if (edges.size() != m)
    throw parse_error("header declares " + std::to_string(m) + " edges, found " +
                          std::to_string(edges.size()),
                      line_no);
  return SparseGraph(static_cast<std::size_t>(n), std::move(edges));
}

inline SparseGraph read_graph_string(const std::string& text) {
  std::istringstream is(text);
  return read_graph(is);
}

inline void write_labels(const Labels& labels, std::ostream& os) {
  for (auto l : labels) os << static_cast<int>(l) << '\n';
}

inline Labels read_labels(std::istream& is) {
  Labels out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (detail::blank(line)) continue;
    const auto v = detail::parse_uints(line, line_no);
    if (v.size() != 1 || v[0] > 1) throw parse_error("label must be 0 or 1", line_no);
    out.push_back(static_cast<std::uint8_t>(v[0]));
  }
  return out;
}

inline SparseGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file " + path);
  return read_graph(in);
}

inline Labels read_labels_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open label file " + path);
  return read_labels(in);
}

/// Graph plus sidecar labels; label count must match n.
inline SparseGraph read_labeled_graph(const std::string& graph_path, const std::string& labels_path) {
  auto g = read_graph_file(graph_path);
  auto labels = read_labels_file(labels_path);
  if (labels.size() != g.num_vertices())
    throw parse_error("label file has " + std::to_string(labels.size()) + " lines, expected " +
                          std::to_string(g.num_vertices()),
                      labels.size());
  return g.with_labels(std::move(labels));
}

inline void write_graph_file(const SparseGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_graph(g, out);
}

inline void write_labels_file(const Labels& labels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_labels(labels, out);
}

}  // namespace sbm_ising
