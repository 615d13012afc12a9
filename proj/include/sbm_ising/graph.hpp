#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace sbm_ising {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;  // always first < second
using Labels = std::vector<std::uint8_t>;

/// Immutable simple undirected graph in CSR form, with optional ground-truth
/// community labels in {0, 1}.
class SparseGraph {
 public:
  SparseGraph() = default;

  /// Validates and canonicalizes: each edge is stored as (min, max), edges
  /// are sorted. Self-loops, duplicates and out-of-range endpoints throw
  /// parameter_error.
  SparseGraph(std::size_t n, std::vector<Edge> edges, std::optional<Labels> labels = std::nullopt)
      : n_(n), edges_(std::move(edges)), labels_(std::move(labels)) {
    for (auto& e : edges_) {
      if (e.first == e.second)
        throw parameter_error("self-loop at vertex " + std::to_string(e.first));
      if (e.first >= n_ || e.second >= n_)
        throw parameter_error("edge endpoint out of range for n=" + std::to_string(n_));
      if (e.first > e.second) std::swap(e.first, e.second);
    }
    std::sort(edges_.begin(), edges_.end());
    const auto dup = std::adjacent_find(edges_.begin(), edges_.end());
    if (dup != edges_.end()) {
      std::ostringstream os;
      os << "duplicate edge {" << dup->first << ", " << dup->second << "}";
      throw parameter_error(os.str());
    }
    if (labels_) {
      if (labels_->size() != n_) throw parameter_error("label count differs from n");
      for (auto l : *labels_)
        if (l > 1) throw parameter_error("labels must be 0 or 1");
    }
    build_csr();
  }

  std::size_t num_vertices() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::span<const Vertex> neighbors(Vertex u) const noexcept {
    return {adjacency_.data() + offsets_[u], adjacency_.data() + offsets_[u + 1]};
  }
  std::size_t degree(Vertex u) const noexcept { return offsets_[u + 1] - offsets_[u]; }
  std::size_t max_degree() const noexcept { return max_degree_; }

  bool has_edge(Vertex u, Vertex v) const noexcept {
    if (u >= n_ || v >= n_) return false;
    if (degree(u) > degree(v)) std::swap(u, v);
    const auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  bool has_labels() const noexcept { return labels_.has_value(); }
  const Labels& labels() const {
    if (!labels_) throw parameter_error("graph has no ground-truth labels");
    return *labels_;
  }
  const std::optional<Labels>& maybe_labels() const noexcept { return labels_; }

  /// Same edges, new labels.
  SparseGraph with_labels(std::optional<Labels> labels) const {
    return SparseGraph(n_, edges_, std::move(labels));
  }

  /// Number of edges with one endpoint in community a and the other in b.
  std::size_t block_edge_count(int a, int b) const {
    const auto& lab = labels();
    std::size_t c = 0;
    for (const auto& [u, v] : edges_) {
      const int lu = lab[u], lv = lab[v];
      if ((lu == a && lv == b) || (lu == b && lv == a)) ++c;
    }
    return c;
  }

  friend bool operator==(const SparseGraph& a, const SparseGraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_ && a.labels_ == b.labels_;
  }

 private:
  void build_csr() {
    offsets_.assign(n_ + 1, 0);
    for (const auto& [u, v] : edges_) {
      ++offsets_[u + 1];
      ++offsets_[v + 1];
    }
    for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] += offsets_[i];
    adjacency_.resize(2 * edges_.size());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [u, v] : edges_) {
      adjacency_[fill[u]++] = v;
      adjacency_[fill[v]++] = u;
    }
    max_degree_ = 0;
    for (std::size_t u = 0; u < n_; ++u) {
      std::sort(adjacency_.begin() + offsets_[u], adjacency_.begin() + offsets_[u + 1]);
      max_degree_ = std::max(max_degree_, offsets_[u + 1] - offsets_[u]);
    }
  }

  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::optional<Labels> labels_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Vertex> adjacency_;
  std::size_t max_degree_ = 0;
};

}  // namespace sbm_ising
