#pragma once

// Exact k-cycle counts and the cycle-count estimators of (d, lambda).

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "theory.hpp"

namespace sbm_ising {

inline constexpr int kDefaultMaxCycleLength = 9;

struct CycleCounts {
  int k = 3;
  std::uint64_t c_k = 0;
  double d_hat = 0.0;
};

/// Mean degree (1/n) sum deg(u) = 2m/n.
inline double degree_estimate(const SparseGraph& g) noexcept {
  if (g.num_vertices() == 0) return 0.0;
  return 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(g.num_vertices());
}

namespace detail {

// Number of simple paths root -> v1 -> ... -> v_{k-1} with every v_i > root
// and v_{k-1} adjacent to root. Each k-cycle whose minimum vertex is root is
// found exactly twice (once per orientation).
class RootedCycleWalker {
 public:
  RootedCycleWalker(const SparseGraph& g, int k)
      : g_(g), k_(k), on_path_(g.num_vertices(), 0), adj_root_(g.num_vertices(), 0) {}

  std::uint64_t count_from(Vertex root) {
    const auto nb = g_.neighbors(root);
    for (auto v : nb) adj_root_[v] = 1;
    root_ = root;
    on_path_[root] = 1;
    count_ = 0;
    for (auto v : nb)
      if (v > root) extend(v, 1);
    on_path_[root] = 0;
    for (auto v : nb) adj_root_[v] = 0;
    return count_;
  }

 private:
  void extend(Vertex v, int depth) {
    // depth = number of path vertices after root, v included
    if (depth == k_ - 1) {
      if (adj_root_[v]) ++count_;
      return;
    }
    on_path_[v] = 1;
    for (auto w : g_.neighbors(v))
      if (w > root_ && !on_path_[w]) extend(w, depth + 1);
    on_path_[v] = 0;
  }

  const SparseGraph& g_;
  int k_;
  std::vector<char> on_path_;
  std::vector<char> adj_root_;
  Vertex root_ = 0;
  std::uint64_t count_ = 0;
};

}  // namespace detail

/// Exact number of simple cycles of length k, each counted once.
inline std::uint64_t count_cycles(const SparseGraph& g, int k, int k_max = kDefaultMaxCycleLength,
                                  unsigned threads = 1) {
  if (k < 3 || k > k_max)
    throw parameter_error("cycle length k=" + std::to_string(k) + " outside [3, " +
                          std::to_string(k_max) + "]");
  const std::size_t n = g.num_vertices();
  if (n == 0) return 0;
  threads = std::max(1u, threads);
  // Roots are split into `threads` interleaved stripes; each stripe sums with
  // its own walker and the stripe totals are added in index order.
  const std::size_t stripes = std::min<std::size_t>(threads, n);
  const auto partial = parallel_map<std::uint64_t>(stripes, threads, [&](std::size_t s) {
    detail::RootedCycleWalker walker(g, k);
    std::uint64_t total = 0;
    for (std::size_t root = s; root < n; root += stripes)
      total += walker.count_from(static_cast<Vertex>(root));
    return total;
  });
  return std::accumulate(partial.begin(), partial.end(), std::uint64_t{0}) / 2;
}

inline CycleCounts cycle_counts(const SparseGraph& g, int k, unsigned threads = 1) {
  return {k, count_cycles(g, k, kDefaultMaxCycleLength, threads), degree_estimate(g)};
}

/// Real k-th root preserving sign; valid for odd k.
inline double signed_root(double s, int k) noexcept {
  const double m = std::pow(std::abs(s), 1.0 / k);
  return s < 0.0 ? -m : m;
}

/// sign(s) |s|^{1/k} / d_hat with s = 2k C_k - d_hat^k. k must be odd.
inline double lambda_from_counts(double c_k, double d_hat, int k) {
  if (k % 2 == 0)
    throw parameter_error("lambda estimate needs odd k (use lambda_magnitude_from_counts for even k)");
  if (!(d_hat > 0.0)) throw degenerate_graph_error("lambda estimate: d_hat = 0");
  const double s = 2.0 * k * c_k - std::pow(d_hat, k);
  return signed_root(s, k) / d_hat;
}

/// Even-k variant: |s|^{1/k} / d_hat, an estimate of |lambda| only.
inline double lambda_magnitude_from_counts(double c_k, double d_hat, int k) {
  if (!(d_hat > 0.0)) throw degenerate_graph_error("lambda estimate: d_hat = 0");
  const double s = 2.0 * k * c_k - std::pow(d_hat, k);
  return std::pow(std::abs(s), 1.0 / k) / d_hat;
}

inline double lambda_estimate(const SparseGraph& g, int k, unsigned threads = 1) {
  const double d_hat = degree_estimate(g);
  if (!(d_hat > 0.0)) throw degenerate_graph_error("lambda estimate: graph has no edges");
  if (k % 2 == 0)
    throw parameter_error("lambda estimate needs odd k (use lambda_magnitude_from_counts for even k)");
  return lambda_from_counts(static_cast<double>(count_cycles(g, k, kDefaultMaxCycleLength, threads)),
                            d_hat, k);
}

/// Leading-order E[C_k] = d^k (1 + lambda^k) / (2k).
inline double expected_cycles(const SbmParams& params, int k) {
  if (k < 3) throw parameter_error("cycle length must be >= 3");
  return std::pow(params.d, k) * (1.0 + std::pow(params.lambda, k)) / (2.0 * k);
}

}  // namespace sbm_ising
