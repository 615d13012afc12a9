#pragma once

// SBM(d, lambda, r, n) sampling and the coupled interpolation graphs used to
// compare free energies at community ratios r and r + delta.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "rng.hpp"
#include "theory.hpp"

namespace sbm_ising {

namespace detail {

inline std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) noexcept {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max()
                                                          : a + b;
}

/// Appends each unordered pair of `nodes` independently with probability p,
/// by geometric skipping over the linearized pair index.
inline void sample_pairs_within(const std::vector<Vertex>& nodes, double p, Rng& rng,
                                std::vector<Edge>& out) {
  const std::uint64_t s = nodes.size();
  if (s < 2 || p <= 0.0) return;
  const std::uint64_t total = s * (s - 1) / 2;
  std::uint64_t k = rng.geometric(p);
  std::uint64_t row = 0, row_start = 0;
  while (k < total) {
    while (k >= row_start + (s - 1 - row)) {
      row_start += s - 1 - row;
      ++row;
    }
    const std::uint64_t col = row + 1 + (k - row_start);
    out.emplace_back(nodes[row], nodes[col]);
    k = saturating_add(k, saturating_add(rng.geometric(p), 1));
  }
}

/// Appends each pair (a, b) in A x B independently with probability p.
inline void sample_pairs_between(const std::vector<Vertex>& a, const std::vector<Vertex>& b, double p,
                                 Rng& rng, std::vector<Edge>& out) {
  const std::uint64_t sa = a.size(), sb = b.size();
  if (sa == 0 || sb == 0 || p <= 0.0) return;
  const std::uint64_t total = sa * sb;
  std::uint64_t k = rng.geometric(p);
  while (k < total) {
    out.emplace_back(a[k / sb], b[k % sb]);
    k = saturating_add(k, saturating_add(rng.geometric(p), 1));
  }
}

inline std::vector<Vertex> iota_range(std::size_t begin, std::size_t end) {
  std::vector<Vertex> v(end - begin);
  for (std::size_t i = begin; i < end; ++i) v[i - begin] = static_cast<Vertex>(i);
  return v;
}

inline void require_probabilities(const SbmParams& params) {
  for (int a = 0; a < 2; ++a)
    for (int b = a; b < 2; ++b)
      if (params.q(a, b) > 1.0) {
        std::ostringstream os;
        os << "connection probability alpha_" << a << b << "/n = " << params.q(a, b)
           << " exceeds 1 (n too small for d)";
        throw parameter_error(os.str());
      }
}

}  // namespace detail

/// Samples G ~ SBM(d, lambda, r, n). Labels are i.i.d. with P(0) = 1/(1+r);
/// each pair is an edge independently with probability alpha_ab / n.
inline SparseGraph sample_sbm(const SbmParams& params, std::uint64_t seed) {
  params.validate();
  detail::require_probabilities(params);
  const std::size_t n = params.n;

  Rng label_rng(derive_seed(seed, 0));
  Labels labels(n);
  const double p0 = params.pi0();
  std::vector<Vertex> community[2];
  for (std::size_t u = 0; u < n; ++u) {
    labels[u] = label_rng.uniform() < p0 ? 0 : 1;
    community[labels[u]].push_back(static_cast<Vertex>(u));
  }

  Rng edge_rng(derive_seed(seed, 1));
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(params.d * static_cast<double>(n) / 2.0 * 1.1) + 16);
  detail::sample_pairs_within(community[0], params.q(0, 0), edge_rng, edges);
  detail::sample_pairs_between(community[0], community[1], params.q(0, 1), edge_rng, edges);
  detail::sample_pairs_within(community[1], params.q(1, 1), edge_rng, edges);
  return SparseGraph(n, std::move(edges), std::move(labels));
}

/// Erdos-Renyi G(n, p) with no labels.
inline SparseGraph sample_erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw parameter_error("edge probability must lie in [0, 1]");
  Rng rng(derive_seed(seed, 1));
  std::vector<Edge> edges;
  detail::sample_pairs_within(detail::iota_range(0, n), p, rng, edges);
  return SparseGraph(n, std::move(edges));
}

// --- Interpolation construction ---------------------------------------------

struct InterpolationSizes {
  std::size_t n0 = 0;        // |N_0|
  std::size_t n1 = 0;        // |N_1|
  std::size_t n_delta = 0;   // |N_Delta|, the added nodes
  std::size_t rewire = 0;    // [d |lambda| delta n / (2 (1+r)^2)]
};

/// Floor-rounded sizes of the construction; the remainder of the community
/// split goes to N_1.
inline InterpolationSizes interpolation_sizes(const SbmParams& params, double delta) {
  const double n = static_cast<double>(params.n);
  const double s = 1.0 + params.r;
  InterpolationSizes z;
  const auto base0 = static_cast<std::size_t>(std::floor(n / s));
  z.n_delta = static_cast<std::size_t>(std::floor(delta * n / (s * s)));
  z.rewire = static_cast<std::size_t>(
      std::floor(params.d * std::abs(params.lambda) * delta * n / (2.0 * s * s)));
  z.n0 = base0 >= z.n_delta ? base0 - z.n_delta : 0;
  z.n1 = params.n - base0;
  return z;
}

/// The graphs G~, G'_0 and G'_1. Vertices are numbered N_0 = [0, n0),
/// N_1 = [n0, n0 + n1), N_Delta = [n - n_delta, n). In g0_prime the added
/// nodes are labelled 0, in g1_prime they are labelled 1.
struct InterpolationBundle {
  SparseGraph g_tilde;
  SparseGraph g0_prime;
  SparseGraph g1_prime;
  SparseGraph g1_unrewired;  // G_{1,[delta n/(1+r)^2]}, before deletions/additions
  double delta = 0.0;
  InterpolationSizes sizes;
  std::size_t rewire_count = 0;
};

inline InterpolationBundle sample_interpolation(const SbmParams& params, double delta,
                                                std::uint64_t seed) {
  params.validate();
  if (!(params.lambda < 0.0))
    throw unsupported_regime_error("interpolation construction requires lambda < 0");
  if (!(delta > 0.0)) throw parameter_error("delta must be positive");
  detail::require_probabilities(params);

  const auto sz = interpolation_sizes(params, delta);
  if (sz.n_delta < 1) {
    std::ostringstream os;
    os << "delta=" << delta << " gives floor(delta n/(1+r)^2) = 0 added nodes at n=" << params.n;
    throw construction_error(os.str());
  }
  if (sz.n0 < 1) throw construction_error("N_0 is empty; delta too large for n");

  const std::size_t n = params.n;
  const std::size_t old_n = sz.n0 + sz.n1;
  const double nd = static_cast<double>(n);
  const double d = params.d, lambda = params.lambda, r = params.r;
  const double p00 = d * (1.0 + r * lambda) / nd;
  const double p01 = d * (1.0 - lambda) / nd;
  const double p11 = d * (1.0 + lambda / r) / nd;

  const auto nodes0 = detail::iota_range(0, sz.n0);
  const auto nodes1 = detail::iota_range(sz.n0, old_n);

  std::vector<Edge> tilde;
  {
    Rng rng(derive_seed(seed, 10));
    detail::sample_pairs_within(nodes0, p00, rng, tilde);
    detail::sample_pairs_between(nodes0, nodes1, p01, rng, tilde);
    detail::sample_pairs_within(nodes1, p11, rng, tilde);
  }

  auto attach = [&](std::uint64_t stream, double to0, double to1) {
    std::vector<Edge> edges = tilde;
    Rng rng(derive_seed(seed, stream));
    for (std::size_t k = old_n; k < n; ++k) {
      const std::vector<Vertex> newcomer{static_cast<Vertex>(k)};
      detail::sample_pairs_between(nodes0, newcomer, to0, rng, edges);
      detail::sample_pairs_between(nodes1, newcomer, to1, rng, edges);
    }
    return edges;
  };

  Labels tilde_labels(old_n, 1);
  std::fill(tilde_labels.begin(), tilde_labels.begin() + static_cast<std::ptrdiff_t>(sz.n0), 0);
  Labels labels0 = tilde_labels, labels1 = tilde_labels;
  labels0.resize(n, 0);
  labels1.resize(n, 1);

  auto edges0 = attach(11, p00, p01);
  auto edges1 = attach(12, p01, p11);

  InterpolationBundle out;
  out.delta = delta;
  out.sizes = sz;
  out.rewire_count = sz.rewire;
  out.g_tilde = SparseGraph(old_n, std::move(tilde), tilde_labels);
  out.g0_prime = SparseGraph(n, std::move(edges0), labels0);
  out.g1_unrewired = SparseGraph(n, edges1, labels1);

  // Rewire: delete `rewire` uniformly chosen N0-N0 edges one at a time, then
  // add `rewire` uniformly chosen absent N1-N1 pairs among the original N1.
  const auto is_n0 = [&](Vertex v) { return v < sz.n0; };
  const auto is_old_n1 = [&](Vertex v) { return v >= sz.n0 && v < old_n; };
  std::vector<std::size_t> n0n0;
  for (std::size_t i = 0; i < edges1.size(); ++i)
    if (is_n0(edges1[i].first) && is_n0(edges1[i].second)) n0n0.push_back(i);
  if (n0n0.size() < sz.rewire) {
    std::ostringstream os;
    os << "rewire shortfall: need " << sz.rewire << " N0-N0 edges to delete, only " << n0n0.size()
       << " available (short by " << sz.rewire - n0n0.size() << ")";
    throw construction_error(os.str());
  }
  const std::uint64_t n1_pairs = static_cast<std::uint64_t>(sz.n1) * (sz.n1 - 1) / 2;
  std::unordered_set<std::uint64_t> n1_present;
  const auto key = [](Vertex u, Vertex v) { return (static_cast<std::uint64_t>(u) << 32) | v; };
  for (const auto& e : edges1)
    if (is_old_n1(e.first) && is_old_n1(e.second)) n1_present.insert(key(e.first, e.second));
  if (n1_pairs - n1_present.size() < sz.rewire) {
    std::ostringstream os;
    os << "rewire shortfall: need " << sz.rewire << " absent N1-N1 pairs, only "
       << n1_pairs - n1_present.size() << " available";
    throw construction_error(os.str());
  }

  Rng rng(derive_seed(seed, 13));
  std::vector<char> removed(edges1.size(), 0);
  for (std::size_t j = 0; j < sz.rewire; ++j) {
    const std::size_t pick = j + static_cast<std::size_t>(rng.below(n0n0.size() - j));
    std::swap(n0n0[j], n0n0[pick]);
    removed[n0n0[j]] = 1;
  }
  std::vector<Edge> rewired;
  rewired.reserve(edges1.size());
  for (std::size_t i = 0; i < edges1.size(); ++i)
    if (!removed[i]) rewired.push_back(edges1[i]);
  for (std::size_t j = 0; j < sz.rewire;) {
    auto u = static_cast<Vertex>(sz.n0 + rng.below(sz.n1));
    auto v = static_cast<Vertex>(sz.n0 + rng.below(sz.n1));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (!n1_present.insert(key(u, v)).second) continue;
    rewired.emplace_back(u, v);
    ++j;
  }
  out.g1_prime = SparseGraph(n, std::move(rewired), std::move(labels1));
  return out;
}

}  // namespace sbm_ising
