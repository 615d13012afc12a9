#pragma once

// Brute-force references. Nothing here calls into the production counting,
// partition-function or closed-form code; only the SparseGraph container is
// shared.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"

namespace sbm_ising::oracle {

struct OracleConfig {
  std::size_t max_n_cycles = 12;
  std::size_t max_n_partition = 20;
  std::size_t grid_resolution = 2001;
  double max_cycle_work = 5e8;  // bound on n * maxdeg^(k-1) for larger sparse graphs
};

/// Closed simple walks of length k over every start vertex and both
/// orientations, divided by 2k.
inline std::uint64_t brute_cycles(const SparseGraph& g, int k, const OracleConfig& cfg = {}) {
  if (k < 3) throw parameter_error("brute_cycles: k must be >= 3");
  const std::size_t n = g.num_vertices();
  if (n > cfg.max_n_cycles) {
    const double work = static_cast<double>(n) *
                        std::pow(static_cast<double>(std::max<std::size_t>(g.max_degree(), 1)), k - 1);
    if (work > cfg.max_cycle_work) throw capacity_error("brute_cycles: graph too large for enumeration");
  }
  std::vector<Vertex> path;
  std::vector<bool> used(n, false);
  std::uint64_t walks = 0;
  std::function<void(Vertex)> dfs = [&](Vertex v) {
    if (static_cast<int>(path.size()) == k) {
      for (auto w : g.neighbors(v))
        if (w == path.front()) ++walks;
      return;
    }
    for (auto w : g.neighbors(v)) {
      if (used[w]) continue;
      used[w] = true;
      path.push_back(w);
      dfs(w);
      path.pop_back();
      used[w] = false;
    }
  };
  for (std::size_t s = 0; s < n; ++s) {
    used[s] = true;
    path.assign(1, static_cast<Vertex>(s));
    dfs(static_cast<Vertex>(s));
    used[s] = false;
  }
  return walks / (2 * static_cast<std::uint64_t>(k));
}

inline std::uint64_t state_energy(const SparseGraph& g, std::uint64_t state) {
  std::uint64_t j = 0;
  for (const auto& [u, v] : g.edges()) j += ((state >> u) & 1u) == ((state >> v) & 1u);
  return j;
}

/// ln sum over all 2^n states of exp(-beta J), summed directly in state order.
inline double brute_log_partition(const SparseGraph& g, double beta, const OracleConfig& cfg = {}) {
  const std::size_t n = g.num_vertices();
  if (n > cfg.max_n_partition) throw capacity_error("brute_log_partition: n exceeds oracle cap");
  const std::uint64_t states = std::uint64_t{1} << n;
  std::uint64_t j_min = g.num_edges();
  for (std::uint64_t s = 0; s < states; ++s) j_min = std::min(j_min, state_energy(g, s));
  long double sum = 0.0L;
  for (std::uint64_t s = 0; s < states; ++s)
    sum += std::exp(-static_cast<long double>(beta) *
                    static_cast<long double>(state_energy(g, s) - j_min));
  return static_cast<double>(std::log(sum) - static_cast<long double>(beta) * j_min);
}

/// Boltzmann probabilities of every state (bit u of the index is sigma(u)).
inline std::vector<double> brute_boltzmann(const SparseGraph& g, double beta, const OracleConfig& cfg = {}) {
  const std::size_t n = g.num_vertices();
  if (n > cfg.max_n_partition) throw capacity_error("brute_boltzmann: n exceeds oracle cap");
  const std::uint64_t states = std::uint64_t{1} << n;
  std::vector<double> p(states);
  double z = 0.0;
  for (std::uint64_t s = 0; s < states; ++s) z += p[s] = std::exp(-beta * static_cast<double>(state_energy(g, s)));
  for (auto& v : p) v /= z;
  return p;
}

struct GridMin {
  double value = 0.0;
  double x = 0.0;
  double y = 0.0;
};

inline double objective(double r, double lambda, double x, double y) {
  return r * lambda * (x - y) * (x - y) + (x + r * y - (1.0 + r) / 2.0) * (x + r * y - (1.0 + r) / 2.0) +
         (1.0 + r) * (1.0 + r) / 4.0;
}

/// Best point of a res x res grid on [0,1]^2; ties keep the first point in
/// (x, y) lexicographic order.
inline GridMin grid_scan_objective(double r, double lambda, const OracleConfig& cfg = {}) {
  if (!(lambda < 0.0)) throw unsupported_regime_error("grid_min_objective: lambda must be < 0");
  if (!(r >= 1.0)) throw parameter_error("grid_min_objective: r must be >= 1");
  const std::size_t res = cfg.grid_resolution;
  if (res < 2) throw parameter_error("grid_min_objective: resolution must be >= 2");
  GridMin best{objective(r, lambda, 0.0, 0.0), 0.0, 0.0};
  for (std::size_t i = 0; i < res; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(res - 1);
    for (std::size_t j = 0; j < res; ++j) {
      const double y = static_cast<double>(j) / static_cast<double>(res - 1);
      const double v = objective(r, lambda, x, y);
      if (v < best.value) best = {v, x, y};
    }
  }
  return best;
}

/// Minimum of the C(r, lambda) objective on [0,1]^2: full grid scan, then a
/// Nelder-Mead polish from the best grid point with coordinates clamped to
/// the box.
inline GridMin grid_min_objective(double r, double lambda, const OracleConfig& cfg = {}) {
  GridMin best = grid_scan_objective(r, lambda, cfg);
  const std::size_t res = cfg.grid_resolution;

  auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
  auto f = [&](const std::array<double, 2>& p) { return objective(r, lambda, clamp01(p[0]), clamp01(p[1])); };
  const double step = 2.0 / static_cast<double>(res - 1);
  std::array<std::array<double, 2>, 3> simplex{{{best.x, best.y}, {best.x + step, best.y}, {best.x, best.y + step}}};
  std::array<double, 3> fv{f(simplex[0]), f(simplex[1]), f(simplex[2])};
  for (int it = 0; it < 500; ++it) {
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const auto lo = idx[0], mid = idx[1], hi = idx[2];
    if (std::abs(fv[hi] - fv[lo]) < 1e-15) break;
    const std::array<double, 2> c{(simplex[lo][0] + simplex[mid][0]) / 2, (simplex[lo][1] + simplex[mid][1]) / 2};
    auto along = [&](double t) {
      return std::array<double, 2>{c[0] + t * (simplex[hi][0] - c[0]), c[1] + t * (simplex[hi][1] - c[1])};
    };
    const auto xr = along(-1.0);
    const double fr = f(xr);
    if (fr < fv[lo]) {
      const auto xe = along(-2.0);
      const double fe = f(xe);
      if (fe < fr) { simplex[hi] = xe; fv[hi] = fe; }
      else { simplex[hi] = xr; fv[hi] = fr; }
    } else if (fr < fv[mid]) {
      simplex[hi] = xr;
      fv[hi] = fr;
    } else {
      const auto xc = along(0.5);
      const double fc = f(xc);
      if (fc < fv[hi]) {
        simplex[hi] = xc;
        fv[hi] = fc;
      } else {
        for (int v : {mid, hi}) {
          simplex[v] = {(simplex[v][0] + simplex[lo][0]) / 2, (simplex[v][1] + simplex[lo][1]) / 2};
          fv[v] = f(simplex[v]);
        }
      }
    }
  }
  for (int v = 0; v < 3; ++v)
    if (fv[v] < best.value) best = {fv[v], clamp01(simplex[v][0]), clamp01(simplex[v][1])};
  return best;
}

}  // namespace sbm_ising::oracle
