#pragma once

// Ising model IS(beta, G) on {0,1}^V with weight exp(-beta J(sigma; G)),
// where J counts monochromatic edges. For beta > 0 the model is
// antiferromagnetic: disagreeing endpoints are favoured.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "theory.hpp"

namespace sbm_ising {

using Spins = std::vector<std::uint8_t>;

inline constexpr std::size_t kMaxExactVertices = 26;

/// Number of monochromatic edges.
inline std::uint64_t energy(const SparseGraph& g, std::span<const std::uint8_t> sigma) {
  if (sigma.size() != g.num_vertices())
    throw parameter_error("spin vector has " + std::to_string(sigma.size()) + " entries, graph has " +
                          std::to_string(g.num_vertices()) + " vertices");
  std::uint64_t j = 0;
  for (const auto& [u, v] : g.edges()) j += sigma[u] == sigma[v];
  return j;
}

/// A spin configuration together with its cached energy and, when the graph
/// carries labels, the counts |sigma^{-1}(l) cap N_b|.
class SpinConfig {
 public:
  SpinConfig(const SparseGraph& g, Spins sigma) : sigma_(std::move(sigma)) {
    energy_ = sbm_ising::energy(g, sigma_);
    if (g.has_labels()) {
      const auto& lab = g.labels();
      counts_.emplace();
      for (std::size_t u = 0; u < sigma_.size(); ++u) ++(*counts_)[sigma_[u]][lab[u]];
    }
  }

  const Spins& sigma() const noexcept { return sigma_; }
  std::uint64_t energy() const noexcept { return energy_; }
  bool has_counts() const noexcept { return counts_.has_value(); }

  /// |sigma^{-1}(spin) cap N_community|.
  std::size_t count(int spin, int community) const {
    if (!counts_) throw parameter_error("spin counts need ground-truth labels");
    return (*counts_)[spin][community];
  }

  std::size_t spin_total(int spin) const noexcept {
    return static_cast<std::size_t>(std::count(sigma_.begin(), sigma_.end(), spin));
  }

 private:
  Spins sigma_;
  std::uint64_t energy_ = 0;
  std::optional<std::array<std::array<std::size_t, 2>, 2>> counts_;
};

namespace detail {

inline double log_sum_exp_levels(const std::vector<std::uint64_t>& hist, double beta) {
  double top = -kInf;
  for (std::size_t j = 0; j < hist.size(); ++j)
    if (hist[j]) top = std::max(top, std::log(static_cast<double>(hist[j])) - beta * static_cast<double>(j));
  double s = 0.0;
  for (std::size_t j = 0; j < hist.size(); ++j)
    if (hist[j])
      s += std::exp(std::log(static_cast<double>(hist[j])) - beta * static_cast<double>(j) - top);
  return top + std::log(s);
}

}  // namespace detail

/// Number of configurations at each energy level 0..m, by Gray-code
/// enumeration of all 2^n states.
inline std::vector<std::uint64_t> energy_histogram(const SparseGraph& g) {
  const std::size_t n = g.num_vertices();
  if (n > kMaxExactVertices)
    throw capacity_error("exact enumeration supports n <= " + std::to_string(kMaxExactVertices) +
                         " (n=" + std::to_string(n) + "); use thermodynamic integration");
  std::vector<std::uint64_t> hist(g.num_edges() + 1, 0);
  Spins sigma(n, 0);
  std::int64_t j = static_cast<std::int64_t>(g.num_edges());
  hist[static_cast<std::size_t>(j)] = 1;
  const std::uint64_t states = std::uint64_t{1} << n;
  for (std::uint64_t i = 1; i < states; ++i) {
    const auto u = static_cast<Vertex>(std::countr_zero(i));
    std::int64_t same = 0, other = 0;
    for (auto w : g.neighbors(u)) (sigma[w] == sigma[u] ? same : other)++;
    sigma[u] ^= 1;
    j += other - same;
    ++hist[static_cast<std::size_t>(j)];
  }
  return hist;
}

/// Z(beta, G) = ln sum_sigma exp(-beta J(sigma; G)), exact for n <= 26.
inline double exact_log_partition(const SparseGraph& g, double beta) {
  if (g.num_vertices() == 0) return 0.0;
  return detail::log_sum_exp_levels(energy_histogram(g), beta);
}

enum class ChainInit { uniform, ground_truth, all_zero };

/// Single-site heat-bath dynamics with sequential scan order. Each site is
/// resampled from its conditional law given its neighbours; one uniform draw
/// per site per sweep, so a run is a deterministic function of the seed.
class GibbsChain {
 public:
  GibbsChain(const SparseGraph& g, double beta, std::uint64_t seed,
             ChainInit init = ChainInit::uniform)
      : g_(&g), rng_(seed), sigma_(g.num_vertices(), 0) {
    switch (init) {
      case ChainInit::uniform:
        for (auto& s : sigma_) s = static_cast<std::uint8_t>(rng_.next() >> 63);
        break;
      case ChainInit::ground_truth:
        sigma_ = g.labels();
        break;
      case ChainInit::all_zero:
        break;
    }
    energy_ = sbm_ising::energy(g, sigma_);
    set_beta(beta);
  }

  GibbsChain(const SparseGraph& g, double beta, std::uint64_t seed, Spins initial)
      : g_(&g), rng_(seed), sigma_(std::move(initial)) {
    energy_ = sbm_ising::energy(g, sigma_);
    set_beta(beta);
  }

  void set_beta(double beta) {
    if (!(beta >= 0.0)) throw parameter_error("beta must be >= 0");
    beta_ = beta;
    const auto dmax = static_cast<std::int64_t>(g_->max_degree());
    p_zero_.resize(static_cast<std::size_t>(2 * dmax + 1));
    // P(sigma_u = 0) = 1 / (1 + exp(-beta (c1 - c0))), c_l = neighbours with spin l
    for (std::int64_t diff = -dmax; diff <= dmax; ++diff)
      p_zero_[static_cast<std::size_t>(diff + dmax)] = 1.0 / (1.0 + std::exp(-beta * static_cast<double>(diff)));
    offset_ = dmax;
  }

  void sweep() {
    const std::size_t n = sigma_.size();
    for (std::size_t u = 0; u < n; ++u) {
      const auto nb = g_->neighbors(static_cast<Vertex>(u));
      std::int64_t c1 = 0;
      for (auto w : nb) c1 += sigma_[w];
      const std::int64_t c0 = static_cast<std::int64_t>(nb.size()) - c1;
      const std::uint8_t next = rng_.uniform() < p_zero_[static_cast<std::size_t>(c1 - c0 + offset_)] ? 0 : 1;
      if (next != sigma_[u]) {
        energy_ = static_cast<std::uint64_t>(static_cast<std::int64_t>(energy_) +
                                             (next == 0 ? c0 - c1 : c1 - c0));
        sigma_[u] = next;
      }
    }
  }

  void run(std::size_t sweeps) {
    for (std::size_t s = 0; s < sweeps; ++s) sweep();
  }

  double beta() const noexcept { return beta_; }
  std::uint64_t energy() const noexcept { return energy_; }
  const Spins& sigma() const noexcept { return sigma_; }

 private:
  const SparseGraph* g_;
  Rng rng_;
  Spins sigma_;
  std::uint64_t energy_ = 0;
  double beta_ = 0.0;
  std::vector<double> p_zero_;
  std::int64_t offset_ = 0;
};

inline SpinConfig gibbs_sample(const SparseGraph& g, double beta, std::size_t sweeps, std::uint64_t seed,
                               ChainInit init = ChainInit::uniform) {
  if (sweeps < 1) throw parameter_error("gibbs_sample needs at least one sweep");
  GibbsChain chain(g, beta, seed, init);
  chain.run(sweeps);
  return SpinConfig(g, chain.sigma());
}

// --- Free energy -------------------------------------------------------------

enum class FreeEnergyMethod { exact, thermo_integration };

inline const char* to_string(FreeEnergyMethod m) noexcept {
  return m == FreeEnergyMethod::exact ? "exact" : "ti";
}

struct TiConfig {
  std::size_t grid_points = 32;
  std::size_t sweeps_per_point = 200;
  std::size_t burn_in = 100;
  std::size_t chains = 8;
  std::size_t batches = 10;
  unsigned threads = 1;
};

/// Estimate of the free-energy density (1/n) Z(beta, G).
struct FreeEnergyEstimate {
  double value = 0.0;
  double std_err = 0.0;
  double statistical_err = 0.0;
  double discretization_err = 0.0;
  FreeEnergyMethod method = FreeEnergyMethod::exact;
  double beta = 0.0;
  std::size_t sweeps = 0;
  std::size_t integration_points = 0;
  std::size_t chains = 0;
  bool low_confidence = false;
  /// (t, estimate of (1/n) Z(t, G)) along the integration grid.
  std::vector<std::pair<double, double>> profile;
};

inline FreeEnergyEstimate exact_free_energy(const SparseGraph& g, double beta) {
  FreeEnergyEstimate e;
  e.method = FreeEnergyMethod::exact;
  e.beta = beta;
  e.value = exact_log_partition(g, beta) / static_cast<double>(g.num_vertices());
  return e;
}

namespace detail {

struct ChainTrace {
  std::vector<double> mean;      // per grid point, index 0 unused
  std::vector<double> var_mean;  // batch-means variance of the mean
};

inline ChainTrace run_ti_chain(const SparseGraph& g, const std::vector<double>& grid, const TiConfig& cfg,
                               std::uint64_t seed) {
  ChainTrace tr;
  tr.mean.assign(grid.size(), 0.0);
  tr.var_mean.assign(grid.size(), 0.0);
  GibbsChain chain(g, grid[1], seed);
  chain.run(cfg.burn_in);
  const std::size_t per_batch = std::max<std::size_t>(1, cfg.sweeps_per_point / cfg.batches);
  const std::size_t nb = cfg.sweeps_per_point / per_batch;
  std::vector<double> batch(nb);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    chain.set_beta(grid[i]);
    for (std::size_t b = 0; b < nb; ++b) {
      double s = 0.0;
      for (std::size_t k = 0; k < per_batch; ++k) {
        chain.sweep();
        s += static_cast<double>(chain.energy());
      }
      batch[b] = s / static_cast<double>(per_batch);
    }
    double m = 0.0;
    for (double x : batch) m += x;
    m /= static_cast<double>(nb);
    double v = 0.0;
    for (double x : batch) v += (x - m) * (x - m);
    tr.mean[i] = m;
    tr.var_mean[i] = nb > 1 ? v / static_cast<double>(nb - 1) / static_cast<double>(nb) : 0.0;
  }
  return tr;
}

}  // namespace detail

/// Thermodynamic integration:
///   (1/n) Z(beta) = ln 2 - (1/n) int_0^beta E_{IS(t,G)}[J] dt,
/// with E[J] estimated by warm-started Gibbs chains on a uniform t-grid and
/// the integral taken by the trapezoid rule. At t = 0 the integrand is m/2
/// exactly.
inline FreeEnergyEstimate free_energy_ti(const SparseGraph& g, double beta, const TiConfig& cfg,
                                         std::uint64_t seed) {
  if (!(beta >= 0.0)) throw parameter_error("beta must be >= 0");
  if (g.num_vertices() == 0) throw parameter_error("free energy of an empty vertex set");
  if (cfg.grid_points < 2) throw parameter_error("TI grid needs at least 2 points");
  if (cfg.chains < 1 || cfg.sweeps_per_point < 1) throw parameter_error("TI needs chains and sweeps");

  FreeEnergyEstimate est;
  est.method = FreeEnergyMethod::thermo_integration;
  est.beta = beta;
  est.sweeps = cfg.sweeps_per_point;
  est.integration_points = cfg.grid_points;
  est.chains = cfg.chains;
  const double n = static_cast<double>(g.num_vertices());
  const double m = static_cast<double>(g.num_edges());
  if (beta == 0.0) {
    est.value = kLn2;
    est.profile = {{0.0, kLn2}};
    return est;
  }

  const std::size_t gp = cfg.grid_points;
  const double h = beta / static_cast<double>(gp - 1);
  std::vector<double> grid(gp);
  for (std::size_t i = 0; i < gp; ++i) grid[i] = h * static_cast<double>(i);

  const auto traces = parallel_map<detail::ChainTrace>(
      cfg.chains, cfg.threads, [&](std::size_t c) { return detail::run_ti_chain(g, grid, cfg, derive_seed(seed, c)); });

  const double chains = static_cast<double>(cfg.chains);
  std::vector<double> f(gp, 0.0), var(gp, 0.0);
  f[0] = m / 2.0;
  for (std::size_t i = 1; i < gp; ++i) {
    for (const auto& tr : traces) {
      f[i] += tr.mean[i];
      var[i] += tr.var_mean[i];
    }
    f[i] /= chains;
    var[i] /= chains * chains;
    if (cfg.chains > 1)
      for (const auto& tr : traces) {
        const double sd = std::sqrt(tr.var_mean[i] + var[i]);
        if (std::abs(tr.mean[i] - f[i]) > 5.0 * sd + 1e-12) est.low_confidence = true;
      }
  }

  double integral = 0.0, stat_var = 0.0;
  est.profile.reserve(gp);
  est.profile.emplace_back(0.0, kLn2);
  for (std::size_t i = 1; i < gp; ++i) {
    integral += 0.5 * h * (f[i - 1] + f[i]);
    est.profile.emplace_back(grid[i], kLn2 - integral / n);
  }
  for (std::size_t i = 0; i < gp; ++i) {
    const double w = (i == 0 || i + 1 == gp) ? 0.5 * h : h;
    stat_var += w * w * var[i];
  }
  // Composite trapezoid error ~ (h^2 / 12) (f'(beta) - f'(0)).
  const double slope_lo = (f[1] - f[0]) / h;
  const double slope_hi = (f[gp - 1] - f[gp - 2]) / h;
  est.discretization_err = h * h / 12.0 * std::abs(slope_hi - slope_lo) / n;
  est.statistical_err = std::sqrt(stat_var) / n;
  est.value = kLn2 - integral / n;
  est.std_err = std::hypot(est.statistical_err, est.discretization_err);
  return est;
}

// --- Order parameters --------------------------------------------------------

struct OrderParameters {
  double x = 0.0;
  double y = 0.0;
  int l_bar = 1;
};

/// l_bar = argmax_l |sigma^{-1}(l) cap N_1| / |N_1| (ties -> 1);
/// x, y = fractions of N_0, N_1 carrying spin l_bar.
inline OrderParameters order_parameters(const SparseGraph& g, std::span<const std::uint8_t> sigma) {
  const auto& lab = g.labels();
  if (sigma.size() != lab.size()) throw parameter_error("spin vector size differs from n");
  std::size_t count[2][2] = {{0, 0}, {0, 0}};  // [spin][community]
  for (std::size_t u = 0; u < sigma.size(); ++u) ++count[sigma[u]][lab[u]];
  const std::size_t size0 = count[0][0] + count[1][0];
  const std::size_t size1 = count[0][1] + count[1][1];
  if (size0 == 0 || size1 == 0) throw parameter_error("order parameters need both communities nonempty");
  OrderParameters op;
  op.l_bar = count[0][1] > count[1][1] ? 0 : 1;
  op.x = static_cast<double>(count[op.l_bar][0]) / static_cast<double>(size0);
  op.y = static_cast<double>(count[op.l_bar][1]) / static_cast<double>(size1);
  return op;
}

}  // namespace sbm_ising
