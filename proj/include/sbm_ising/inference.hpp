#pragma once

// Estimating r by inverting a Monte-Carlo free-energy curve, and clustering
// by a single Ising sample at beta = 1/sqrt(d_hat).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cycles.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "ising.hpp"
#include "isotonic.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "sbm.hpp"
#include "theory.hpp"

namespace sbm_ising {

struct CurvePoint {
  double r = 1.0;
  double free_energy = 0.0;  // mean of (1/n) Z(beta, G) over sampled graphs
  double std_err = 0.0;
  std::size_t n_graphs = 0;
  bool unreliable = false;   // std_err exceeds half the gap to a neighbour
};

struct FreeEnergyCurve {
  double d = 0.0;
  double lambda = 0.0;
  double beta = 0.0;
  std::size_t n = 0;
  std::vector<CurvePoint> points;

  /// r strictly increasing, r >= 1, 1 + r lambda >= 0.
  void validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!(points[i].r >= 1.0)) throw parameter_error("curve r values must be >= 1");
      if (1.0 + points[i].r * lambda < 0.0)
        throw parameter_error("curve point r=" + std::to_string(points[i].r) + " violates 1 + r*lambda >= 0");
      if (i > 0 && !(points[i].r > points[i - 1].r))
        throw parameter_error("curve r values must be strictly increasing");
    }
  }
};

namespace detail {
inline void flag_unreliable(std::vector<CurvePoint>& pts) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double gap = kInf;
    if (i > 0) gap = std::min(gap, std::abs(pts[i].free_energy - pts[i - 1].free_energy));
    if (i + 1 < pts.size()) gap = std::min(gap, std::abs(pts[i + 1].free_energy - pts[i].free_energy));
    pts[i].unreliable = pts.size() > 1 && pts[i].std_err > 0.5 * gap;
  }
}
}  // namespace detail

/// For each r in the grid, averages free_energy_ti over `graphs_per_point`
/// independent SBM(d, lambda, r, n) graphs. TI runs single-threaded inside;
/// the (point, replicate) work items are spread over `threads` workers.
inline FreeEnergyCurve build_curve(double d, double lambda, double beta, std::size_t n,
                                   const std::vector<double>& r_grid, std::size_t graphs_per_point,
                                   TiConfig ti, std::uint64_t seed, unsigned threads = 1) {
  if (!(lambda < 0.0)) throw unsupported_regime_error("build_curve requires lambda < 0");
  if (r_grid.empty()) throw parameter_error("empty r grid");
  if (graphs_per_point < 1) throw parameter_error("graphs_per_point must be >= 1");
  FreeEnergyCurve curve{d, lambda, beta, n, {}};
  for (double r : r_grid) curve.points.push_back({r, 0.0, 0.0, graphs_per_point, false});
  curve.validate();
  for (double r : r_grid) SbmParams::make(d, lambda, r, n);

  ti.threads = 1;
  const std::size_t total = r_grid.size() * graphs_per_point;
  const auto estimates = parallel_map<FreeEnergyEstimate>(total, threads, [&](std::size_t item) {
    const std::size_t i = item / graphs_per_point, j = item % graphs_per_point;
    const std::uint64_t task = derive_seed(seed, i, j);
    const auto g = sample_sbm(SbmParams::make(d, lambda, r_grid[i], n), derive_seed(task, 0));
    return free_energy_ti(g, beta, ti, derive_seed(task, 1));
  });

  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < graphs_per_point; ++j) mean += estimates[i * graphs_per_point + j].value;
    mean /= static_cast<double>(graphs_per_point);
    double se;
    if (graphs_per_point > 1) {
      double ss = 0.0;
      for (std::size_t j = 0; j < graphs_per_point; ++j) {
        const double dv = estimates[i * graphs_per_point + j].value - mean;
        ss += dv * dv;
      }
      se = std::sqrt(ss / static_cast<double>(graphs_per_point - 1) / static_cast<double>(graphs_per_point));
    } else {
      se = estimates[i * graphs_per_point].std_err;
    }
    curve.points[i].free_energy = mean;
    curve.points[i].std_err = se;
  }
  detail::flag_unreliable(curve.points);
  return curve;
}

// --- Curve file (CSV) --------------------------------------------------------

inline void write_curve_csv(const FreeEnergyCurve& c, std::ostream& os,
                            const std::vector<std::string>& header_comments = {}) {
  for (const auto& h : header_comments) os << "# " << h << '\n';
  os.precision(17);
  os << "# d=" << c.d << " lambda=" << c.lambda << " beta=" << c.beta << " n=" << c.n << '\n';
  os << "r,free_energy,std_err,n_graphs\n";
  for (const auto& p : c.points) os << p.r << ',' << p.free_energy << ',' << p.std_err << ',' << p.n_graphs << '\n';
}

inline FreeEnergyCurve read_curve_csv(std::istream& is) {
  FreeEnergyCurve c;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string tok;
      while (ss >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        try {
          if (key == "d") c.d = std::stod(val);
          else if (key == "lambda") c.lambda = std::stod(val);
          else if (key == "beta") c.beta = std::stod(val);
          else if (key == "n") c.n = std::stoul(val);
        } catch (const std::exception&) {
        }
      }
      continue;
    }
    if (!header) {
      if (line != "r,free_energy,std_err,n_graphs")
        throw parse_error("expected header r,free_energy,std_err,n_graphs", line_no);
      header = true;
      continue;
    }
    std::istringstream ss(line);
    std::string field[4];
    for (int k = 0; k < 4; ++k)
      if (!std::getline(ss, field[k], ',')) throw parse_error("curve row needs 4 columns", line_no);
    CurvePoint p;
    try {
      std::size_t used = 0;
      p.r = std::stod(field[0], &used);
      p.free_energy = std::stod(field[1]);
      p.std_err = std::stod(field[2]);
      p.n_graphs = std::stoul(field[3]);
    } catch (const std::exception&) {
      throw parse_error("malformed number in curve row", line_no);
    }
    c.points.push_back(p);
  }
  if (!header) throw parse_error("missing curve header", line_no);
  detail::flag_unreliable(c.points);
  return c;
}

// --- Inversion ---------------------------------------------------------------

struct REstimate {
  double r_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double slope = 0.0;          // local slope of the fitted interpolant
  double graph_sd = 0.0;       // between-graph SD of (1/n)Z pooled from the curve
  std::vector<double> fitted;  // isotonic fit at the curve's r values
  std::vector<std::string> warnings;
};

struct InversionOptions {
  double z = 1.959963984540054;  // two-sided 95%
  std::size_t bootstrap = 0;     // > 0 replaces the delta-method CI
  std::uint64_t bootstrap_seed = 0;
  // Add the curve's between-graph spread to the observed uncertainty. The
  // observed graph is one draw, so its (1/n)Z scatters around the curve by
  // that much on top of its own TI error.
  bool graph_variance = true;
};

namespace detail {

struct Crossing {
  double r_hat, slope, curve_se;
};

// Piecewise-linear nonincreasing interpolant through (r_i, f_i). Returns the
// midpoint of {r : F(r) = value}.
inline Crossing invert_interpolant(const std::vector<double>& r, const std::vector<double>& f,
                                   const std::vector<double>& se, double value) {
  const std::size_t k = r.size();
  if (value > f.front())
    throw extrapolation_error("observed free energy above the curve's range; nearest endpoint r=" +
                                  std::to_string(r.front()),
                              r.front());
  if (value < f.back())
    throw extrapolation_error("observed free energy below the curve's range; nearest endpoint r=" +
                                  std::to_string(r.back()),
                              r.back());
  auto cross = [&](std::size_t i) {  // f[i] >= value >= f[i+1], f[i] > f[i+1]
    return r[i] + (f[i] - value) / (f[i] - f[i + 1]) * (r[i + 1] - r[i]);
  };
  std::size_t first = 0;
  while (first < k && f[first] > value) ++first;
  const double r_lo = first == 0 ? r[0] : cross(first - 1);
  std::size_t last = k - 1;
  while (last > 0 && f[last] < value) --last;
  const double r_hi = last == k - 1 ? r[k - 1] : cross(last);
  const double r_hat = 0.5 * (r_lo + r_hi);

  std::size_t seg = 0;
  while (seg + 2 < k && r[seg + 1] < r_hat) ++seg;
  const double t = (r_hat - r[seg]) / (r[seg + 1] - r[seg]);
  return {r_hat, (f[seg + 1] - f[seg]) / (r[seg + 1] - r[seg]), (1.0 - t) * se[seg] + t * se[seg + 1]};
}

inline double normal(Rng& rng) {
  const double u1 = rng.uniform_open0(), u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace detail

/// Fits a nonincreasing interpolant (weighted isotonic regression, then
/// piecewise linear) to the curve and returns the r where it equals the
/// observed free energy. The CI is delta-method on the local slope unless
/// bootstrap replicates are requested.
inline REstimate estimate_r(const FreeEnergyCurve& curve, double observed, double observed_se,
                            const InversionOptions& opt = {}) {
  const auto& pts = curve.points;
  if (pts.size() < 3) throw parameter_error("estimate_r needs a curve with at least 3 points");
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (!(pts[i].r > pts[i - 1].r)) throw parameter_error("curve r values must be strictly increasing");

  const std::size_t k = pts.size();
  std::vector<double> r(k), f(k), se(k), w(k);
  double min_se = kInf;
  for (const auto& p : pts)
    if (p.std_err > 0.0) min_se = std::min(min_se, p.std_err);
  if (!std::isfinite(min_se)) min_se = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    r[i] = pts[i].r;
    f[i] = pts[i].free_energy;
    se[i] = pts[i].std_err;
    const double s = std::max(se[i], 1e-3 * min_se);
    w[i] = 1.0 / (s * s);
  }

  REstimate out;
  double pooled = 0.0, dof = 0.0;
  for (const auto& p : pts)
    if (p.n_graphs > 1) {
      const double g = static_cast<double>(p.n_graphs);
      pooled += p.std_err * p.std_err * g * (g - 1.0);
      dof += g - 1.0;
    }
  out.graph_sd = dof > 0.0 ? std::sqrt(pooled / dof) : 0.0;
  if (opt.graph_variance) observed_se = std::hypot(observed_se, out.graph_sd);

  for (std::size_t i = 0; i + 1 < k; ++i)
    if (f[i + 1] - f[i] > 3.0 * std::hypot(se[i], se[i + 1])) {
      std::ostringstream os;
      os << "raw curve increases beyond noise between r=" << r[i] << " and r=" << r[i + 1];
      out.warnings.push_back(os.str());
    }
  out.fitted = isotonic_nonincreasing(f, w);

  const auto c = detail::invert_interpolant(r, out.fitted, se, observed);
  out.r_hat = c.r_hat;
  out.slope = c.slope;
  if (c.slope == 0.0) {
    out.warnings.push_back("fitted curve is flat at the observed value; CI spans the curve");
    out.ci_low = r.front();
    out.ci_high = r.back();
  } else {
    const double sd = std::hypot(observed_se, c.curve_se) / std::abs(c.slope);
    out.ci_low = c.r_hat - opt.z * sd;
    out.ci_high = c.r_hat + opt.z * sd;
  }

  if (opt.bootstrap > 0) {
    Rng rng(opt.bootstrap_seed);
    std::vector<double> reps;
    std::vector<double> fb(k);
    for (std::size_t b = 0; b < opt.bootstrap; ++b) {
      for (std::size_t i = 0; i < k; ++i) fb[i] = f[i] + se[i] * detail::normal(rng);
      const double ob = observed + observed_se * detail::normal(rng);
      const auto fit = isotonic_nonincreasing(fb, w);
      try {
        reps.push_back(detail::invert_interpolant(r, fit, se, ob).r_hat);
      } catch (const extrapolation_error& e) {
        reps.push_back(e.nearest_endpoint());
      }
    }
    std::sort(reps.begin(), reps.end());
    const auto q = [&](double p) {
      const double pos = p * static_cast<double>(reps.size() - 1);
      const auto lo = static_cast<std::size_t>(std::floor(pos));
      const auto hi = std::min(lo + 1, reps.size() - 1);
      return reps[lo] + (pos - static_cast<double>(lo)) * (reps[hi] - reps[lo]);
    };
    out.ci_low = q(0.025);
    out.ci_high = q(0.975);
  }
  return out;
}

inline REstimate estimate_r(const FreeEnergyCurve& curve, const FreeEnergyEstimate& observed,
                            const InversionOptions& opt = {}) {
  return estimate_r(curve, observed.value, observed.std_err, opt);
}

/// Computes the observed graph's free energy with the given TI settings at
/// the curve's beta, then inverts.
inline REstimate estimate_r(const FreeEnergyCurve& curve, const SparseGraph& observed_graph,
                            const TiConfig& ti, std::uint64_t seed, const InversionOptions& opt = {}) {
  return estimate_r(curve, free_energy_ti(observed_graph, curve.beta, ti, seed), opt);
}

// --- Clustering --------------------------------------------------------------

struct ClusterResult {
  Labels tau;
  int l_prime = 1;
  double beta = 0.0;
  double d_hat = 0.0;
  std::optional<double> overlap;
  std::optional<double> baseline;  // max community share: accuracy of the all-majority guess
  std::optional<double> x_sigma;
  std::optional<double> y_sigma;
  std::optional<int> l_bar;
  std::optional<double> lprime_share_m0;  // |sigma^{-1}(l') cap M_0| / |M_0|
  std::optional<double> lprime_share_m1;  // |sigma^{-1}(l') cap M_1| / |M_1|
  Spins sigma;
};

/// l' = majority spin (ties -> 1) and tau(u) = 1 iff sigma(u) = l'.
inline std::pair<Labels, int> assign_from_spins(std::span<const std::uint8_t> sigma) {
  std::size_t ones = 0;
  for (auto s : sigma) ones += s;
  const int l_prime = ones * 2 >= sigma.size() ? 1 : 0;
  Labels tau(sigma.size());
  for (std::size_t u = 0; u < sigma.size(); ++u) tau[u] = sigma[u] == l_prime ? 1 : 0;
  return {std::move(tau), l_prime};
}

/// Fraction of agreement between estimated and true labels, maximized over
/// the global label swap.
inline double overlap(std::span<const std::uint8_t> tau, std::span<const std::uint8_t> truth) {
  if (tau.size() != truth.size()) throw parameter_error("overlap: size mismatch");
  if (tau.empty()) return 1.0;
  std::size_t agree = 0;
  for (std::size_t u = 0; u < tau.size(); ++u) agree += tau[u] == truth[u];
  const double a = static_cast<double>(agree) / static_cast<double>(tau.size());
  return std::max(a, 1.0 - a);
}

inline ClusterResult cluster(const SparseGraph& g, std::size_t sweeps, std::uint64_t seed,
                             std::optional<double> beta_override = std::nullopt) {
  if (g.num_vertices() == 0) throw parameter_error("cluster: empty graph");
  ClusterResult res;
  res.d_hat = degree_estimate(g);
  if (!(res.d_hat > 0.0)) throw degenerate_graph_error("cluster: d_hat = 0");
  res.beta = beta_override.value_or(1.0 / std::sqrt(res.d_hat));
  auto sample = gibbs_sample(g, res.beta, sweeps, seed);
  res.sigma = sample.sigma();
  auto [tau, l_prime] = assign_from_spins(res.sigma);
  res.tau = std::move(tau);
  res.l_prime = l_prime;

  if (g.has_labels()) {
    const auto& truth = g.labels();
    res.overlap = overlap(res.tau, truth);
    const std::size_t m1 = static_cast<std::size_t>(std::count(truth.begin(), truth.end(), 1));
    const std::size_t m0 = truth.size() - m1;
    res.baseline = static_cast<double>(std::max(m0, m1)) / static_cast<double>(truth.size());
    if (m0 > 0 && m1 > 0) {
      const auto op = order_parameters(g, res.sigma);
      res.x_sigma = op.x;
      res.y_sigma = op.y;
      res.l_bar = op.l_bar;
      res.lprime_share_m0 = static_cast<double>(sample.count(l_prime, 0)) / static_cast<double>(m0);
      res.lprime_share_m1 = static_cast<double>(sample.count(l_prime, 1)) / static_cast<double>(m1);
    }
  }
  return res;
}

}  // namespace sbm_ising
