#pragma once

// Subcommand implementations shared by the CLI and the acceptance runner.
// Each command returns its stdout payload and the files it would write, so
// callers can compare reruns byte for byte before touching the filesystem.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cycles.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "graph_io.hpp"
#include "inference.hpp"
#include "ising.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "sbm.hpp"
#include "theory.hpp"

namespace sbm_ising::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kSuccess = 0, kFailure = 1, kUsage = 2 };

struct CommandOutput {
  std::string payload;                                   // stdout
  std::vector<std::pair<std::string, std::string>> files;  // (path, content)
  int exit_code = kSuccess;

  friend bool operator==(const CommandOutput&, const CommandOutput&) = default;
};

inline std::uint64_t fnv1a(const std::string& s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

/// Provenance block embedded in every output.
inline json meta(const std::string& command, const json& config, std::uint64_t seed) {
  json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["rng"] = kRngAlgorithm;
  m["seed"] = seed;
  m["config_hash"] = hex(fnv1a(config.dump()));
  m["config"] = config;
  return m;
}

/// One "# key: value" line per provenance field, for CSV outputs.
inline std::vector<std::string> meta_comments(const json& m) {
  return {"command: " + m["command"].get<std::string>(), "version: " + m["version"].get<std::string>(),
          "rng: " + m["rng"].get<std::string>(), "seed: " + std::to_string(m["seed"].get<std::uint64_t>()),
          "config_hash: " + m["config_hash"].get<std::string>(), "config: " + m["config"].dump()};
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// "a:b:step" (inclusive) or "v1,v2,...".
inline std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> out;
  try {
    if (spec.find(':') != std::string::npos) {
      std::istringstream ss(spec);
      std::string a, b, s;
      std::getline(ss, a, ':');
      std::getline(ss, b, ':');
      std::getline(ss, s, ':');
      const double lo = std::stod(a), hi = std::stod(b), step = s.empty() ? 1.0 : std::stod(s);
      if (!(step > 0.0) || hi < lo) throw parameter_error("grid range must satisfy lo <= hi and step > 0");
      const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
      for (std::size_t i = 0; i < count; ++i) out.push_back(lo + step * static_cast<double>(i));
    } else {
      std::istringstream ss(spec);
      std::string tok;
      while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const parameter_error*>(&e)) throw;
    throw parameter_error("cannot parse grid \"" + spec + "\"");
  }
  if (out.empty()) throw parameter_error("empty grid \"" + spec + "\"");
  return out;
}

inline SparseGraph load_graph(const std::string& path, const std::string& labels_path = "") {
  return labels_path.empty() ? read_graph_file(path) : read_labeled_graph(path, labels_path);
}

struct TiOptions {
  std::size_t grid = 32;
  std::size_t sweeps = 200;
  std::size_t burn_in = 100;
  std::size_t chains = 8;

  TiConfig config(unsigned threads) const {
    TiConfig c;
    c.grid_points = grid;
    c.sweeps_per_point = sweeps;
    c.burn_in = burn_in;
    c.chains = chains;
    c.threads = threads;
    return c;
  }
  json to_json() const { return {{"grid", grid}, {"sweeps", sweeps}, {"burn_in", burn_in}, {"chains", chains}}; }
};

inline json estimate_json(const FreeEnergyEstimate& e) {
  json j;
  j["value"] = e.value;
  j["std_err"] = e.std_err;
  j["method"] = to_string(e.method);
  j["beta"] = e.beta;
  if (e.method == FreeEnergyMethod::thermo_integration) {
    j["statistical_err"] = e.statistical_err;
    j["discretization_err"] = e.discretization_err;
    j["sweeps"] = e.sweeps;
    j["integration_points"] = e.integration_points;
    j["chains"] = e.chains;
    j["low_confidence"] = e.low_confidence;
  }
  return j;
}

// --- generate ----------------------------------------------------------------

struct GenerateOptions {
  std::size_t n = 1000;
  double d = 5.0;
  double lambda = 0.0;
  double r = 1.0;
  std::uint64_t seed = 0;
  std::string out = "graph.txt";
  std::string labels;  // empty: no label file
};

inline CommandOutput run_generate(const GenerateOptions& o) {
  json cfg{{"n", o.n}, {"d", o.d}, {"lambda", o.lambda}, {"r", o.r}, {"out", o.out}, {"labels", o.labels}};
  const auto g = sample_sbm(SbmParams::make(o.d, o.lambda, o.r, o.n), o.seed);
  CommandOutput out;
  out.files.emplace_back(o.out, graph_to_string(g));
  if (!o.labels.empty()) {
    std::ostringstream ls;
    write_labels(g.labels(), ls);
    out.files.emplace_back(o.labels, ls.str());
  }
  const auto& lab = g.labels();
  const auto ones = static_cast<std::size_t>(std::count(lab.begin(), lab.end(), 1));
  json j;
  j["meta"] = meta("generate", cfg, o.seed);
  j["n"] = g.num_vertices();
  j["m"] = g.num_edges();
  j["d_hat"] = degree_estimate(g);
  j["community_sizes"] = {g.num_vertices() - ones, ones};
  out.payload = dump(j);
  return out;
}

// --- interpolate -------------------------------------------------------------

struct InterpolateOptions {
  std::size_t n = 10000;
  double d = 20.0;
  double lambda = -0.5;
  double r = 2.0;
  double delta = 0.09;
  std::uint64_t seed = 0;
  std::string out_prefix = "interp";
};

inline CommandOutput run_interpolate(const InterpolateOptions& o) {
  json cfg{{"n", o.n}, {"d", o.d}, {"lambda", o.lambda}, {"r", o.r}, {"delta", o.delta}, {"out_prefix", o.out_prefix}};
  const auto b = sample_interpolation(SbmParams::make(o.d, o.lambda, o.r, o.n), o.delta, o.seed);
  CommandOutput out;
  auto add = [&](const std::string& tag, const SparseGraph& g) {
    out.files.emplace_back(o.out_prefix + "_" + tag + ".txt", graph_to_string(g));
    std::ostringstream ls;
    write_labels(g.labels(), ls);
    out.files.emplace_back(o.out_prefix + "_" + tag + ".labels", ls.str());
  };
  add("tilde", b.g_tilde);
  add("g0", b.g0_prime);
  add("g1", b.g1_prime);
  json j;
  j["meta"] = meta("interpolate", cfg, o.seed);
  j["sizes"] = {{"n0", b.sizes.n0}, {"n1", b.sizes.n1}, {"n_delta", b.sizes.n_delta}};
  j["rewire_count"] = b.rewire_count;
  j["edges"] = {{"tilde", b.g_tilde.num_edges()}, {"g0", b.g0_prime.num_edges()}, {"g1", b.g1_prime.num_edges()}};
  out.payload = dump(j);
  return out;
}

// --- estimate ----------------------------------------------------------------

struct EstimateOptions {
  std::string in;
  int k = 3;
  unsigned threads = 1;
};

inline CommandOutput run_estimate(const EstimateOptions& o) {
  json cfg{{"in", o.in}, {"k", o.k}};
  const auto g = load_graph(o.in);
  const auto counts = cycle_counts(g, o.k, o.threads);
  json j;
  j["meta"] = meta("estimate", cfg, 0);
  j["n"] = g.num_vertices();
  j["m"] = g.num_edges();
  j["d_hat"] = counts.d_hat;
  j["k"] = counts.k;
  j["c_k"] = counts.c_k;
  if (counts.d_hat > 0.0) {
    if (o.k % 2 == 1) {
      j["lambda_hat"] = lambda_from_counts(static_cast<double>(counts.c_k), counts.d_hat, o.k);
    } else {
      j["lambda_hat"] = nullptr;
      j["lambda_abs_hat"] = lambda_magnitude_from_counts(static_cast<double>(counts.c_k), counts.d_hat, o.k);
      j["even_k"] = true;
    }
  } else {
    j["lambda_hat"] = nullptr;
  }
  return {dump(j), {}, kSuccess};
}

// --- free-energy -------------------------------------------------------------

struct FreeEnergyOptions {
  std::string in;
  double beta = 0.1;
  std::string method = "ti";
  TiOptions ti;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

inline CommandOutput run_free_energy(const FreeEnergyOptions& o) {
  json cfg{{"in", o.in}, {"beta", o.beta}, {"method", o.method}, {"ti", o.ti.to_json()}};
  const auto g = load_graph(o.in);
  FreeEnergyEstimate e;
  if (o.method == "exact")
    e = exact_free_energy(g, o.beta);
  else if (o.method == "ti")
    e = free_energy_ti(g, o.beta, o.ti.config(o.threads), o.seed);
  else
    throw parameter_error("unknown method \"" + o.method + "\" (exact|ti)");
  json j;
  j["meta"] = meta("free-energy", cfg, o.seed);
  j["n"] = g.num_vertices();
  j["m"] = g.num_edges();
  j["estimate"] = estimate_json(e);
  return {dump(j), {}, kSuccess};
}

// --- build-curve -------------------------------------------------------------

struct BuildCurveOptions {
  double d = 50.0;
  double lambda = -0.5;
  std::string beta = "auto";
  std::size_t n = 1000;
  std::string r_grid = "1.5:4.5:0.5";
  std::size_t graphs = 20;
  TiOptions ti;
  std::uint64_t seed = 0;
  std::string out = "curve.csv";
  unsigned threads = 1;
};

inline double resolve_beta(const std::string& beta, double d) {
  if (beta == "auto") {
    if (!(d > 0.0)) throw parameter_error("beta=auto needs d > 0");
    return 1.0 / std::sqrt(d);
  }
  try {
    return std::stod(beta);
  } catch (const std::exception&) {
    throw parameter_error("beta must be a number or \"auto\"");
  }
}

inline CommandOutput run_build_curve(const BuildCurveOptions& o) {
  const double beta = resolve_beta(o.beta, o.d);
  json cfg{{"d", o.d},        {"lambda", o.lambda}, {"beta", beta},         {"n", o.n},
           {"r_grid", o.r_grid}, {"graphs", o.graphs}, {"ti", o.ti.to_json()}, {"out", o.out}};
  const auto grid = parse_grid(o.r_grid);
  const auto curve = build_curve(o.d, o.lambda, beta, o.n, grid, o.graphs, o.ti.config(1), o.seed, o.threads);
  const json m = meta("build-curve", cfg, o.seed);
  std::ostringstream csv;
  write_curve_csv(curve, csv, meta_comments(m));
  json j;
  j["meta"] = m;
  j["beta"] = beta;
  j["points"] = json::array();
  for (const auto& p : curve.points)
    j["points"].push_back({{"r", p.r}, {"free_energy", p.free_energy}, {"std_err", p.std_err},
                           {"n_graphs", p.n_graphs}, {"unreliable", p.unreliable}});
  return {dump(j), {{o.out, csv.str()}}, kSuccess};
}

// --- estimate-r --------------------------------------------------------------

struct EstimateROptions {
  std::string in;
  std::string curve;
  TiOptions ti;
  std::size_t bootstrap = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

inline CommandOutput run_estimate_r(const EstimateROptions& o) {
  json cfg{{"in", o.in}, {"curve", o.curve}, {"ti", o.ti.to_json()}, {"bootstrap", o.bootstrap}};
  const auto g = load_graph(o.in);
  std::ifstream cin(o.curve);
  if (!cin) throw std::runtime_error("cannot open curve file " + o.curve);
  const auto curve = read_curve_csv(cin);
  const auto observed = free_energy_ti(g, curve.beta, o.ti.config(o.threads), o.seed);
  json j;
  j["meta"] = meta("estimate-r", cfg, o.seed);
  j["observed"] = estimate_json(observed);
  InversionOptions inv;
  inv.bootstrap = o.bootstrap;
  inv.bootstrap_seed = derive_seed(o.seed, 99);
  try {
    const auto est = estimate_r(curve, observed, inv);
    j["r_hat"] = est.r_hat;
    j["ci"] = {est.ci_low, est.ci_high};
    j["slope"] = est.slope;
    j["graph_sd"] = est.graph_sd;
    j["fitted"] = est.fitted;
    j["warnings"] = est.warnings;
    j["monotone_diagnostic"] = est.warnings.empty() ? "monotone within noise" : "non-monotone beyond noise";
    return {dump(j), {}, kSuccess};
  } catch (const extrapolation_error& e) {
    j["error"] = e.what();
    j["nearest_endpoint"] = e.nearest_endpoint();
    return {dump(j), {}, kFailure};
  }
}

// --- cluster -----------------------------------------------------------------

struct ClusterOptions {
  std::string in;
  std::string labels;
  std::size_t sweeps = 500;
  std::string beta = "auto";
  std::uint64_t seed = 0;
  std::string tau_out;  // optional file with the estimated labels
};

inline CommandOutput run_cluster(const ClusterOptions& o) {
  json cfg{{"in", o.in}, {"labels", o.labels}, {"sweeps", o.sweeps}, {"beta", o.beta}, {"tau_out", o.tau_out}};
  const auto g = load_graph(o.in, o.labels);
  std::optional<double> beta;
  if (o.beta != "auto") beta = resolve_beta(o.beta, 1.0);
  const auto res = cluster(g, o.sweeps, o.seed, beta);
  CommandOutput out;
  json j;
  j["meta"] = meta("cluster", cfg, o.seed);
  j["d_hat"] = res.d_hat;
  j["beta"] = res.beta;
  j["l_prime"] = res.l_prime;
  const auto ones = static_cast<std::size_t>(std::count(res.tau.begin(), res.tau.end(), 1));
  j["tau_sizes"] = {res.tau.size() - ones, ones};
  auto opt = [](const auto& v) { return v ? json(*v) : json(nullptr); };
  j["overlap"] = opt(res.overlap);
  j["baseline"] = opt(res.baseline);
  j["x_sigma"] = opt(res.x_sigma);
  j["y_sigma"] = opt(res.y_sigma);
  j["l_bar"] = opt(res.l_bar);
  j["lprime_share_m0"] = opt(res.lprime_share_m0);
  j["lprime_share_m1"] = opt(res.lprime_share_m1);
  if (!o.tau_out.empty()) {
    std::ostringstream ts;
    write_labels(res.tau, ts);
    out.files.emplace_back(o.tau_out, ts.str());
  }
  out.payload = dump(j);
  return out;
}

// --- verify-theory -----------------------------------------------------------

struct VerifyTheoryOptions {
  std::string d_grid = "100,1000,10000,100000";
  std::string lambda_grid = "-0.1,-0.5,-0.9";
  std::string r_grid = "1,1.5,2,4,8";
  std::string beta_grid = "0.01,0.1";
  std::string out = "theory.csv";
  double tolerance = 1e-5;
};

inline CommandOutput run_verify_theory(const VerifyTheoryOptions& o) {
  json cfg{{"d_grid", o.d_grid}, {"lambda_grid", o.lambda_grid}, {"r_grid", o.r_grid},
           {"beta_grid", o.beta_grid}, {"out", o.out}, {"tolerance", o.tolerance}};
  const auto ds = parse_grid(o.d_grid), ls = parse_grid(o.lambda_grid), rs = parse_grid(o.r_grid),
             bs = parse_grid(o.beta_grid);
  for (double l : ls)
    if (!(l < 0.0)) throw unsupported_regime_error("verify-theory: every lambda must be < 0");

  const json m = meta("verify-theory", cfg, 0);
  std::ostringstream csv;
  csv.precision(12);
  for (const auto& c : meta_comments(m)) csv << "# " << c << '\n';
  csv << "d,lambda,r,beta,valid,c_r_lambda,grid_min,c_delta,y_star,grid_x,grid_y,varepsilon0,eps0,eps1,"
         "c_d_r_lambda_beta,item1,item2a,item2b,item2c,item2d\n";
  std::map<std::pair<double, double>, oracle::GridMin> grid_cache;
  double worst = 0.0;
  std::size_t rows = 0, valid_rows = 0, all_true = 0;
  auto opt = [](const std::optional<double>& v) {
    std::ostringstream s;
    s.precision(12);
    if (v) s << *v;
    return s.str();
  };
  for (double d : ds)
    for (double l : ls)
      for (double r : rs)
        for (double b : bs) {
          ++rows;
          csv << d << ',' << l << ',' << r << ',' << b << ',';
          if (1.0 + r * l < 0.0) {
            csv << "0,,,,,,,,,,,,,,,\n";
            continue;
          }
          ++valid_rows;
          const auto key = std::make_pair(r, l);
          if (!grid_cache.count(key)) grid_cache[key] = oracle::grid_min_objective(r, l);
          const auto& gm = grid_cache[key];
          const auto rep = theory_report(SbmParams::make(d, l, r, 1), b);
          const double delta = std::abs(rep.c_r_lambda - gm.value);
          worst = std::max(worst, delta);
          const auto& c1 = rep.condition1;
          all_true += c1.all();
          csv << "1," << rep.c_r_lambda << ',' << gm.value << ',' << delta << ',' << rep.y_star << ',' << gm.x
              << ',' << gm.y << ',' << opt(rep.varepsilon0) << ',' << opt(rep.eps0) << ',' << opt(rep.eps1) << ','
              << opt(rep.c_d_r_lambda_beta) << ',' << c1.item1 << ',' << c1.item2a << ',' << c1.item2b << ','
              << c1.item2c << ',' << c1.item2d << '\n';
        }
  json j;
  j["meta"] = m;
  j["rows"] = rows;
  j["valid_rows"] = valid_rows;
  j["condition1_all_true_rows"] = all_true;
  j["max_closed_form_delta"] = worst;
  j["passed"] = worst <= o.tolerance;
  return {dump(j), {{o.out, csv.str()}}, worst <= o.tolerance ? kSuccess : kFailure};
}

// --- interpolation-check -----------------------------------------------------

struct InterpolationCheckOptions {
  double d = 50.0;
  double lambda = -0.5;
  double r = 3.0;
  double delta = 0.09;
  std::size_t n = 5000;
  std::string beta = "auto";
  std::size_t bundles = 20;
  TiOptions ti{16, 100, 50, 2};
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct InterpolationCheckResult {
  double mean = 0.0;      // mean of (1/n)(Z(G'_0) - Z(G'_1)) over bundles
  double std_err = 0.0;
  double paired_var = 0.0;
  double unpaired_var = 0.0;
  std::vector<double> z0, z1;
  bool positive_beyond_3sigma = false;
};

inline InterpolationCheckResult interpolation_check(const InterpolationCheckOptions& o) {
  const double beta = resolve_beta(o.beta, o.d);
  const auto params = SbmParams::make(o.d, o.lambda, o.r, o.n);
  if (o.bundles < 2) throw parameter_error("interpolation-check needs at least 2 bundles");
  const auto ti = o.ti.config(1);
  struct Pair {
    double z0, z1;
  };
  const auto pairs = parallel_map<Pair>(o.bundles, o.threads, [&](std::size_t b) {
    const std::uint64_t task = derive_seed(o.seed, b);
    const auto bundle = sample_interpolation(params, o.delta, derive_seed(task, 0));
    // Common random numbers: both TI runs use the same chain seed.
    const std::uint64_t chain_seed = derive_seed(task, 1);
    return Pair{free_energy_ti(bundle.g0_prime, beta, ti, chain_seed).value,
                free_energy_ti(bundle.g1_prime, beta, ti, chain_seed).value};
  });
  InterpolationCheckResult res;
  const double k = static_cast<double>(o.bundles);
  std::vector<double> diff, cross;
  for (std::size_t b = 0; b < o.bundles; ++b) {
    res.z0.push_back(pairs[b].z0);
    res.z1.push_back(pairs[b].z1);
    diff.push_back(pairs[b].z0 - pairs[b].z1);
    cross.push_back(pairs[b].z0 - pairs[(b + 1) % o.bundles].z1);
  }
  auto mean_var = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::make_pair(m, s / static_cast<double>(v.size() - 1));
  };
  const auto [m, pv] = mean_var(diff);
  res.mean = m;
  res.paired_var = pv;
  res.unpaired_var = mean_var(cross).second;
  res.std_err = std::sqrt(pv / k);
  res.positive_beyond_3sigma = res.mean > 3.0 * res.std_err;
  return res;
}

inline CommandOutput run_interpolation_check(const InterpolationCheckOptions& o) {
  const double beta = resolve_beta(o.beta, o.d);
  json cfg{{"d", o.d},         {"lambda", o.lambda}, {"r", o.r},     {"delta", o.delta},
           {"n", o.n},         {"beta", beta},       {"bundles", o.bundles}, {"ti", o.ti.to_json()}};
  const auto res = interpolation_check(o);
  json j;
  j["meta"] = meta("interpolation-check", cfg, o.seed);
  j["mean_diff_per_node"] = res.mean;
  j["std_err"] = res.std_err;
  j["paired_variance"] = res.paired_var;
  j["unpaired_variance"] = res.unpaired_var;
  j["positive_beyond_3sigma"] = res.positive_beyond_3sigma;
  j["verdict"] = res.positive_beyond_3sigma ? "positive" : (res.mean > 0.0 ? "inconclusive" : "not positive");
  return {dump(j), {}, res.positive_beyond_3sigma ? kSuccess : kFailure};
}

// --- dev -----------------------------------------------------------------------

inline CommandOutput run_dev_brute_cycles(const std::string& in, int k) {
  const auto g = load_graph(in);
  json j;
  j["meta"] = meta("dev brute-cycles", {{"in", in}, {"k", k}}, 0);
  j["c_k"] = oracle::brute_cycles(g, k);
  return {dump(j), {}, kSuccess};
}

inline CommandOutput run_dev_brute_z(const std::string& in, double beta) {
  const auto g = load_graph(in);
  json j;
  j["meta"] = meta("dev brute-z", {{"in", in}, {"beta", beta}}, 0);
  const double z = oracle::brute_log_partition(g, beta);
  j["log_partition"] = z;
  j["per_node"] = z / static_cast<double>(g.num_vertices());
  return {dump(j), {}, kSuccess};
}

inline CommandOutput run_dev_grid_min(double r, double lambda) {
  json j;
  j["meta"] = meta("dev grid-min", {{"r", r}, {"lambda", lambda}}, 0);
  const auto gm = oracle::grid_min_objective(r, lambda);
  j["value"] = gm.value;
  j["x"] = gm.x;
  j["y"] = gm.y;
  return {dump(j), {}, kSuccess};
}

/// Writes every file of a command output.
inline void write_files(const CommandOutput& out) {
  for (const auto& [path, content] : out.files) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
  }
}

}  // namespace sbm_ising::cli
