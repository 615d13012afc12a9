#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sbm_ising/acceptance.hpp"
#include "sbm_ising/commands.hpp"

namespace cli = sbm_ising::cli;

namespace {

void add_ti_flags(CLI::App* app, cli::TiOptions& ti) {
  app->add_option("--ti-grid", ti.grid, "TI integration grid points")->capture_default_str();
  app->add_option("--ti-sweeps", ti.sweeps, "Gibbs sweeps per grid point")->capture_default_str();
  app->add_option("--ti-burn-in", ti.burn_in, "burn-in sweeps at the first grid point")->capture_default_str();
  app->add_option("--ti-chains", ti.chains, "independent chains")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ising-model inference for two-community sparse stochastic block models"};
  app.set_version_flag("--version", cli::kVersion);
  app.set_config("--config", "", "read options from a TOML/INI file");
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  unsigned threads = sbm_ising::default_threads();
  bool as_json = false;
  app.add_option("--seed", seed, "master RNG seed")->capture_default_str();
  app.add_option("--threads", threads, "worker threads (default: SBM_ISING_THREADS or 1)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--json", as_json, "machine-readable summary (acceptance); other commands always emit JSON");

  std::function<cli::CommandOutput()> action;

  cli::GenerateOptions gen;
  auto* c_gen = app.add_subcommand("generate", "sample an SBM graph");
  c_gen->add_option("--n", gen.n)->capture_default_str();
  c_gen->add_option("--d", gen.d)->capture_default_str();
  c_gen->add_option("--lambda", gen.lambda)->capture_default_str();
  c_gen->add_option("--r", gen.r)->capture_default_str();
  c_gen->add_option("--out", gen.out, "edge-list output")->capture_default_str();
  c_gen->add_option("--labels", gen.labels, "label output (optional)");
  c_gen->callback([&] { action = [&] { gen.seed = seed; return cli::run_generate(gen); }; });

  cli::InterpolateOptions interp;
  auto* c_int = app.add_subcommand("interpolate", "sample an interpolation bundle");
  c_int->add_option("--n", interp.n)->capture_default_str();
  c_int->add_option("--d", interp.d)->capture_default_str();
  c_int->add_option("--lambda", interp.lambda)->capture_default_str();
  c_int->add_option("--r", interp.r)->capture_default_str();
  c_int->add_option("--delta", interp.delta)->capture_default_str();
  c_int->add_option("--out-prefix", interp.out_prefix)->capture_default_str();
  c_int->callback([&] { action = [&] { interp.seed = seed; return cli::run_interpolate(interp); }; });

  cli::EstimateOptions est;
  auto* c_est = app.add_subcommand("estimate", "cycle-count estimate of lambda");
  c_est->add_option("--in", est.in)->required();
  c_est->add_option("--k", est.k, "cycle length")->check(CLI::Range(3, 9))->capture_default_str();
  c_est->callback([&] { action = [&] { est.threads = threads; return cli::run_estimate(est); }; });

  cli::FreeEnergyOptions fe;
  auto* c_fe = app.add_subcommand("free-energy", "(1/n) log partition function of a graph");
  c_fe->add_option("--in", fe.in)->required();
  c_fe->add_option("--beta", fe.beta)->capture_default_str();
  c_fe->add_option("--method", fe.method)->check(CLI::IsMember({"exact", "ti"}))->capture_default_str();
  add_ti_flags(c_fe, fe.ti);
  c_fe->callback([&] {
    action = [&] {
      fe.seed = seed;
      fe.threads = threads;
      return cli::run_free_energy(fe);
    };
  });

  cli::BuildCurveOptions bc;
  auto* c_bc = app.add_subcommand("build-curve", "free-energy curve over an r grid");
  c_bc->add_option("--d", bc.d)->capture_default_str();
  c_bc->add_option("--lambda", bc.lambda)->capture_default_str();
  c_bc->add_option("--beta", bc.beta, "number or \"auto\" (1/sqrt(d))")->capture_default_str();
  c_bc->add_option("--n", bc.n)->capture_default_str();
  c_bc->add_option("--r-grid", bc.r_grid, "a:b:step or comma list")->capture_default_str();
  c_bc->add_option("--graphs", bc.graphs, "graphs per grid point")->capture_default_str();
  c_bc->add_option("--out", bc.out)->capture_default_str();
  add_ti_flags(c_bc, bc.ti);
  c_bc->callback([&] {
    action = [&] {
      bc.seed = seed;
      bc.threads = threads;
      return cli::run_build_curve(bc);
    };
  });

  cli::EstimateROptions er;
  auto* c_er = app.add_subcommand("estimate-r", "invert a free-energy curve at an observed graph");
  c_er->add_option("--in", er.in)->required();
  c_er->add_option("--curve", er.curve)->required();
  c_er->add_option("--bootstrap", er.bootstrap, "bootstrap replicates (0: delta method)")->capture_default_str();
  add_ti_flags(c_er, er.ti);
  c_er->callback([&] {
    action = [&] {
      er.seed = seed;
      er.threads = threads;
      return cli::run_estimate_r(er);
    };
  });

  cli::ClusterOptions cl;
  auto* c_cl = app.add_subcommand("cluster", "Gibbs-sample clustering");
  c_cl->add_option("--in", cl.in)->required();
  c_cl->add_option("--labels", cl.labels, "true labels, for overlap");
  c_cl->add_option("--sweeps", cl.sweeps)->capture_default_str();
  c_cl->add_option("--beta", cl.beta)->capture_default_str();
  c_cl->add_option("--tau-out", cl.tau_out, "write estimated labels here");
  c_cl->callback([&] { action = [&] { cl.seed = seed; return cli::run_cluster(cl); }; });

  cli::VerifyTheoryOptions vt;
  auto* c_vt = app.add_subcommand("verify-theory", "closed-form constants over a parameter grid");
  c_vt->add_option("--d-grid", vt.d_grid)->capture_default_str();
  c_vt->add_option("--lambda-grid", vt.lambda_grid)->capture_default_str();
  c_vt->add_option("--r-grid", vt.r_grid)->capture_default_str();
  c_vt->add_option("--beta-grid", vt.beta_grid)->capture_default_str();
  c_vt->add_option("--out", vt.out)->capture_default_str();
  c_vt->callback([&] { action = [&] { return cli::run_verify_theory(vt); }; });

  cli::InterpolationCheckOptions ic;
  auto* c_ic = app.add_subcommand("interpolation-check", "sign of Z(G'0) - Z(G'1) over interpolation bundles");
  c_ic->add_option("--d", ic.d)->capture_default_str();
  c_ic->add_option("--lambda", ic.lambda)->capture_default_str();
  c_ic->add_option("--r", ic.r)->capture_default_str();
  c_ic->add_option("--delta", ic.delta)->capture_default_str();
  c_ic->add_option("--n", ic.n)->capture_default_str();
  c_ic->add_option("--beta", ic.beta)->capture_default_str();
  c_ic->add_option("--bundles", ic.bundles)->capture_default_str();
  add_ti_flags(c_ic, ic.ti);
  c_ic->callback([&] {
    action = [&] {
      ic.seed = seed;
      ic.threads = threads;
      return cli::run_interpolation_check(ic);
    };
  });

  sbm_ising::acceptance::AcceptanceOptions ac;
  std::vector<std::string> only;
  bool no_supplementary = false;
  auto* c_ac = app.add_subcommand("acceptance", "run the acceptance suite");
  c_ac->add_option("--only", only, "criterion ids to run (e.g. AC1 AC4)");
  c_ac->add_flag("--no-supplementary", no_supplementary, "skip the informational runs");

  auto* c_dev = app.add_subcommand("dev", "brute-force reference computations");
  c_dev->require_subcommand(1);
  std::string dev_in;
  int dev_k = 3;
  double dev_beta = 0.1, dev_r = 2.0, dev_lambda = -0.5;
  auto* d_cyc = c_dev->add_subcommand("brute-cycles", "enumerate k-cycles");
  d_cyc->add_option("--in", dev_in)->required();
  d_cyc->add_option("--k", dev_k)->capture_default_str();
  d_cyc->callback([&] { action = [&] { return cli::run_dev_brute_cycles(dev_in, dev_k); }; });
  auto* d_z = c_dev->add_subcommand("brute-z", "log partition function by summing all states");
  d_z->add_option("--in", dev_in)->required();
  d_z->add_option("--beta", dev_beta)->capture_default_str();
  d_z->callback([&] { action = [&] { return cli::run_dev_brute_z(dev_in, dev_beta); }; });
  auto* d_g = c_dev->add_subcommand("grid-min", "grid minimum of the C(r, lambda) objective");
  d_g->add_option("--r", dev_r)->capture_default_str();
  d_g->add_option("--lambda", dev_lambda)->capture_default_str();
  d_g->callback([&] { action = [&] { return cli::run_dev_grid_min(dev_r, dev_lambda); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kUsage;
  }

  try {
    if (c_ac->parsed()) {
      if (app.count("--seed")) ac.seed = seed;
      ac.threads = threads;
      ac.supplementary = !no_supplementary;
      ac.only.insert(only.begin(), only.end());
      const auto results = sbm_ising::acceptance::run_acceptance(ac, as_json ? nullptr : &std::cout);
      const bool ok = sbm_ising::acceptance::all_passed(results);
      if (as_json)
        std::cout << sbm_ising::acceptance::summary_json(results, ac).dump(2) << '\n';
      else
        std::cout << (ok ? "acceptance: PASS" : "acceptance: FAIL") << '\n';
      return ok ? cli::kSuccess : cli::kFailure;
    }
    const auto out = action();
    cli::write_files(out);
    std::cout << out.payload;
    return out.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kFailure;
  }
}
