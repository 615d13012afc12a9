#include <cmath>

#include <gtest/gtest.h>

#include "sbm_ising/ising.hpp"
#include "sbm_ising/oracle.hpp"
#include "sbm_ising/sbm.hpp"

using namespace sbm_ising;

namespace {
const SparseGraph kEdge(2, {{0, 1}});
const SparseGraph kTriangle(3, {{0, 1}, {1, 2}, {0, 2}});
}  // namespace

TEST(Energy, CountsMonochromaticEdges) {
  EXPECT_EQ(energy(kTriangle, Spins{0, 0, 0}), 3u);
  EXPECT_EQ(energy(kTriangle, Spins{0, 1, 0}), 1u);
  EXPECT_EQ(energy(SparseGraph(3, {}), Spins{1, 1, 1}), 0u);
  const SpinConfig c(kTriangle, {1, 1, 0});
  EXPECT_EQ(c.energy(), 1u);
  EXPECT_EQ(c.spin_total(1), 2u);
  EXPECT_THROW(c.count(1, 0), parameter_error);
}

TEST(ExactPartition, ClosedForms) {
  for (double b : {0.0, 0.3, 1.0, 4.0}) {
    EXPECT_NEAR(exact_log_partition(kEdge, b), std::log(2.0 + 2.0 * std::exp(-b)), 1e-12);
    EXPECT_NEAR(exact_log_partition(kTriangle, b), std::log(2.0 * std::exp(-3.0 * b) + 6.0 * std::exp(-b)), 1e-12);
  }
  EXPECT_NEAR(exact_log_partition(SparseGraph(5, {}), 2.0), 5.0 * std::log(2.0), 1e-12);
}

TEST(ExactPartition, MatchesBruteForce) {
  for (std::uint64_t s = 0; s < 8; ++s) {
    const auto g = sample_erdos_renyi(8 + s, 0.3, s);
    for (double b : {0.1, 0.7, 2.5})
      EXPECT_NEAR(exact_log_partition(g, b), oracle::brute_log_partition(g, b), 1e-9);
  }
}

TEST(ExactPartition, ConvexAndDecreasingInBeta) {
  const auto g = sample_erdos_renyi(12, 0.4, 5);
  double prev = exact_log_partition(g, 0.0), prev_slope = -kInf;
  for (int i = 1; i <= 40; ++i) {
    const double z = exact_log_partition(g, 0.1 * i);
    const double slope = (z - prev) / 0.1;
    EXPECT_LT(z, prev);
    EXPECT_GE(slope, prev_slope - 1e-9);
    prev = z;
    prev_slope = slope;
  }
}

TEST(ExactPartition, CapacityLimit) {
  EXPECT_THROW(exact_log_partition(SparseGraph(kMaxExactVertices + 1, {}), 1.0), capacity_error);
}

TEST(Gibbs, UniformAtZeroBeta) {
  const auto g = sample_erdos_renyi(20, 0.3, 1);
  GibbsChain chain(g, 0.0, 4);
  double ones = 0.0;
  for (int s = 0; s < 500; ++s) {
    chain.sweep();
    for (auto v : chain.sigma()) ones += v;
  }
  EXPECT_NEAR(ones / (500.0 * 20.0), 0.5, 0.02);
}

TEST(Gibbs, StrongCouplingAntiAligns) {
  GibbsChain chain(kEdge, 10.0, 2);
  std::size_t aligned = 0;
  for (int s = 0; s < 2000; ++s) {
    chain.sweep();
    aligned += chain.sigma()[0] == chain.sigma()[1];
  }
  EXPECT_LT(aligned, 10u);
}

TEST(Gibbs, EnergyBookkeepingMatchesRecount) {
  const auto g = sample_erdos_renyi(50, 0.2, 7);
  GibbsChain chain(g, 0.8, 1);
  for (int s = 0; s < 50; ++s) {
    chain.sweep();
    ASSERT_EQ(chain.energy(), energy(g, chain.sigma()));
  }
}

TEST(Gibbs, StationaryDistributionMatchesBoltzmann) {
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto g = sample_erdos_renyi(6, 0.5, 20 + s);
    const double beta = 0.7;
    const auto p = oracle::brute_boltzmann(g, beta);
    std::vector<double> hist(p.size(), 0.0);
    GibbsChain chain(g, beta, s);
    chain.run(100);
    const int samples = 200000;
    for (int i = 0; i < samples; ++i) {
      chain.sweep();
      std::size_t idx = 0;
      for (std::size_t u = 0; u < 6; ++u) idx |= static_cast<std::size_t>(chain.sigma()[u]) << u;
      hist[idx] += 1.0 / samples;
    }
    double tv = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) tv += 0.5 * std::abs(hist[i] - p[i]);
    EXPECT_LE(tv, 0.02) << "graph " << s;
  }
}

TEST(Gibbs, ReproducibleAndInitModes) {
  const auto g = sample_sbm(SbmParams::make(4.0, -0.4, 2.0, 200), 3);
  EXPECT_EQ(gibbs_sample(g, 0.5, 20, 9).sigma(), gibbs_sample(g, 0.5, 20, 9).sigma());
  GibbsChain truth(g, 0.5, 1, ChainInit::ground_truth);
  EXPECT_EQ(truth.sigma(), g.labels());
  GibbsChain zeros(g, 0.5, 1, ChainInit::all_zero);
  EXPECT_EQ(zeros.energy(), g.num_edges());
  EXPECT_THROW(GibbsChain(g, -1.0, 1), parameter_error);
}

TEST(FreeEnergyTi, ZeroBetaIsExact) {
  const auto g = sample_erdos_renyi(30, 0.2, 1);
  const auto e = free_energy_ti(g, 0.0, TiConfig{}, 1);
  EXPECT_DOUBLE_EQ(e.value, std::log(2.0));
  EXPECT_EQ(e.std_err, 0.0);
}

TEST(FreeEnergyTi, AgreesWithExactOnSmallGraphs) {
  for (std::uint64_t s = 0; s < 4; ++s) {
    const auto g = sample_sbm(SbmParams::make(3.0, -0.5, 1.5, 16), s);
    for (double b : {0.3, 1.0}) {
      const double exact = exact_free_energy(g, b).value;
      const auto ti = free_energy_ti(g, b, TiConfig{}, 100 + s);
      EXPECT_LE(std::abs(ti.value - exact), std::max(0.01, 3.0 * ti.std_err)) << "seed " << s << " beta " << b;
      EXPECT_GT(ti.std_err, 0.0);
      EXPECT_NEAR(ti.std_err, std::hypot(ti.statistical_err, ti.discretization_err), 1e-15);
    }
  }
}

TEST(FreeEnergyTi, ReproducibleAndThreadIndependent) {
  const auto g = sample_sbm(SbmParams::make(5.0, -0.4, 2.0, 300), 2);
  TiConfig one;
  one.grid_points = 8;
  one.sweeps_per_point = 30;
  one.burn_in = 10;
  one.chains = 4;
  auto many = one;
  many.threads = 3;
  const auto a = free_energy_ti(g, 0.4, one, 5), b = free_energy_ti(g, 0.4, many, 5);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_err, b.std_err);
  EXPECT_NE(a.value, free_energy_ti(g, 0.4, one, 6).value);
}

TEST(FreeEnergyTi, ProfileDecreasesInBeta) {
  const auto g = sample_sbm(SbmParams::make(5.0, -0.4, 2.0, 300), 2);
  TiConfig cfg;
  cfg.grid_points = 10;
  cfg.sweeps_per_point = 40;
  cfg.chains = 2;
  double prev = std::log(2.0);
  for (double b : {0.2, 0.4, 0.8}) {
    const double v = free_energy_ti(g, b, cfg, 1).value;
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(OrderParameters, Fractions) {
  const SparseGraph g(6, {}, Labels{0, 0, 1, 1, 1, 1});
  const auto op = order_parameters(g, Spins{1, 0, 1, 1, 1, 0});
  EXPECT_EQ(op.l_bar, 1);
  EXPECT_DOUBLE_EQ(op.x, 0.5);
  EXPECT_DOUBLE_EQ(op.y, 0.75);
  const auto tie = order_parameters(g, Spins{0, 0, 0, 0, 1, 1});
  EXPECT_EQ(tie.l_bar, 1);
  EXPECT_THROW(order_parameters(SparseGraph(2, {}, Labels{1, 1}), Spins{0, 1}), parameter_error);
}
