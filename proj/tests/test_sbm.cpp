#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "sbm_ising/sbm.hpp"

using namespace sbm_ising;

TEST(SampleSbm, EdgeCountAndLabelFrequency) {
  const auto p = SbmParams::make(5.0, -0.4, 2.0, 2000);
  double edges = 0.0, ones = 0.0;
  const int reps = 30;
  for (int s = 0; s < reps; ++s) {
    const auto g = sample_sbm(p, s);
    edges += static_cast<double>(g.num_edges());
    for (auto l : g.labels()) ones += l;
  }
  edges /= reps;
  ones /= reps * 2000.0;
  // E[m] is close to d n / 2 and the label share close to r/(1+r).
  EXPECT_NEAR(edges, 5.0 * 2000 / 2.0, 5000 * 0.02);
  EXPECT_NEAR(ones, 2.0 / 3.0, 0.01);
}

TEST(SampleSbm, BlockDensitiesMatchAlpha) {
  const auto p = SbmParams::make(8.0, -0.4, 2.0, 4000);
  double got[2][2] = {{0, 0}, {0, 0}}, want[2][2] = {{0, 0}, {0, 0}};
  for (int s = 0; s < 10; ++s) {
    const auto g = sample_sbm(p, 100 + s);
    double size[2] = {0, 0};
    for (auto l : g.labels()) ++size[l];
    for (int a = 0; a < 2; ++a)
      for (int b = a; b < 2; ++b) {
        got[a][b] += static_cast<double>(g.block_edge_count(a, b));
        const double pairs = a == b ? size[a] * (size[a] - 1) / 2 : size[0] * size[1];
        want[a][b] += pairs * p.q(a, b);
      }
  }
  for (int a = 0; a < 2; ++a)
    for (int b = a; b < 2; ++b) EXPECT_NEAR(got[a][b] / want[a][b], 1.0, 0.03) << a << b;
}

TEST(SampleSbm, Reproducible) {
  const auto p = SbmParams::make(5.0, -0.4, 2.0, 500);
  EXPECT_EQ(sample_sbm(p, 7), sample_sbm(p, 7));
  EXPECT_FALSE(sample_sbm(p, 7) == sample_sbm(p, 8));
}

TEST(SampleSbm, ZeroDegreeGivesNoEdges) {
  const auto g = sample_sbm(SbmParams::make(0.0, -0.4, 2.0, 100), 1);
  EXPECT_EQ(g.num_edges(), 0u);
  EXPECT_EQ(g.num_vertices(), 100u);
}

TEST(SampleSbm, RejectsProbabilityAboveOne) {
  EXPECT_THROW(sample_sbm(SbmParams::make(50.0, -0.4, 2.0, 20), 1), parameter_error);
}

TEST(SampleErdosRenyi, EdgeDensity) {
  double m = 0.0;
  for (int s = 0; s < 20; ++s) m += static_cast<double>(sample_erdos_renyi(200, 0.05, s).num_edges());
  EXPECT_NEAR(m / 20.0, 0.05 * 200 * 199 / 2.0, 25.0);
  EXPECT_EQ(sample_erdos_renyi(10, 1.0, 3).num_edges(), 45u);
  EXPECT_EQ(sample_erdos_renyi(10, 0.0, 3).num_edges(), 0u);
}

TEST(Interpolation, SizesFollowFloors) {
  const auto z = interpolation_sizes(SbmParams::make(20.0, -0.5, 1.0, 1000), 0.4);
  EXPECT_EQ(z.n_delta, 100u);
  EXPECT_EQ(z.n0, 400u);
  EXPECT_EQ(z.n1, 500u);
  EXPECT_EQ(z.rewire, 500u);
}

TEST(Interpolation, BundleInvariants) {
  const auto p = SbmParams::make(20.0, -0.4, 2.0, 2000);
  const auto b = sample_interpolation(p, 0.2, 5);
  const auto& z = b.sizes;
  EXPECT_EQ(z.n0 + z.n1 + z.n_delta, p.n);
  EXPECT_EQ(b.rewire_count, z.rewire);
  EXPECT_EQ(b.g_tilde.num_vertices(), p.n - z.n_delta);
  for (const auto* g : {&b.g0_prime, &b.g1_prime, &b.g1_unrewired}) {
    EXPECT_EQ(g->num_vertices(), p.n);
    // No edges inside N_Delta.
    for (const auto& [u, v] : g->edges()) EXPECT_FALSE(u >= p.n - z.n_delta && v >= p.n - z.n_delta);
  }
  // New nodes are labelled 0 in G'_0 and 1 in G'_1.
  for (std::size_t u = p.n - z.n_delta; u < p.n; ++u) {
    EXPECT_EQ(b.g0_prime.labels()[u], 0);
    EXPECT_EQ(b.g1_prime.labels()[u], 1);
  }
  // G~ is contained in both primed graphs.
  for (const auto& [u, v] : b.g_tilde.edges()) {
    EXPECT_TRUE(b.g0_prime.has_edge(u, v));
    EXPECT_TRUE(b.g1_unrewired.has_edge(u, v));
  }
  // Rewiring deletes and adds the same number of edges.
  EXPECT_EQ(b.g1_prime.num_edges(), b.g1_unrewired.num_edges());
  std::size_t removed = 0;
  for (const auto& [u, v] : b.g1_unrewired.edges()) removed += !b.g1_prime.has_edge(u, v);
  EXPECT_EQ(removed, z.rewire);
  EXPECT_EQ(sample_interpolation(p, 0.2, 5).g1_prime, b.g1_prime);
}

TEST(Interpolation, ShortfallIsAnError) {
  // alpha_00 = 0 here, so there is nothing inside N_0 to delete.
  EXPECT_THROW(sample_interpolation(SbmParams::make(20.0, -0.5, 2.0, 2000), 0.2, 1), construction_error);
  EXPECT_THROW(sample_interpolation(SbmParams::make(20.0, -0.4, 2.0, 2000), 1e-5, 1), construction_error);
}
