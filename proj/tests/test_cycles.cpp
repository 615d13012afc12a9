#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "sbm_ising/cycles.hpp"
#include "sbm_ising/oracle.hpp"
#include "sbm_ising/sbm.hpp"

using namespace sbm_ising;

namespace {
SparseGraph complete(std::size_t n) {
  std::vector<Edge> e;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) e.emplace_back(u, v);
  return SparseGraph(n, e);
}
SparseGraph ring(std::size_t n) {
  std::vector<Edge> e;
  for (Vertex u = 0; u < n; ++u) e.emplace_back(u, static_cast<Vertex>((u + 1) % n));
  return SparseGraph(n, e);
}
}  // namespace

TEST(CountCycles, SmallGraphs) {
  EXPECT_EQ(count_cycles(complete(3), 3), 1u);
  EXPECT_EQ(count_cycles(complete(4), 3), 4u);
  EXPECT_EQ(count_cycles(complete(4), 4), 3u);
  EXPECT_EQ(count_cycles(complete(5), 5), 12u);
  EXPECT_EQ(count_cycles(ring(5), 5), 1u);
  EXPECT_EQ(count_cycles(ring(5), 3), 0u);
  EXPECT_EQ(count_cycles(ring(7), 7), 1u);
  EXPECT_EQ(count_cycles(SparseGraph(4, {}), 3), 0u);
}

TEST(CountCycles, RejectsBadLength) {
  EXPECT_THROW(count_cycles(complete(4), 2), parameter_error);
  EXPECT_THROW(count_cycles(complete(4), 10), parameter_error);
}

TEST(CountCycles, MatchesBruteForce) {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const std::size_t n = 6 + s % 7;
    const auto g = sample_erdos_renyi(n, 0.2 + 0.01 * static_cast<double>(s % 50), s);
    for (int k = 3; k <= std::min<int>(static_cast<int>(n), 8); ++k)
      EXPECT_EQ(count_cycles(g, k), oracle::brute_cycles(g, k)) << "seed " << s << " k " << k;
  }
}

TEST(CountCycles, InvariantUnderRelabelling) {
  const auto g = sample_erdos_renyi(40, 0.15, 11);
  std::vector<Vertex> perm(40);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(3);
  for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  std::vector<Edge> e;
  for (const auto& [u, v] : g.edges()) e.emplace_back(perm[u], perm[v]);
  const SparseGraph h(40, e);
  for (int k = 3; k <= 6; ++k) EXPECT_EQ(count_cycles(g, k), count_cycles(h, k));
}

TEST(CountCycles, ThreadCountDoesNotChangeResult) {
  const auto g = sample_sbm(SbmParams::make(6.0, -0.4, 2.0, 3000), 9);
  EXPECT_EQ(count_cycles(g, 5, 9, 1), count_cycles(g, 5, 9, 3));
}

TEST(LambdaEstimate, InvertsSyntheticCounts) {
  for (double lambda : {-0.6, -0.2, 0.3})
    for (int k : {3, 5}) {
      const double d = 7.0;
      const double c = std::pow(d, k) * (1.0 + std::pow(lambda, k)) / (2.0 * k);
      EXPECT_NEAR(lambda_from_counts(c, d, k), lambda, 1e-12);
      EXPECT_NEAR(lambda_magnitude_from_counts(c, d, k), std::abs(lambda), 1e-12);
    }
  EXPECT_THROW(lambda_from_counts(10.0, 3.0, 4), parameter_error);
  EXPECT_THROW(lambda_from_counts(10.0, 0.0, 3), degenerate_graph_error);
}

TEST(LambdaEstimate, EmptyGraphIsDegenerate) {
  EXPECT_THROW(lambda_estimate(SparseGraph(10, {}), 3), degenerate_graph_error);
}

TEST(ExpectedCycles, KnownValue) {
  EXPECT_NEAR(expected_cycles(SbmParams::make(4.0, -0.6, 1.0, 3000), 3), 8.362667, 1e-6);
}

TEST(ExpectedCycles, TraceIdentity) {
  // Tr[P^k] = 1 + lambda^k for the community transition matrix.
  for (double l : {-0.4, -0.1, 0.5}) {
    const auto P = SbmParams::make(3.0, l, 2.0, 10).transition();
    auto M = P;
    for (int k = 2; k <= 6; ++k) {
      std::array<std::array<double, 2>, 2> next{};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) next[i][j] = M[i][0] * P[0][j] + M[i][1] * P[1][j];
      M = next;
      EXPECT_NEAR(M[0][0] + M[1][1], 1.0 + std::pow(l, k), 1e-12);
    }
  }
}

TEST(CycleCounts, SbmMeanNearExpectation) {
  const auto p = SbmParams::make(4.0, -0.6, 1.0, 3000);
  double sum = 0.0;
  for (std::uint64_t s = 0; s < 40; ++s) sum += static_cast<double>(count_cycles(sample_sbm(p, s), 3));
  EXPECT_NEAR(sum / 40.0, expected_cycles(p, 3), 1.5);
}
