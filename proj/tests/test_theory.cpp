#include <cmath>

#include <gtest/gtest.h>

#include "sbm_ising/oracle.hpp"
#include "sbm_ising/theory.hpp"

using namespace sbm_ising;

TEST(GFunction, KnownValues) {
  EXPECT_EQ(g(0.0), 0.0);
  EXPECT_NEAR(g(0.5), 0.108197662162, 1e-11);
  EXPECT_NEAR(g(1.0), 2.0 * std::log(2.0) - 1.0, 1e-15);
  EXPECT_TRUE(std::isinf(g(1.5)));
  EXPECT_THROW(g(-0.1), domain_error);
}

TEST(GFunction, InverseKnownValue) { EXPECT_NEAR(g_inverse(0.108198), 0.500000833, 1e-8); }

TEST(GFunction, InverseRejectsOutOfRange) {
  EXPECT_THROW(g_inverse(-1e-3), domain_error);
  EXPECT_THROW(g_inverse(kGMax + 1e-6), domain_error);
  EXPECT_EQ(g_inverse(0.0), 0.0);
}

TEST(GFunction, StrictlyIncreasingAndRoundTrips) {
  double prev = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double z = i / 1000.0;
    const double v = g(z);
    EXPECT_GT(v, prev);
    prev = v;
    EXPECT_NEAR(g_inverse(v), z, 1e-7);
  }
}

TEST(CRLambda, KnownValues) {
  EXPECT_DOUBLE_EQ(c_r_lambda(1.0, -0.5), 0.5);
  EXPECT_NEAR(c_r_lambda(3.0, -0.25), 3.636364, 1e-6);
  EXPECT_DOUBLE_EQ(y_star(4.0, -0.5), 5.0 / 7.0);
  EXPECT_DOUBLE_EQ(y_star(1.0, -0.5), 1.0);
  EXPECT_EQ(x_star(), 0.0);
}

TEST(CRLambda, RejectsNonNegativeLambda) {
  EXPECT_THROW(c_r_lambda(2.0, 0.0), unsupported_regime_error);
  EXPECT_THROW(c_r_lambda(2.0, 0.3), unsupported_regime_error);
  EXPECT_THROW(c_r_lambda(0.5, -0.3), parameter_error);
}

TEST(CRLambda, BranchesAgreeAtBoundary) {
  for (double l : {-0.05, -0.2, -0.4, -0.7, -0.95}) {
    const double r = 1.0 - 2.0 * l;
    EXPECT_NEAR(c_r_lambda_inner_branch(r, l), c_r_lambda_outer_branch(r, l), 1e-12) << "lambda=" << l;
    EXPECT_NEAR(c_r_lambda(r - 1e-9, l), c_r_lambda(r + 1e-9, l), 1e-7);
  }
}

TEST(CRLambda, MatchesGridMinimumAndBound) {
  oracle::OracleConfig cfg;
  cfg.grid_resolution = 401;
  for (double l : {-0.1, -0.25, -0.5})
    for (double r : {1.0, 1.5, 2.0}) {
      if (1.0 + r * l < 0.0) continue;
      const double c = c_r_lambda(r, l);
      const auto gm = oracle::grid_min_objective(r, l, cfg);
      EXPECT_NEAR(c, gm.value, 1e-7) << "r=" << r << " lambda=" << l;
      EXPECT_LT(c, (1.0 + r) * (1.0 + r) / 4.0);
      EXPECT_NEAR(c_objective(r, l, x_star(), y_star(r, l)), c, 1e-12);
      EXPECT_GT(c, 0.0);
    }
}

TEST(CRLambda, ObjectiveIsMinimizedAtClosedFormArgmin) {
  // Random probes never beat the closed form.
  for (double l : {-0.1, -0.3, -0.6})
    for (double r : {1.0, 1.2, 1.6}) {
      const double c = c_r_lambda(r, l);
      for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) EXPECT_GE(c_objective(r, l, i / 20.0, j / 20.0), c - 1e-12);
    }
}

TEST(SbmParams, Validation) {
  EXPECT_NO_THROW(SbmParams::make(5.0, -0.5, 2.0, 100));
  EXPECT_THROW(SbmParams::make(5.0, -0.5, 3.0, 100), parameter_error);
  EXPECT_THROW(SbmParams::make(5.0, -0.5, 0.5, 100), parameter_error);
  EXPECT_THROW(SbmParams::make(-1.0, -0.5, 1.0, 100), parameter_error);
  EXPECT_THROW(SbmParams::make(5.0, 1.5, 1.0, 100), parameter_error);
  EXPECT_THROW(SbmParams::make(5.0, -0.5, 2.0, 0), parameter_error);
}

TEST(SbmParams, EqualExpectedDegreesAndEigenvalue) {
  for (double l : {-0.4, -0.1, 0.3})
    for (double r : {1.0, 1.5, 2.5}) {
      const auto p = SbmParams::make(7.0, l, r, 1000);
      EXPECT_NEAR(p.pi0() * p.alpha(0, 0) + p.pi1() * p.alpha(0, 1), p.d, 1e-12);
      EXPECT_NEAR(p.pi0() * p.alpha(1, 0) + p.pi1() * p.alpha(1, 1), p.d, 1e-12);
      const auto P = p.transition();
      EXPECT_NEAR(P[0][0] + P[0][1], 1.0, 1e-12);
      EXPECT_NEAR(P[1][0] + P[1][1], 1.0, 1e-12);
      EXPECT_NEAR(P[0][0] + P[1][1] - 1.0, l, 1e-12);  // trace = 1 + lambda
    }
}

TEST(TheoryReport, ToleranceRelationsWhenDefined) {
  const auto rep = theory_report(SbmParams::make(1e4, -0.5, 2.0, 1), 0.01);
  ASSERT_TRUE(rep.tolerances_defined());
  EXPECT_TRUE(rep.condition1.item1);
  EXPECT_TRUE(rep.condition1.item2d);
  EXPECT_FALSE(rep.condition1.item2a);
  EXPECT_FALSE(rep.condition1.item2b);
  EXPECT_FALSE(rep.condition1.item2c);
  EXPECT_NEAR(*rep.eps1, 0.884, 1e-3);
  EXPECT_GT(*rep.varepsilon0, 0.0);
  EXPECT_NEAR(g(*rep.varepsilon0), rep.g_argument, 1e-12);
  EXPECT_GT(*rep.eps0, 0.0);
}

TEST(TheoryReport, UndefinedBelowFeasibleDegree) {
  const auto rep = theory_report(SbmParams::make(50.0, -0.4, 2.0, 1), 1.0 / std::sqrt(50.0));
  EXPECT_FALSE(rep.condition1.item2d);
  EXPECT_FALSE(rep.tolerances_defined());
  EXPECT_FALSE(rep.condition1.all());
  EXPECT_FALSE(rep.c_d_r_lambda_beta.has_value());
}

TEST(TheoryReport, ConstantSignAlongDegreeSweep) {
  // C(d, r, lambda, 1/sqrt(d)) at lambda=-0.5, r=2 stays positive through
  // d = 1e6 and first turns negative by d = 1e10.
  auto c_at = [](double d) {
    return *theory_report(SbmParams::make(d, -0.5, 2.0, 1), 1.0 / std::sqrt(d)).c_d_r_lambda_beta;
  };
  EXPECT_NEAR(c_at(1e3), 104.7, 0.1);
  EXPECT_NEAR(c_at(1e4), 112.6, 0.1);
  EXPECT_NEAR(c_at(1e5), 191.8, 0.1);
  EXPECT_NEAR(c_at(1e6), 316.2, 0.1);
  EXPECT_LT(c_at(1e10), 0.0);
  EXPECT_LT(c_at(1e12), 0.0);
}

TEST(TheoryReport, RejectsInvalidModel) {
  EXPECT_THROW(theory_report(SbmParams{50.0, -0.5, 3.0, 1}, 0.1), parameter_error);
  EXPECT_THROW(theory_report(SbmParams::make(50.0, 0.2, 2.0, 1), 0.1), unsupported_regime_error);
}
