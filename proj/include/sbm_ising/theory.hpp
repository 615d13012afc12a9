#pragma once

// Closed-form constants of the two-community sparse SBM / Ising analysis and
// the feasibility condition on (d, lambda, r, beta). Everything here is a pure
// function of its arguments.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "errors.hpp"

namespace sbm_ising {

inline constexpr double kLn2 = 0.69314718055994530942;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Upper end of the range of g on [0, 1]: g(1) = 2 ln 2 - 1.
inline constexpr double kGMax = 2.0 * kLn2 - 1.0;

/// (d, lambda, r, n) parameterization of a two-community SBM with equal
/// expected degrees. Community 0 has probability 1/(1+r), community 1 r/(1+r).
struct SbmParams {
  double d = 1.0;
  double lambda = 0.0;
  double r = 1.0;
  std::size_t n = 1;

  /// Builds and validates.
  static SbmParams make(double d, double lambda, double r, std::size_t n) {
    SbmParams p{d, lambda, r, n};
    p.validate();
    return p;
  }

  /// Throws parameter_error naming the first violated invariant.
  void validate() const {
    auto fail = [this](const std::string& why) {
      std::ostringstream os;
      os << "invalid SBM parameters (d=" << d << ", lambda=" << lambda << ", r=" << r
         << ", n=" << n << "): " << why;
      throw parameter_error(os.str());
    };
    if (!std::isfinite(d) || !std::isfinite(lambda) || !std::isfinite(r)) fail("non-finite value");
    if (d < 0.0) fail("d must be nonnegative");
    if (n < 1) fail("n must be at least 1");
    if (r < 1.0) fail("r must be >= 1");
    if (1.0 + r * lambda < 0.0) fail("1 + r*lambda < 0 (alpha_00 would be negative)");
    if (1.0 + lambda / r < 0.0) fail("1 + lambda/r < 0 (alpha_11 would be negative)");
    if (1.0 - lambda < 0.0) fail("1 - lambda < 0 (alpha_01 would be negative)");
  }

  double pi0() const noexcept { return 1.0 / (1.0 + r); }
  double pi1() const noexcept { return r / (1.0 + r); }

  /// alpha_ab; connection probability between communities a and b is alpha_ab / n.
  double alpha(int a, int b) const noexcept {
    if (a == 0 && b == 0) return d * (1.0 + r * lambda);
    if (a == 1 && b == 1) return d * (1.0 + lambda / r);
    return d * (1.0 - lambda);
  }

  double q(int a, int b) const noexcept { return alpha(a, b) / static_cast<double>(n); }

  /// Row-stochastic community transition matrix P; second eigenvalue lambda.
  std::array<std::array<double, 2>, 2> transition() const noexcept {
    const double s = 1.0 + r;
    return {{{(1.0 + r * lambda) / s, r * (1.0 - lambda) / s},
             {(1.0 - lambda) / s, (r + lambda) / s}}};
  }
};

// --- g and its inverse -------------------------------------------------------

/// g(z) = min{ z - (1-z)ln(1-z), (1+z)ln(1+z) - z } on (0,1), 0 at 0,
/// 2ln2 - 1 at 1 and +inf above 1.
inline double g(double z) {
  if (!(z >= 0.0)) throw domain_error("g: argument must be >= 0");
  if (z == 0.0) return 0.0;
  if (z > 1.0) return kInf;
  const double upper = (1.0 + z) * std::log1p(z) - z;
  if (z == 1.0) return upper;
  const double lower = z - (1.0 - z) * std::log1p(-z);
  return std::min(lower, upper);
}

/// Inverse of g on [0, 1] by bisection. g is strictly increasing there.
inline double g_inverse(double v) {
  if (!(v >= 0.0) || v > kGMax) {
    std::ostringstream os;
    os << "g_inverse: value " << v << " outside [0, 2ln2-1]";
    throw domain_error(os.str());
  }
  if (v == 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) < v)
      lo = mid;
    else
      hi = mid;
  }
  return (std::abs(g(lo) - v) <= std::abs(g(hi) - v)) ? lo : hi;
}

// --- C(r, lambda) and its minimizer ------------------------------------------

namespace detail {
inline void require_negative_lambda(double r, double lambda, const char* who) {
  if (!(lambda < 0.0))
    throw unsupported_regime_error(std::string(who) + ": closed form requires lambda < 0");
  if (!(r >= 1.0)) throw parameter_error(std::string(who) + ": r must be >= 1");
}
}  // namespace detail

/// The objective whose infimum over [0,1]^2 defines C(r, lambda).
inline double c_objective(double r, double lambda, double x, double y) noexcept {
  const double a = x - y;
  const double b = x + r * y - 0.5 * (1.0 + r);
  return r * lambda * a * a + b * b + 0.25 * (1.0 + r) * (1.0 + r);
}

/// Branch of C(r, lambda) used when r <= 1 - 2 lambda.
inline double c_r_lambda_inner_branch(double r, double lambda) noexcept {
  return (r * r + 2.0 * r * lambda + 1.0) / 2.0;
}

/// Branch of C(r, lambda) used when r >= 1 - 2 lambda.
inline double c_r_lambda_outer_branch(double r, double lambda) noexcept {
  return (r + 2.0 * lambda) * (1.0 + r) * (1.0 + r) / (4.0 * (r + lambda));
}

/// C(r, lambda) in closed form. Defined as a function of (r, lambda) alone;
/// whether (r, lambda) is a realizable SBM is checked by SbmParams.
inline double c_r_lambda(double r, double lambda) {
  detail::require_negative_lambda(r, lambda, "c_r_lambda");
  return r <= 1.0 - 2.0 * lambda ? c_r_lambda_inner_branch(r, lambda)
                                 : c_r_lambda_outer_branch(r, lambda);
}

inline double y_star(double r, double lambda) {
  detail::require_negative_lambda(r, lambda, "y_star");
  if (!(r + lambda > 0.0)) throw domain_error("y_star: r + lambda must be > 0");
  return std::min((r + 1.0) / (2.0 * (r + lambda)), 1.0);
}

inline constexpr double x_star() noexcept { return 0.0; }

// --- Condition 1 and the derived tolerances ----------------------------------

struct Condition1 {
  bool item1 = false;   // 0 < beta <= 1
  bool item2a = false;
  bool item2b = false;
  bool item2c = false;
  bool item2d = false;  // d large enough that varepsilon0 exists

  bool all() const noexcept { return item1 && item2a && item2b && item2c && item2d; }
};

/// All closed-form constants for (d, lambda, r, beta). The tolerances
/// varepsilon0, eps0, eps1 and C(d,r,lambda,beta) are empty when item 2d of
/// the condition fails (or beta <= 0), since varepsilon0 is then undefined.
struct TheoryReport {
  SbmParams params;
  double beta = 0.0;
  double c_r_lambda = 0.0;
  double x_star = 0.0;
  double y_star = 0.0;
  double g_argument = 0.0;  // 4 ln2 (1+r)^2 / (d C(r,lambda))
  std::optional<double> varepsilon0;
  std::optional<double> eps0;
  std::optional<double> eps1;
  std::optional<double> c_d_r_lambda_beta;
  Condition1 condition1;

  bool tolerances_defined() const noexcept { return varepsilon0.has_value(); }
};

inline TheoryReport theory_report(const SbmParams& params, double beta) {
  params.validate();
  const double d = params.d, lambda = params.lambda, r = params.r;
  TheoryReport rep;
  rep.params = params;
  rep.beta = beta;
  rep.c_r_lambda = c_r_lambda(r, lambda);
  rep.x_star = x_star();
  rep.y_star = y_star(r, lambda);

  const double c = rep.c_r_lambda;
  const double s2 = (1.0 + r) * (1.0 + r);
  rep.g_argument = (d > 0.0 && c > 0.0) ? 4.0 * kLn2 * s2 / (d * c) : kInf;

  rep.condition1.item1 = beta > 0.0 && beta <= 1.0;
  rep.condition1.item2d = c > 0.0 && d > 4.5 * (4.0 * kLn2 * s2 / c);

  if (!rep.condition1.item2d || !(beta > 0.0)) return rep;

  const double ve0 = g_inverse(rep.g_argument);
  const double a = 2.0 * kLn2 / (beta * d) + 2.0 * ve0;
  const double margin = std::min(r - 2.0 * r * lambda - 1.0, -lambda * s2 / (r + lambda));
  const double rr = r * r + r * lambda;
  const double e0 = 2.0 * s2 * a / margin;
  const double denom = std::abs(2.0 * rr * rep.y_star - r * r - r);
  const double first = denom > 0.0 ? s2 * a / denom : kInf;
  const double e1 = std::min(first, std::sqrt(2.0 * s2 * a / rr));

  rep.varepsilon0 = ve0;
  rep.eps0 = e0;
  rep.eps1 = e1;

  rep.condition1.item2a = s2 * a < s2 / 4.0 - c;
  rep.condition1.item2b = e1 < rep.y_star - (r + 1.0) / (2.0 * r);
  rep.condition1.item2c =
      s2 * a <= rr * margin * margin / (8.0 * r * r * (1.0 - lambda) * (1.0 - lambda));

  const double gap = std::min((r - 1.0) * (1.0 - lambda) / (1.0 + r),
                              std::abs(lambda) * s2 / (4.0 * (r + lambda)));
  rep.c_d_r_lambda_beta =
      -beta * d / s2 * (gap - (2.0 * beta + kLn2 / (beta * d) + 12.0 * std::max(e0, e1)));
  return rep;
}

}  // namespace sbm_ising
