#pragma once

#include <stdexcept>
#include <string>

namespace sbm_ising {

/// Argument outside the mathematical domain of a function (g(z) with z<0, ...).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Model parameters that violate an invariant (invalid SbmParams, k out of range, ...).
class parameter_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Closed form requested outside the regime where it is known (lambda >= 0).
class unsupported_regime_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Graph file / label file / curve file that cannot be parsed.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Problem size beyond what an exact method supports.
class capacity_error : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Random construction that cannot be completed (rewire shortfall, empty N_delta).
class construction_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Graph without edges where a positive degree estimate is needed.
class degenerate_graph_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Observed value outside the range covered by a free-energy curve.
class extrapolation_error : public std::runtime_error {
 public:
  extrapolation_error(const std::string& what, double nearest_r)
      : std::runtime_error(what), nearest_r_(nearest_r) {}
  double nearest_endpoint() const noexcept { return nearest_r_; }

 private:
  double nearest_r_;
};

}  // namespace sbm_ising
