// Runs the acceptance suite and prints one line per criterion. Exit status is
// nonzero if any gating criterion fails.

#include <iostream>

#include "sbm_ising/acceptance.hpp"

int main() {
  namespace acc = sbm_ising::acceptance;
  acc::AcceptanceOptions opt;
  opt.threads = sbm_ising::default_threads();
  const auto results = acc::run_acceptance(opt, &std::cout);
  const bool ok = acc::all_passed(results);
  std::size_t passed = 0, gating = 0;
  for (const auto& r : results)
    if (r.gating) {
      ++gating;
      passed += r.passed;
    }
  std::cout << passed << "/" << gating << " criteria passed\n";
  return ok ? 0 : 1;
}
