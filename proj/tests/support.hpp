#pragma once

#include <cmath>
#include <random>

#include "wavecrit/solver.hpp"

namespace wavecrit::testing {

/// Converged default wave, solved once per test binary.
inline const SolveResult& default_wave() {
  static const SolveResult res = solve_critical_wave(ModelParams{});
  return res;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

/// Random parameters with R0 uniform in (r0_lo, r0_hi]; everything else O(1).
inline ModelParams random_params(std::mt19937_64& rng, double r0_lo = 1.05,
                                 double r0_hi = 10.0) {
  std::uniform_real_distribution<double> d(0.5, 2.0), g(0.3, 1.5), r(r0_lo, r0_hi),
      s(0.5, 3.0);
  ModelParams p;
  p.d1 = d(rng);
  p.d2 = d(rng);
  p.d3 = d(rng);
  p.gamma = g(rng);
  p.beta = p.gamma * r(rng);
  p.s_minus_inf = s(rng);
  return p;
}

}  // namespace wavecrit::testing
