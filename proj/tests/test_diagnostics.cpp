#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "wavecrit/diagnostics.hpp"

using namespace wavecrit;
using wavecrit::testing::default_wave;
using wavecrit::testing::rel_err;

namespace {

const Check& find(const WaveReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c;
  FAIL("no check named " << name);
  return r.checks.front();
}

WaveProfile flat_profile(double s, double i, double lo = -20, double hi = 20,
                         std::size_t n = 401) {
  WaveGrid g{lo, hi, n};
  WaveProfile p{g, std::vector<double>(n, s), std::vector<double>(n, i), s};
  return p;
}

}  // namespace

TEST_CASE("reference wave passes every check") {
  const auto& res = default_wave();
  const auto rep = diagnose(res.profile, res.spectral, res.bounds);
  for (const auto& c : rep.checks) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.pass);
  }
  CHECK(rep.pass);
  CHECK(rep.checks.size() == 7);
  CHECK(rep.s_infinity < 1e-6);
  // int I = c S_-inf / gamma = 2 when S_inf = 0.
  CHECK(rel_err(rep.wave_mass, 2.0) < 1e-4);
  CHECK(rep.i_max < rep.i_bound_m);
  CHECK(rep.i_max < rep.i_bound_p);
  CHECK(std::abs(rep.tail_slope / res.spectral.lambda_star - 1) < 0.02);
  CHECK(rep.ode_residual < 1e-4);
}

TEST_CASE("peak bound for the reference parameters") {
  // b = (c + sqrt(c^2 + 4 d2 gamma)) / 2 = (2 + sqrt 8) / 2, and the bound
  // is c S_-inf / b = 2 (sqrt 2 - 1) when S_inf = 0.
  const double b = (2 + std::sqrt(8.0)) / 2;
  CHECK(b == doctest::Approx(2.414213562373095).epsilon(1e-15));
  CHECK(peak_bound(ModelParams{}, 2.0, 0.0) ==
        doctest::Approx(0.8284271247461900976).epsilon(1e-14));
  CHECK(peak_bound(ModelParams{}, 2.0, 0.0) == doctest::Approx(2.0 / b).epsilon(1e-14));
}

TEST_CASE("peak bound equals kappa times the wave mass") {
  // kappa = (sqrt(c^2 + 4 d2 gamma) - c) / (2 d2) after rationalizing, and
  // int I = c (S_-inf - S_inf) / gamma.
  std::mt19937_64 rng(7);
  for (int k = 0; k < 50; ++k) {
    const ModelParams p = wavecrit::testing::random_params(rng);
    const double c = 2 * std::sqrt(p.d2 * (p.beta - p.gamma));
    const double s_inf = 0.3 * p.s_minus_inf;
    const double kappa = (std::sqrt(c * c + 4 * p.d2 * p.gamma) - c) / (2 * p.d2);
    const double mass = c * (p.s_minus_inf - s_inf) / p.gamma;
    CHECK(rel_err(peak_bound(p, c, s_inf), kappa * mass) < 1e-12);
  }
}

TEST_CASE("right decay rate solves the linearized I equation") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    const ModelParams p = wavecrit::testing::random_params(rng);
    const double c = 2 * std::sqrt(p.d2 * (p.beta - p.gamma));
    const double nu = detail::right_decay_i(p, c);
    CHECK(nu > 0);
    // I = e^{-nu xi}: d2 nu^2 + c nu - gamma = 0.
    CHECK(std::abs(p.d2 * nu * nu + c * nu - p.gamma) < 1e-12 * (c * nu + p.gamma));
  }
}

TEST_CASE("left tail mass matches quadrature") {
  boost::math::quadrature::exp_sinh<double> q;
  for (double i0 : {0.0, 1e-20, 3e-5}) {
    for (double xi0 : {-60.0, -25.0, -8.0}) {
      for (double lam : {0.5, 1.0, 2.2}) {
        const double l1 = 2.7;
        const double e0 = std::exp(lam * xi0);
        const double ref = q.integrate([&](double t) {
          return (i0 + l1 * t * e0) * std::exp(-lam * t);
        });
        const double got = detail::left_tail_mass(i0, xi0, l1, lam);
        if (ref == 0) {
          CHECK(got == 0);
        } else {
          CHECK(rel_err(got, ref) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("ode residual stencil") {
  ModelParams par;
  const double c = 2.0;
  // With I = 0, S = 1 - 0.1 e^{c xi / d1} solves d1 S'' - c S' = 0.
  WaveProfile p = flat_profile(1.0, 0.0, -8, 0, 1601);
  for (std::size_t j = 0; j < p.grid.n; ++j)
    p.s[j] = 1.0 - 0.1 * std::exp(c * p.grid.node(j) / par.d1);
  CHECK(ode_residual(p, par, c) < 1e-10);

  // S = xi^2 / 100 + 1: residual |2 d1 - 2 c xi| / 100, largest at the left.
  for (std::size_t j = 0; j < p.grid.n; ++j) {
    const double xi = p.grid.node(j);
    p.s[j] = 1.0 + xi * xi / 100;
  }
  const double xi_far = p.grid.node(2);
  const double expect = (2 * par.d1 - 2 * c * xi_far) / 100 / (par.beta * par.s_minus_inf);
  CHECK(ode_residual(p, par, c) == doctest::Approx(expect).epsilon(1e-9));

  CHECK_THROWS_AS(ode_residual(flat_profile(1, 0, 0, 1, 4), par, c), InvalidArgument);
}

TEST_CASE("reconstructed S' agrees with differences of the profile") {
  const auto& res = default_wave();
  const auto& p = res.profile;
  const auto sp = reconstruct_s_prime(p, res.spectral.params, res.spectral.c_star);
  const double h = p.grid.h();
  double worst = 0;
  for (std::size_t j = 1; j + 1 < p.grid.n; ++j)
    worst = std::max(worst, std::abs((p.s[j + 1] - p.s[j - 1]) / (2 * h) - sp[j]));
  CHECK(worst < 1e-4);
  CHECK(*std::max_element(sp.begin(), sp.end()) <= 0.0);
}

TEST_CASE("a bump in S breaks monotonicity and the ODE") {
  const auto& res = default_wave();
  WaveProfile p = res.profile;
  for (std::size_t j = 0; j < p.grid.n; ++j) {
    const double xi = p.grid.node(j);
    p.s[j] += 1e-3 * std::exp(-(xi + 15) * (xi + 15));
  }
  const auto rep = diagnose(p, res.spectral, res.bounds);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(find(rep, "monotone_positive").pass);
  CHECK_FALSE(find(rep, "ode_residual").pass);
  CHECK(find(rep, "monotone_positive").detail.find("S increases") != std::string::npos);
}

TEST_CASE("equality with M is reported as a failure") {
  const auto& res = default_wave();
  WaveProfile p = res.profile;
  const auto top = std::max_element(p.i.begin(), p.i.end());
  *top = res.spectral.params.plateau();
  const Check c = check_upper_bounds(p, res.spectral, res.spectral.c_star);
  CHECK_FALSE(c.pass);
  CHECK(c.detail.find("exceedance") != std::string::npos);
}

TEST_CASE("disease-free state") {
  const auto& res = default_wave();
  const WaveProfile p = flat_profile(1.0, 0.0);
  CHECK(ode_residual(p, res.spectral.params, 2.0) == 0.0);
  const Check mono = check_monotone_positive(p, res.spectral);
  CHECK_FALSE(mono.pass);
  // Only the asymptotic head left of the grid contributes to the chain.
  const MassChain m = mass_chain(p, res.spectral, 1.0);
  const double head = detail::left_tail_mass(0.0, -20.0, std::exp(1.0), 1.0);
  CHECK(m.mass == doctest::Approx(head).epsilon(1e-14));
  CHECK(m.middle == doctest::Approx(2 * head).epsilon(1e-14));
  CHECK(m.rhs == 0.0);
  const auto sp = reconstruct_s_prime(p, res.spectral.params, 2.0);
  CHECK(std::all_of(sp.begin(), sp.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("S_inf estimate does not depend on the averaging window") {
  const auto& res = default_wave();
  const double smi = res.spectral.params.s_minus_inf;
  const auto a = estimate_s_infinity(res.profile, smi, 5);
  const auto b = estimate_s_infinity(res.profile, smi, 20);
  CHECK(std::abs(a.value - b.value) < 1e-6 * smi);
  CHECK(a.plateau);
}

TEST_CASE("tail slope is stable under shifts of the fit window") {
  const auto& res = default_wave();
  const double lo = res.profile.grid.xi_min + kTolerances.tail_margin;
  const double hi = res.bounds.xi3 - kTolerances.tail_margin;
  const double base = tail_slope(res.profile, lo, hi);
  for (double shift : {-3.0, 3.0}) {
    const double moved = tail_slope(res.profile, lo + shift, hi + shift);
    CHECK(std::abs(moved / base - 1) < 0.01);
  }
  CHECK(std::isnan(tail_slope(res.profile, 10, 11)));
}

TEST_CASE("P is nondecreasing and reaches the peak bound") {
  const auto& res = default_wave();
  const auto pf = p_function(res.profile, res.spectral, res.spectral.c_star);
  CHECK(pf.front() < 1e-6);
  const double top = *std::max_element(pf.begin(), pf.end());
  for (std::size_t j = 1; j < pf.size(); ++j)
    CHECK(pf[j] >= pf[j - 1] - kTolerances.p_monotone_rel * top);
  CHECK(rel_err(pf.back(), peak_bound(res.spectral.params, 2.0, 0.0)) < 1e-3);
}

TEST_CASE("shape errors") {
  const auto& res = default_wave();
  WaveProfile p = res.profile;
  p.i.pop_back();
  CHECK_THROWS_AS(diagnose(p, res.spectral, res.bounds), GridMismatch);
  CHECK_THROWS_AS(p_function(p, res.spectral, 2.0), GridMismatch);
}

TEST_CASE("generic supercritical parameters") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 3; ++k) {
    const ModelParams p = wavecrit::testing::random_params(rng);
    CAPTURE(k);
    const auto res = solve_critical_wave(p);
    const auto rep = diagnose(res.profile, res.spectral, res.bounds);
    for (const auto& c : rep.checks) {
      INFO(c.name << ": " << c.detail);
      CHECK(c.pass);
    }
  }
}
