#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "wavecrit/errors.hpp"
#include "wavecrit/model.hpp"

using namespace wavecrit;
using wavecrit::testing::random_params;
using Big = boost::multiprecision::cpp_bin_float_50;

TEST_CASE("spectral constants for the reference parameters") {
  const auto s = derive_spectral(ModelParams{});
  CHECK(s.r0 == 2.0);
  CHECK(s.c_star == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s.lambda_star == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.beta1 == 4.0);
  CHECK(s.beta2 == 3.0);
  CHECK(std::abs(s.lambda1_plus - (1 + std::sqrt(5.0))) < 1e-12);
  CHECK(std::abs(s.lambda1_minus - (1 - std::sqrt(5.0))) < 1e-12);
  CHECK(std::abs(s.lambda2_plus - 3.0) < 1e-12);
  CHECK(std::abs(s.lambda2_minus + 1.0) < 1e-12);
  CHECK(std::abs(s.big_lambda1 - std::sqrt(20.0)) < 1e-12);
  CHECK(std::abs(s.big_lambda2 - 4.0) < 1e-12);
  CHECK(s.mu == doctest::Approx(0.5));
  CHECK(s.guard == doctest::Approx(1e-14));
}

TEST_CASE("subthreshold and invalid shifts are rejected") {
  ModelParams p;
  p.beta = 0.9;
  CHECK_THROWS_AS(derive_spectral(p), InvalidRegime);
  p.beta = 1.0;
  CHECK_THROWS_AS(critical_speed(p), InvalidRegime);
  try {
    derive_spectral(p);
  } catch (const InvalidRegime& e) {
    CHECK(std::string(e.what()).find("R0") != std::string::npos);
  }

  SpectralOptions o;
  o.beta1 = 2.0;  // equal to beta
  CHECK_THROWS_AS(derive_spectral(ModelParams{}, o), InvalidArgument);
  o = {};
  o.beta2 = 1.0;  // equal to gamma
  CHECK_THROWS_AS(derive_spectral(ModelParams{}, o), InvalidArgument);
  o = {};
  o.mu = 1.0;  // min(-lambda1-, -lambda2-) = 1
  CHECK_THROWS_AS(derive_spectral(ModelParams{}, o), InvalidArgument);
  o.mu = 0.2;
  CHECK(derive_spectral(ModelParams{}, o).mu == 0.2);

  ModelParams bad;
  bad.d2 = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = {};
  bad.gamma = std::nan("");
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("kernel roots satisfy their quadratics for random parameters") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 200; ++k) {
    const auto p = random_params(rng);
    const auto s = derive_spectral(p);
    const double c = s.c_star;
    CHECK(c * c == doctest::Approx(4 * p.d2 * (p.beta - p.gamma)).epsilon(1e-12));
    CHECK(s.lambda_star == doctest::Approx(c / (2 * p.d2)).epsilon(1e-12));
    auto q = [&](double d, double l, double b) { return d * l * l - c * l - b; };
    CHECK(std::abs(q(p.d1, s.lambda1_plus, s.beta1)) < 1e-12 * s.beta1);
    CHECK(std::abs(q(p.d1, s.lambda1_minus, s.beta1)) < 1e-12 * s.beta1);
    CHECK(std::abs(q(p.d2, s.lambda2_plus, s.beta2)) < 1e-12 * s.beta2);
    CHECK(std::abs(q(p.d2, s.lambda2_minus, s.beta2)) < 1e-12 * s.beta2);
    CHECK(s.lambda1_minus < 0);
    CHECK(s.lambda2_minus < 0);
    CHECK(s.big_lambda1 ==
          doctest::Approx(std::sqrt(c * c + 4 * p.d1 * s.beta1)).epsilon(1e-12));
    CHECK(s.big_lambda2 ==
          doctest::Approx(std::sqrt(c * c + 4 * p.d2 * s.beta2)).epsilon(1e-12));
    CHECK(s.mu > 0);
    CHECK(s.mu < std::min(-s.lambda1_minus, -s.lambda2_minus));
    // Double root at the critical speed: the characteristic polynomial
    // touches zero at lambda* and is nonnegative elsewhere.
    CHECK(std::abs(characteristic(s.lambda_star, c, p)) < 1e-12 * p.beta);
    for (double l = -5; l <= 5; l += 0.25) CHECK(characteristic(l, c, p) >= -1e-12 * p.beta);
  }
}

TEST_CASE("infection force values and guard") {
  CHECK(infection_force(0.0, 0.5, 2.0, 1e-14) == 0.0);
  CHECK(infection_force(0.5, 0.0, 2.0, 1e-14) == 0.0);
  CHECK(infection_force(1.0, 1.0, 2.0, 1e-14) == 1.0);
  CHECK(infection_force(1e-15, 1e-16, 2.0, 1e-14) == 0.0);
  CHECK_THROWS_AS(infection_force(-1e-3, 1.0, 2.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(infection_force(1.0, -1e-3, 2.0, 0.0), InvalidArgument);

  // Subnormal-scale infection: compare with a 50-digit evaluation.
  const double got = infection_force(1.0, 1e-300, 2.0, 1e-300);
  const Big exact = Big(2) * Big(1) * Big("1e-300") / (Big(1) + Big("1e-300"));
  CHECK(std::isfinite(got));
  CHECK(std::abs(got) < 1e-299);
  CHECK(boost::multiprecision::abs(Big(got) - exact) / exact < Big("1e-15"));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int k = 0; k < 1000; ++k) {
    const double s = u(rng), i = u(rng);
    CHECK(infection_force(s, i, 2.0, 1e-14) <= 2.0 * std::min(s, i) * (1 + 1e-15));
  }
}

TEST_CASE("h functions and their monotonicity") {
  const auto s = derive_spectral(ModelParams{});
  auto h = h_funcs(1.0, 0.0, s);
  CHECK(h.h1 == 4.0);
  CHECK(h.h2 == 0.0);
  h = h_funcs(1.0, 1.0, s);
  CHECK(h.h1 == doctest::Approx(3.0));
  CHECK(h.h2 == doctest::Approx(3.0));
  CHECK(h_funcs(2.0, 1.0, s).h2 > h_funcs(1.0, 1.0, s).h2);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1e-3, 10.0);
  const double d = 1e-6;
  for (int k = 0; k < 1000; ++k) {
    const double a = u(rng), b = u(rng);
    const auto base = h_funcs(a, b, s);
    const auto ds = h_funcs(a + d, b, s);
    const auto di = h_funcs(a, b + d, s);
    const double slack = 1e-12;
    CHECK(ds.h1 >= base.h1 - slack);
    CHECK(di.h1 <= base.h1 + slack);
    CHECK(ds.h2 >= base.h2 - slack);
    CHECK(di.h2 >= base.h2 - slack);
    CHECK(base.h1 >= 0);
    CHECK(base.h2 >= 0);
  }
}
