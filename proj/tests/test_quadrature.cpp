#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "support.hpp"
#include "wavecrit/quadrature.hpp"

using namespace wavecrit;
using wavecrit::testing::rel_err;
using boost::math::quadrature::gauss_kronrod;

namespace {

// h - 1 + e^{-h} for h = 0.1, 40 digits.
constexpr double kCellIntegral = 0.004837418035959573164;

double gk(const auto& f, double a, double b) {
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

}  // namespace

TEST_CASE("single-cell product integration is exact for linear data") {
  const double h = 0.1;
  // int_0^h e^{-(h - y)} y dy: data 0 at the left node, h at the right node.
  const double oracle = gk([&](double y) { return std::exp(-(h - y)) * y; }, 0.0, h);
  CHECK(rel_err(oracle, kCellIntegral) < 1e-13);

  std::vector<double> g = {0.0, h}, out(2);
  exp_sweep_left(g, 1.0, h, 0.0, out);
  CHECK(rel_err(out[1], kCellIntegral) < 1e-13);

  // Tiny rates go through the series branch.
  for (double rate : {1e-9, 1e-3, 0.05, 0.5, 3.0, 40.0}) {
    const auto w = exp_cell_weights(rate, h);
    const double near = gk([&](double y) { return std::exp(-rate * (h - y)) * y / h; }, 0.0, h);
    const double far =
        gk([&](double y) { return std::exp(-rate * (h - y)) * (h - y) / h; }, 0.0, h);
    CHECK(rel_err(w.decay, std::exp(-rate * h)) < 1e-15);
    CHECK(rel_err(w.near, near) < 1e-12);
    CHECK(rel_err(w.far, far) < 1e-12);
  }
}

TEST_CASE("sweeps against adaptive quadrature on smooth data") {
  const double a = -10.0, b = 10.0;
  const std::size_t n = 2001;
  const double h = (b - a) / (n - 1);
  auto f = [](double y) { return std::exp(-0.1 * y * y) * (2 + std::sin(y)); };
  std::vector<double> g(n), left(n), right(n), cum(n);
  for (std::size_t j = 0; j < n; ++j) g[j] = f(a + j * h);
  const double rate_l = 1.3, rate_r = 2.7;
  exp_sweep_left(g, rate_l, h, 0.0, left);
  exp_sweep_right(g, rate_r, h, 0.0, right);
  cumulative_trapezoid(g, h, 0.0, cum);
  for (std::size_t j : {std::size_t(0), std::size_t(400), std::size_t(1000), std::size_t(1700),
                        n - 1}) {
    const double x = a + j * h;
    const double l = j == 0 ? 0.0 : gk([&](double y) { return std::exp(-rate_l * (x - y)) * f(y); }, a, x);
    const double r =
        j == n - 1 ? 0.0 : gk([&](double y) { return std::exp(-rate_r * (y - x)) * f(y); }, x, b);
    const double c = j == 0 ? 0.0 : gk(f, a, x);
    CHECK(std::abs(left[j] - l) < 1e-5);
    CHECK(std::abs(right[j] - r) < 1e-5);
    CHECK(std::abs(cum[j] - c) < 1e-4);
  }
}

TEST_CASE("sweep error is second order in h") {
  auto f = [](double y) { return std::exp(-0.2 * y * y) * std::cos(y); };
  const double a = -8, b = 8, rate = 2.0;
  auto error = [&](std::size_t n) {
    const double h = (b - a) / (n - 1);
    std::vector<double> g(n), out(n);
    for (std::size_t j = 0; j < n; ++j) g[j] = f(a + j * h);
    exp_sweep_left(g, rate, h, 0.0, out);
    const double x = a + (n - 1) / 2 * h;  // xi = 0
    const double exact = gk([&](double y) { return std::exp(-rate * (x - y)) * f(y); }, a, x);
    return std::abs(out[(n - 1) / 2] - exact);
  };
  const double e1 = error(161), e2 = error(321);
  CHECK(e1 / e2 > 3.5);
}

TEST_CASE("heads and tails enter with the kernel decay") {
  std::vector<double> zero(5, 0.0), out(5);
  const double h = 0.5, rate = 2.0;
  exp_sweep_left(zero, rate, h, 3.0, out);
  for (std::size_t j = 0; j < 5; ++j)
    CHECK(out[j] == doctest::Approx(3.0 * std::exp(-rate * h * j)).epsilon(1e-14));
  exp_sweep_right(zero, rate, h, 3.0, out);
  for (std::size_t j = 0; j < 5; ++j)
    CHECK(out[j] == doctest::Approx(3.0 * std::exp(-rate * h * (4 - j))).epsilon(1e-14));
}
