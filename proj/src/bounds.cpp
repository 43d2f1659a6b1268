#include "wavecrit/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "wavecrit/errors.hpp"

namespace wavecrit {

namespace {

// Condition on eps coming from the S_low inequality: for xi <= xi2,
// beta l1 (-xi) e^{(lambda* - eps) xi} <= safety S_-inf (c* - d1 eps).
bool eps_admissible(const SpectralData& spec, double l1, double eps,
                    double safety) {
  const double lam = spec.lambda_star;
  const double d1 = spec.params.d1;
  if (!(eps > 0.0) || eps >= std::min(spec.c_star / d1, lam)) return false;
  const double xi2 = std::log(eps) / eps;
  if (!(xi2 < -1.0 / lam)) return false;
  const double rate = lam - eps;
  const double peak = -1.0 / rate;
  const double at = std::min(xi2, peak);
  const double sup = spec.params.beta * l1 * (-at) * std::exp(rate * at);
  return sup <= safety * spec.params.s_minus_inf * (spec.c_star - d1 * eps);
}

// Condition on l2 from the I_low inequality, using S_low(xi) >= S_low(xi3)
// on xi <= xi3 and the exact sup of 4 beta l1^2 (-xi)^{7/2} e^{lambda* xi}.
bool l2_admissible(const SpectralData& spec, double l1, double eps,
                   double l2) {
  const double lam = spec.lambda_star;
  const double xi3 = -(l2 / l1) * (l2 / l1);
  const double s_low3 =
      spec.params.s_minus_inf * (1.0 - std::exp(eps * xi3) / eps);
  if (!(s_low3 > 0.0)) return false;
  const double at = std::min(xi3, -3.5 / lam);
  const double sup = 4.0 * spec.params.beta * l1 * l1 *
                     std::pow(-at, 3.5) * std::exp(lam * at);
  return spec.params.d2 * l2 * s_low3 >= sup;
}

}  // namespace

BoundSet make_bound_set(const SpectralData& spec, double eps, double l2) {
  BoundSet bs;
  bs.s_minus_inf = spec.params.s_minus_inf;
  bs.lambda_star = spec.lambda_star;
  bs.m = spec.params.plateau();
  bs.l1 = std::numbers::e * bs.m * spec.lambda_star;
  bs.eps = eps;
  bs.l2 = l2;
  bs.xi1 = -1.0 / spec.lambda_star;
  bs.xi2 = std::log(eps) / eps;
  bs.xi3 = -(l2 / bs.l1) * (l2 / bs.l1);

  std::ostringstream msg;
  if (!(eps > 0.0) || eps >= std::min(spec.c_star / spec.params.d1,
                                      spec.lambda_star)) {
    msg << "eps = " << eps << " outside (0, min(c*/d1, lambda*))";
  } else if (!(bs.xi2 < bs.xi1)) {
    msg << "xi2 = " << bs.xi2 << " must lie left of xi1 = " << bs.xi1;
  } else if (!(bs.xi3 < bs.xi2)) {
    msg << "l2 = " << l2 << " too small: xi3 = " << bs.xi3
        << " must lie left of xi2 = " << bs.xi2;
  }
  if (!msg.str().empty()) throw InvalidArgument(msg.str());
  return bs;
}

double i_bar(const BoundSet& bs, double xi) {
  if (xi > bs.xi1) return bs.m;
  return -bs.l1 * xi * std::exp(bs.lambda_star * xi);
}

double s_low(const BoundSet& bs, double xi) {
  if (xi >= bs.xi2) return 0.0;
  return std::max(bs.s_minus_inf * (1.0 - std::exp(bs.eps * xi) / bs.eps),
                  0.0);
}

double i_low(const BoundSet& bs, double xi) {
  if (xi >= bs.xi3) return 0.0;
  const double u = -xi;
  const double q = bs.l1 * u - bs.l2 * std::sqrt(u);
  return std::max(q * std::exp(bs.lambda_star * xi), 0.0);
}

ProfileValues eval_profiles(const BoundSet& bs, double xi) {
  return {bs.s_minus_inf, i_bar(bs, xi), s_low(bs, xi), i_low(bs, xi)};
}

Jet i_bar_jet(const BoundSet& bs, double xi) {
  if (xi > bs.xi1) return {bs.m, 0.0, 0.0};
  const double lam = bs.lambda_star;
  const double e = std::exp(lam * xi);
  const double q = -bs.l1 * xi;
  const double qp = -bs.l1;
  return {q * e, (qp + lam * q) * e, (2.0 * lam * qp + lam * lam * q) * e};
}

Jet s_low_jet(const BoundSet& bs, double xi) {
  if (xi >= bs.xi2) return {0.0, 0.0, 0.0};
  const double e = std::exp(bs.eps * xi);
  return {bs.s_minus_inf * (1.0 - e / bs.eps), -bs.s_minus_inf * e,
          -bs.s_minus_inf * bs.eps * e};
}

Jet i_low_jet(const BoundSet& bs, double xi) {
  if (xi >= bs.xi3) return {0.0, 0.0, 0.0};
  const double lam = bs.lambda_star;
  const double u = -xi;
  const double root = std::sqrt(u);
  const double e = std::exp(lam * xi);
  const double q = bs.l1 * u - bs.l2 * root;
  const double qp = -bs.l1 + bs.l2 / (2.0 * root);
  const double qpp = 0.25 * bs.l2 / (u * root);
  return {q * e, (qp + lam * q) * e,
          (qpp + 2.0 * lam * qp + lam * lam * q) * e};
}

double g_function(const BoundSet& bs, double beta, double xi) {
  if (xi >= 0.0) return 0.0;
  return beta * bs.l1 * bs.l1 * std::pow(-xi, 3.5) *
         std::exp(bs.lambda_star * xi);
}

double g_max(const BoundSet& bs, double beta) {
  const double arg = 3.5 / bs.lambda_star;
  return beta * bs.l1 * bs.l1 * std::pow(arg, 3.5) * std::exp(-3.5);
}

BoundSet select_constants(const SpectralData& spec,
                          const SelectOptions& options) {
  const double m = spec.params.plateau();
  const double l1 = std::numbers::e * m * spec.lambda_star;
  if (!(m > 0.0)) {
    throw InvalidRegime("select_constants requires R0 > 1");
  }

  const double cap = std::min(spec.c_star / spec.params.d1, spec.lambda_star);
  double good = 0.5 * cap;
  double bad = cap;
  int step = 0;
  while (!eps_admissible(spec, l1, good, options.safety)) {
    bad = good;
    good *= 0.5;
    if (++step > options.max_steps) {
      std::ostringstream msg;
      msg << "no admissible eps found after " << options.max_steps
          << " halvings (last candidate " << good << ")";
      throw ConsistencyError(msg.str());
    }
  }
  for (int k = 0; k < options.bisection_steps; ++k) {
    const double mid = 0.5 * (good + bad);
    if (eps_admissible(spec, l1, mid, options.safety)) {
      good = mid;
    } else {
      bad = mid;
    }
  }
  const double eps = good;

  const double xi2 = std::log(eps) / eps;
  double l2 = 1.05 * l1 * std::sqrt(-xi2);
  step = 0;
  while (!l2_admissible(spec, l1, eps, l2)) {
    l2 *= 2.0;
    if (++step > options.max_steps) {
      std::ostringstream msg;
      msg << "no admissible L2 found after " << options.max_steps
          << " doublings (eps = " << eps << ")";
      throw ConsistencyError(msg.str());
    }
  }
  return make_bound_set(spec, eps, l2);
}

std::vector<double> certification_grid(const BoundSet& bs, int n) {
  if (n < 8 || n % 4 != 0) {
    throw InvalidArgument("certification grid size must be a multiple of 4");
  }
  const int block = n / 4;
  std::vector<double> grid;
  grid.reserve(n);

  const double left = 10.0 * std::min(bs.xi2, bs.xi3);
  const double right = 50.0;
  for (int k = 0; k < block; ++k) {
    grid.push_back(left + (right - left) * k / (block - 1));
  }

  const int side = block / 2;
  const double lo = std::log(1e-9);
  const double hi = std::log(10.0);
  for (double kink : {bs.xi1, bs.xi2, bs.xi3}) {
    for (int k = 0; k < side; ++k) {
      const double off = std::exp(lo + (hi - lo) * k / (side - 1));
      grid.push_back(kink - off);
      grid.push_back(kink + off);
    }
  }
  const auto is_kink = [&](double x) {
    return x == bs.xi1 || x == bs.xi2 || x == bs.xi3;
  };
  for (double& x : grid) {
    if (is_kink(x)) x = std::nextafter(x, -std::numeric_limits<double>::infinity());
  }
  std::sort(grid.begin(), grid.end());
  return grid;
}

CertReport certify_inequalities(const BoundSet& bs, const SpectralData& spec,
                                const std::vector<double>& grid) {
  const ModelParams& p = spec.params;
  const double c = spec.c_star;
  const double smi = bs.s_minus_inf;

  InequalityResult sup_i{"super_I"};
  InequalityResult sub_s{"sub_S"};
  InequalityResult sub_i{"sub_I"};
  for (InequalityResult* r : {&sup_i, &sub_s, &sub_i}) {
    r->worst_margin = std::numeric_limits<double>::infinity();
    r->worst_scaled = std::numeric_limits<double>::infinity();
    r->tolerance = kCertTolerance;
  }

  const auto record = [](InequalityResult& r, double xi, double margin,
                         double scale) {
    ++r.samples;
    const double scaled = scale > 0.0 ? margin / scale : 0.0;
    if (scaled < r.worst_scaled) {
      r.worst_scaled = scaled;
      r.worst_margin = margin;
      r.worst_xi = xi;
    }
  };

  for (double xi : grid) {
    if (xi == bs.xi1 || xi == bs.xi2 || xi == bs.xi3) continue;

    // c* I_bar' >= d2 I_bar'' + beta S I_bar / (S + I_bar) - gamma I_bar
    {
      const Jet ib = i_bar_jet(bs, xi);
      const double f = detail::incidence(smi, ib.v, p.beta, spec.guard);
      const double lhs = c * ib.d1;
      const double rhs = p.d2 * ib.d2 + f - p.gamma * ib.v;
      const double scale = std::abs(lhs) + std::abs(p.d2 * ib.d2) +
                           std::abs(f) + std::abs(p.gamma * ib.v);
      record(sup_i, xi, lhs - rhs, scale);
    }
    // -beta I_bar >= -d1 S_low'' + c* S_low'   (xi < xi2)
    if (xi < bs.xi2) {
      const double ib = i_bar(bs, xi);
      const Jet sl = s_low_jet(bs, xi);
      const double lhs = -p.beta * ib;
      const double rhs = -p.d1 * sl.d2 + c * sl.d1;
      const double scale =
          std::abs(lhs) + std::abs(p.d1 * sl.d2) + std::abs(c * sl.d1);
      record(sub_s, xi, lhs - rhs, scale);
    }
    // beta S_low I_low / (S_low + I_low) - gamma I_low >= -d2 I_low'' + c* I_low'
    if (xi < bs.xi3) {
      const Jet sl = s_low_jet(bs, xi);
      const Jet il = i_low_jet(bs, xi);
      const double f = detail::incidence(sl.v, il.v, p.beta, spec.guard);
      const double lhs = f - p.gamma * il.v;
      const double rhs = -p.d2 * il.d2 + c * il.d1;
      const double scale = std::abs(f) + std::abs(p.gamma * il.v) +
                           std::abs(p.d2 * il.d2) + std::abs(c * il.d1);
      record(sub_i, xi, lhs - rhs, scale);
    }
  }

  CertReport report;
  report.grid_points = static_cast<int>(grid.size());
  for (InequalityResult* r : {&sup_i, &sub_s, &sub_i}) {
    if (r->samples == 0) {
      r->worst_margin = 0.0;
      r->worst_scaled = 0.0;
    }
    r->pass = r->worst_scaled >= -r->tolerance;
    report.pass = report.pass && r->pass;
    report.inequalities.push_back(*r);
  }
  return report;
}

}  // namespace wavecrit
