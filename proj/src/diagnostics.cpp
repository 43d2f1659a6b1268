#include "wavecrit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "wavecrit/errors.hpp"
#include "wavecrit/quadrature.hpp"

namespace wavecrit {

namespace detail {

double left_tail_mass(double i0, double xi0, double l1, double lambda) {
  return i0 / lambda + l1 * std::exp(lambda * xi0) / (lambda * lambda);
}

double right_decay_i(const ModelParams& params, double c) {
  return (std::sqrt(c * c + 4.0 * params.d2 * params.gamma) - c) /
         (2.0 * params.d2);
}

}  // namespace detail

namespace {

void check_shape(const WaveProfile& p) {
  p.grid.validate();
  if (p.s.size() != p.grid.n || p.i.size() != p.grid.n) {
    throw GridMismatch("profile arrays do not match the grid size");
  }
}

std::vector<double> incidence(const WaveProfile& p, const ModelParams& params,
                              double guard) {
  std::vector<double> f(p.grid.n);
  for (std::size_t j = 0; j < p.grid.n; ++j) {
    f[j] = detail::incidence(std::max(p.s[j], 0.0), std::max(p.i[j], 0.0),
                             params.beta, guard);
  }
  return f;
}

double trapezoid(const std::vector<double>& g, double h) {
  double sum = 0.0;
  for (std::size_t j = 1; j < g.size(); ++j) sum += 0.5 * h * (g[j] + g[j - 1]);
  return sum;
}

double l1_of(const SpectralData& spec) {
  return std::numbers::e * spec.params.plateau() * spec.lambda_star;
}

double rel_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

// Centred first derivative, one-sided second order at the ends.
std::vector<double> derivative(const std::vector<double>& u, double h) {
  const std::size_t n = u.size();
  std::vector<double> d(n);
  for (std::size_t j = 1; j + 1 < n; ++j) d[j] = (u[j + 1] - u[j - 1]) / (2 * h);
  d[0] = (-3 * u[0] + 4 * u[1] - u[2]) / (2 * h);
  d[n - 1] = (3 * u[n - 1] - 4 * u[n - 2] + u[n - 3]) / (2 * h);
  return d;
}

}  // namespace

SInfinity estimate_s_infinity(const WaveProfile& p, double s_minus_inf,
                              int nodes) {
  check_shape(p);
  const std::size_t n = p.grid.n;
  const std::size_t k = std::clamp<std::size_t>(nodes, 1, n);
  SInfinity out;
  double sum = 0.0;
  for (std::size_t j = n - k; j < n; ++j) sum += p.s[j];
  out.value = sum / static_cast<double>(k);

  const std::size_t m = std::min<std::size_t>(kTolerances.drift_nodes, n);
  double xm = 0.0, ym = 0.0;
  for (std::size_t j = n - m; j < n; ++j) {
    xm += p.grid.node(j);
    ym += p.s[j];
  }
  xm /= static_cast<double>(m);
  ym /= static_cast<double>(m);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t j = n - m; j < n; ++j) {
    const double dx = p.grid.node(j) - xm;
    sxy += dx * (p.s[j] - ym);
    sxx += dx * dx;
  }
  out.drift = sxx > 0.0 ? sxy / sxx : 0.0;
  out.plateau = std::abs(out.drift) < kTolerances.plateau_drift * s_minus_inf;
  return out;
}

std::vector<double> reconstruct_s_prime(const WaveProfile& p,
                                        const ModelParams& params, double c) {
  check_shape(p);
  std::vector<double> g = incidence(p, params, kGuardRelative * params.s_minus_inf);
  for (double& v : g) v /= params.d1;
  std::vector<double> out(p.grid.n);
  exp_sweep_right(g, c / params.d1, p.grid.h(), 0.0, out);
  for (double& v : out) v = -v;
  return out;
}

Check check_monotone_positive(const WaveProfile& p, const SpectralData& spec) {
  check_shape(p);
  const ModelParams& par = spec.params;
  const std::size_t n = p.grid.n;
  const std::vector<double> sp = reconstruct_s_prime(p, par, spec.c_star);

  // Deficit S_-inf - S from the reconstructed slope; where it is below a few
  // ulp of S_-inf the stored S may legitimately round to S_-inf.
  std::vector<double> deficit(n);
  std::vector<double> neg(n);
  for (std::size_t j = 0; j < n; ++j) neg[j] = -sp[j];
  cumulative_trapezoid(neg, p.grid.h(), neg[0] / spec.lambda_star, deficit);
  const double ulp_band =
      4.0 * std::numeric_limits<double>::epsilon() * par.s_minus_inf;

  Check c{"monotone_positive"};
  c.threshold = 0.0;
  c.value = -std::numeric_limits<double>::infinity();
  std::ostringstream issue;
  std::size_t in_guard = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double xi = p.grid.node(j);
    const bool interior = j > 0 && j + 1 < n;
    if (interior && p.s[j] + p.i[j] >= spec.guard) {
      c.value = std::max(c.value, sp[j]);
    }
    if (!issue.str().empty()) continue;
    // Inside the guard band the regularized incidence vanishes and S is
    // locally flat, so only S' <= 0 can be asked of it there.
    const bool guarded = p.s[j] + p.i[j] < spec.guard;
    if (guarded) ++in_guard;
    if (interior && (guarded ? sp[j] > 0.0 : !(sp[j] < 0.0))) {
      issue << "S' = " << sp[j] << (guarded ? " > 0" : " >= 0")
            << " at xi = " << xi;
    } else if (j > 0 &&
               p.s[j] > p.s[j - 1] + kTolerances.nodal_rise_rel * par.s_minus_inf) {
      issue << "S increases by " << p.s[j] - p.s[j - 1] << " at xi = " << xi;
    } else if (!(p.s[j] > 0.0)) {
      issue << "S = " << p.s[j] << " <= 0 at xi = " << xi;
    } else if (p.s[j] > par.s_minus_inf ||
               (deficit[j] > ulp_band && !(p.s[j] < par.s_minus_inf))) {
      issue << "S = " << p.s[j] << " not below S_-inf at xi = " << xi;
    } else if (!(deficit[j] > 0.0)) {
      issue << "vanishing deficit S_-inf - S at xi = " << xi;
    } else if (interior && !(p.i[j] > 0.0)) {
      issue << "I = " << p.i[j] << " <= 0 at xi = " << xi;
    }
  }
  c.pass = issue.str().empty();
  std::ostringstream d;
  if (c.pass) {
    d << "max reconstructed S' outside the guard band is " << c.value;
  } else {
    d << issue.str();
  }
  d << "; " << in_guard << " nodes with S + I below the guard "
    << spec.guard;
  c.detail = d.str();
  return c;
}

MassChain mass_chain(const WaveProfile& p, const SpectralData& spec,
                     double s_inf) {
  check_shape(p);
  const ModelParams& par = spec.params;
  const double c = spec.c_star;
  const double h = p.grid.h();
  const std::size_t n = p.grid.n;
  const std::vector<double> f = incidence(p, par, spec.guard);

  const double lam = spec.lambda_star;
  const double i0 = std::max(p.i[0], 0.0);
  const double left = detail::left_tail_mass(i0, p.grid.xi_min, l1_of(spec), lam);
  const double nu_i = detail::right_decay_i(par, c);
  const double nu_s = (std::sqrt(c * c + 4.0 * par.d1 * par.beta) - c) /
                      (2.0 * par.d1);

  MassChain m;
  const double core_i = trapezoid(p.i, h);
  const double core_f = trapezoid(f, h);
  m.mass = core_i + left + p.i[n - 1] / nu_i;
  // S ~ S_-inf on the left, so f ~ beta I there.
  m.middle = (core_f + par.beta * left + f[n - 1] / nu_s) / par.gamma;
  m.rhs = c * (par.s_minus_inf - s_inf) / par.gamma;

  const double di = (3 * p.i[n - 1] - 4 * p.i[n - 2] + p.i[n - 3]) / (2 * h);
  m.from_flux = (par.d2 * di - c * p.i[n - 1] + core_f + par.beta * left) /
                par.gamma;
  return m;
}

Check check_integral_identities(const WaveProfile& p,
                                const SpectralData& spec) {
  const SInfinity s_inf = estimate_s_infinity(p, spec.params.s_minus_inf);
  const MassChain m = mass_chain(p, spec, s_inf.value);
  Check c{"integral_identities"};
  c.threshold = kTolerances.identity_rel;
  const double g1 = rel_gap(m.mass, m.middle);
  const double g2 = rel_gap(m.middle, m.rhs);
  const double g3 = rel_gap(m.mass, m.rhs);
  const double g4 = rel_gap(m.mass, m.from_flux);
  c.value = std::max({g1, g2, g3, g4});
  c.pass = c.value < c.threshold;
  std::ostringstream d;
  d << "int I = " << m.mass << ", (1/gamma) int f = " << m.middle
    << ", c (S_-inf - S_inf)/gamma = " << m.rhs << ", flux form = "
    << m.from_flux;
  if (!c.pass) {
    const double worst = c.value;
    d << "; diverging pair: "
      << (worst == g1   ? "mass/middle"
          : worst == g2 ? "middle/rhs"
          : worst == g3 ? "mass/rhs"
                        : "mass/flux");
  }
  c.detail = d.str();
  return c;
}

double peak_bound(const ModelParams& params, double c, double s_inf) {
  return 2.0 * c * (params.s_minus_inf - s_inf) /
         (std::sqrt(c * c + 4.0 * params.d2 * params.gamma) + c);
}

Check check_upper_bounds(const WaveProfile& p, const SpectralData& spec,
                         double c) {
  check_shape(p);
  const ModelParams& par = spec.params;
  const double s_inf = estimate_s_infinity(p, par.s_minus_inf).value;
  const double bm = par.plateau();
  const double bp = peak_bound(par, c, s_inf);
  const auto top = std::max_element(p.i.begin(), p.i.end());
  const double i_max = *top;

  Check ck{"upper_bounds"};
  ck.value = i_max;
  ck.threshold = std::min(bm, bp);
  ck.pass = i_max < bm && i_max < bp;
  std::ostringstream d;
  d << "max I = " << i_max << " at xi = "
    << p.grid.node(static_cast<std::size_t>(top - p.i.begin()))
    << "; M = " << bm << ", peak bound = " << bp;
  if (!ck.pass) d << "; exceedance " << i_max - ck.threshold;
  ck.detail = d.str();
  return ck;
}

double tail_slope(const WaveProfile& p, double lo, double hi) {
  check_shape(p);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t j = 0; j < p.grid.n; ++j) {
    const double xi = p.grid.node(j);
    if (xi < lo || xi > hi || !(xi < 0.0) || !(p.i[j] > 0.0)) continue;
    const double y = std::log(p.i[j] / (-xi));
    sx += xi;
    sy += y;
    sxx += xi * xi;
    sxy += xi * y;
    ++m;
  }
  if (m < 3) return std::numeric_limits<double>::quiet_NaN();
  const double den = m * sxx - sx * sx;
  return (m * sxy - sx * sy) / den;
}

Check check_tail_asymptotics(const WaveProfile& p, const SpectralData& spec,
                             const BoundSet& bs) {
  check_shape(p);
  const double lo = p.grid.xi_min + kTolerances.tail_margin;
  const double hi = bs.xi3 - kTolerances.tail_margin;
  Check c{"tail_asymptotics"};
  c.threshold = kTolerances.tail_slope_rel;
  std::ostringstream d;
  if (!(hi - lo > 10.0 * p.grid.h())) {
    c.value = std::numeric_limits<double>::quiet_NaN();
    d << "fit window [" << lo << ", " << hi << "] is empty";
    c.detail = d.str();
    return c;
  }
  const double slope = tail_slope(p, lo, hi);
  c.value = std::abs(slope / spec.lambda_star - 1.0);
  const bool slope_ok = c.value < c.threshold;

  std::size_t breaches = 0;
  double first = 0;
  for (std::size_t j = 0; j < p.grid.n; ++j) {
    const double xi = p.grid.node(j);
    if (xi < lo || xi > hi) continue;
    const double below = i_low(bs, xi) * (1.0 - kTolerances.envelope_rel);
    const double above = i_bar(bs, xi) * (1.0 + kTolerances.envelope_rel);
    if (p.i[j] < below || p.i[j] > above) {
      if (breaches++ == 0) first = xi;
    }
  }
  c.pass = slope_ok && breaches == 0;
  d << "slope " << slope << " vs lambda* " << spec.lambda_star << " on ["
    << lo << ", " << hi << "]";
  if (breaches) d << "; envelope breached at " << breaches
                  << " nodes, first at xi = " << first;
  c.detail = d.str();
  return c;
}

std::vector<double> p_function(const WaveProfile& p, const SpectralData& spec,
                               double c) {
  check_shape(p);
  const ModelParams& par = spec.params;
  const double kappa =
      2.0 * par.gamma / (std::sqrt(c * c + 4.0 * par.d2 * par.gamma) + c);
  const double head = detail::left_tail_mass(std::max(p.i[0], 0.0),
                                             p.grid.xi_min, l1_of(spec),
                                             spec.lambda_star);
  std::vector<double> cum(p.grid.n);
  cumulative_trapezoid(p.i, p.grid.h(), head, cum);
  for (std::size_t j = 0; j < p.grid.n; ++j) cum[j] = p.i[j] + kappa * cum[j];
  return cum;
}

Check check_p_function(const WaveProfile& p, const SpectralData& spec) {
  check_shape(p);
  const ModelParams& par = spec.params;
  const double c = spec.c_star;
  const std::size_t n = p.grid.n;
  const std::vector<double> pf = p_function(p, spec, c);
  const double p_max = *std::max_element(pf.begin(), pf.end());
  const double s_inf = estimate_s_infinity(p, par.s_minus_inf).value;
  const double target = peak_bound(par, c, s_inf);

  Check ck{"p_function"};
  std::ostringstream d;
  double worst_dip = 0.0;
  std::size_t dip_at = 0;
  for (std::size_t j = 1; j < n; ++j) {
    const double dip = pf[j - 1] - pf[j];
    if (dip > worst_dip) {
      worst_dip = dip;
      dip_at = j;
    }
  }
  const bool monotone = worst_dip <= kTolerances.p_monotone_rel * p_max;
  const bool left_ok = pf[0] < kTolerances.p_left_rel * par.plateau();
  const double limit_gap = rel_gap(pf[n - 1], target);
  const bool limit_ok = limit_gap < kTolerances.p_limit_rel;

  // P' = I' + kappa I against (1/d2) int_xi^inf e^{(b/d2)(xi - v)} f dv.
  const double b = 0.5 * (c + std::sqrt(c * c + 4.0 * par.d2 * par.gamma));
  std::vector<double> g = incidence(p, par, spec.guard);
  for (double& v : g) v /= par.d2;
  std::vector<double> rep(n);
  exp_sweep_right(g, b / par.d2, p.grid.h(), 0.0, rep);
  const std::vector<double> dp = derivative(pf, p.grid.h());
  double rep_max = 0.0, gap = 0.0;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    rep_max = std::max(rep_max, std::abs(rep[j]));
    gap = std::max(gap, std::abs(rep[j] - dp[j]));
  }
  const double rep_min = *std::min_element(rep.begin(), rep.end());
  const bool rep_ok =
      rep_min >= 0.0 && gap <= kTolerances.p_derivative_rel * rep_max;

  ck.value = limit_gap;
  ck.threshold = kTolerances.p_limit_rel;
  ck.pass = monotone && left_ok && limit_ok && rep_ok;
  d << "P(xi_max) = " << pf[n - 1] << " vs limit " << target
    << "; P(xi_min) = " << pf[0] << "; largest dip " << worst_dip;
  if (!monotone) d << " at xi = " << p.grid.node(dip_at) << " (not monotone)";
  if (!left_ok) d << "; P(xi_min) too large";
  d << "; P' representation gap " << gap << " (max " << rep_max << ")";
  if (!rep_ok) d << " (inconsistent)";
  ck.detail = d.str();
  return ck;
}

double ode_residual(const WaveProfile& p, const ModelParams& params,
                    double c) {
  check_shape(p);
  const std::size_t n = p.grid.n;
  if (n < 5) throw InvalidArgument("ode_residual needs at least 5 nodes");
  const double h = p.grid.h();
  const double guard = kGuardRelative * params.s_minus_inf;
  double worst = 0.0;
  for (std::size_t j = 2; j + 2 < n; ++j) {
    const auto d1 = [&](const std::vector<double>& u) {
      return (-u[j + 2] + 8 * u[j + 1] - 8 * u[j - 1] + u[j - 2]) / (12 * h);
    };
    const auto d2 = [&](const std::vector<double>& u) {
      return (-u[j + 2] + 16 * u[j + 1] - 30 * u[j] + 16 * u[j - 1] -
              u[j - 2]) /
             (12 * h * h);
    };
    const double f = detail::incidence(std::max(p.s[j], 0.0),
                                       std::max(p.i[j], 0.0), params.beta,
                                       guard);
    const double rs = params.d1 * d2(p.s) - c * d1(p.s) - f;
    const double ri =
        params.d2 * d2(p.i) - c * d1(p.i) + f - params.gamma * p.i[j];
    worst = std::max({worst, std::abs(rs), std::abs(ri)});
  }
  return worst / (params.beta * params.s_minus_inf);
}

WaveReport diagnose(const WaveProfile& p, const SpectralData& spec,
                    const BoundSet& bs) {
  check_shape(p);
  const ModelParams& par = spec.params;
  const double c = spec.c_star;
  WaveReport r;

  const SInfinity s_inf = estimate_s_infinity(p, par.s_minus_inf);
  r.s_infinity = s_inf.value;
  r.identity = mass_chain(p, spec, s_inf.value);
  r.wave_mass = r.identity.mass;
  r.i_max = *std::max_element(p.i.begin(), p.i.end());
  r.i_bound_m = par.plateau();
  r.i_bound_p = peak_bound(par, c, s_inf.value);
  r.tail_slope = tail_slope(p, p.grid.xi_min + kTolerances.tail_margin,
                            bs.xi3 - kTolerances.tail_margin);
  const std::vector<double> pf = p_function(p, spec, c);
  r.p_limit = pf.back();
  r.p_target = r.i_bound_p;
  r.ode_residual = ode_residual(p, par, c);

  Check plateau{"s_infinity_plateau"};
  plateau.value = s_inf.drift;
  plateau.threshold = kTolerances.plateau_drift * par.s_minus_inf;
  plateau.pass = s_inf.plateau;
  plateau.detail = "S_inf = " + std::to_string(s_inf.value);
  r.checks.push_back(plateau);

  r.checks.push_back(check_monotone_positive(p, spec));
  r.checks.push_back(check_integral_identities(p, spec));
  r.checks.push_back(check_upper_bounds(p, spec, c));
  r.checks.push_back(check_tail_asymptotics(p, spec, bs));
  r.checks.push_back(check_p_function(p, spec));

  Check ode{"ode_residual"};
  ode.value = r.ode_residual;
  ode.threshold = kTolerances.ode_residual;
  ode.pass = r.ode_residual < ode.threshold;
  ode.detail = "fourth-order differences, scaled by beta S_-inf";
  r.checks.push_back(ode);

  r.pass = std::all_of(r.checks.begin(), r.checks.end(),
                       [](const Check& ck) { return ck.pass; });
  return r;
}

}  // namespace wavecrit
