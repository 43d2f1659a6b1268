#include "wavecrit/waveop.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wavecrit/errors.hpp"
#include "wavecrit/quadrature.hpp"

namespace wavecrit {

std::vector<double> WaveGrid::nodes() const {
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = node(j);
  return out;
}

WaveGrid WaveGrid::with_spacing(double xi_min, double xi_max, double h) {
  if (!(h > 0.0) || !(xi_max > xi_min)) {
    throw InvalidArgument("grid needs xi_min < xi_max and h > 0");
  }
  const double cells = std::round((xi_max - xi_min) / h);
  WaveGrid g{xi_min, xi_max, static_cast<std::size_t>(cells) + 1};
  g.validate();
  return g;
}

void WaveGrid::validate() const {
  if (!std::isfinite(xi_min) || !std::isfinite(xi_max) || !(xi_min < xi_max)) {
    throw InvalidArgument("grid endpoints must be finite with xi_min < xi_max");
  }
  if (n < 3) throw InvalidArgument("grid needs at least 3 nodes");
}

GridAdequacy check_grid(const WaveGrid& grid, const SpectralData& spec,
                        const BoundSet& bs) {
  GridAdequacy a;
  a.left_ok =
      grid.xi_min < std::min(bs.xi2, bs.xi3) - 10.0 / spec.lambda_star;
  a.right_ok = grid.xi_max > bs.xi1 + 20.0 * spec.params.d2 / spec.c_star;
  a.kernel_ok =
      grid.h() * std::max(spec.lambda1_plus, spec.lambda2_plus) < 0.5;
  return a;
}

WaveGrid default_grid(const SpectralData& spec, const BoundSet& bs) {
  const ModelParams& p = spec.params;
  const double c = spec.c_star;
  // Right-tail decay rates of I and of S - S_inf behind the front.
  const double nu_i =
      (std::sqrt(c * c + 4.0 * p.d2 * p.gamma) - c) / (2.0 * p.d2);
  const double nu_s = (std::sqrt(c * c + 4.0 * p.d1 * p.beta) - c) / (2.0 * p.d1);
  // Lengths are measured in units of the front width 1/lambda*.
  const double unit = 1.0 / spec.lambda_star;
  // Room for a left-tail fit of 20 front widths plus 5 on either side.
  const double left = std::min(bs.xi2, bs.xi3);
  const double xi_min = std::min(
      {-60.0 * unit, 1.5 * left - 20.0 * unit, left - 10.0 - 20.0 * unit});
  const double xi_max = std::max(120.0 * unit, 46.0 / std::min(nu_i, nu_s));
  const double h = std::min(
      0.02 * unit, 0.4 / std::max(spec.lambda1_plus, spec.lambda2_plus));
  return WaveGrid::with_spacing(xi_min, xi_max, h);
}

void WaveProfile::refresh_right_limit() {
  const std::size_t k = std::min<std::size_t>(5, s.size());
  double sum = 0.0;
  for (std::size_t j = s.size() - k; j < s.size(); ++j) sum += s[j];
  s_right_limit = k ? sum / static_cast<double>(k) : 0.0;
}

GammaBounds gamma_bounds(const WaveGrid& grid, const BoundSet& bs) {
  GammaBounds gb;
  gb.s_lo.resize(grid.n);
  gb.s_hi.assign(grid.n, bs.s_minus_inf);
  gb.i_lo.resize(grid.n);
  gb.i_hi.resize(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double xi = grid.node(j);
    gb.s_lo[j] = s_low(bs, xi);
    gb.i_lo[j] = i_low(bs, xi);
    gb.i_hi[j] = i_bar(bs, xi);
  }
  return gb;
}

namespace {

void check_shape(const WaveProfile& p) {
  p.grid.validate();
  if (p.s.size() != p.grid.n || p.i.size() != p.grid.n) {
    throw GridMismatch("profile arrays do not match the grid size");
  }
}

}  // namespace

double gamma_violation(const WaveProfile& p, const GammaBounds& gb,
                       std::size_t* worst_node) {
  double worst = 0.0;
  std::size_t at = 0;
  for (std::size_t j = 0; j < p.grid.n; ++j) {
    const double v = std::max({gb.s_lo[j] - p.s[j], p.s[j] - gb.s_hi[j],
                               gb.i_lo[j] - p.i[j], p.i[j] - gb.i_hi[j]});
    // NaN compares false; treat it as an infinite violation.
    if (v > worst || std::isnan(v)) {
      worst = std::isnan(v) ? INFINITY : v;
      at = j;
    }
  }
  if (worst_node) *worst_node = at;
  return worst;
}

Projection project_gamma(const WaveProfile& p, const GammaBounds& gb) {
  check_shape(p);
  Projection out;
  out.max_violation = gamma_violation(p, gb, &out.worst_node);
  out.profile = p;
  for (std::size_t j = 0; j < p.grid.n; ++j) {
    out.profile.s[j] = std::clamp(p.s[j], gb.s_lo[j], gb.s_hi[j]);
    out.profile.i[j] = std::clamp(p.i[j], gb.i_lo[j], gb.i_hi[j]);
  }
  out.profile.refresh_right_limit();
  return out;
}

Projection project_gamma(const WaveProfile& p, const BoundSet& bs) {
  return project_gamma(p, gamma_bounds(p.grid, bs));
}

WaveProfile apply_F(const WaveProfile& p, const SpectralData& spec,
                    const BoundSet& bs, const OperatorOptions& options) {
  check_shape(p);
  const std::size_t n = p.grid.n;
  const double h = p.grid.h();
  const ModelParams& par = spec.params;

  if (options.check_membership) {
    std::size_t at = 0;
    const double v = gamma_violation(p, gamma_bounds(p.grid, bs), &at);
    const double tol = options.membership_tol * par.s_minus_inf;
    if (v > tol) {
      std::ostringstream msg;
      msg << "profile leaves the order interval by " << v << " at xi = "
          << p.grid.node(at) << " (tolerance " << tol << ")";
      throw GammaViolation(msg.str(), p.grid.node(at), v);
    }
  }

  const double smi = par.s_minus_inf;
  std::vector<double> h1(n), h2(n), k1(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = std::max(p.s[j], 0.0);
    const double i = std::max(p.i[j], 0.0);
    const double f = detail::incidence(s, i, par.beta, spec.guard);
    h1[j] = spec.beta1 * s - f;
    h2[j] = (spec.beta2 - par.gamma) * i + f;
    // beta1 S_-inf - h1, the source of the deficit S_-inf - F1
    k1[j] = spec.beta1 * (smi - s) + f;
  }

  double s_right = 0.0;
  {
    const std::size_t k = std::min<std::size_t>(5, n);
    for (std::size_t j = n - k; j < n; ++j) s_right += p.s[j];
    s_right /= static_cast<double>(k);
  }

  std::vector<double> left(n), right(n);
  WaveProfile out{p.grid, std::vector<double>(n), std::vector<double>(n), 0.0};

  // F1: S beyond the left edge is S_-inf and I vanishes, so h1 -> beta1 S_-inf;
  // on the right I -> 0 and S -> s_right.
  exp_sweep_left(h1, -spec.lambda1_minus, h,
                 spec.beta1 * smi / (-spec.lambda1_minus), left);
  exp_sweep_right(h1, spec.lambda1_plus, h,
                  spec.beta1 * s_right / spec.lambda1_plus, right);
  for (std::size_t j = 0; j < n; ++j) {
    out.s[j] = (left[j] + right[j]) / spec.big_lambda1;
  }
  // The sweeps above carry O(S_-inf) partial sums, so where F1 is close to
  // S_-inf its distance from S_-inf is better taken from the deficit form
  // S_-inf - K(k1)/Lambda1 (the kernel maps constants to themselves).
  exp_sweep_left(k1, -spec.lambda1_minus, h, 0.0, left);
  exp_sweep_right(k1, spec.lambda1_plus, h,
                  spec.beta1 * (smi - s_right) / spec.lambda1_plus, right);
  for (std::size_t j = 0; j < n; ++j) {
    if (out.s[j] >= 0.5 * smi) {
      out.s[j] = smi - (left[j] + right[j]) / spec.big_lambda1;
    }
  }

  // F2: left of the grid h2 ~ (beta2 - gamma + beta) I with
  // I(y) = (i0 + l1 (xi0 - y) e^{lambda* xi0}) e^{-lambda* (xi0 - y)}.
  double head = 0.0;
  if (options.closure == TailClosure::kAsymptotic) {
    const double k = spec.lambda_star - spec.lambda2_minus;
    const double e0 = std::exp(spec.lambda_star * p.grid.xi_min);
    const double i0 = std::max(p.i[0], 0.0);
    head = (spec.beta2 - par.gamma + par.beta) *
           (i0 / k + bs.l1 * e0 / (k * k));
  }
  exp_sweep_left(h2, -spec.lambda2_minus, h, head, left);
  exp_sweep_right(h2, spec.lambda2_plus, h, 0.0, right);
  for (std::size_t j = 0; j < n; ++j) {
    out.i[j] = (left[j] + right[j]) / spec.big_lambda2;
  }
  out.refresh_right_limit();
  return out;
}

double weighted_norm_diff(const WaveProfile& p, const WaveProfile& q,
                          double mu) {
  if (!(p.grid == q.grid) || p.s.size() != q.s.size() ||
      p.i.size() != q.i.size()) {
    throw GridMismatch("weighted_norm_diff needs profiles on the same grid");
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < p.grid.n; ++j) {
    const double w = std::exp(-mu * std::abs(p.grid.node(j)));
    const double d =
        std::max(std::abs(p.s[j] - q.s[j]), std::abs(p.i[j] - q.i[j])) * w;
    if (d > worst || std::isnan(d)) worst = std::isnan(d) ? INFINITY : d;
  }
  return worst;
}

WaveProfile midpoint_profile(const WaveGrid& grid, const BoundSet& bs) {
  grid.validate();
  const GammaBounds gb = gamma_bounds(grid, bs);
  WaveProfile p{grid, std::vector<double>(grid.n), std::vector<double>(grid.n),
                0.0};
  for (std::size_t j = 0; j < grid.n; ++j) {
    p.s[j] = 0.5 * (gb.s_lo[j] + gb.s_hi[j]);
    p.i[j] = 0.5 * (gb.i_lo[j] + gb.i_hi[j]);
  }
  p.refresh_right_limit();
  return p;
}

}  // namespace wavecrit
