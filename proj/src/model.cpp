#include "wavecrit/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wavecrit/errors.hpp"

namespace wavecrit {

namespace {

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0) {
    std::ostringstream msg;
    msg << name << " must be finite and > 0 (got " << value << ")";
    throw InvalidArgument(msg.str());
  }
}

}  // namespace

void ModelParams::validate() const {
  require_positive(d1, "d1");
  require_positive(d2, "d2");
  require_positive(d3, "d3");
  require_positive(beta, "beta");
  require_positive(gamma, "gamma");
  require_positive(s_minus_inf, "s_minus_inf");
}

double critical_speed(const ModelParams& params) {
  if (params.beta <= params.gamma) {
    std::ostringstream msg;
    msg << "R0 = beta/gamma = " << params.r0()
        << " <= 1: no non-trivial non-negative traveling wave exists "
           "(threshold R0 > 1)";
    throw InvalidRegime(msg.str());
  }
  return 2.0 * std::sqrt(params.d2 * (params.beta - params.gamma));
}

double characteristic(double lambda, double c, const ModelParams& params) {
  return params.d2 * lambda * lambda - c * lambda + params.beta - params.gamma;
}

SpectralData derive_spectral(const ModelParams& params,
                             const SpectralOptions& options) {
  params.validate();

  SpectralData out;
  out.params = params;
  out.r0 = params.r0();
  out.c_star = critical_speed(params);
  out.lambda_star = out.c_star / (2.0 * params.d2);
  out.guard = kGuardRelative * params.s_minus_inf;

  out.beta1 = options.beta1.value_or(2.0 * params.beta);
  out.beta2 = options.beta2.value_or(params.beta + params.gamma);
  if (!(out.beta1 > params.beta) || !std::isfinite(out.beta1)) {
    std::ostringstream msg;
    msg << "beta1 must exceed beta = " << params.beta << " (got " << out.beta1
        << ")";
    throw InvalidArgument(msg.str());
  }
  if (!(out.beta2 > params.gamma) || !std::isfinite(out.beta2)) {
    std::ostringstream msg;
    msg << "beta2 must exceed gamma = " << params.gamma << " (got "
        << out.beta2 << ")";
    throw InvalidArgument(msg.str());
  }

  // Roots of d lambda^2 - c* lambda - b = 0. The negative root is formed as
  // -2b / (c* + sqrt(...)) to avoid cancellation.
  const double c = out.c_star;
  const auto roots = [c](double d, double b, double& minus, double& plus,
                         double& big) {
    const double disc = std::sqrt(c * c + 4.0 * d * b);
    plus = (c + disc) / (2.0 * d);
    minus = -2.0 * b / (c + disc);
    big = disc;
  };
  roots(params.d1, out.beta1, out.lambda1_minus, out.lambda1_plus,
        out.big_lambda1);
  roots(params.d2, out.beta2, out.lambda2_minus, out.lambda2_plus,
        out.big_lambda2);

  const double mu_cap = std::min(-out.lambda1_minus, -out.lambda2_minus);
  out.mu = options.mu.value_or(0.5 * mu_cap);
  if (!(out.mu > 0.0) || !(out.mu < mu_cap)) {
    std::ostringstream msg;
    msg << "mu must lie in (0, " << mu_cap << ") (got " << out.mu << ")";
    throw InvalidArgument(msg.str());
  }
  return out;
}

double infection_force(double s, double i, double beta, double guard) {
  if (!(s >= 0.0) || !(i >= 0.0)) {
    std::ostringstream msg;
    msg << "infection_force requires s, i >= 0 (got s=" << s << ", i=" << i
        << ")";
    throw InvalidArgument(msg.str());
  }
  return detail::incidence(s, i, beta, guard);
}

double infection_force(double s, double i, const SpectralData& spec) {
  return infection_force(s, i, spec.params.beta, spec.guard);
}

HValues h_funcs(double s, double i, const SpectralData& spec) {
  const double f = infection_force(s, i, spec);
  return {spec.beta1 * s - f, (spec.beta2 - spec.params.gamma) * i + f};
}

}  // namespace wavecrit
