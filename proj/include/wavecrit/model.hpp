#pragma once

#include <optional>

namespace wavecrit {

/// Epidemiological and diffusion constants of the diffusive SIR system.
struct ModelParams {
  double d1 = 1.0;  ///< diffusivity of S
  double d2 = 1.0;  ///< diffusivity of I
  double d3 = 1.0;  ///< diffusivity of R (simulator only)
  double beta = 2.0;
  double gamma = 1.0;
  double s_minus_inf = 1.0;  ///< susceptible density ahead of the front

  double r0() const { return beta / gamma; }

  /// Endemic plateau (beta - gamma) S_-inf / gamma. Non-positive when R0 <= 1.
  double plateau() const { return (beta - gamma) * s_minus_inf / gamma; }

  /// Throws InvalidArgument unless every field is finite and strictly positive.
  void validate() const;
};

/// Constants derived once from ModelParams and the shift rates beta1, beta2.
struct SpectralData {
  ModelParams params;
  double r0 = 0;
  double c_star = 0;
  double lambda_star = 0;
  double beta1 = 0;
  double beta2 = 0;
  double lambda1_minus = 0;
  double lambda1_plus = 0;
  double lambda2_minus = 0;
  double lambda2_plus = 0;
  double big_lambda1 = 0;  ///< d1 (lambda1+ - lambda1-)
  double big_lambda2 = 0;  ///< d2 (lambda2+ - lambda2-)
  double mu = 0;           ///< weighted-norm rate
  double guard = 0;        ///< s + i below this makes the incidence vanish
};

struct SpectralOptions {
  std::optional<double> beta1;  ///< default 2 beta
  std::optional<double> beta2;  ///< default beta + gamma
  std::optional<double> mu;     ///< default half of min(-lambda1-, -lambda2-)
};

/// Relative guard band on s + i (scaled by S_-inf) for the incidence term.
inline constexpr double kGuardRelative = 1e-14;

/// Critical speed 2 sqrt(d2 (beta - gamma)); requires R0 > 1.
double critical_speed(const ModelParams& params);

/// Characteristic polynomial d2 lambda^2 - c lambda + beta - gamma of the
/// linearization at (S_-inf, 0).
double characteristic(double lambda, double c, const ModelParams& params);

/// Computes every SpectralData field. Throws InvalidRegime when R0 <= 1 and
/// InvalidArgument for beta1 <= beta, beta2 <= gamma or mu outside
/// (0, min(-lambda1-, -lambda2-)).
SpectralData derive_spectral(const ModelParams& params,
                             const SpectralOptions& options = {});

/// beta s i / (s + i), zero on the guard band. Throws on negative input.
double infection_force(double s, double i, double beta, double guard);
double infection_force(double s, double i, const SpectralData& spec);

struct HValues {
  double h1;  ///< beta1 s - f(s, i)
  double h2;  ///< (beta2 - gamma) i + f(s, i)
};

HValues h_funcs(double s, double i, const SpectralData& spec);

namespace detail {

/// Unchecked incidence for inner loops whose inputs are known non-negative.
inline double incidence(double s, double i, double beta, double guard) {
  const double total = s + i;
  if (s == 0.0 || i == 0.0 || total < guard) return 0.0;
  return beta * (s / total) * i;
}

}  // namespace detail

}  // namespace wavecrit
