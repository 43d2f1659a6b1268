#pragma once

#include <string>
#include <vector>

#include "wavecrit/bounds.hpp"
#include "wavecrit/model.hpp"
#include "wavecrit/waveop.hpp"

namespace wavecrit {

/// Thresholds shared by the diagnostics, the unit tests and the acceptance
/// suite.
struct Tolerances {
  double identity_rel = 1e-3;     ///< pairwise agreement of the mass chain
  double tail_slope_rel = 0.02;   ///< fitted left-tail rate vs lambda*
  double tail_margin = 5.0;       ///< excluded next to xi_min and xi3
  double envelope_rel = 1e-9;     ///< slack on I_low <= I <= I_bar
  /// Allowed dip of P, relative to max P. Far behind the front P grows by
  /// less than the ~1e-7 nodal accuracy of a converged profile.
  double p_monotone_rel = 1e-7;
  double p_left_rel = 1e-6;       ///< P(xi_min) relative to M
  double p_limit_rel = 1e-3;      ///< P(xi_max) vs its limit
  double p_derivative_rel = 1e-3; ///< P' representation vs differences
  double ode_residual = 1e-4;     ///< scaled by beta S_-inf
  double plateau_drift = 1e-8;    ///< S slope over the last 40 nodes, / S_-inf
  /// Allowed nodal rise of S, relative to S_-inf. Strictness comes from the
  /// reconstructed S'; the nodal test only screens for gross defects, since
  /// converged profiles carry nodal errors far above 1e-12 where S is flat.
  double nodal_rise_rel = 1e-10;
  int plateau_nodes = 5;
  int drift_nodes = 40;

  // Simulation and cross-check.
  double speed_plain_rel = 0.07;  ///< late-half slope vs c*
  double speed_log_rel = 0.03;    ///< log-corrected fit vs c*
  double speed_scaling_rel = 0.07;
  double cross_i_sup = 0.05;      ///< comoving vs solved I, / max I
  double cross_plateau = 0.02;    ///< S plateaus, / S_-inf
  double shape_drift = 0.01;
  double extinction_level = 1e-6; ///< max I for R0 < 1 by t = 30

  // Operator and solver.
  double kernel_identity = 1e-10;   ///< F(S_-inf, 0) - (S_-inf, 0), / S_-inf
  double gamma_invariance = 1e-6;   ///< F(Gamma) outside Gamma, / S_-inf
  double spectral_abs = 1e-12;
  double solver_residual = 1e-8;
  double truncation_rel = 1e-4;     ///< domain doubling and h/2
};

inline constexpr Tolerances kTolerances{};

struct Check {
  Check() = default;
  explicit Check(std::string n) : name(std::move(n)) {}

  std::string name;
  bool pass = false;
  double value = 0;
  double threshold = 0;
  std::string detail;
};

struct SInfinity {
  double value = 0;
  double drift = 0;  ///< least-squares slope of S over the drift window
  bool plateau = false;
};

/// Mean of the last `nodes` S values, with a drift check on the last
/// kTolerances.drift_nodes nodes.
SInfinity estimate_s_infinity(const WaveProfile& p, double s_minus_inf,
                              int nodes = kTolerances.plateau_nodes);

/// S'(xi) = -(1/d1) int_xi^inf e^{-(c/d1)(v - xi)} f(S, I)(v) dv.
std::vector<double> reconstruct_s_prime(const WaveProfile& p,
                                        const ModelParams& params, double c);

Check check_monotone_positive(const WaveProfile& p, const SpectralData& spec);

struct MassChain {
  double mass = 0;    ///< int I
  double middle = 0;  ///< (1/gamma) int beta S I / (S + I)
  double rhs = 0;     ///< c (S_-inf - S_inf) / gamma
  double from_flux = 0;  ///< (d2 I'(xi_max) - c I(xi_max) + int f) / gamma
};

MassChain mass_chain(const WaveProfile& p, const SpectralData& spec,
                     double s_inf);

Check check_integral_identities(const WaveProfile& p,
                                const SpectralData& spec);

/// 2 c (S_-inf - S_inf) / (sqrt(c^2 + 4 d2 gamma) + c).
double peak_bound(const ModelParams& params, double c, double s_inf);

Check check_upper_bounds(const WaveProfile& p, const SpectralData& spec,
                         double c);

/// Least-squares slope of ln(I/(-xi)) against xi on [lo, hi].
double tail_slope(const WaveProfile& p, double lo, double hi);

Check check_tail_asymptotics(const WaveProfile& p, const SpectralData& spec,
                             const BoundSet& bs);

/// P = I + kappa int_{-inf}^xi I, kappa = 2 gamma / (sqrt(c^2 + 4 d2 gamma) + c).
std::vector<double> p_function(const WaveProfile& p, const SpectralData& spec,
                               double c);

Check check_p_function(const WaveProfile& p, const SpectralData& spec);

/// Max residual of the profile ODEs (fourth-order centred differences at
/// interior nodes), divided by beta S_-inf. Never touches the operator F.
double ode_residual(const WaveProfile& p, const ModelParams& params,
                    double c);

struct WaveReport {
  double s_infinity = 0;
  double wave_mass = 0;
  MassChain identity;
  double i_max = 0;
  double i_bound_m = 0;
  double i_bound_p = 0;
  double tail_slope = 0;
  double p_limit = 0;
  double p_target = 0;
  double ode_residual = 0;
  std::vector<Check> checks;
  bool pass = false;
};

WaveReport diagnose(const WaveProfile& p, const SpectralData& spec,
                    const BoundSet& bs);

namespace detail {

/// Left-tail integral of I on (-inf, xi0] for I = (i0 + l1 (xi0 - y)
/// e^{lambda xi0}) e^{-lambda (xi0 - y)}.
double left_tail_mass(double i0, double xi0, double l1, double lambda);

/// Decay rate of I behind the front: (sqrt(c^2 + 4 d2 gamma) - c) / (2 d2).
double right_decay_i(const ModelParams& params, double c);

}  // namespace detail

}  // namespace wavecrit
