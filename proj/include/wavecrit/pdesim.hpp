#pragma once

#include <optional>
#include <vector>

#include "wavecrit/model.hpp"
#include "wavecrit/waveop.hpp"

namespace wavecrit {

struct SimConfig {
  double domain_length = 400.0;
  double dx = 0.1;
  double t_end = 150.0;
  std::optional<double> dt;     ///< default: largest stable step
  std::optional<double> level;  ///< front level, default 0.1 M
  bool include_r = true;
  double output_interval = 0.5;
  double seed_width = 5.0;
  /// Default 0.01 M; when M <= 0 (R0 <= 1) the default is 1e-4 S_-inf.
  std::optional<double> seed_amplitude;
  double snapshot_interval = 0.0;  ///< 0 keeps only the final state
  /// Front recording (and the run) stops once x_level is this close to the
  /// right boundary.
  double boundary_margin = 20.0;
  /// When false an explicit dt may exceed the stability bound; the blow-up
  /// detector is then the only guard.
  bool enforce_stability = true;

  /// Throws InvalidArgument for non-positive sizes, an unstable dt, or a
  /// level outside (0, M).
  void validate(const ModelParams& params) const;

  std::size_t nodes() const;
  double step_size(const ModelParams& params) const;
  double seed(const ModelParams& params) const;
};

struct SimState {
  double t = 0.0;
  std::vector<double> s, i, r;
};

/// S = S_-inf, I = seed on [0, seed_width], R = 0.
SimState initial_state(const SimConfig& cfg, const ModelParams& params);

/// One SSP-RK2 step of the method-of-lines system: centred diffusion with
/// reflecting ends, guarded incidence. Pure.
SimState step(const SimState& state, const SimConfig& cfg,
              const ModelParams& params);

/// Trapezoid-weighted integral of S + I + R (conserved by `step`).
double total_mass(const SimState& state, double dx);

struct FrontSample {
  double t;
  double x;
};

struct SimResult {
  SimState final_state;
  std::vector<SimState> snapshots;
  std::vector<FrontSample> front;
  std::vector<FrontSample> max_i;  ///< (t, max I) at each output time
  double dt = 0;
  double level = 0;
  bool tracking = false;
  bool truncated = false;  ///< front reached the boundary margin
  long steps = 0;
};

/// Throws InstabilityError on NaN or any field above 10x its initial max.
SimResult run_simulation(const ModelParams& params, const SimConfig& cfg);

/// Rightmost crossing of `level` by I, linearly interpolated.
std::optional<double> front_position(const std::vector<double>& i, double dx,
                                     double level);

/// Location of max I with parabolic refinement.
double peak_position(const std::vector<double>& values, double dx);

struct SpeedEstimate {
  double speed = 0;     ///< least-squares slope on the late half
  double speed_ci = 0;  ///< 95% half-width of that slope
  double log_speed = 0; ///< c in x = c t - k ln t + x0
  double log_k = 0;
  int samples = 0;
  int log_samples = 0;
};

/// Throws InsufficientRecord when fewer than 8 samples are usable.
SpeedEstimate measure_front_speed(const std::vector<FrontSample>& history,
                                  double burn_fraction = 0.1);

/// Resamples the field around its I maximum onto `target`, mapping
/// xi = xi_peak - (x - x_peak) (the wave variable increases towards the
/// region the front has already crossed). Throws InsufficientRecord when the
/// target window leaves the domain.
WaveProfile extract_comoving_profile(const SimState& state, double dx,
                                     const WaveGrid& target, double xi_peak);

struct ProfileComparison {
  double i_sup_rel = 0;       ///< sup |I_a - I_b| / max I_b
  double plateau_a = 0;       ///< S at the right end of a
  double plateau_b = 0;
  double plateau_diff = 0;    ///< |plateau_a - plateau_b| / S_-inf
};

/// Compares `a` against `b` on the nodes of `a` (b linearly interpolated).
ProfileComparison compare_profiles(const WaveProfile& a, const WaveProfile& b,
                                   double s_minus_inf);

}  // namespace wavecrit
