#pragma once

#include <optional>
#include <vector>

#include "wavecrit/bounds.hpp"
#include "wavecrit/errors.hpp"
#include "wavecrit/model.hpp"
#include "wavecrit/waveop.hpp"

namespace wavecrit {

struct SolveConfig {
  double theta0 = 1.0;  ///< initial damping in (0, 1]
  double tol = 1e-8;    ///< on |P(F(u)) - u|_mu
  int max_iter = 500;
  int stagnation_window = 100;  ///< iterations without a new best residual
  int anderson_depth = 20;     ///< 0 gives plain damped Picard
  int anderson_warmup = 50;    ///< Picard steps before mixing starts
  /// The mixing least squares weights node j by max(e^{-mu |xi_j|}, floor).
  /// Pure mu weights leave the extrapolation unchecked in the right tail of
  /// I, where slowly decaying I carries much of its mass; unit weights
  /// stall near the corner of I_bar on fine grids.
  double anderson_floor = 1e-2;
  /// After convergence the image P(F(u)) of the accepted iterate is
  /// returned. Before that, S left of min(xi2, xi3) is swept with
  /// S <- P(F1(S, I)) until the largest nodal change drops below
  /// polish_tol * S_-inf or polish_steps is hit, followed by one more full
  /// step. The weighted norm hides S errors deep in the left tail, where
  /// they are only removed by transport through xi_min.
  int polish_steps = 2000;
  double polish_tol = 1e-15;
  /// The returned profile's own residual can exceed tol; iteration then
  /// continues and the next accepted iterate is tried, up to this many
  /// times. The candidate with the smallest residual is returned.
  int finish_attempts = 5;
  std::optional<WaveGrid> grid;
  SpectralOptions spectral;
  SelectOptions select;
  TailClosure closure = TailClosure::kAsymptotic;

  void validate() const;
};

struct TraceEntry {
  int iteration;
  double residual;
  double theta;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& message, std::vector<TraceEntry> trace)
      : Error("no_convergence", message), trace_(std::move(trace)) {}

  const std::vector<TraceEntry>& trace() const noexcept { return trace_; }

 private:
  std::vector<TraceEntry> trace_;
};

struct SolveResult {
  WaveProfile profile;
  std::vector<TraceEntry> trace;
  SpectralData spectral;
  BoundSet bounds;
  int iterations = 0;  ///< main iterations up to the accepted iterate
  int polish_steps = 0;  ///< S-only sweeps after convergence
  /// |P(F(u)) - u|_inf at the accepted iterate.
  double sup_residual = 0;
  /// |P(F(u)) - u|_inf for the returned profile.
  double final_sup_residual = 0;
  /// |P(F(u)) - u|_mu at the accepted iterate (below tol).
  double converged_residual = 0;
  /// The same quantity for the returned profile; below tol unless all
  /// finish_attempts candidates missed it.
  double final_residual = 0;
};

/// derive_spectral -> select_constants -> midpoint start -> iterate.
SolveResult solve_critical_wave(const ModelParams& params,
                                const SolveConfig& cfg = {});

/// Iterates from `initial` (projected into the order interval first).
SolveResult solve_from(const WaveProfile& initial, const SpectralData& spec,
                       const BoundSet& bs, const SolveConfig& cfg = {});

}  // namespace wavecrit
