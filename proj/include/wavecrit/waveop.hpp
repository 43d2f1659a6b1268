#pragma once

#include <cstddef>
#include <vector>

#include "wavecrit/bounds.hpp"
#include "wavecrit/model.hpp"

namespace wavecrit {

/// Uniform truncation of the wave variable axis.
struct WaveGrid {
  double xi_min = -60.0;
  double xi_max = 120.0;
  std::size_t n = 9001;

  double h() const { return (xi_max - xi_min) / static_cast<double>(n - 1); }
  double node(std::size_t j) const {
    return j + 1 == n ? xi_max : xi_min + static_cast<double>(j) * h();
  }
  std::vector<double> nodes() const;

  /// n chosen so the spacing is as close to `h` as the interval allows.
  static WaveGrid with_spacing(double xi_min, double xi_max, double h);

  /// Structural checks only (n >= 3, finite, xi_min < xi_max).
  void validate() const;

  bool operator==(const WaveGrid&) const = default;
};

/// Reasons a grid is too coarse or too short for the operator.
struct GridAdequacy {
  bool left_ok;    ///< xi_min < min(xi2, xi3) - 10/lambda*
  bool right_ok;   ///< xi_max > xi1 + 20 d2/c*
  bool kernel_ok;  ///< h max(lambda1+, lambda2+) < 0.5
  bool ok() const { return left_ok && right_ok && kernel_ok; }
};

GridAdequacy check_grid(const WaveGrid& grid, const SpectralData& spec,
                        const BoundSet& bs);

/// Default truncation: [-60, 120] with h = 0.02 for the reference parameter
/// set, widened or refined when the bounds or kernel rates require it.
WaveGrid default_grid(const SpectralData& spec, const BoundSet& bs);

struct WaveProfile {
  WaveGrid grid;
  std::vector<double> s;
  std::vector<double> i;
  double s_right_limit = 0;

  /// Mean of the last five S nodes.
  void refresh_right_limit();
};

/// Profiles of the order interval evaluated on a grid.
struct GammaBounds {
  std::vector<double> s_lo, s_hi, i_lo, i_hi;
};

GammaBounds gamma_bounds(const WaveGrid& grid, const BoundSet& bs);

/// How F treats I on (-inf, xi_min).
enum class TailClosure {
  kZero,        ///< I = 0 beyond the grid
  kAsymptotic,  ///< I = (l1 (-xi) + B) e^{lambda* xi}, B matched at xi_min
};

struct OperatorOptions {
  TailClosure closure = TailClosure::kAsymptotic;
  bool check_membership = true;
  double membership_tol = 1e-8;  ///< relative to S_-inf
};

/// Discretized fixed-point operator F = (F1, F2). Throws GammaViolation when
/// check_membership is set and p leaves the order interval by more than
/// membership_tol * S_-inf.
WaveProfile apply_F(const WaveProfile& p, const SpectralData& spec,
                    const BoundSet& bs, const OperatorOptions& options = {});

struct Projection {
  WaveProfile profile;
  double max_violation = 0;
  std::size_t worst_node = 0;
};

Projection project_gamma(const WaveProfile& p, const BoundSet& bs);
Projection project_gamma(const WaveProfile& p, const GammaBounds& gb);

/// Largest pre-clamp distance of p from the order interval.
double gamma_violation(const WaveProfile& p, const GammaBounds& gb,
                       std::size_t* worst_node = nullptr);

/// max_j max(|s_p - s_q|, |i_p - i_q|) e^{-mu |xi_j|}.
double weighted_norm_diff(const WaveProfile& p, const WaveProfile& q,
                          double mu);

/// Midpoint of the order interval.
WaveProfile midpoint_profile(const WaveGrid& grid, const BoundSet& bs);

}  // namespace wavecrit
