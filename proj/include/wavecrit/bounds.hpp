#pragma once

#include <string>
#include <vector>

#include "wavecrit/model.hpp"

namespace wavecrit {

/// Constants of the explicit super-solution (S_-inf, I_bar) and
/// sub-solution (S_low, I_low) profiles.
struct BoundSet {
  double s_minus_inf = 0;
  double lambda_star = 0;
  double m = 0;    ///< plateau of I_bar
  double l1 = 0;   ///< e M lambda*
  double l2 = 0;   ///< correction constant of I_low
  double eps = 0;  ///< rate of S_low
  double xi1 = 0;  ///< -1/lambda*
  double xi2 = 0;  ///< ln(eps)/eps
  double xi3 = 0;  ///< -(l2/l1)^2
};

/// Builds a BoundSet for given (eps, l2). Throws InvalidArgument unless
/// 0 < eps < min(c*/d1, lambda*), xi2 < xi1 and xi3 < xi2.
BoundSet make_bound_set(const SpectralData& spec, double eps, double l2);

struct ProfileValues {
  double s_bar;
  double i_bar;
  double s_low;
  double i_low;
};

ProfileValues eval_profiles(const BoundSet& bs, double xi);

double i_bar(const BoundSet& bs, double xi);
double s_low(const BoundSet& bs, double xi);
double i_low(const BoundSet& bs, double xi);

/// Value and first two derivatives of a profile at a non-kink point.
struct Jet {
  double v;
  double d1;
  double d2;
};

Jet i_bar_jet(const BoundSet& bs, double xi);
Jet s_low_jet(const BoundSet& bs, double xi);
Jet i_low_jet(const BoundSet& bs, double xi);

/// g(xi) = beta l1^2 (-xi)^{7/2} e^{lambda* xi} for xi < 0.
double g_function(const BoundSet& bs, double beta, double xi);

/// max of g, attained at xi = -7/(2 lambda*).
double g_max(const BoundSet& bs, double beta);

struct SelectOptions {
  /// The sup condition on -beta l1 xi e^{(lambda* - eps) xi} over xi <= xi2
  /// must hold with this factor in front of S_-inf (c* - d1 eps); 1 gives
  /// the bare inequality.
  double safety = 0.95;
  int max_steps = 60;
  int bisection_steps = 40;
};

/// Picks the largest admissible eps (halving, then bisection) and the
/// smallest admissible L2 reachable by doubling from 1.05 L1 sqrt(-xi2).
/// Throws ConsistencyError when the search runs out of steps.
BoundSet select_constants(const SpectralData& spec,
                          const SelectOptions& options = {});

struct InequalityResult {
  std::string name;
  bool pass = true;
  int samples = 0;
  double worst_margin = 0;  ///< smallest signed margin (LHS - RHS)
  double worst_scaled = 0;  ///< margin divided by the sum of |terms|
  double worst_xi = 0;
  double tolerance = 0;     ///< relative tolerance applied to scaled margin
};

struct CertReport {
  std::vector<InequalityResult> inequalities;
  int grid_points = 0;
  bool pass = true;
};

/// 1024 uniform points on [10 min(xi2, xi3), 50] plus 1024 log-spaced
/// points around each kink (offsets 1e-9 .. 10 on both sides). Kinks
/// themselves are never sampled. Sorted, length `n` (multiple of 4).
std::vector<double> certification_grid(const BoundSet& bs, int n = 4096);

/// Relative tolerance on scaled margins; absorbs the rounding left after the
/// linear part of each inequality cancels exactly.
inline constexpr double kCertTolerance = 1e-10;

/// Evaluates the three differential inequalities satisfied by the bounds
/// with analytic derivatives on `grid`.
CertReport certify_inequalities(const BoundSet& bs, const SpectralData& spec,
                                const std::vector<double>& grid);

}  // namespace wavecrit
