#include "wavecrit/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace wavecrit {

void SolveConfig::validate() const {
  if (!(theta0 > 0.0 && theta0 <= 1.0)) {
    throw InvalidArgument("theta0 must lie in (0, 1]");
  }
  if (!(tol > 0.0)) throw InvalidArgument("tol must be > 0");
  if (max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
  if (stagnation_window < 1) {
    throw InvalidArgument("stagnation_window must be >= 1");
  }
  if (!(polish_tol >= 0.0)) throw InvalidArgument("polish_tol must be >= 0");
  if (!(anderson_floor >= 0.0 && anderson_floor <= 1.0)) {
    throw InvalidArgument("anderson_floor must lie in [0, 1]");
  }
  if (finish_attempts < 1) throw InvalidArgument("finish_attempts must be >= 1");
  if (anderson_depth < 0 || anderson_warmup < 0 || polish_steps < 0) {
    throw InvalidArgument(
        "anderson_depth, anderson_warmup and polish_steps must be >= 0");
  }
  if (grid) grid->validate();
}

namespace {

using Vec = Eigen::VectorXd;

Vec pack(const WaveProfile& p) {
  const auto n = static_cast<Eigen::Index>(p.grid.n);
  Vec v(2 * n);
  v.head(n) = Eigen::Map<const Vec>(p.s.data(), n);
  v.tail(n) = Eigen::Map<const Vec>(p.i.data(), n);
  return v;
}

WaveProfile unpack(const Vec& v, const WaveGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.n);
  WaveProfile p{grid, std::vector<double>(v.data(), v.data() + n),
                std::vector<double>(v.data() + n, v.data() + 2 * n), 0.0};
  p.refresh_right_limit();
  return p;
}

// Type-II Anderson mixing on the damped map. The least-squares fit of
// residual differences is weighted; see SolveConfig::anderson_floor.
class Mixer {
 public:
  Mixer(int depth, Vec weight) : depth_(depth), weight_(std::move(weight)) {}

  void clear() {
    xs_.clear();
    gs_.clear();
  }

  Vec next(const Vec& x, const Vec& g) {
    xs_.push_back(x);
    gs_.push_back(g);
    if (static_cast<int>(xs_.size()) > depth_ + 1) {
      xs_.pop_front();
      gs_.pop_front();
    }
    const auto cols = static_cast<Eigen::Index>(xs_.size()) - 1;
    if (cols < 1) return g;
    Eigen::MatrixXd df(x.size(), cols);
    Eigen::MatrixXd dg(x.size(), cols);
    for (Eigen::Index k = 0; k < cols; ++k) {
      df.col(k) = ((gs_[k + 1] - xs_[k + 1]) - (gs_[k] - xs_[k])).cwiseProduct(weight_);
      dg.col(k) = gs_[k + 1] - gs_[k];
    }
    const Vec f = (g - x).cwiseProduct(weight_);
    const Vec gamma = df.colPivHouseholderQr().solve(f);
    if (!gamma.allFinite()) return g;
    return g - dg * gamma;
  }

 private:
  int depth_;
  Vec weight_;
  std::deque<Vec> xs_;
  std::deque<Vec> gs_;
};

}  // namespace

SolveResult solve_from(const WaveProfile& initial, const SpectralData& spec,
                       const BoundSet& bs, const SolveConfig& cfg) {
  cfg.validate();
  const WaveGrid& grid = initial.grid;
  const GammaBounds gb = gamma_bounds(grid, bs);
  const auto n = static_cast<Eigen::Index>(grid.n);

  Vec lo(2 * n), hi(2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    lo[j] = gb.s_lo[j];
    hi[j] = gb.s_hi[j];
    lo[n + j] = gb.i_lo[j];
    hi[n + j] = gb.i_hi[j];
  }
  const auto project = [&](const Vec& v) {
    return v.cwiseMax(lo).cwiseMin(hi).eval();
  };

  Vec weight(2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    weight[j] = weight[n + j] = std::exp(-spec.mu * std::abs(grid.node(j)));
  }

  OperatorOptions op;
  op.closure = cfg.closure;

  SolveResult result;
  result.spectral = spec;
  result.bounds = bs;

  Eigen::Index tail = 0;
  while (tail < n && grid.node(tail) < std::min(bs.xi2, bs.xi3)) ++tail;

  // Candidate returned for an accepted iterate: its image, with the S tail
  // polished first. Sets the polish count and the candidate residuals.
  struct Candidate {
    Vec v;
    int polish = 0;
    double r = INFINITY;
    double sup = INFINITY;
  };
  const auto finish = [&](const Vec& pf) {
    Candidate c{pf};
    const double stop = cfg.polish_tol * spec.params.s_minus_inf;
    for (; c.polish < cfg.polish_steps && tail > 0; ++c.polish) {
      const Vec next = project(pack(apply_F(unpack(c.v, grid), spec, bs, op)));
      const double change = (next.head(tail) - c.v.head(tail)).cwiseAbs().maxCoeff();
      c.v.head(tail) = next.head(tail);
      if (change <= stop) break;
    }
    if (c.polish > 0) c.v = project(pack(apply_F(unpack(c.v, grid), spec, bs, op)));
    const Vec d = (project(pack(apply_F(unpack(c.v, grid), spec, bs, op))) - c.v).cwiseAbs();
    c.r = d.cwiseProduct(weight).maxCoeff();
    c.sup = d.maxCoeff();
    return c;
  };

  Vec u = project(pack(initial));
  double theta = cfg.theta0;
  double best = INFINITY;
  int last_best = 0;
  int attempts = 0;
  Candidate kept;
  Mixer mixer(cfg.anderson_depth, weight.cwiseMax(cfg.anderson_floor));
  for (int k = 0; k < cfg.max_iter; ++k) {
    const Vec fu = pack(apply_F(unpack(u, grid), spec, bs, op));
    const Vec pf = project(fu);
    const Vec diff = (pf - u).cwiseAbs();
    const double r = diff.cwiseProduct(weight).maxCoeff();
    result.trace.push_back({k + 1, r, theta});
    if (!std::isfinite(r)) break;

    if (r < cfg.tol) {
      // F is not a contraction along translations of the front, so the
      // image can sit above tol; keep iterating a little in that case.
      Candidate c = finish(pf);
      ++attempts;
      if (c.r < kept.r) {
        kept = std::move(c);
        result.iterations = k + 1;
        result.converged_residual = r;
        result.sup_residual = diff.maxCoeff();
      }
      if (kept.r < cfg.tol || attempts >= cfg.finish_attempts) {
        result.polish_steps = kept.polish;
        result.final_residual = kept.r;
        result.final_sup_residual = kept.sup;
        result.profile = unpack(kept.v, grid);
        return result;
      }
    }

    if (r < best) {
      best = r;
      last_best = k;
    } else if (r > 10.0 * best) {
      mixer.clear();
    }
    if (k - last_best >= cfg.stagnation_window) {
      theta *= 0.5;
      last_best = k;
      best = r;
      mixer.clear();
    }
    const Vec g = (1.0 - theta) * u + theta * fu;
    if (cfg.anderson_depth == 0 || k < cfg.anderson_warmup) {
      u = project(g);
    } else {
      u = project(mixer.next(u, g));
    }
  }

  if (attempts > 0) {
    result.polish_steps = kept.polish;
    result.final_residual = kept.r;
    result.final_sup_residual = kept.sup;
    result.profile = unpack(kept.v, grid);
    return result;
  }
  const double last =
      result.trace.empty() ? INFINITY : result.trace.back().residual;
  std::ostringstream msg;
  msg << "no convergence after " << result.trace.size()
      << " iterations (last residual " << last << ", tol " << cfg.tol << ")";
  throw NoConvergence(msg.str(), std::move(result.trace));
}

SolveResult solve_critical_wave(const ModelParams& params,
                                const SolveConfig& cfg) {
  cfg.validate();
  const SpectralData spec = derive_spectral(params, cfg.spectral);
  const BoundSet bs = select_constants(spec, cfg.select);
  const WaveGrid grid = cfg.grid ? *cfg.grid : default_grid(spec, bs);
  const GridAdequacy a = check_grid(grid, spec, bs);
  if (!a.ok()) {
    std::ostringstream msg;
    msg << "grid [" << grid.xi_min << ", " << grid.xi_max << "] with h = "
        << grid.h() << " is inadequate:";
    if (!a.left_ok) msg << " xi_min must be < min(xi2, xi3) - 10/lambda*;";
    if (!a.right_ok) msg << " xi_max must be > xi1 + 20 d2/c*;";
    if (!a.kernel_ok) msg << " h max(lambda1+, lambda2+) must be < 0.5;";
    throw InvalidArgument(msg.str());
  }
  return solve_from(midpoint_profile(grid, bs), spec, bs, cfg);
}

}  // namespace wavecrit
