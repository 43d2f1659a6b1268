#include "wavecrit/pdesim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wavecrit/errors.hpp"

namespace wavecrit {

namespace {

// Per-node stability/positivity budget of one forward Euler stage.
double euler_rate(const SimConfig& cfg, const ModelParams& p) {
  const double dmax = std::max({p.d1, p.d2, p.d3});
  return 2.0 * dmax / (cfg.dx * cfg.dx) + std::max(p.beta, p.gamma);
}

struct Fields {
  std::vector<double> s, i, r;
};

class Stepper {
 public:
  Stepper(const SimConfig& cfg, const ModelParams& p, std::size_t n)
      : cfg_(cfg), p_(p), guard_(kGuardRelative * p.s_minus_inf) {
    for (auto* v : {&ks_, &ki_, &kr_, &s1_, &i1_, &r1_}) v->assign(n, 0.0);
  }

  void advance(SimState& st, double dt) {
    const bool with_r = !st.r.empty();
    rates(st.s, st.i, st.r, with_r);
    const std::size_t n = st.s.size();
    for (std::size_t j = 0; j < n; ++j) {
      s1_[j] = st.s[j] + dt * ks_[j];
      i1_[j] = st.i[j] + dt * ki_[j];
    }
    if (with_r)
      for (std::size_t j = 0; j < n; ++j) r1_[j] = st.r[j] + dt * kr_[j];
    rates(s1_, i1_, r1_, with_r);
    for (std::size_t j = 0; j < n; ++j) {
      st.s[j] = 0.5 * (st.s[j] + s1_[j] + dt * ks_[j]);
      st.i[j] = 0.5 * (st.i[j] + i1_[j] + dt * ki_[j]);
    }
    if (with_r)
      for (std::size_t j = 0; j < n; ++j)
        st.r[j] = 0.5 * (st.r[j] + r1_[j] + dt * kr_[j]);
    st.t += dt;
  }

 private:
  static void laplacian(const std::vector<double>& u, double coef,
                        std::vector<double>& out) {
    const std::size_t n = u.size();
    out[0] = coef * 2.0 * (u[1] - u[0]);
    for (std::size_t j = 1; j + 1 < n; ++j)
      out[j] = coef * (u[j + 1] - 2.0 * u[j] + u[j - 1]);
    out[n - 1] = coef * 2.0 * (u[n - 2] - u[n - 1]);
  }

  void rates(const std::vector<double>& s, const std::vector<double>& i,
             const std::vector<double>& r, bool with_r) {
    const double inv = 1.0 / (cfg_.dx * cfg_.dx);
    laplacian(s, p_.d1 * inv, ks_);
    laplacian(i, p_.d2 * inv, ki_);
    if (with_r) laplacian(r, p_.d3 * inv, kr_);
    const std::size_t n = s.size();
    for (std::size_t j = 0; j < n; ++j) {
      const double f = detail::incidence(s[j], i[j], p_.beta, guard_);
      const double rec = p_.gamma * i[j];
      ks_[j] -= f;
      ki_[j] += f - rec;
      if (with_r) kr_[j] += rec;
    }
  }

  const SimConfig& cfg_;
  const ModelParams& p_;
  double guard_;
  std::vector<double> ks_, ki_, kr_, s1_, i1_, r1_;
};

double field_max(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

bool finite_all(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

double interp(const std::vector<double>& v, double x0, double h, double x) {
  const double pos = (x - x0) / h;
  const double last = static_cast<double>(v.size() - 1);
  if (pos <= 0) return v.front();
  if (pos >= last) return v.back();
  const auto j = static_cast<std::size_t>(pos);
  const double w = pos - static_cast<double>(j);
  return (1 - w) * v[j] + w * v[j + 1];
}

struct LineFit {
  double slope, intercept, slope_se;
};

LineFit fit_line(const std::vector<FrontSample>& pts) {
  const double n = static_cast<double>(pts.size());
  double mt = 0, mx = 0;
  for (const auto& q : pts) {
    mt += q.t;
    mx += q.x;
  }
  mt /= n;
  mx /= n;
  double stt = 0, stx = 0;
  for (const auto& q : pts) {
    stt += (q.t - mt) * (q.t - mt);
    stx += (q.t - mt) * (q.x - mx);
  }
  const double slope = stx / stt;
  const double icept = mx - slope * mt;
  double rss = 0;
  for (const auto& q : pts) {
    const double e = q.x - (slope * q.t + icept);
    rss += e * e;
  }
  return {slope, icept, std::sqrt(rss / std::max(n - 2, 1.0) / stt)};
}

}  // namespace

void SimConfig::validate(const ModelParams& params) const {
  params.validate();
  auto positive = [](double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v))
      throw InvalidArgument(std::string(name) + " must be positive and finite");
  };
  positive(domain_length, "domain_length");
  positive(dx, "dx");
  positive(t_end, "t_end");
  positive(output_interval, "output_interval");
  positive(seed_width, "seed_width");
  if (domain_length / dx < 4) throw InvalidArgument("domain has fewer than 5 nodes");
  if (seed_width > domain_length)
    throw InvalidArgument("seed_width exceeds domain_length");
  if (snapshot_interval < 0 || !std::isfinite(snapshot_interval))
    throw InvalidArgument("snapshot_interval must be non-negative");
  if (boundary_margin < 0 || boundary_margin >= domain_length)
    throw InvalidArgument("boundary_margin must lie in [0, domain_length)");
  if (dt) {
    positive(*dt, "dt");
    if (enforce_stability && *dt * euler_rate(*this, params) > 1.0) {
      std::ostringstream os;
      os << "dt = " << *dt << " violates the stability bound dt <= "
         << 1.0 / euler_rate(*this, params);
      throw InvalidArgument(os.str());
    }
  }
  if (seed_amplitude && (!(*seed_amplitude > 0) || !std::isfinite(*seed_amplitude)))
    throw InvalidArgument("seed_amplitude must be positive");
  if (level) {
    const double m = params.plateau();
    if (!(*level > 0) || (m > 0 && *level >= m))
      throw InvalidArgument("level must lie in (0, M)");
  }
}

std::size_t SimConfig::nodes() const {
  return static_cast<std::size_t>(std::llround(domain_length / dx)) + 1;
}

double SimConfig::step_size(const ModelParams& params) const {
  double base = dt ? *dt
                   : std::min(0.4 * dx * dx / std::max({params.d1, params.d2, params.d3}),
                              0.9 / euler_rate(*this, params));
  // Shrink slightly so an output interval is a whole number of steps.
  const double k = std::ceil(output_interval / base - 1e-9);
  return output_interval / k;
}

double SimConfig::seed(const ModelParams& params) const {
  if (seed_amplitude) return *seed_amplitude;
  const double m = params.plateau();
  return m > 0 ? 0.01 * m : 1e-4 * params.s_minus_inf;
}

SimState initial_state(const SimConfig& cfg, const ModelParams& params) {
  const std::size_t n = cfg.nodes();
  SimState st;
  st.s.assign(n, params.s_minus_inf);
  st.i.assign(n, 0.0);
  if (cfg.include_r) st.r.assign(n, 0.0);
  const double a = cfg.seed(params);
  for (std::size_t j = 0; j < n; ++j)
    if (static_cast<double>(j) * cfg.dx <= cfg.seed_width + 1e-12) st.i[j] = a;
  return st;
}

SimState step(const SimState& state, const SimConfig& cfg,
              const ModelParams& params) {
  if (state.s.size() != state.i.size() ||
      (!state.r.empty() && state.r.size() != state.s.size()) || state.s.size() < 3)
    throw InvalidArgument("state fields have inconsistent sizes");
  SimState next = state;
  Stepper(cfg, params, state.s.size()).advance(next, cfg.step_size(params));
  return next;
}

double total_mass(const SimState& state, double dx) {
  const std::size_t n = state.s.size();
  double sum = 0;
  for (std::size_t j = 0; j < n; ++j) {
    double v = state.s[j] + state.i[j] + (state.r.empty() ? 0.0 : state.r[j]);
    sum += (j == 0 || j + 1 == n) ? 0.5 * v : v;
  }
  return sum * dx;
}

std::optional<double> front_position(const std::vector<double>& i, double dx,
                                     double level) {
  for (std::size_t j = i.size(); j-- > 0;) {
    if (i[j] >= level) {
      if (j + 1 == i.size()) return static_cast<double>(j) * dx;
      const double w = (i[j] - level) / (i[j] - i[j + 1]);
      return (static_cast<double>(j) + w) * dx;
    }
  }
  return std::nullopt;
}

double peak_position(const std::vector<double>& v, double dx) {
  const auto it = std::max_element(v.begin(), v.end());
  const auto j = static_cast<std::size_t>(it - v.begin());
  double x = static_cast<double>(j) * dx;
  if (j > 0 && j + 1 < v.size()) {
    const double a = v[j - 1], b = v[j], c = v[j + 1];
    const double den = a - 2 * b + c;
    if (den < 0) x += 0.5 * (a - c) / den * dx;
  }
  return x;
}

SimResult run_simulation(const ModelParams& params, const SimConfig& cfg) {
  cfg.validate(params);
  SimResult res;
  res.dt = cfg.step_size(params);
  const double m = params.plateau();
  res.tracking = cfg.level.has_value() || m > 0;
  res.level = cfg.level ? *cfg.level : (m > 0 ? 0.1 * m : 0.0);

  SimState st = initial_state(cfg, params);
  const double limit = 10.0 * std::max({field_max(st.s), field_max(st.i),
                                        field_max(st.r)});
  Stepper stepper(cfg, params, st.s.size());
  const long per_output = std::lround(cfg.output_interval / res.dt);
  const long outputs = std::lround(std::ceil(cfg.t_end / cfg.output_interval - 1e-9));
  const double x_stop = cfg.domain_length - cfg.boundary_margin;
  double next_snapshot = cfg.snapshot_interval;

  auto record = [&]() {
    res.max_i.push_back({st.t, field_max(st.i)});
    if (!res.tracking) return;
    if (auto x = front_position(st.i, cfg.dx, res.level)) {
      if (*x > x_stop) {
        res.truncated = true;
        return;
      }
      res.front.push_back({st.t, *x});
    }
  };
  record();
  for (long k = 0; k < outputs && !res.truncated; ++k) {
    for (long q = 0; q < per_output; ++q) stepper.advance(st, res.dt);
    res.steps += per_output;
    st.t = static_cast<double>(k + 1) * cfg.output_interval;
    const bool ok = finite_all(st.s) && finite_all(st.i) && finite_all(st.r);
    const double peak = std::max({field_max(st.s), field_max(st.i), field_max(st.r)});
    if (!ok || peak > limit) {
      std::ostringstream os;
      os << "simulation blew up at t = " << st.t
         << (ok ? " (field exceeds 10x its initial maximum)" : " (non-finite value)");
      throw InstabilityError(os.str(), res.steps, st.t);
    }
    record();
    if (cfg.snapshot_interval > 0 && st.t >= next_snapshot - 1e-9) {
      res.snapshots.push_back(st);
      next_snapshot += cfg.snapshot_interval;
    }
  }
  res.final_state = std::move(st);
  return res;
}

SpeedEstimate measure_front_speed(const std::vector<FrontSample>& history,
                                  double burn_fraction) {
  if (history.size() < 8)
    throw InsufficientRecord("front record has " + std::to_string(history.size()) +
                             " samples, need at least 8");
  const double t_last = history.back().t;
  std::vector<FrontSample> late, settled;
  for (const auto& q : history) {
    if (q.t >= 0.5 * t_last) late.push_back(q);
    if (q.t >= burn_fraction * t_last && q.t > 0) settled.push_back(q);
  }
  if (late.size() < 8 || settled.size() < 8)
    throw InsufficientRecord("too few front samples after burn-in");

  SpeedEstimate est;
  const LineFit lf = fit_line(late);
  est.speed = lf.slope;
  est.speed_ci = 1.96 * lf.slope_se;
  est.samples = static_cast<int>(late.size());

  // x = c t - k ln t + x0 by normal equations on (t, ln t, 1).
  double a[3][4] = {};
  for (const auto& q : settled) {
    const double f[3] = {q.t, -std::log(q.t), 1.0};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) a[r][c] += f[r] * f[c];
      a[r][3] += f[r] * q.x;
    }
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
    }
  }
  est.log_speed = a[0][3] / a[0][0];
  est.log_k = a[1][3] / a[1][1];
  est.log_samples = static_cast<int>(settled.size());
  return est;
}

WaveProfile extract_comoving_profile(const SimState& state, double dx,
                                     const WaveGrid& target, double xi_peak) {
  target.validate();
  if (state.s.size() < 3 || state.i.size() != state.s.size())
    throw InvalidArgument("state fields have inconsistent sizes");
  const double x_peak = peak_position(state.i, dx);
  const double length = static_cast<double>(state.s.size() - 1) * dx;
  const double x_lo = x_peak + (xi_peak - target.xi_max);
  const double x_hi = x_peak + (xi_peak - target.xi_min);
  if (x_lo < 0 || x_hi > length) {
    std::ostringstream os;
    os << "comoving window [" << x_lo << ", " << x_hi
       << "] leaves the domain [0, " << length << "]";
    throw InsufficientRecord(os.str());
  }
  WaveProfile out;
  out.grid = target;
  out.s.resize(target.n);
  out.i.resize(target.n);
  for (std::size_t j = 0; j < target.n; ++j) {
    const double x = x_peak + (xi_peak - target.node(j));
    out.s[j] = interp(state.s, 0.0, dx, x);
    out.i[j] = interp(state.i, 0.0, dx, x);
  }
  out.refresh_right_limit();
  return out;
}

ProfileComparison compare_profiles(const WaveProfile& a, const WaveProfile& b,
                                   double s_minus_inf) {
  if (a.s.size() != a.grid.n || b.s.size() != b.grid.n)
    throw GridMismatch("profile arrays do not match their grids");
  ProfileComparison out;
  const double imax = field_max(b.i);
  if (!(imax > 0)) throw InvalidArgument("reference profile has no infection");
  double sup = 0;
  const double hb = b.grid.h();
  for (std::size_t j = 0; j < a.grid.n; ++j) {
    const double xi = a.grid.node(j);
    sup = std::max(sup, std::abs(a.i[j] - interp(b.i, b.grid.xi_min, hb, xi)));
  }
  out.i_sup_rel = sup / imax;
  out.plateau_a = a.s_right_limit;
  // Plateau of b read at the same xi as the right end of a.
  double acc = 0;
  const std::size_t na = a.grid.n;
  for (std::size_t j = na - 5; j < na; ++j)
    acc += interp(b.s, b.grid.xi_min, hb, a.grid.node(j));
  out.plateau_b = acc / 5.0;
  out.plateau_diff = std::abs(out.plateau_a - out.plateau_b) / s_minus_inf;
  return out;
}

}  // namespace wavecrit
