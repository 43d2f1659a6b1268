#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "wavecrit/errors.hpp"
#include "wavecrit/pdesim.hpp"

using namespace wavecrit;

namespace {

SimConfig small_domain() {
  SimConfig c;
  c.domain_length = 60;
  c.dx = 0.2;
  c.t_end = 10;
  c.boundary_margin = 5;
  return c;
}

SimState advance(SimState st, const SimConfig& cfg, const ModelParams& p, double t_end) {
  const double dt = cfg.step_size(p);
  const long n = std::lround(t_end / dt);
  SimConfig fixed = cfg;
  fixed.dt = t_end / static_cast<double>(n);
  for (long k = 0; k < n; ++k) st = step(st, fixed, p);
  return st;
}

}  // namespace

TEST_CASE("disease-free state is an equilibrium") {
  const ModelParams p;
  const SimConfig cfg = small_domain();
  SimState st;
  st.s.assign(cfg.nodes(), p.s_minus_inf);
  st.i.assign(cfg.nodes(), 0.0);
  st.r.assign(cfg.nodes(), 0.0);
  const SimState next = step(st, cfg, p);
  CHECK(next.s == st.s);
  CHECK(next.i == st.i);
  CHECK(next.r == st.r);
  CHECK(next.t == doctest::Approx(cfg.step_size(p)));
}

TEST_CASE("uniform I without susceptibles decays at rate gamma") {
  ModelParams p;
  p.gamma = 1.3;
  const SimConfig cfg = small_domain();
  SimState st;
  st.s.assign(cfg.nodes(), 0.0);
  st.i.assign(cfg.nodes(), 0.5);
  st.r.assign(cfg.nodes(), 0.0);
  const SimState end = advance(st, cfg, p, 1.0);
  const double expect = 0.5 * std::exp(-p.gamma);
  for (double v : end.i) CHECK(std::abs(v / expect - 1) < 1e-4);
  for (double v : end.r) CHECK(v == doctest::Approx(0.5 - expect).epsilon(1e-3));
}

TEST_CASE("total mass is conserved and S never rises") {
  const ModelParams p;
  const SimConfig cfg = small_domain();
  SimState st = initial_state(cfg, p);
  const double m0 = total_mass(st, cfg.dx);
  for (int k = 0; k < 1000; ++k) {
    const SimState next = step(st, cfg, p);
    for (std::size_t j = 0; j < st.s.size(); ++j) {
      CHECK(next.s[j] <= st.s[j] + 1e-15);
      CHECK(next.i[j] >= 0.0);
    }
    st = next;
  }
  CHECK(std::abs(total_mass(st, cfg.dx) - m0) < 1e-10 * m0);
}

TEST_CASE("initial state and seed") {
  const ModelParams p;
  SimConfig cfg = small_domain();
  const SimState st = initial_state(cfg, p);
  CHECK(st.s.size() == 301);
  CHECK(cfg.seed(p) == doctest::Approx(0.01 * p.plateau()));
  CHECK(st.i[0] == doctest::Approx(0.01));
  CHECK(st.i[25] == doctest::Approx(0.01));
  CHECK(st.i[26] == 0.0);
  cfg.include_r = false;
  CHECK(initial_state(cfg, p).r.empty());

  ModelParams sub;
  sub.beta = 0.8;
  CHECK(cfg.seed(sub) == doctest::Approx(1e-4 * sub.s_minus_inf));
}

TEST_CASE("config validation") {
  const ModelParams p;
  SimConfig cfg = small_domain();
  CHECK_NOTHROW(cfg.validate(p));
  cfg.dt = 10 * cfg.step_size(p);
  CHECK_THROWS_AS(cfg.validate(p), InvalidArgument);
  cfg.enforce_stability = false;
  CHECK_NOTHROW(cfg.validate(p));
  cfg = small_domain();
  cfg.level = 2 * p.plateau();
  CHECK_THROWS_AS(cfg.validate(p), InvalidArgument);
  cfg = small_domain();
  cfg.dx = 0;
  CHECK_THROWS_AS(cfg.validate(p), InvalidArgument);
  cfg = small_domain();
  cfg.boundary_margin = 60;
  CHECK_THROWS_AS(cfg.validate(p), InvalidArgument);
}

TEST_CASE("an unstable explicit step is caught") {
  const ModelParams p;
  SimConfig cfg = small_domain();
  cfg.enforce_stability = false;
  cfg.dt = 3 * cfg.step_size(p);
  try {
    run_simulation(p, cfg);
    FAIL("expected InstabilityError");
  } catch (const InstabilityError& e) {
    CHECK(e.step() > 0);
    CHECK(e.time() > 0);
    CHECK(e.code() == "instability");
  }
}

TEST_CASE("front position") {
  std::vector<double> i = {0.5, 0.4, 0.3, 0.2, 0.1, 0.0};
  const auto x = front_position(i, 0.5, 0.25);
  REQUIRE(x);
  CHECK(*x == doctest::Approx(1.25));
  CHECK_FALSE(front_position(i, 0.5, 0.9));
  // The rightmost crossing wins.
  i = {0.0, 0.5, 0.0, 0.0, 0.5, 0.0};
  CHECK(*front_position(i, 1.0, 0.25) == doctest::Approx(4.5));
}

TEST_CASE("peak position is exact for a parabola") {
  std::vector<double> v(50);
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double x = 0.1 * static_cast<double>(j);
    v[j] = 1 - (x - 2.237) * (x - 2.237);
  }
  CHECK(peak_position(v, 0.1) == doctest::Approx(2.237).epsilon(1e-12));
}

TEST_CASE("front speed from a synthetic record") {
  std::vector<FrontSample> h;
  for (int k = 1; k <= 300; ++k) {
    const double t = 0.5 * k;
    h.push_back({t, 2.0 * t - 1.5 * std::log(t) + 3.0});
  }
  const SpeedEstimate s = measure_front_speed(h);
  CHECK(s.log_speed == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(s.log_k == doctest::Approx(1.5).epsilon(1e-5));
  // The plain slope on the late half sees 2 - 1.5 / t for t in [75, 150].
  CHECK(s.speed < 2.0);
  CHECK(s.speed > 2.0 - 1.5 / 75);
  CHECK(s.samples > 100);

  std::vector<FrontSample> few(h.begin(), h.begin() + 5);
  CHECK_THROWS_AS(measure_front_speed(few), InsufficientRecord);
}

TEST_CASE("comoving extraction") {
  const ModelParams p;
  const SimConfig cfg = small_domain();
  SimState st = initial_state(cfg, p);
  for (std::size_t j = 0; j < st.i.size(); ++j) {
    const double x = cfg.dx * static_cast<double>(j);
    st.i[j] = 0.2 * std::exp(-(x - 30) * (x - 30));
    st.s[j] = x < 30 ? 0.1 : 1.0;
  }
  const WaveGrid target{-10, 10, 201};
  const WaveProfile w = extract_comoving_profile(st, cfg.dx, target, 0.0);
  // xi = -(x - 30): the peak lands on xi = 0 and S is mirrored.
  CHECK(w.i[100] == doctest::Approx(0.2).epsilon(1e-3));
  CHECK(w.s.front() == doctest::Approx(1.0));
  CHECK(w.s.back() == doctest::Approx(0.1));
  CHECK(w.i[90] == doctest::Approx(0.2 * std::exp(-1.0)).epsilon(1e-2));

  const WaveGrid wide{-40, 40, 801};
  CHECK_THROWS_AS(extract_comoving_profile(st, cfg.dx, wide, 0.0), InsufficientRecord);

  const ProfileComparison same = compare_profiles(w, w, p.s_minus_inf);
  CHECK(same.i_sup_rel < 1e-14);
  CHECK(same.plateau_diff == 0.0);
}

TEST_CASE("short supercritical run spreads") {
  const ModelParams p;
  SimConfig cfg;
  cfg.domain_length = 120;
  cfg.t_end = 30;
  const SimResult r = run_simulation(p, cfg);
  CHECK(r.tracking);
  CHECK_FALSE(r.truncated);
  REQUIRE(r.front.size() > 20);
  CHECK(r.front.back().x > r.front.front().x + 30);
  const SpeedEstimate s = measure_front_speed(r.front);
  CHECK(s.speed > 1.5);
  CHECK(s.speed < 2.05);
}

TEST_CASE("subcritical run dies out") {
  ModelParams p;
  p.beta = 0.8;
  SimConfig cfg = small_domain();
  cfg.t_end = 30;
  const SimResult r = run_simulation(p, cfg);
  REQUIRE(r.max_i.size() > 10);
  // Linearized about S = S_-inf, I decays at least like e^{(beta - gamma) t}.
  CHECK(r.max_i.back().x < std::exp((p.beta - p.gamma) * cfg.t_end) * r.max_i.front().x);
  for (std::size_t k = 1; k < r.max_i.size(); ++k)
    CHECK(r.max_i[k].x <= r.max_i[k - 1].x);
  CHECK_FALSE(r.tracking);
}
