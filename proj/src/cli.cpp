#include "wavecrit/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <map>
#include <ostream>

#include "CLI11.hpp"
#include "wavecrit/errors.hpp"
#include "wavecrit/io.hpp"

namespace wavecrit {

namespace fs = std::filesystem;

namespace {

constexpr double kShapeLag = 10.0;

std::string path_in(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.output_dir) / name).string();
}

void ensure_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec || !fs::is_directory(cfg.output_dir))
    throw IoError("cannot create output directory " + cfg.output_dir);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

SolveConfig resolved_solve(const RunConfig& cfg) {
  SolveConfig sc = cfg.solve;
  if (cfg.grid.any()) {
    const auto spec = derive_spectral(cfg.model, sc.spectral);
    const auto bs = select_constants(spec, sc.select);
    sc.grid = cfg.grid.resolve(default_grid(spec, bs));
  }
  return sc;
}

Json checks_json(const std::vector<Check>& checks) {
  Json a = Json::array();
  for (const auto& c : checks) a.push_back(to_json(c));
  return a;
}

bool all_pass(const std::vector<Check>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

Check bound_check(std::string name, double value, double threshold) {
  Check c(std::move(name));
  c.value = value;
  c.threshold = threshold;
  c.pass = std::isfinite(value) && value <= threshold;
  return c;
}

void print_checks(std::ostream& out, const std::vector<Check>& checks) {
  for (const auto& c : checks)
    out << "  [" << (c.pass ? "ok" : "FAIL") << "] " << c.name << " = " << num(c.value)
        << " (threshold " << num(c.threshold) << ")"
        << (c.detail.empty() ? "" : " " + c.detail) << '\n';
}

int cmd_spectral(const RunConfig& cfg, std::ostream& out) {
  const auto spec = derive_spectral(cfg.model, cfg.solve.spectral);
  Json doc = to_json(spec);
  doc["pass"] = true;
  write_json(path_in(cfg, "spectral.json"), doc, "spectral/1");
  out << "c_star = " << num(spec.c_star) << "\nlambda_star = " << num(spec.lambda_star)
      << "\nR0 = " << num(spec.r0) << "\nM = " << num(cfg.model.plateau())
      << "\nlambda1 = (" << num(spec.lambda1_minus) << ", " << num(spec.lambda1_plus)
      << ")\nlambda2 = (" << num(spec.lambda2_minus) << ", " << num(spec.lambda2_plus)
      << ")\nLambda1 = " << num(spec.big_lambda1) << "\nLambda2 = " << num(spec.big_lambda2)
      << "\nmu = " << num(spec.mu) << '\n';
  return kExitOk;
}

int cmd_verify_bounds(const RunConfig& cfg, std::ostream& out) {
  const auto spec = derive_spectral(cfg.model, cfg.solve.spectral);
  const auto bs = select_constants(spec, cfg.solve.select);
  const auto cert = certify_inequalities(bs, spec, certification_grid(bs));
  Json doc = {{"pass", cert.pass}, {"bounds", to_json(bs)}, {"certification", to_json(cert)}};
  write_json(path_in(cfg, "bounds.json"), doc, "bounds/1");
  out << "eps = " << num(bs.eps) << ", L2 = " << num(bs.l2) << ", xi1 = " << num(bs.xi1)
      << ", xi2 = " << num(bs.xi2) << ", xi3 = " << num(bs.xi3) << '\n';
  for (const auto& q : cert.inequalities)
    out << "  [" << (q.pass ? "ok" : "FAIL") << "] " << q.name << ": worst scaled margin "
        << num(q.worst_scaled) << " at xi = " << num(q.worst_xi) << '\n';
  return cert.pass ? kExitOk : kExitChecksFailed;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const auto res = solve_critical_wave(cfg.model, resolved_solve(cfg));
  if (cfg.emit.profile) write_profile_csv(path_in(cfg, "wave_profile.csv"), res.profile);
  if (cfg.emit.trace) write_trace_csv(path_in(cfg, "trace.csv"), res.trace);
  const auto& g = res.profile.grid;
  Json doc = {{"pass", true},
              {"iterations", res.iterations},
              {"polish_steps", res.polish_steps},
              {"converged_residual", res.converged_residual},
              {"final_residual", res.final_residual},
              {"sup_residual", res.sup_residual},
              {"final_sup_residual", res.final_sup_residual},
              {"tol", cfg.solve.tol},
              {"grid", {{"xi_min", g.xi_min}, {"xi_max", g.xi_max}, {"n", g.n}, {"h", g.h()}}},
              {"spectral", to_json(res.spectral)},
              {"bounds", to_json(res.bounds)}};
  write_json(path_in(cfg, "solve.json"), doc, "solve/1");
  out << "converged in " << res.iterations << " iterations (+" << res.polish_steps
      << " polish sweeps), residual " << num(res.converged_residual)
      << " (returned profile " << num(res.final_residual) << ") on [" << num(g.xi_min)
      << ", " << num(g.xi_max) << "], h = " << num(g.h()) << '\n';
  return kExitOk;
}

int cmd_diagnose(const RunConfig& cfg, std::ostream& out) {
  const std::string input =
      cfg.profile_input.empty() ? path_in(cfg, "wave_profile.csv") : cfg.profile_input;
  const auto profile = read_profile_csv(input);
  const auto spec = derive_spectral(cfg.model, cfg.solve.spectral);
  const auto bs = select_constants(spec, cfg.solve.select);
  const auto rep = diagnose(profile, spec, bs);
  Json doc = to_json(rep);
  doc["profile"] = input;
  write_json(path_in(cfg, "diagnostics.json"), doc, "diagnostics/1");
  out << "S_inf = " << num(rep.s_infinity) << ", mass = " << num(rep.wave_mass)
      << ", max I = " << num(rep.i_max) << ", ODE residual = " << num(rep.ode_residual) << '\n';
  print_checks(out, rep.checks);
  return rep.pass ? kExitOk : kExitChecksFailed;
}

struct SimOutcome {
  SimResult result;
  Json doc;
  std::vector<Check> checks;
};

SimOutcome simulate(const RunConfig& cfg, const SimConfig& sc) {
  SimOutcome o;
  const SimState init = initial_state(sc, cfg.model);
  o.result = run_simulation(cfg.model, sc);
  const auto& r = o.result;
  const auto& fin = r.final_state;

  double lowest = 0;
  for (const auto* v : {&fin.s, &fin.i, &fin.r})
    for (double x : *v) lowest = std::min(lowest, x);
  o.checks.push_back(bound_check("nonnegative", lowest < 0 ? -lowest : 0.0, 0.0));
  if (sc.include_r) {
    const double m0 = total_mass(init, sc.dx), m1 = total_mass(fin, sc.dx);
    const double budget = 1e-10 * std::max(1.0, static_cast<double>(r.steps) / 1000.0);
    o.checks.push_back(bound_check("mass_conservation", std::abs(m1 - m0) / m0, budget));
  }

  o.doc = {{"dt", r.dt}, {"steps", r.steps}, {"t_final", fin.t}, {"level", r.level},
           {"tracking", r.tracking}, {"truncated", r.truncated},
           {"max_i_initial", r.max_i.front().x}, {"max_i_final", r.max_i.back().x}};
  if (cfg.model.r0() > 1.0 && r.tracking) {
    const double c = critical_speed(cfg.model);
    const auto est = measure_front_speed(r.front);
    o.doc["c_star"] = c;
    o.doc["speed"] = to_json(est);
    o.checks.push_back(bound_check("speed_plain", std::abs(est.speed / c - 1), kTolerances.speed_plain_rel));
    o.checks.push_back(bound_check("speed_log", std::abs(est.log_speed / c - 1), kTolerances.speed_log_rel));
  } else {
    Check c("infection_decays");
    c.value = r.max_i.back().x;
    c.threshold = r.max_i.front().x;
    c.pass = c.value < c.threshold;
    o.checks.push_back(c);
  }
  return o;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  auto o = simulate(cfg, cfg.sim);
  const auto& r = o.result;
  if (cfg.emit.snapshots) {
    for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "snapshot_%04zu.csv", k + 1);
      write_snapshot_csv(path_in(cfg, name), r.snapshots[k], cfg.sim.dx);
    }
    write_snapshot_csv(path_in(cfg, "snapshot_final.csv"), r.final_state, cfg.sim.dx);
  }
  if (cfg.emit.front && r.tracking) write_front_csv(path_in(cfg, "front.csv"), r.front);
  o.doc["checks"] = checks_json(o.checks);
  o.doc["pass"] = all_pass(o.checks);
  write_json(path_in(cfg, "simulation.json"), o.doc, "simulation/1");
  out << r.steps << " steps of dt = " << num(r.dt) << " to t = " << num(r.final_state.t)
      << (r.truncated ? " (front reached the boundary margin)" : "") << '\n';
  if (o.doc.contains("speed"))
    out << "front speed " << num(o.doc["speed"]["speed"].get<double>()) << " (log-corrected "
        << num(o.doc["speed"]["log_speed"].get<double>()) << "), c* = "
        << num(o.doc["c_star"].get<double>()) << '\n';
  else
    out << "max I " << num(r.max_i.front().x) << " -> " << num(r.max_i.back().x) << '\n';
  print_checks(out, o.checks);
  return all_pass(o.checks) ? kExitOk : kExitChecksFailed;
}

double xi_of_peak(const WaveProfile& p) {
  return p.grid.xi_min + peak_position(p.i, p.grid.h());
}

int cmd_crosscheck(const RunConfig& cfg, std::ostream& out) {
  SimConfig sc = cfg.sim;
  if (sc.snapshot_interval <= 0) sc.snapshot_interval = kShapeLag;
  const SolveConfig solve_cfg = resolved_solve(cfg);

  SolveResult sol;
  SimOutcome sim;
  if (thread_budget() >= 2) {
    auto fut = std::async(std::launch::async, [&] { return simulate(cfg, sc); });
    sol = solve_critical_wave(cfg.model, solve_cfg);
    sim = fut.get();
  } else {
    sol = solve_critical_wave(cfg.model, solve_cfg);
    sim = simulate(cfg, sc);
  }

  const double xi_peak = xi_of_peak(sol.profile);
  const WaveGrid window = WaveGrid::with_spacing(xi_peak - 60.0, xi_peak + 60.0, sc.dx);
  const auto& fin = sim.result.final_state;
  const auto comoving = extract_comoving_profile(fin, sc.dx, window, xi_peak);
  const auto cmp = compare_profiles(comoving, sol.profile, cfg.model.s_minus_inf);

  std::vector<Check> checks;
  checks.push_back(bound_check("profile_i_sup", cmp.i_sup_rel, kTolerances.cross_i_sup));
  checks.push_back(bound_check("s_plateau", cmp.plateau_diff, kTolerances.cross_plateau));
  Json doc = {{"note", "plausibility cross-check: convergence of the initial-value problem "
                       "to the critical wave is not a proven result"},
              {"xi_peak", xi_peak},
              {"t", fin.t},
              {"comparison", to_json(cmp)}};

  // Shape invariance between the final state and the snapshot kShapeLag earlier.
  const SimState* earlier = nullptr;
  for (const auto& s : sim.result.snapshots)
    if (std::abs(s.t - (fin.t - kShapeLag)) < 1e-6) earlier = &s;
  if (earlier) {
    const auto prev = extract_comoving_profile(*earlier, sc.dx, window, xi_peak);
    const auto drift = compare_profiles(prev, comoving, cfg.model.s_minus_inf);
    checks.push_back(bound_check("shape_drift", drift.i_sup_rel, kTolerances.shape_drift));
    doc["shape_drift"] = {{"t_earlier", earlier->t}, {"i_sup_rel", drift.i_sup_rel}};
  }
  for (const auto& c : sim.checks) checks.push_back(c);
  doc["checks"] = checks_json(checks);
  doc["pass"] = all_pass(checks);
  write_json(path_in(cfg, "crosscheck.json"), doc, "crosscheck/1");
  if (cfg.emit.profile) write_profile_csv(path_in(cfg, "comoving_profile.csv"), comoving);

  out << "solver: " << sol.iterations << " iterations; simulation to t = " << num(fin.t)
      << "\nsup|I_sim - I_wave| / max I = " << num(cmp.i_sup_rel) << ", S plateaus "
      << num(cmp.plateau_a) << " vs " << num(cmp.plateau_b) << '\n';
  print_checks(out, checks);
  return all_pass(checks) ? kExitOk : kExitChecksFailed;
}

int cmd_report(const RunConfig& cfg, std::ostream& out) {
  static const std::vector<std::pair<std::string, std::string>> parts = {
      {"spectral", "spectral.json"},   {"verify-bounds", "bounds.json"},
      {"solve", "solve.json"},         {"diagnose", "diagnostics.json"},
      {"simulate", "simulation.json"}, {"crosscheck", "crosscheck.json"}};
  Json doc = {{"stages", Json::object()}};
  bool pass = true;
  int found = 0;
  for (const auto& [stage, file] : parts) {
    const std::string p = path_in(cfg, file);
    if (!fs::exists(p)) {
      out << "  [--] " << stage << " (no " << file << ")\n";
      continue;
    }
    Json part = read_json(p);
    const bool ok = part.value("pass", false);
    pass = pass && ok;
    ++found;
    out << "  [" << (ok ? "ok" : "FAIL") << "] " << stage << '\n';
    doc["stages"][stage] = std::move(part);
  }
  if (found == 0) throw InsufficientRecord("no stage outputs found in " + cfg.output_dir);
  doc["pass"] = pass;
  write_json(path_in(cfg, "report.json"), doc, "report/1");
  return pass ? kExitOk : kExitChecksFailed;
}

Json error_json(const std::string& code, const std::string& message) {
  return {{"schema", "error/1"}, {"error", {{"code", code}, {"message", message}}}};
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = {
      "spectral", "verify-bounds", "solve", "diagnose", "simulate", "crosscheck", "report"};
  return names;
}

int thread_budget() {
  const char* env = std::getenv("WAVECRIT_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 1024)
    throw InvalidArgument(std::string("WAVECRIT_THREADS must be a positive integer, got '") +
                          env + "'");
  return static_cast<int>(v);
}

int run_subcommand(const std::string& name, const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  ensure_dir(cfg);
  if (name == "spectral") return cmd_spectral(cfg, out);
  if (name == "verify-bounds") return cmd_verify_bounds(cfg, out);
  if (name == "solve") return cmd_solve(cfg, out);
  if (name == "diagnose") return cmd_diagnose(cfg, out);
  if (name == "simulate") return cmd_simulate(cfg, out);
  if (name == "crosscheck") return cmd_crosscheck(cfg, out);
  if (name == "report") return cmd_report(cfg, out);
  throw InvalidArgument("unknown subcommand '" + name + "'");
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Critical traveling waves of a diffusive SIR model"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::vector<std::string> overrides;
  static const std::map<std::string, std::string> about = {
      {"spectral", "critical speed, decay rates and kernel constants"},
      {"verify-bounds", "select the bound constants and certify the inequalities"},
      {"solve", "iterate the fixed-point operator to the critical wave"},
      {"diagnose", "check a wave profile without the operator"},
      {"simulate", "run the reaction-diffusion system and measure the front"},
      {"crosscheck", "compare the simulated front with the solved wave"},
      {"report", "collect the stage outputs in the output directory"}};
  for (const auto& name : subcommand_names()) {
    auto* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--config", config_path, "config file (key = value with [section] headers)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--override", overrides, "section.key=value, repeatable");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  const std::string name = app.get_subcommands().front()->get_name();

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    for (const auto& o : overrides) apply_override(cfg, o);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    return run_subcommand(name, cfg, out);
  } catch (const Error& e) {
    Json j = error_json(e.code(), e.what());
    if (const auto* c = dynamic_cast<const ConfigError*>(&e)) {
      j["error"]["line"] = c->line();
      j["error"]["key"] = c->key();
    } else if (const auto* s = dynamic_cast<const InstabilityError*>(&e)) {
      j["error"]["step"] = s->step();
      j["error"]["time"] = s->time();
    } else if (const auto* g = dynamic_cast<const GammaViolation*>(&e)) {
      j["error"]["xi"] = g->xi();
      j["error"]["amount"] = g->amount();
    } else if (const auto* n = dynamic_cast<const NoConvergence*>(&e)) {
      j["error"]["iterations"] = n->trace().size();
    }
    out << j.dump() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    out << error_json("internal", e.what()).dump() << '\n';
    return kExitError;
  }
}

}  // namespace wavecrit
