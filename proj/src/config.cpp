#include "wavecrit/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "wavecrit/errors.hpp"

namespace wavecrit {

namespace {

// Thrown by value parsers; the caller attaches line and key.
struct BadValue {
  std::string what;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view v) {
  double out = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end)
    throw BadValue{"expected a number, got '" + std::string(v) + "'"};
  return out;
}

int to_int(std::string_view v) {
  int out = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end)
    throw BadValue{"expected an integer, got '" + std::string(v) + "'"};
  return out;
}

bool to_bool(std::string_view v) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw BadValue{"expected true or false, got '" + std::string(v) + "'"};
}

std::string to_string(std::string_view v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
    v = v.substr(1, v.size() - 2);
  if (v.empty()) throw BadValue{"empty string"};
  return std::string(v);
}

using Setter = std::function<void(RunConfig&, std::string_view)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto num = [&t](const char* key, auto member) {
      t[key] = [member](RunConfig& c, std::string_view v) { member(c) = to_double(v); };
    };
    auto integer = [&t](const char* key, auto member) {
      t[key] = [member](RunConfig& c, std::string_view v) { member(c) = to_int(v); };
    };
    auto flag = [&t](const char* key, auto member) {
      t[key] = [member](RunConfig& c, std::string_view v) { member(c) = to_bool(v); };
    };

    num("model.d1", [](RunConfig& c) -> double& { return c.model.d1; });
    num("model.d2", [](RunConfig& c) -> double& { return c.model.d2; });
    num("model.d3", [](RunConfig& c) -> double& { return c.model.d3; });
    num("model.beta", [](RunConfig& c) -> double& { return c.model.beta; });
    num("model.gamma", [](RunConfig& c) -> double& { return c.model.gamma; });
    num("model.s_minus_inf", [](RunConfig& c) -> double& { return c.model.s_minus_inf; });

    num("spectral.beta1", [](RunConfig& c) -> std::optional<double>& { return c.solve.spectral.beta1; });
    num("spectral.beta2", [](RunConfig& c) -> std::optional<double>& { return c.solve.spectral.beta2; });
    num("spectral.mu", [](RunConfig& c) -> std::optional<double>& { return c.solve.spectral.mu; });

    num("solve.theta0", [](RunConfig& c) -> double& { return c.solve.theta0; });
    num("solve.tol", [](RunConfig& c) -> double& { return c.solve.tol; });
    integer("solve.max_iter", [](RunConfig& c) -> int& { return c.solve.max_iter; });
    integer("solve.stagnation_window", [](RunConfig& c) -> int& { return c.solve.stagnation_window; });
    integer("solve.anderson_depth", [](RunConfig& c) -> int& { return c.solve.anderson_depth; });
    integer("solve.anderson_warmup", [](RunConfig& c) -> int& { return c.solve.anderson_warmup; });
    num("solve.anderson_floor", [](RunConfig& c) -> double& { return c.solve.anderson_floor; });
    integer("solve.finish_attempts", [](RunConfig& c) -> int& { return c.solve.finish_attempts; });
    integer("solve.polish_steps", [](RunConfig& c) -> int& { return c.solve.polish_steps; });
    num("solve.polish_tol", [](RunConfig& c) -> double& { return c.solve.polish_tol; });
    num("solve.safety", [](RunConfig& c) -> double& { return c.solve.select.safety; });
    t["solve.closure"] = [](RunConfig& c, std::string_view v) {
      if (v == "asymptotic") c.solve.closure = TailClosure::kAsymptotic;
      else if (v == "zero") c.solve.closure = TailClosure::kZero;
      else throw BadValue{"expected asymptotic or zero, got '" + std::string(v) + "'"};
    };

    num("grid.xi_min", [](RunConfig& c) -> std::optional<double>& { return c.grid.xi_min; });
    num("grid.xi_max", [](RunConfig& c) -> std::optional<double>& { return c.grid.xi_max; });
    num("grid.h", [](RunConfig& c) -> std::optional<double>& { return c.grid.h; });

    num("sim.domain_length", [](RunConfig& c) -> double& { return c.sim.domain_length; });
    num("sim.dx", [](RunConfig& c) -> double& { return c.sim.dx; });
    num("sim.t_end", [](RunConfig& c) -> double& { return c.sim.t_end; });
    num("sim.dt", [](RunConfig& c) -> std::optional<double>& { return c.sim.dt; });
    num("sim.level", [](RunConfig& c) -> std::optional<double>& { return c.sim.level; });
    flag("sim.include_r", [](RunConfig& c) -> bool& { return c.sim.include_r; });
    num("sim.output_interval", [](RunConfig& c) -> double& { return c.sim.output_interval; });
    num("sim.seed_width", [](RunConfig& c) -> double& { return c.sim.seed_width; });
    num("sim.seed_amplitude", [](RunConfig& c) -> std::optional<double>& { return c.sim.seed_amplitude; });
    num("sim.snapshot_interval", [](RunConfig& c) -> double& { return c.sim.snapshot_interval; });
    num("sim.boundary_margin", [](RunConfig& c) -> double& { return c.sim.boundary_margin; });
    flag("sim.enforce_stability", [](RunConfig& c) -> bool& { return c.sim.enforce_stability; });

    t["output.dir"] = [](RunConfig& c, std::string_view v) { c.output_dir = to_string(v); };
    flag("output.profile", [](RunConfig& c) -> bool& { return c.emit.profile; });
    flag("output.trace", [](RunConfig& c) -> bool& { return c.emit.trace; });
    flag("output.snapshots", [](RunConfig& c) -> bool& { return c.emit.snapshots; });
    flag("output.front", [](RunConfig& c) -> bool& { return c.emit.front; });

    t["diagnose.profile"] = [](RunConfig& c, std::string_view v) { c.profile_input = to_string(v); };
    return t;
  }();
  return table;
}

void assign(RunConfig& cfg, const std::string& key, std::string_view value, int line) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown key '" + key + "'", line, key);
  try {
    it->second(cfg, value);
  } catch (const BadValue& e) {
    std::ostringstream os;
    if (line > 0) os << "line " << line << ": ";
    os << key << ": " << e.what;
    throw ConfigError(os.str(), line, key);
  }
}

}  // namespace

WaveGrid GridOverrides::resolve(const WaveGrid& fallback) const {
  return WaveGrid::with_spacing(xi_min.value_or(fallback.xi_min),
                                xi_max.value_or(fallback.xi_max),
                                h.value_or(fallback.h()));
}

void RunConfig::validate() const {
  model.validate();
  solve.validate();
  sim.validate(model);
  if (grid.h && !(*grid.h > 0)) throw InvalidArgument("grid.h must be positive");
  if (grid.xi_min && grid.xi_max && !(*grid.xi_min < *grid.xi_max))
    throw InvalidArgument("grid.xi_min must be below grid.xi_max");
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  static const std::set<std::string> sections = {
      "model", "spectral", "solve", "grid", "sim", "output", "diagnose"};
  std::string section;
  std::set<std::string> seen;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    const auto hash = line.find_first_of("#;");
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header",
                          line_no, std::string(line));
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!sections.count(section))
        throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" + section + "]",
                          line_no, section);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value",
                        line_no, std::string(line));
    const std::string name(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": key '" + name +
                            "' appears before any [section]",
                        line_no, name);
    const std::string key = section + "." + name;
    if (!seen.insert(key).second)
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key " + key,
                        line_no, key);
    if (!setters().count(key))
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key " + key,
                        line_no, key);
    assign(base, key, value, line_no);
  }
  return base;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError("override '" + std::string(assignment) + "' is not KEY=VALUE", 0,
                      std::string(assignment));
  assign(cfg, std::string(trim(assignment.substr(0, eq))), trim(assignment.substr(eq + 1)), 0);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [k, _] : setters()) out.push_back(k);
  return out;
}

}  // namespace wavecrit
