#include "wavecrit/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wavecrit/errors.hpp"

namespace wavecrit {

namespace {

constexpr const char* kSchemaTag = "wavecrit-schema";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto c = line.find(',');
    out.push_back(trim(line.substr(0, c)));
    if (c == std::string_view::npos) break;
    line = line.substr(c + 1);
  }
  return out;
}

std::size_t column(const CsvTable& t, const std::string& name, const std::string& path) {
  for (std::size_t k = 0; k < t.columns.size(); ++k)
    if (t.columns[k] == name) return k;
  throw IoError(path + ": missing column '" + name + "'");
}

double meta_number(const CsvTable& t, const std::string& key, const std::string& path) {
  const auto it = t.meta.find(key);
  if (it == t.meta.end()) throw IoError(path + ": missing metadata '" + key + "'");
  double v = 0;
  const auto& s = it->second;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw IoError(path + ": metadata '" + key + "' is not a number");
  return v;
}

void check_open(const std::ofstream& out, const std::string& path) {
  if (!out) throw IoError("cannot write " + path);
}

}  // namespace

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  check_open(out, path);
  out << "# " << kSchemaTag << ": " << table.schema << '\n';
  for (const auto& [k, v] : table.meta) out << "# " << k << ": " << v << '\n';
  for (std::size_t k = 0; k < table.columns.size(); ++k)
    out << (k ? "," : "") << table.columns[k];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << fmt(row[k]);
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

CsvTable read_csv(const std::string& path, const std::string& expected_schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  CsvTable t;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      line = trim(line.substr(1));
      const auto colon = line.find(':');
      if (colon == std::string_view::npos) continue;
      std::string key(trim(line.substr(0, colon)));
      std::string value(trim(line.substr(colon + 1)));
      if (key == kSchemaTag) t.schema = value;
      else t.meta[key] = value;
      continue;
    }
    const auto cells = split(line);
    if (t.columns.empty()) {
      for (auto c : cells) t.columns.emplace_back(c);
      continue;
    }
    if (cells.size() != t.columns.size())
      throw IoError(path + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(t.columns.size()) + " fields");
    std::vector<double> row(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const auto c = cells[k];
      auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), row[k]);
      if (ec != std::errc() || p != c.data() + c.size())
        throw IoError(path + ":" + std::to_string(line_no) + ": bad number '" +
                      std::string(c) + "'");
    }
    t.rows.push_back(std::move(row));
  }
  if (t.schema.empty()) throw IoError(path + ": missing schema header");
  if (!expected_schema.empty() && t.schema != expected_schema)
    throw IoError(path + ": schema " + t.schema + ", expected " + expected_schema);
  if (t.columns.empty()) throw IoError(path + ": missing column header");
  return t;
}

void write_profile_csv(const std::string& path, const WaveProfile& p) {
  if (p.s.size() != p.grid.n || p.i.size() != p.grid.n)
    throw GridMismatch("profile arrays do not match the grid");
  CsvTable t;
  t.schema = kProfileSchema;
  t.columns = {"xi", "S", "I"};
  t.rows.reserve(p.grid.n);
  for (std::size_t j = 0; j < p.grid.n; ++j) t.rows.push_back({p.grid.node(j), p.s[j], p.i[j]});
  write_csv(path, t);
}

WaveProfile read_profile_csv(const std::string& path) {
  const CsvTable t = read_csv(path, kProfileSchema);
  const auto cx = column(t, "xi", path), cs = column(t, "S", path), ci = column(t, "I", path);
  if (t.rows.size() < 3) throw IoError(path + ": profile needs at least 3 rows");
  WaveProfile p;
  p.grid.xi_min = t.rows.front()[cx];
  p.grid.xi_max = t.rows.back()[cx];
  p.grid.n = t.rows.size();
  p.grid.validate();
  const double h = p.grid.h();
  for (std::size_t j = 0; j < t.rows.size(); ++j) {
    if (std::abs(t.rows[j][cx] - p.grid.node(j)) > 1e-9 * h + 1e-12 * std::abs(p.grid.node(j)))
      throw GridMismatch(path + ": xi column is not uniformly spaced at row " +
                         std::to_string(j + 1));
    p.s.push_back(t.rows[j][cs]);
    p.i.push_back(t.rows[j][ci]);
  }
  p.refresh_right_limit();
  return p;
}

void write_trace_csv(const std::string& path, const std::vector<TraceEntry>& trace) {
  CsvTable t;
  t.schema = kTraceSchema;
  t.columns = {"iteration", "residual", "theta"};
  for (const auto& e : trace) t.rows.push_back({double(e.iteration), e.residual, e.theta});
  write_csv(path, t);
}

std::vector<TraceEntry> read_trace_csv(const std::string& path) {
  const CsvTable t = read_csv(path, kTraceSchema);
  const auto ck = column(t, "iteration", path), cr = column(t, "residual", path),
             ct = column(t, "theta", path);
  std::vector<TraceEntry> out;
  for (const auto& r : t.rows) out.push_back({static_cast<int>(r[ck]), r[cr], r[ct]});
  return out;
}

void write_snapshot_csv(const std::string& path, const SimState& state, double dx) {
  CsvTable t;
  t.schema = kSnapshotSchema;
  t.meta["t"] = fmt(state.t);
  t.meta["dx"] = fmt(dx);
  t.columns = {"x", "S", "I", "R"};
  for (std::size_t j = 0; j < state.s.size(); ++j)
    t.rows.push_back({static_cast<double>(j) * dx, state.s[j], state.i[j],
                      state.r.empty() ? 0.0 : state.r[j]});
  write_csv(path, t);
}

SimState read_snapshot_csv(const std::string& path, double* dx) {
  const CsvTable t = read_csv(path, kSnapshotSchema);
  const auto cs = column(t, "S", path), ci = column(t, "I", path), cr = column(t, "R", path);
  SimState st;
  st.t = meta_number(t, "t", path);
  if (dx) *dx = meta_number(t, "dx", path);
  for (const auto& r : t.rows) {
    st.s.push_back(r[cs]);
    st.i.push_back(r[ci]);
    st.r.push_back(r[cr]);
  }
  return st;
}

void write_front_csv(const std::string& path, const std::vector<FrontSample>& front) {
  CsvTable t;
  t.schema = kFrontSchema;
  t.columns = {"t", "x_level"};
  for (const auto& f : front) t.rows.push_back({f.t, f.x});
  write_csv(path, t);
}

std::vector<FrontSample> read_front_csv(const std::string& path) {
  const CsvTable t = read_csv(path, kFrontSchema);
  const auto ct = column(t, "t", path), cx = column(t, "x_level", path);
  std::vector<FrontSample> out;
  for (const auto& r : t.rows) out.push_back({r[ct], r[cx]});
  return out;
}

Json to_json(const ModelParams& p) {
  return {{"d1", p.d1}, {"d2", p.d2}, {"d3", p.d3}, {"beta", p.beta},
          {"gamma", p.gamma}, {"s_minus_inf", p.s_minus_inf}};
}

Json to_json(const SpectralData& s) {
  return {{"params", to_json(s.params)},
          {"r0", s.r0},
          {"c_star", s.c_star},
          {"lambda_star", s.lambda_star},
          {"plateau_m", s.params.plateau()},
          {"beta1", s.beta1},
          {"beta2", s.beta2},
          {"lambda1_minus", s.lambda1_minus},
          {"lambda1_plus", s.lambda1_plus},
          {"lambda2_minus", s.lambda2_minus},
          {"lambda2_plus", s.lambda2_plus},
          {"big_lambda1", s.big_lambda1},
          {"big_lambda2", s.big_lambda2},
          {"mu", s.mu},
          {"guard", s.guard}};
}

Json to_json(const BoundSet& b) {
  return {{"s_minus_inf", b.s_minus_inf}, {"lambda_star", b.lambda_star},
          {"m", b.m}, {"l1", b.l1}, {"l2", b.l2}, {"eps", b.eps},
          {"xi1", b.xi1}, {"xi2", b.xi2}, {"xi3", b.xi3}};
}

Json to_json(const CertReport& r) {
  Json list = Json::array();
  for (const auto& q : r.inequalities)
    list.push_back({{"name", q.name}, {"pass", q.pass}, {"samples", q.samples},
                    {"worst_margin", q.worst_margin}, {"worst_scaled", q.worst_scaled},
                    {"worst_xi", q.worst_xi}, {"tolerance", q.tolerance}});
  return {{"grid_points", r.grid_points}, {"pass", r.pass}, {"inequalities", list}};
}

Json to_json(const Check& c) {
  return {{"name", c.name}, {"pass", c.pass}, {"value", c.value},
          {"threshold", c.threshold}, {"detail", c.detail}};
}

Json to_json(const WaveReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  return {{"pass", r.pass},
          {"s_infinity", r.s_infinity},
          {"wave_mass", r.wave_mass},
          {"mass_chain", {{"mass", r.identity.mass}, {"middle", r.identity.middle},
                          {"rhs", r.identity.rhs}, {"from_flux", r.identity.from_flux}}},
          {"i_max", r.i_max},
          {"i_bound_m", r.i_bound_m},
          {"i_bound_p", r.i_bound_p},
          {"tail_slope", r.tail_slope},
          {"p_limit", r.p_limit},
          {"p_target", r.p_target},
          {"ode_residual", r.ode_residual},
          {"checks", checks}};
}

Json to_json(const SpeedEstimate& e) {
  return {{"speed", e.speed}, {"speed_ci", e.speed_ci}, {"log_speed", e.log_speed},
          {"log_k", e.log_k}, {"samples", e.samples}, {"log_samples", e.log_samples}};
}

Json to_json(const ProfileComparison& c) {
  return {{"i_sup_rel", c.i_sup_rel}, {"plateau_sim", c.plateau_a},
          {"plateau_solver", c.plateau_b}, {"plateau_diff", c.plateau_diff}};
}

void write_json(const std::string& path, Json doc, const std::string& schema) {
  Json out = {{"schema", schema}};
  for (auto& [k, v] : doc.items())
    if (k != "schema") out[k] = std::move(v);
  std::ofstream f(path, std::ios::binary);
  check_open(f, path);
  f << out.dump(2) << '\n';
  if (!f) throw IoError("write failed for " + path);
}

Json read_json(const std::string& path, const std::string& expected_schema) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  Json doc;
  try {
    doc = Json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("schema") || !doc["schema"].is_string())
    throw IoError(path + ": missing schema member");
  if (!expected_schema.empty() && doc["schema"] != expected_schema)
    throw IoError(path + ": schema " + doc["schema"].get<std::string>() + ", expected " +
                  expected_schema);
  return doc;
}

}  // namespace wavecrit
