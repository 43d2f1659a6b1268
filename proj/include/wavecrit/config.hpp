#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wavecrit/model.hpp"
#include "wavecrit/pdesim.hpp"
#include "wavecrit/solver.hpp"

namespace wavecrit {

/// Partial grid request; unset fields fall back to the default grid.
struct GridOverrides {
  std::optional<double> xi_min;
  std::optional<double> xi_max;
  std::optional<double> h;

  bool any() const { return xi_min || xi_max || h; }
  WaveGrid resolve(const WaveGrid& fallback) const;
};

struct EmitOptions {
  bool profile = true;
  bool trace = true;
  bool snapshots = true;
  bool front = true;
};

struct RunConfig {
  ModelParams model;
  SolveConfig solve;
  SimConfig sim;
  GridOverrides grid;
  std::string output_dir = ".";
  std::string profile_input;  ///< diagnose input, default <out>/wave_profile.csv
  EmitOptions emit;

  /// Validates every block through its own module.
  void validate() const;
};

/// Parses the line-oriented config grammar:
///
///   # comment            (also ';')
///   [section]
///   key = value
///
/// Sections: model, spectral, solve, grid, sim, output, diagnose. Unknown
/// sections or keys, duplicates and malformed values raise ConfigError with
/// the 1-based line number and the dotted key.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::string& path);

/// Applies "section.key=value". ConfigError carries line 0.
void apply_override(RunConfig& cfg, std::string_view assignment);

/// Every accepted dotted key, sorted.
std::vector<std::string> config_keys();

}  // namespace wavecrit
