#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wavecrit/config.hpp"

namespace wavecrit {

/// Exit statuses shared by run_subcommand and run_cli.
enum ExitCode : int {
  kExitOk = 0,
  kExitChecksFailed = 1,
  kExitError = 2,  ///< a module raised; error JSON printed
  kExitUsage = 3,
};

const std::vector<std::string>& subcommand_names();

/// Runs one pipeline stage, writing artifacts under cfg.output_dir and a
/// short summary to `out`. Module errors propagate as wavecrit::Error.
int run_subcommand(const std::string& name, const RunConfig& cfg, std::ostream& out);

/// Full command line: `wavecrit <subcommand> [--config PATH] [--out DIR]
/// [--override KEY=VALUE]...`. Errors become {"schema": "error/1", ...} on
/// `out` with kExitError.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// WAVECRIT_THREADS, default 1. Throws InvalidArgument on junk.
int thread_budget();

}  // namespace wavecrit
