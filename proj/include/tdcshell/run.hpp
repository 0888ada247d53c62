#pragma once

// Batch driver behind the command-line tool: convergence sweeps with CSV,
// summary, VTK and matrix dumps written to an output directory.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tdcshell/io.hpp"

namespace tdcshell {

inline constexpr int kCsvSchemaVersion = 1;

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitSolve = 3 };

struct RunConfig {
  ProblemDefinition problem;
  std::vector<int> p_list{4};
  std::vector<int> n_list{16};
  ConstraintMode mode = ConstraintMode::lagrange;
  double alpha = 1e8;
  int quad_bump = 0;
  bool residuals = true;
  std::filesystem::path out_dir = "tdcshell_out";
  bool vtk = false;
  bool dump_system = false;
  std::optional<std::filesystem::path> source_file;  // problem file the config came from
};

/// Run keys: "case" | "problem", "p", "n", "constraint", "qbump", "residuals",
/// "out", "vtk", "dump_system"; "nurbs_geometry" goes with "case".
RunConfig config_from_json(const Json& j);
Json config_to_json(const RunConfig& cfg);

/// "lagrange" or "penalty:<alpha>"; throws ConfigError.
void parse_constraint(const std::string& text, ConstraintMode& mode, double& alpha);
std::string constraint_text(ConstraintMode mode, double alpha);

/// Comma-separated positive integers, e.g. "3,4,5".
std::vector<int> parse_int_list(const std::string& text, const std::string& what);

/// Throws ConfigError on an invalid configuration; writes warnings to `log`.
void validate(const RunConfig& cfg, std::ostream& log);

struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<ConvergenceRow> rows;
};

/// Runs the sweep and writes config.json, convergence.csv, summary.txt and
/// summary.json (plus VTK and Matrix Market files on request) into out_dir.
RunOutcome run(const RunConfig& cfg, std::ostream& log);

}  // namespace tdcshell
