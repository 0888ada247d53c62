// tdcshell run --case scordelis_lo --p 4 --n 16 --out results/

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "tdcshell/errors.hpp"
#include "tdcshell/run.hpp"

namespace {

using tdcshell::Json;

int report_error(const std::string& kind, const std::string& message, int code) {
  std::cerr << Json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
  return code;
}

Json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw tdcshell::ConfigError("cannot open problem file " + path);
  try {
    return Json::parse(is);
  } catch (const Json::parse_error& ex) {
    throw tdcshell::ConfigError("problem file " + path + " is not valid JSON: " + ex.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reissner-Mindlin shells in tangential calculus, solved with NURBS"};
  app.require_subcommand(1);
  CLI::App* run_cmd = app.add_subcommand("run", "solve a benchmark or a problem file over (p, n) grids");

  std::optional<std::string> case_id, problem_file, p_text, n_text, constraint, out_dir;
  std::optional<int> qbump;
  bool vtk = false, dump_system = false, no_residuals = false, nurbs_geometry = false;
  run_cmd->add_option("--case", case_id, "scordelis_lo | hyperbolic_paraboloid | flower");
  run_cmd->add_option("--problem", problem_file, "JSON problem/run definition; flags override its values");
  run_cmd->add_option("--p", p_text, "degree or comma-separated degrees, e.g. 3,4,5");
  run_cmd->add_option("--n", n_text, "knot spans per side or a comma-separated list");
  run_cmd->add_option("--constraint", constraint, "lagrange | penalty:<alpha>");
  run_cmd->add_option("--qbump", qbump, "extra Gauss points per direction for the stiffness");
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_flag("--vtk", vtk, "write a VTK surface per (p, n)");
  run_cmd->add_flag("--dump-system", dump_system, "write the saddle-point matrix and rhs (Matrix Market)");
  run_cmd->add_flag("--no-residuals", no_residuals, "skip the strong-form residual norms");
  run_cmd->add_flag("--nurbs-geometry", nurbs_geometry, "scordelis_lo: exact rational arc instead of the analytic map");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), tdcshell::kExitUsage);
  }

  tdcshell::RunConfig cfg;
  try {
    Json j = Json::object();
    if (problem_file) j = read_json_file(*problem_file);
    if (case_id) {
      j.erase("problem");
      j["case"] = *case_id;
    }
    if (nurbs_geometry) j["nurbs_geometry"] = true;
    if (!j.contains("case") && !j.contains("problem")) {
      throw tdcshell::ConfigError("give --case or --problem");
    }
    cfg = tdcshell::config_from_json(j);
    if (problem_file) cfg.source_file = *problem_file;
    if (p_text) cfg.p_list = tdcshell::parse_int_list(*p_text, "--p");
    if (n_text) cfg.n_list = tdcshell::parse_int_list(*n_text, "--n");
    if (constraint) tdcshell::parse_constraint(*constraint, cfg.mode, cfg.alpha);
    if (qbump) cfg.quad_bump = *qbump;
    if (out_dir) cfg.out_dir = *out_dir;
    if (vtk) cfg.vtk = true;
    if (dump_system) cfg.dump_system = true;
    if (no_residuals) cfg.residuals = false;
  } catch (const tdcshell::ConfigError& e) {
    return report_error("config", e.what(), tdcshell::kExitUsage);
  }

  try {
    const tdcshell::RunOutcome outcome = tdcshell::run(cfg, std::cerr);
    std::ifstream summary(cfg.out_dir / "summary.txt");
    std::cout << summary.rdbuf();
    if (outcome.exit_code != tdcshell::kExitOk) {
      return report_error("solve", "one or more cells failed; see convergence.csv", outcome.exit_code);
    }
    return tdcshell::kExitOk;
  } catch (const tdcshell::ConfigError& e) {
    return report_error("config", e.what(), tdcshell::kExitUsage);
  } catch (const std::exception& e) {
    return report_error("solve", e.what(), tdcshell::kExitSolve);
  }
}
