#include "tdcshell/run.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "tdcshell/errors.hpp"

namespace tdcshell {

namespace {

std::vector<int> int_list_from_json(const Json& j, const std::string& what) {
  std::vector<int> out;
  if (j.is_number_integer()) {
    out.push_back(j.get<int>());
  } else if (j.is_array()) {
    for (const Json& v : j) {
      if (!v.is_number_integer()) throw ConfigError(what + " must be an integer or a list of integers");
      out.push_back(v.get<int>());
    }
  } else {
    throw ConfigError(what + " must be an integer or a list of integers");
  }
  return out;
}

bool get_bool(const Json& j, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw ConfigError(std::string(key) + " must be a boolean");
  return j.at(key).get<bool>();
}

std::string cell_stem(const ConvergenceRow& row) {
  return row.case_id + "_p" + std::to_string(row.p) + "_n" + std::to_string(row.n);
}

void open_or_throw(std::ofstream& os, const std::filesystem::path& path) {
  os.open(path);
  if (!os) throw ConfigError("cannot write " + path.string());
}

void write_summary_text(std::ostream& os, const RunConfig& cfg, const StudyCase& sc,
                        const std::vector<ConvergenceRow>& rows) {
  os << "case " << sc.id << ", constraint " << constraint_text(cfg.mode, cfg.alpha) << ", quadrature bump "
     << cfg.quad_bump << '\n';
  const std::string qoi_name = sc.probe ? "u_z at (" + std::to_string((*sc.probe)[0]) + ", " +
                                              std::to_string((*sc.probe)[1]) + ")"
                                        : std::string("elastic energy");
  os << "quantity of interest: " << qoi_name;
  if (sc.reference) os << ", reference " << std::setprecision(10) << *sc.reference;
  os << "\n\n";
  for (const ConvergenceRow& r : rows) {
    os << "p=" << r.p << " n=" << r.n;
    if (!r.error.empty()) {
      os << "  FAILED: " << r.error << '\n';
      continue;
    }
    os << std::setprecision(8) << "  dofs=" << r.dofs << "  qoi=" << *r.qoi;
    if (r.qoi_normalized) os << " (normalized " << *r.qoi_normalized << ")";
    os << "  energy=" << r.energy << "  eps_F=" << r.eps_force_rel << "  eps_M=" << r.eps_moment_abs
       << "  tangentiality=" << r.tangentiality << std::setprecision(3) << "  time=" << r.seconds
       << "s (assembly " << r.assembly_seconds << "s, solve " << r.solve_seconds << "s)";
    if (r.pre_asymptotic) os << "  [pre-asymptotic]";
    os << '\n';
  }
}

Json summary_json(const RunConfig& cfg, const StudyCase& sc, const std::vector<ConvergenceRow>& rows) {
  Json j;
  j["case"] = sc.id;
  j["constraint"] = constraint_text(cfg.mode, cfg.alpha);
  j["csv_schema_version"] = kCsvSchemaVersion;
  if (sc.reference) j["reference"] = *sc.reference;
  Json cells = Json::array();
  for (const ConvergenceRow& r : rows) {
    Json c;
    c["p"] = r.p;
    c["n"] = r.n;
    c["seconds"] = r.seconds;
    if (!r.error.empty()) {
      c["error"] = r.error;
    } else {
      c["dofs"] = r.dofs;
      c["qoi"] = *r.qoi;
      if (r.qoi_normalized) c["qoi_normalized"] = *r.qoi_normalized;
      c["energy"] = r.energy;
      // JSON has no NaN; undefined residuals become null
      c["eps_force_rel"] = std::isfinite(r.eps_force_rel) ? Json(r.eps_force_rel) : Json();
      c["eps_moment_abs"] = std::isfinite(r.eps_moment_abs) ? Json(r.eps_moment_abs) : Json();
      c["tangentiality"] = r.tangentiality;
      c["solver_residual"] = r.solver_residual;
      c["assembly_seconds"] = r.assembly_seconds;
      c["solve_seconds"] = r.solve_seconds;
    }
    cells.push_back(std::move(c));
  }
  j["cells"] = std::move(cells);
  return j;
}

}  // namespace

void parse_constraint(const std::string& text, ConstraintMode& mode, double& alpha) {
  if (text == "lagrange") {
    mode = ConstraintMode::lagrange;
    return;
  }
  const std::string prefix = "penalty";
  if (text.rfind(prefix, 0) == 0) {
    mode = ConstraintMode::penalty;
    if (text.size() == prefix.size()) {
      alpha = RunConfig{}.alpha;
      return;
    }
    if (text[prefix.size()] != ':') throw ConfigError("constraint must be 'lagrange' or 'penalty:<alpha>'");
    const std::string num = text.substr(prefix.size() + 1);
    std::size_t used = 0;
    try {
      alpha = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != num.size()) throw ConfigError("invalid penalty parameter '" + num + "'");
    return;
  }
  throw ConfigError("constraint must be 'lagrange' or 'penalty:<alpha>', got '" + text + "'");
}

std::string constraint_text(ConstraintMode mode, double alpha) {
  if (mode == ConstraintMode::lagrange) return "lagrange";
  std::ostringstream os;
  os << "penalty:" << std::setprecision(6) << alpha;
  return os.str();
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, end - start);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw ConfigError(what + " must be a comma-separated list of integers, got '" + text + "'");
    }
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

RunConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  static const std::set<std::string> keys{"case", "nurbs_geometry", "problem", "p", "n", "constraint",
                                          "qbump", "residuals", "out", "vtk", "dump_system"};
  for (const auto& [key, value] : j.items()) {
    if (!keys.count(key)) throw ConfigError("unknown configuration key '" + key + "'");
  }
  RunConfig cfg;
  if (j.contains("case") && j.contains("problem")) throw ConfigError("give either 'case' or 'problem', not both");
  if (j.contains("case")) {
    Json pj{{"case", j.at("case")}};
    if (j.contains("nurbs_geometry")) pj["nurbs_geometry"] = j.at("nurbs_geometry");
    cfg.problem = problem_from_json(pj);
  } else if (j.contains("problem")) {
    if (j.contains("nurbs_geometry")) throw ConfigError("'nurbs_geometry' goes with 'case'");
    cfg.problem = problem_from_json(j.at("problem"));
  } else {
    throw ConfigError("configuration needs a 'case' or a 'problem'");
  }
  if (j.contains("p")) cfg.p_list = int_list_from_json(j.at("p"), "p");
  if (j.contains("n")) cfg.n_list = int_list_from_json(j.at("n"), "n");
  if (j.contains("constraint")) {
    if (!j.at("constraint").is_string()) throw ConfigError("constraint must be a string");
    parse_constraint(j.at("constraint").get<std::string>(), cfg.mode, cfg.alpha);
  }
  if (j.contains("qbump")) {
    if (!j.at("qbump").is_number_integer()) throw ConfigError("qbump must be an integer");
    cfg.quad_bump = j.at("qbump").get<int>();
  }
  cfg.residuals = get_bool(j, "residuals", cfg.residuals);
  if (j.contains("out")) {
    if (!j.at("out").is_string()) throw ConfigError("out must be a string");
    cfg.out_dir = j.at("out").get<std::string>();
  }
  cfg.vtk = get_bool(j, "vtk", cfg.vtk);
  cfg.dump_system = get_bool(j, "dump_system", cfg.dump_system);
  return cfg;
}

Json config_to_json(const RunConfig& cfg) {
  Json j;
  j["problem"] = problem_to_json(cfg.problem);
  j["p"] = cfg.p_list;
  j["n"] = cfg.n_list;
  j["constraint"] = constraint_text(cfg.mode, cfg.alpha);
  j["qbump"] = cfg.quad_bump;
  j["residuals"] = cfg.residuals;
  j["out"] = cfg.out_dir.string();
  j["vtk"] = cfg.vtk;
  j["dump_system"] = cfg.dump_system;
  return j;
}

void validate(const RunConfig& cfg, std::ostream& log) {
  if (cfg.p_list.empty()) throw ConfigError("p list is empty");
  if (cfg.n_list.empty()) throw ConfigError("n list is empty");
  for (int p : cfg.p_list) {
    if (p < 1) throw ConfigError("degree p must be >= 1, got " + std::to_string(p));
    if (p < 2 || p > 6) log << "warning: p=" << p << " lies outside the studied range [2, 6]\n";
  }
  for (int n : cfg.n_list) {
    if (n < 1) throw ConfigError("number of spans n must be >= 1, got " + std::to_string(n));
  }
  if (cfg.quad_bump < 0) throw ConfigError("qbump must be >= 0");
  if (cfg.mode == ConstraintMode::penalty && !(cfg.alpha >= 1e6 && cfg.alpha <= 1e10)) {
    throw ConfigError("penalty parameter must lie in [1e6, 1e10]");
  }
}

RunOutcome run(const RunConfig& cfg, std::ostream& log) {
  validate(cfg, log);
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + cfg.out_dir.string() + ": " + ec.message());

  {
    std::ofstream os;
    open_or_throw(os, cfg.out_dir / "config.json");
    os << config_to_json(cfg).dump(2) << '\n';
  }
  if (cfg.source_file) {
    const auto dest = cfg.out_dir / ("input_" + cfg.source_file->filename().string());
    std::filesystem::copy_file(*cfg.source_file, dest, std::filesystem::copy_options::overwrite_existing, ec);
    if (ec) throw ConfigError("cannot copy " + cfg.source_file->string() + ": " + ec.message());
  }

  const StudyCase sc = cfg.problem.study();
  StudyOptions opts;
  opts.mode = cfg.mode;
  opts.alpha = cfg.alpha;
  opts.quad_bump = cfg.quad_bump;
  opts.residuals = cfg.residuals;
  opts.on_solved = [&](const ConvergenceRow& row, const SolvedProblem& solved) {
    log << "solved " << cell_stem(row) << ": " << row.dofs << " dofs in " << std::setprecision(3) << row.seconds
        << " s\n";
    if (cfg.vtk) {
      std::ofstream os;
      open_or_throw(os, cfg.out_dir / (cell_stem(row) + ".vtk"));
      write_vtk(os, solved.solution);
    }
    if (cfg.dump_system) {
      write_matrix_market(solved.system, (cfg.out_dir / (cell_stem(row) + "_matrix.mtx")).string(),
                          (cfg.out_dir / (cell_stem(row) + "_rhs.mtx")).string());
    }
  };

  RunOutcome out;
  out.rows = convergence_study(sc, cfg.p_list, cfg.n_list, opts);
  {
    std::ofstream os;
    open_or_throw(os, cfg.out_dir / "convergence.csv");
    write_convergence_csv(os, out.rows);
  }
  {
    std::ofstream os;
    open_or_throw(os, cfg.out_dir / "summary.txt");
    write_summary_text(os, cfg, sc, out.rows);
  }
  {
    std::ofstream os;
    open_or_throw(os, cfg.out_dir / "summary.json");
    os << summary_json(cfg, sc, out.rows).dump(2) << '\n';
  }
  for (const ConvergenceRow& r : out.rows) {
    if (!r.error.empty()) {
      log << "error in " << cell_stem(r) << ": " << r.error << '\n';
      out.exit_code = kExitSolve;
    }
  }
  return out;
}

}  // namespace tdcshell
