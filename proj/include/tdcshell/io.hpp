#pragma once

// JSON patches and problem definitions, convergence CSV and legacy VTK export.

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "tdcshell/postprocess.hpp"
#include "tdcshell/problem.hpp"

namespace tdcshell {

using Json = nlohmann::json;

/// {"degree_r", "degree_s", "knots_r", "knots_s", "n_r", "n_s",
///  "control_points": [[x, y, z], ...] with id = i_r + n_r i_s, "weights": [...]}
Json patch_to_json(const NurbsPatch& patch);
NurbsPatch patch_from_json(const Json& j);

/// Problem family read from a definition file; `build` instantiates it for (p, n).
struct ProblemDefinition {
  std::string id = "custom";
  std::optional<BenchmarkCase> benchmark;
  CaseOptions case_options;

  Json geometry;  // {"type": plate | cylinder | hyperbolic_paraboloid | flower | sphere | nurbs, ...}
  Material mat;
  Vec3 f = Vec3::Zero();
  Vec3 c = Vec3::Zero();
  std::array<Json, 4> edges;  // indexed by Edge, null for free
  std::vector<Vec3> pinned_mean_translations;
  std::optional<Vec2> probe;
  std::optional<double> reference;

  ShellProblem build(int p, int n) const;
  StudyCase study() const;
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
ProblemDefinition problem_from_json(const Json& j);
Json problem_to_json(const ProblemDefinition& def);

/// Columns of convergence.csv, in order.
const std::vector<std::string>& csv_columns();
void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);

struct VtkOptions {
  int samples_per_span = 4;
};

/// Structured sampling of the solved surface as legacy VTK polydata: quads on
/// the undeformed surface, point vectors u and w, scalars m1 and m2.
void write_vtk(std::ostream& os, const DiscreteSolution& sol, const VtkOptions& opts = {});

}  // namespace tdcshell
