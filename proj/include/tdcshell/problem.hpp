#pragma once

// Boundary value problem description: geometry, field discretization,
// material, loads, per-edge conditions and the tangentiality constraint mode.

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tdcshell/geometry.hpp"
#include "tdcshell/nurbs.hpp"
#include "tdcshell/shell_mechanics.hpp"
#include "tdcshell/tdc.hpp"

namespace tdcshell {

/// Direction of a scalar boundary constraint. Cartesian axes are fixed;
/// tangent, conormal and normal follow the boundary frame pointwise.
enum class Direction { x, y, z, tangent, conormal, normal };

const char* direction_name(Direction d);
Direction parse_direction(const std::string& name);
Vec3 direction_vector(Direction d, const BoundaryFrame& b);

enum class EdgeKind { free, clamped, simply_supported, symmetry, custom };

const char* edge_kind_name(EdgeKind k);

using VectorField = std::function<Vec3(const Vec3& x)>;

struct EdgeCondition {
  EdgeKind kind = EdgeKind::free;
  // Only read for EdgeKind::custom; the named kinds derive their own lists.
  std::vector<Direction> u_dirs;
  std::vector<Direction> w_dirs;
  VectorField g_u;       // prescribed displacement, zero when empty
  VectorField g_w;       // prescribed difference vector, zero when empty
  VectorField traction;  // p on the edge, per unit length
  VectorField moment;    // m on the edge, per unit length

  static EdgeCondition free() { return {}; }
  static EdgeCondition clamped() { return of_kind(EdgeKind::clamped); }
  static EdgeCondition simply_supported() { return of_kind(EdgeKind::simply_supported); }
  static EdgeCondition symmetry() { return of_kind(EdgeKind::symmetry); }
  static EdgeCondition of_kind(EdgeKind k) {
    EdgeCondition e;
    e.kind = k;
    return e;
  }
  static EdgeCondition custom(std::vector<Direction> u, std::vector<Direction> w) {
    EdgeCondition e = of_kind(EdgeKind::custom);
    e.u_dirs = std::move(u);
    e.w_dirs = std::move(w);
    return e;
  }

  std::vector<Direction> constrained_u() const;
  std::vector<Direction> constrained_w() const;
  bool is_dirichlet() const { return !constrained_u().empty() || !constrained_w().empty(); }
};

enum class ConstraintMode { lagrange, penalty };

struct ShellProblem {
  std::string case_id = "custom";
  std::shared_ptr<const GeometryMap> geom;
  NurbsPatch patch;  // field basis on the geometry's parameter domain
  Material mat;
  VectorField f;  // area load; zero when empty
  VectorField c;  // area moment; zero when empty
  std::array<EdgeCondition, 4> edges{};  // indexed by Edge
  ConstraintMode mode = ConstraintMode::lagrange;
  double alpha = 1e8;
  int quad_bump = 0;
  /// Rigid translations removed by a mean-value constraint, integral of u.a dA = 0.
  std::vector<Vec3> pinned_mean_translations;

  const EdgeCondition& edge(Edge e) const { return edges[static_cast<int>(e)]; }
  EdgeCondition& edge(Edge e) { return edges[static_cast<int>(e)]; }
  int degree() const { return patch.degree_r(); }
  int spans() const { return patch.kv_r.num_spans(); }

  /// Throws ArgumentError or ConfigError on inconsistent data.
  void validate() const;
};

enum class BenchmarkCase { scordelis_lo, hyperbolic_paraboloid, flower };

BenchmarkCase parse_case(const std::string& id);
const char* case_name(BenchmarkCase c);

struct CaseOptions {
  bool nurbs_geometry = false;  // Scordelis-Lo only: rational quadratic arc instead of the analytic map
};

/// Uniform field basis of degree p with n spans per direction on the domain.
NurbsPatch field_patch_for(const GeometryMap& geom, int p, int n);

/// Benchmark problem with geometry, material, loads and supports set.
ShellProblem apply_load_case(BenchmarkCase c, int p, int n, const CaseOptions& opts = {});

/// Reference values used for normalized output.
struct CaseReference {
  std::string quantity;
  std::optional<Vec2> point;  // parameter point of a displacement quantity
  double value = 0.0;
};
CaseReference case_reference(BenchmarkCase c);

}  // namespace tdcshell
