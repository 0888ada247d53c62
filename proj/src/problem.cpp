#include "tdcshell/problem.hpp"

#include <cmath>
#include <numbers>

#include "tdcshell/errors.hpp"

namespace tdcshell {

const char* direction_name(Direction d) {
  switch (d) {
    case Direction::x: return "x";
    case Direction::y: return "y";
    case Direction::z: return "z";
    case Direction::tangent: return "tangent";
    case Direction::conormal: return "conormal";
    case Direction::normal: return "normal";
  }
  return "?";
}

Direction parse_direction(const std::string& name) {
  for (Direction d : {Direction::x, Direction::y, Direction::z, Direction::tangent, Direction::conormal,
                      Direction::normal}) {
    if (name == direction_name(d)) return d;
  }
  throw ConfigError("unknown constraint direction '" + name + "'");
}

Vec3 direction_vector(Direction d, const BoundaryFrame& b) {
  switch (d) {
    case Direction::x: return Vec3::UnitX();
    case Direction::y: return Vec3::UnitY();
    case Direction::z: return Vec3::UnitZ();
    case Direction::tangent: return b.t_b;
    case Direction::conormal: return b.n_b;
    case Direction::normal: return b.n;
  }
  return Vec3::Zero();
}

const char* edge_kind_name(EdgeKind k) {
  switch (k) {
    case EdgeKind::free: return "free";
    case EdgeKind::clamped: return "clamped";
    case EdgeKind::simply_supported: return "simply_supported";
    case EdgeKind::symmetry: return "symmetry";
    case EdgeKind::custom: return "custom";
  }
  return "?";
}

std::vector<Direction> EdgeCondition::constrained_u() const {
  switch (kind) {
    case EdgeKind::free: return {};
    case EdgeKind::clamped:
    case EdgeKind::simply_supported: return {Direction::x, Direction::y, Direction::z};
    case EdgeKind::symmetry: return {Direction::conormal};
    case EdgeKind::custom: return u_dirs;
  }
  return {};
}

std::vector<Direction> EdgeCondition::constrained_w() const {
  switch (kind) {
    case EdgeKind::free:
    case EdgeKind::simply_supported: return {};
    // w is tangential, so its tangent and conormal components fix it completely
    case EdgeKind::clamped: return {Direction::tangent, Direction::conormal};
    case EdgeKind::symmetry: return {Direction::conormal};
    case EdgeKind::custom: return w_dirs;
  }
  return {};
}

void ShellProblem::validate() const {
  if (!geom) throw ConfigError("problem has no geometry");
  mat.validate();
  patch.validate();
  if (patch.degree_r() < 1 || patch.degree_s() < 1) throw ArgumentError("field basis degree must be >= 1");
  const ParamDomain gd = geom->domain(), pd = patch.domain();
  const double tol = 1e-12 * std::max(1.0, std::max(gd.width_r(), gd.width_s()));
  if (std::abs(gd.r0 - pd.r0) > tol || std::abs(gd.r1 - pd.r1) > tol || std::abs(gd.s0 - pd.s0) > tol ||
      std::abs(gd.s1 - pd.s1) > tol) {
    throw ConfigError("field basis and geometry live on different parameter domains");
  }
  if (mode == ConstraintMode::penalty && !(alpha >= 1e6 && alpha <= 1e10)) {
    throw ConfigError("penalty parameter must lie in [1e6, 1e10]");
  }
  if (quad_bump < 0) throw ArgumentError("quadrature bump must be >= 0");
  if (geom->closed_in_r() && (edge(Edge::r_min).is_dirichlet() || edge(Edge::r_max).is_dirichlet() ||
                              edge(Edge::r_min).traction || edge(Edge::r_max).traction)) {
    throw ConfigError("edges r_min and r_max form an interior seam on a closed surface and take no conditions");
  }
  for (const Vec3& a : pinned_mean_translations) {
    if (!(a.norm() > 0.0)) throw ConfigError("pinned translation axis must be nonzero");
  }
}

BenchmarkCase parse_case(const std::string& id) {
  if (id == "scordelis_lo") return BenchmarkCase::scordelis_lo;
  if (id == "hyperbolic_paraboloid") return BenchmarkCase::hyperbolic_paraboloid;
  if (id == "flower") return BenchmarkCase::flower;
  throw ConfigError("unknown case id '" + id + "' (expected scordelis_lo, hyperbolic_paraboloid or flower)");
}

const char* case_name(BenchmarkCase c) {
  switch (c) {
    case BenchmarkCase::scordelis_lo: return "scordelis_lo";
    case BenchmarkCase::hyperbolic_paraboloid: return "hyperbolic_paraboloid";
    case BenchmarkCase::flower: return "flower";
  }
  return "?";
}

NurbsPatch field_patch_for(const GeometryMap& geom, int p, int n) {
  if (p < 1) throw ArgumentError("degree must be >= 1");
  if (n < 1) throw ArgumentError("number of spans must be >= 1");
  return uniform_bspline_patch(p, n, geom.domain(), [&geom](double r, double s) { return geom.point(r, s); });
}

namespace {

VectorField constant_field(const Vec3& v) {
  return [v](const Vec3&) { return v; };
}

}  // namespace

ShellProblem apply_load_case(BenchmarkCase c, int p, int n, const CaseOptions& opts) {
  if (p < 1) throw ArgumentError("degree must be >= 1");
  if (n < 1) throw ArgumentError("number of spans must be >= 1");
  ShellProblem prob;
  prob.case_id = case_name(c);
  prob.c = constant_field(Vec3::Zero());
  switch (c) {
    case BenchmarkCase::scordelis_lo: {
      const CylinderRoof roof{25.0, 50.0, 40.0 * std::numbers::pi / 180.0};
      if (opts.nurbs_geometry) {
        const NurbsPatch arc = cylinder_arc_patch(roof.radius, roof.length, roof.half_angle);
        NurbsPatch fine = refine_uniform(elevate_degree(arc, p), n);
        prob.geom = std::make_shared<NurbsGeometry>(fine);
        prob.patch = std::move(fine);
      } else {
        prob.geom = make_analytic(roof);
        prob.patch = field_patch_for(*prob.geom, p, n);
      }
      prob.mat = Material{4.32e8, 0.0, 1.0, 0.25};
      prob.f = constant_field(Vec3(0.0, 0.0, -90.0));
      // rigid diaphragms: no displacement in the plane of the end sections
      prob.edge(Edge::s_min) = EdgeCondition::custom({Direction::x, Direction::z}, {});
      prob.edge(Edge::s_max) = EdgeCondition::custom({Direction::x, Direction::z}, {});
      prob.pinned_mean_translations = {Vec3::UnitY()};
      break;
    }
    case BenchmarkCase::hyperbolic_paraboloid: {
      prob.geom = make_analytic(HyperbolicParaboloid{});
      prob.patch = field_patch_for(*prob.geom, p, n);
      prob.mat = Material{2.0e11, 0.3, 1.0, 0.01};
      prob.f = constant_field(Vec3(0.0, 0.0, -8000.0 * prob.mat.t));
      prob.edge(Edge::r_min) = EdgeCondition::clamped();
      break;
    }
    case BenchmarkCase::flower: {
      prob.geom = make_analytic(FlowerShell{});
      prob.patch = field_patch_for(*prob.geom, p, n);
      prob.mat = Material{10.0, 0.3, 1.0, 0.1};
      const double t3 = prob.mat.t * prob.mat.t * prob.mat.t;
      prob.f = constant_field(Vec3(-1.0 * t3, -2.0 * t3, -3.0 * t3));
      prob.edge(Edge::s_min) = EdgeCondition::clamped();
      prob.edge(Edge::s_max) = EdgeCondition::clamped();
      break;
    }
  }
  return prob;
}

CaseReference case_reference(BenchmarkCase c) {
  switch (c) {
    case BenchmarkCase::scordelis_lo: return {"u_z", Vec2(1.0, 0.5), -0.3024};
    case BenchmarkCase::hyperbolic_paraboloid: return {"u_z", Vec2(0.5, 0.0), -9.3355e-5};
    case BenchmarkCase::flower: return {"energy", std::nullopt, 5.05297916e-04};
  }
  return {};
}

}  // namespace tdcshell
