#pragma once

// Middle-surface parametrizations x(r, s). Every map reports its Taylor
// expansion (as Jets, order 3) so the tangential calculus can take exact
// derivatives of normals and Weingarten maps.

#include <memory>
#include <string>

#include <Eigen/Core>

#include "tdcshell/jet.hpp"
#include "tdcshell/nurbs.hpp"

namespace tdcshell {

enum class GeometryKind { analytic, nurbs };

class GeometryMap {
 public:
  virtual ~GeometryMap() = default;

  virtual ParamDomain domain() const = 0;
  virtual JetVec3 jet(double r, double s) const = 0;
  virtual GeometryKind kind() const = 0;
  virtual std::string name() const = 0;

  /// True when the edges r = r0 and r = r1 coincide (closed surface in r).
  virtual bool closed_in_r() const { return false; }

  Eigen::Vector3d point(double r, double s) const { return values_of(jet(r, s)); }
};

/// Adapts a callable `template <class T> Vec3<T> operator()(T r, T s)` to GeometryMap.
template <typename Param>
class AnalyticMap : public GeometryMap {
 public:
  explicit AnalyticMap(Param param) : param_(std::move(param)) {}

  ParamDomain domain() const override { return param_.domain(); }
  JetVec3 jet(double r, double s) const override { return param_(Jet::variable(r, 0), Jet::variable(s, 1)); }
  GeometryKind kind() const override { return GeometryKind::analytic; }
  std::string name() const override { return param_.name(); }
  bool closed_in_r() const override { return param_.closed_in_r(); }

  const Param& param() const { return param_; }

 private:
  Param param_;
};

template <typename T>
using Vec3T = Eigen::Matrix<T, 3, 1>;

/// Rectangle [0, lx] x [0, ly] in the plane z = 0, identity parametrization.
struct FlatPlate {
  double lx = 1.0, ly = 1.0;

  ParamDomain domain() const { return {0.0, lx, 0.0, ly}; }
  std::string name() const { return "plate"; }
  bool closed_in_r() const { return false; }
  template <typename T>
  Vec3T<T> operator()(const T& r, const T& s) const {
    return Vec3T<T>(r, s, T(0.0));
  }
};

/// Circular cylinder segment, axis along y: x = R sin(theta), z = R cos(theta),
/// theta = -half_angle + 2 half_angle r, y = length s, (r, s) in [0, 1]^2.
struct CylinderRoof {
  double radius = 25.0, length = 50.0, half_angle = 0.6981317007977318;

  ParamDomain domain() const { return {0.0, 1.0, 0.0, 1.0}; }
  std::string name() const { return "cylinder"; }
  bool closed_in_r() const { return false; }
  template <typename T>
  Vec3T<T> operator()(const T& r, const T& s) const {
    using std::cos;
    using std::sin;
    const T theta = -half_angle + 2.0 * half_angle * r;
    return Vec3T<T>(radius * sin(theta), length * s, radius * cos(theta));
  }
};

/// z = x^2 - y^2 over [-lx/2, lx/2] x [-ly/2, ly/2].
struct HyperbolicParaboloid {
  double lx = 1.0, ly = 1.0;

  ParamDomain domain() const { return {-0.5 * lx, 0.5 * lx, -0.5 * ly, 0.5 * ly}; }
  std::string name() const { return "hyperbolic_paraboloid"; }
  bool closed_in_r() const { return false; }
  template <typename T>
  Vec3T<T> operator()(const T& r, const T& s) const {
    return Vec3T<T>(r, s, r * r - s * s);
  }
};

/// Flower-shaped annular shell on (r, s) in [-1, 1]^2, closed in r:
/// theta = pi (r + 1), C = s (B + 0.3 cos(6 theta)),
/// x = ((A - C) cos theta, (A - C) sin theta, 1 - s^2).
struct FlowerShell {
  double a = 2.3, b = 0.8;

  ParamDomain domain() const { return {-1.0, 1.0, -1.0, 1.0}; }
  std::string name() const { return "flower"; }
  bool closed_in_r() const { return true; }
  template <typename T>
  Vec3T<T> operator()(const T& r, const T& s) const {
    using std::cos;
    using std::sin;
    const double pi = 3.14159265358979323846;
    const T theta = pi * (r + 1.0);
    const T c = s * (b + 0.3 * cos(6.0 * theta));
    const T rad = a - c;
    return Vec3T<T>(rad * cos(theta), rad * sin(theta), 1.0 - s * s);
  }
};

/// Spherical cap patch: x = R (sin(phi) cos(theta), sin(phi) sin(theta), cos(phi)),
/// r = theta in [t0, t1], s = phi in [p0, p1] with 0 < p0 < p1 < pi.
struct SpherePatch {
  double radius = 1.0;
  double t0 = 0.1, t1 = 1.2, p0 = 0.4, p1 = 1.3;

  ParamDomain domain() const { return {t0, t1, p0, p1}; }
  std::string name() const { return "sphere"; }
  bool closed_in_r() const { return false; }
  template <typename T>
  Vec3T<T> operator()(const T& r, const T& s) const {
    using std::cos;
    using std::sin;
    return Vec3T<T>(radius * sin(s) * cos(r), radius * sin(s) * sin(r), radius * cos(s));
  }
};

/// Geometry evaluated from a NURBS patch (isoparametric setting).
class NurbsGeometry : public GeometryMap {
 public:
  explicit NurbsGeometry(NurbsPatch patch) : patch_(std::move(patch)) {}

  ParamDomain domain() const override { return patch_.domain(); }
  JetVec3 jet(double r, double s) const override { return eval_point_jet(patch_, r, s, Jet::kMaxOrder); }
  GeometryKind kind() const override { return GeometryKind::nurbs; }
  std::string name() const override { return "nurbs"; }

  const NurbsPatch& patch() const { return patch_; }

 private:
  NurbsPatch patch_;
};

template <typename Param>
std::shared_ptr<const GeometryMap> make_analytic(Param param) {
  return std::make_shared<AnalyticMap<Param>>(std::move(param));
}

}  // namespace tdcshell
