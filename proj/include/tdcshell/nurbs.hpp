#pragma once

// Tensor-product NURBS patches on a rectangular parameter domain.

#include <array>
#include <vector>

#include <Eigen/Core>

#include "tdcshell/jet.hpp"

namespace tdcshell {

struct ParamDomain {
  double r0 = 0.0, r1 = 1.0, s0 = 0.0, s1 = 1.0;

  bool contains(double r, double s, double tol = 1e-12) const;
  double width_r() const { return r1 - r0; }
  double width_s() const { return s1 - s0; }
};

/// Clamped (open) knot vector: the end knots repeat exactly degree+1 times.
class KnotVector {
 public:
  KnotVector() = default;
  KnotVector(int degree, std::vector<double> knots);

  static KnotVector uniform(int degree, int spans, double lo, double hi);

  int degree() const { return degree_; }
  const std::vector<double>& knots() const { return knots_; }
  int num_basis() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
  double front() const { return knots_.front(); }
  double back() const { return knots_.back(); }

  /// Distinct knot values, including both ends.
  std::vector<double> breakpoints() const;
  int num_spans() const { return static_cast<int>(breakpoints().size()) - 1; }

  /// Index l with knots[l] <= u < knots[l+1]; the right end maps to the last nonempty span.
  int find_span(double u) const;

  /// Rows k = 0..nder hold the k-th derivatives of the degree+1 nonzero basis
  /// functions N_{span-degree..span} at u.
  Eigen::MatrixXd basis_derivatives(double u, int span, int nder) const;

  std::vector<double> greville() const;
  int multiplicity(double u, double tol = 1e-14) const;

 private:
  int degree_ = 0;
  std::vector<double> knots_;
};

/// Control net is stored with global basis id = i_r + n_r * i_s.
struct NurbsPatch {
  KnotVector kv_r;
  KnotVector kv_s;
  std::vector<Eigen::Vector3d> control_points;
  std::vector<double> weights;

  NurbsPatch() = default;
  NurbsPatch(KnotVector r, KnotVector s, std::vector<Eigen::Vector3d> points, std::vector<double> w);

  int n_r() const { return kv_r.num_basis(); }
  int n_s() const { return kv_s.num_basis(); }
  int num_basis() const { return n_r() * n_s(); }
  int id(int i_r, int i_s) const { return i_r + n_r() * i_s; }
  int degree_r() const { return kv_r.degree(); }
  int degree_s() const { return kv_s.degree(); }
  ParamDomain domain() const { return {kv_r.front(), kv_r.back(), kv_s.front(), kv_s.back()}; }
  bool is_rational() const;

  void validate() const;
};

/// Rational basis functions active at a parameter point and their parametric
/// partial derivatives. Row k of `partials` is the derivative d^(i+j)/dr^i ds^j
/// with k = Jet::index(i, j); rows above `max_deriv` are left zero.
struct BasisEval {
  std::vector<int> active;
  int max_deriv = 0;
  Eigen::Matrix<double, Jet::kSize, Eigen::Dynamic> partials;

  int size() const { return static_cast<int>(active.size()); }
  double value(int a) const { return partials(0, a); }
  double d(int i, int j, int a) const { return partials(Jet::index(i, j), a); }
};

BasisEval eval_basis(const NurbsPatch& patch, double r, double s, int max_deriv);

/// Physical point of the patch as a Jet of the given order (<= 3).
JetVec3 eval_point_jet(const NurbsPatch& patch, double r, double s, int order);
Eigen::Vector3d eval_point(const NurbsPatch& patch, double r, double s);

/// Inserts knots so that each direction has `n_per_side` uniform spans.
/// Existing interior knots must lie on the target uniform grid.
NurbsPatch refine_uniform(const NurbsPatch& patch, int n_per_side);

/// Raises the degree in both directions to `target_p`.
NurbsPatch elevate_degree(const NurbsPatch& patch, int target_p);

/// Inserts a single knot in direction dir (0 = r, 1 = s).
NurbsPatch insert_knot(const NurbsPatch& patch, int dir, double u);

/// Quadratic rational patch: circular arc of radius R in the x-z plane
/// (angle measured from +z towards +x, over [-half_angle, half_angle]),
/// extruded along y over [0, length].
NurbsPatch cylinder_arc_patch(double radius, double length, double half_angle);

/// Non-rational patch with `spans` uniform spans of degree p per side on
/// the given domain. Control points are supplied by `place(r, s)` at the
/// Greville abscissae.
template <typename PlaceFn>
NurbsPatch uniform_bspline_patch(int p, int spans, const ParamDomain& dom, PlaceFn&& place) {
  KnotVector kr = KnotVector::uniform(p, spans, dom.r0, dom.r1);
  KnotVector ks = KnotVector::uniform(p, spans, dom.s0, dom.s1);
  const auto gr = kr.greville();
  const auto gs = ks.greville();
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(gr.size() * gs.size());
  for (double s : gs) {
    for (double r : gr) pts.push_back(place(r, s));
  }
  std::vector<double> w(pts.size(), 1.0);
  return NurbsPatch(std::move(kr), std::move(ks), std::move(pts), std::move(w));
}

}  // namespace tdcshell
