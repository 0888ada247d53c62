#pragma once

// Independent reference computations shared by the unit tests and the acceptance run.

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "tdcshell/geometry.hpp"
#include "tdcshell/postprocess.hpp"
#include "tdcshell/quadrature.hpp"
#include "tdcshell/shell_mechanics.hpp"
#include "tdcshell/tdc.hpp"

namespace tdcshell::oracle {

inline Mat3 random_matrix(std::mt19937& gen) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat3 m;
  for (int i = 0; i < 9; ++i) m(i) = nd(gen);
  return m;
}

inline FieldPointState<double> random_state(const SurfaceFrame& f, std::mt19937& gen, bool tangential_w = true) {
  std::normal_distribution<double> nd(0.0, 1.0);
  FieldPointState<double> s;
  s.u = Vec3(nd(gen), nd(gen), nd(gen));
  s.w = Vec3(nd(gen), nd(gen), nd(gen));
  if (tangential_w) s.w = f.P * s.w;
  s.grad_u_dir = random_matrix(gen) * f.P;
  s.grad_w_dir = random_matrix(gen) * f.P;
  return s;
}

inline Vec2 random_point(const ParamDomain& d, std::mt19937& gen) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  return {d.r0 + d.width_r() * uni(gen), d.s0 + d.width_s() * uni(gen)};
}

// Entry-wise resultant formulas in Cartesian components, independent of the tensor form.
struct ComponentResultants {
  Mat3 m, n, q;
};

inline ComponentResultants component_resultants(const SurfaceFrame& f, const Material& mat,
                                                const FieldPointState<double>& s) {
  const Mat3& gu = s.grad_u_dir;  // gu(i, k) = d u_i / d x_k
  const Mat3& gw = s.grad_w_dir;
  const double DB = mat.D_B(), DM = mat.D_M(), DS = mat.D_shear(), nu = mat.nu;
  // (H_i. . u_,k) = sum_j H(i, j) gu(j, k)
  auto hu = [&](int i, int k) {
    double v = 0.0;
    for (int j = 0; j < 3; ++j) v += f.H(i, j) * gu(j, k);
    return v;
  };
  auto qu = [&](int i, int k) {
    double v = 0.0;
    for (int j = 0; j < 3; ++j) v += f.Q(i, j) * gu(j, k);
    return v;
  };
  Mat3 mdir, ndir;
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    mdir(a, a) = DB * (gw(a, a) + hu(a, a) + nu * (gw(b, b) + gw(c, c) + hu(b, b) + hu(c, c)));
    ndir(a, a) = DM * (gu(a, a) + nu * (gu(b, b) + gu(c, c)));
  }
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      mdir(a, b) = mdir(b, a) = DB * 0.5 * (1 - nu) * (gw(a, b) + gw(b, a) + hu(a, b) + hu(b, a));
      ndir(a, b) = ndir(b, a) = DM * 0.5 * (1 - nu) * (gu(a, b) + gu(b, a));
    }
  }
  ComponentResultants r;
  r.m = f.P * mdir * f.P;
  r.n = f.P * ndir * f.P;
  for (int a = 0; a < 3; ++a) {
    r.q(a, a) = 2 * DS * (f.n[a] * s.w[a] + qu(a, a));
    for (int b = a + 1; b < 3; ++b) {
      r.q(a, b) = r.q(b, a) = DS * (f.n[a] * s.w[b] + f.n[b] * s.w[a] + qu(a, b) + qu(b, a));
    }
  }
  return r;
}

/// Largest entry-wise mismatch of m, n_eff and q (each relative to its own size) over random states.
inline double resultant_form_mismatch(const GeometryMap& geom, const Material& mat, int samples, std::mt19937& gen) {
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Vec2 rs = random_point(geom.domain(), gen);
    const SurfaceFrame f = frame_at(geom, rs[0], rs[1], false);
    const FieldPointState<double> s = random_state(f, gen, false);
    const StressResultants<double> r = stress_resultants(f, mat, s);
    const ComponentResultants c = component_resultants(f, mat, s);
    worst = std::max({worst, (r.m - c.m).cwiseAbs().maxCoeff() / c.m.cwiseAbs().maxCoeff(),
                      (r.n_eff - c.n).cwiseAbs().maxCoeff() / c.n.cwiseAbs().maxCoeff(),
                      (r.q - c.q).cwiseAbs().maxCoeff() / c.q.cwiseAbs().maxCoeff()});
  }
  return worst;
}

/// Largest violation of |n| = 1, P n = 0, P^2 = P, Q^2 = Q, P + Q = I over random points.
inline double projector_defect(const GeometryMap& geom, int samples, std::mt19937& gen) {
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Vec2 rs = random_point(geom.domain(), gen);
    const SurfaceFrame f = frame_at(geom, rs[0], rs[1], false);
    worst = std::max({worst, std::abs(f.n.norm() - 1.0), (f.P * f.n).norm(),
                      (f.P * f.P - f.P).cwiseAbs().maxCoeff(), (f.Q * f.Q - f.Q).cwiseAbs().maxCoeff(),
                      (f.P + f.Q - Mat3::Identity()).cwiseAbs().maxCoeff()});
  }
  return worst;
}

/// |int div_G v - (int kappa v.n + int_boundary v.n_b)| / max(1, |int div_G v|) for a smooth ambient field.
inline double divergence_identity_gap(const GeometryMap& geom) {
  auto field = [](const JetVec3& x) {
    return JetVec3(x[0] * x[1] + 1.0, sin(x[2]) + x[0], x[0] * x[2] - x[1] * x[1]);
  };
  const ParamDomain d = geom.domain();
  const int spans = 32, npts = 10;
  double lhs = 0.0, curv = 0.0, flux = 0.0;
  for (int i = 0; i < spans; ++i) {
    for (int j = 0; j < spans; ++j) {
      const auto gr = gauss_on_interval(npts, d.r0 + d.width_r() * i / spans, d.r0 + d.width_r() * (i + 1) / spans);
      const auto gs = gauss_on_interval(npts, d.s0 + d.width_s() * j / spans, d.s0 + d.width_s() * (j + 1) / spans);
      for (const auto& [r, wr] : gr) {
        for (const auto& [s, ws] : gs) {
          const FrameJet fj = frame_jet(geom.jet(r, s));
          const JetVec3 v = field(fj.x);
          const double dA = fj.area_element.value() * wr * ws;
          lhs += surface_div(fj, v) * dA;
          const SurfaceFrame f = frame_from_jet(fj, false);
          curv += f.kappa * values_of(v).dot(f.n) * dA;
        }
      }
    }
  }
  for (Edge e : {Edge::r_min, Edge::r_max, Edge::s_min, Edge::s_max}) {
    const bool along_r = e == Edge::s_min || e == Edge::s_max;
    const double lo = along_r ? d.r0 : d.s0, hi = along_r ? d.r1 : d.s1;
    for (int i = 0; i < spans * 2; ++i) {
      for (const auto& [t, w] :
           gauss_on_interval(npts, lo + (hi - lo) * i / (2 * spans), lo + (hi - lo) * (i + 1) / (2 * spans))) {
        const BoundaryFrame b = boundary_frame_at(geom, e, t);
        const Vec2 rs = edge_point(d, e, t);
        const Vec3 v = values_of(field(geom.jet(rs[0], rs[1])));
        flux += v.dot(b.n_b) * b.ds_scale * w;
      }
    }
  }
  return std::abs(lhs - (curv + flux)) / std::max(1.0, std::abs(lhs));
}

/// Constant membrane stress on a 2 x 1.5 plate: u = A X in the plane and w = 0, r_min prescribes u,
/// the other edges carry the matching tractions. Returns the relative nodal error of the discrete solution.
inline double membrane_patch_error(int p, int n) {
  Mat3 a = Mat3::Zero();
  a(0, 0) = 1e-3;
  a(0, 1) = 4e-4;
  a(1, 0) = -2e-4;
  a(1, 1) = -5e-4;
  ShellProblem prob;
  prob.case_id = "plate";
  prob.geom = make_analytic(FlatPlate{2.0, 1.5});
  prob.patch = field_patch_for(*prob.geom, p, n);
  prob.mat = Material{1000.0, 0.25, 1.0, 0.1};
  const Mat3 P = Vec3(1, 1, 0).asDiagonal();
  const Mat3 eps = 0.5 * (a + a.transpose());
  const Mat3 stress = prob.mat.D_M() * ((1.0 - prob.mat.nu) * eps + prob.mat.nu * eps.trace() * P);
  EdgeCondition fixed =
      EdgeCondition::custom({Direction::x, Direction::y, Direction::z}, {Direction::tangent, Direction::conormal});
  fixed.g_u = [a](const Vec3& x) { return Vec3(a * x); };
  prob.edge(Edge::r_min) = fixed;
  const std::array<std::pair<Edge, Vec3>, 3> loaded{
      {{Edge::r_max, Vec3::UnitX()}, {Edge::s_min, -Vec3::UnitY()}, {Edge::s_max, Vec3::UnitY()}}};
  for (const auto& [e, nb] : loaded) {
    EdgeCondition ec;
    const Vec3 t = stress * nb;
    ec.traction = [t](const Vec3&) { return t; };
    prob.edge(e) = ec;
  }
  const SolvedProblem solved = solve_problem(std::make_shared<ShellProblem>(prob));
  double err = 0.0, ref = 0.0;
  for (double r : {0.0, 0.37, 1.1, 2.0}) {
    for (double s : {0.0, 0.81, 1.5}) {
      const PointEvaluation ev = evaluate_solution(solved.solution, r, s);
      const Vec3 exact = a * Vec3(r, s, 0.0);
      err = std::max(err, (ev.state.u - exact).norm() + ev.state.w.norm());
      ref = std::max(ref, exact.norm());
    }
  }
  return err / ref;
}

/// max |M - M^T| / max |M| over the stored entries.
inline double relative_asymmetry(const SparseMatrixR& m) {
  const SparseMatrixR d = m - SparseMatrixR(m.transpose());
  double mx = 0.0, scale = 0.0;
  for (int i = 0; i < d.outerSize(); ++i) {
    for (SparseMatrixR::InnerIterator it(d, i); it; ++it) mx = std::max(mx, std::abs(it.value()));
  }
  for (int i = 0; i < m.outerSize(); ++i) {
    for (SparseMatrixR::InnerIterator it(m, i); it; ++it) scale = std::max(scale, std::abs(it.value()));
  }
  return mx / scale;
}

}  // namespace tdcshell::oracle
