#include "tdcshell/tdc.hpp"

#include <cmath>
#include <sstream>

#include "tdcshell/errors.hpp"

namespace tdcshell {

namespace {

JetVec3 cross(const JetVec3& a, const JetVec3& b) {
  return JetVec3(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]);
}

Jet dot(const JetVec3& a, const JetVec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

void require_first_derivative(const Jet& j) {
  if (j.order() < 1) throw CapabilityError("surface divergence needs first parametric derivatives of the field");
}

JetVec3 d_param(const JetVec3& v, int dir) {
  JetVec3 out;
  for (int i = 0; i < 3; ++i) out[i] = v[i].derivative(dir);
  return out;
}

}  // namespace

const char* edge_name(Edge e) {
  switch (e) {
    case Edge::r_min: return "r_min";
    case Edge::r_max: return "r_max";
    case Edge::s_min: return "s_min";
    case Edge::s_max: return "s_max";
  }
  return "?";
}

FrameJet frame_jet(const JetVec3& x) {
  FrameJet f;
  f.x = x;
  const JetVec3 xr = d_param(x, 0);
  const JetVec3 xs = d_param(x, 1);
  f.J.col(0) = xr;
  f.J.col(1) = xs;

  const Jet g11 = dot(xr, xr), g12 = dot(xr, xs), g22 = dot(xs, xs);
  const Jet det = g11 * g22 - g12 * g12;
  const double scale = g11.value() * g22.value();
  if (!(det.value() > 1e-24 * scale) || !(scale > 0.0)) {
    std::ostringstream os;
    os << "rank-deficient surface Jacobian at x = (" << x[0].value() << ", " << x[1].value() << ", " << x[2].value()
       << ")";
    throw DegenerateGeometryError(os.str());
  }
  const Jet inv_det = inverse(det);
  JetMat2 g_inv;
  g_inv(0, 0) = g22 * inv_det;
  g_inv(1, 1) = g11 * inv_det;
  g_inv(0, 1) = -g12 * inv_det;
  g_inv(1, 0) = g_inv(0, 1);
  f.J_G_inv = f.J * g_inv;

  const JetVec3 c = cross(xr, xs);
  f.area_element = sqrt(dot(c, c));
  const Jet inv_norm = inverse(f.area_element);
  f.n = c * inv_norm;

  f.Q = f.n * f.n.transpose();
  f.P = -f.Q;
  for (int i = 0; i < 3; ++i) f.P(i, i) += 1.0;

  JetMat32 dn;
  dn.col(0) = d_param(f.n, 0);
  dn.col(1) = d_param(f.n, 1);
  f.H = dn * f.J_G_inv.transpose();
  return f;
}

SurfaceFrame frame_from_jet(const FrameJet& fj, bool need_dH) {
  SurfaceFrame f;
  f.x = values_of(fj.x);
  f.J = values_of(fj.J);
  f.G = f.J.transpose() * f.J;
  f.G_inv = f.G.inverse();
  f.J_G_inv = values_of(fj.J_G_inv);
  f.area_element = fj.area_element.value();
  f.n = values_of(fj.n);
  f.P = values_of(fj.P);
  f.Q = values_of(fj.Q);
  f.H = values_of(fj.H);
  f.kappa = f.H.trace();
  if (need_dH) {
    if (fj.H(0, 0).order() < 1) throw CapabilityError("dH needs third parametric derivatives of the map");
    for (int k = 0; k < 3; ++k) {
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          f.dH[k](i, j) = f.J_G_inv(k, 0) * fj.H(i, j).d_r_value() + f.J_G_inv(k, 1) * fj.H(i, j).d_s_value();
        }
      }
    }
    f.has_dH = true;
  }
  return f;
}

SurfaceFrame frame_at(const GeometryMap& geom, double r, double s, bool need_dH) {
  if (!geom.domain().contains(r, s)) {
    std::ostringstream os;
    os << "parameter (" << r << ", " << s << ") outside the geometry domain";
    throw DomainError(os.str());
  }
  return frame_from_jet(frame_jet(geom.jet(r, s)), need_dH);
}

Vec3 surface_grad_scalar(const SurfaceFrame& frame, const Vec2& grad_param) { return frame.J_G_inv * grad_param; }

Mat3 surface_grad_vector_dir(const SurfaceFrame& frame, const Mat32& grad_param_rows) {
  return grad_param_rows * frame.J_G_inv.transpose();
}

Mat3 surface_grad_vector_cov(const SurfaceFrame& frame, const Mat32& grad_param_rows) {
  return frame.P * surface_grad_vector_dir(frame, grad_param_rows);
}

Vec2 edge_point(const ParamDomain& dom, Edge edge, double param) {
  switch (edge) {
    case Edge::r_min: return {dom.r0, param};
    case Edge::r_max: return {dom.r1, param};
    case Edge::s_min: return {param, dom.s0};
    case Edge::s_max: return {param, dom.s1};
  }
  return {};
}

BoundaryFrame boundary_frame_at(const GeometryMap& geom, Edge edge, double param) {
  const ParamDomain dom = geom.domain();
  const bool along_r = edge == Edge::s_min || edge == Edge::s_max;
  const double lo = along_r ? dom.r0 : dom.s0;
  const double hi = along_r ? dom.r1 : dom.s1;
  if (param < lo - 1e-12 * (hi - lo) || param > hi + 1e-12 * (hi - lo)) throw DomainError("edge parameter out of range");
  const Vec2 rs = edge_point(dom, edge, param);
  const SurfaceFrame f = frame_at(geom, rs[0], rs[1], false);

  Vec2 outward;
  switch (edge) {
    case Edge::r_min: outward = {-1.0, 0.0}; break;
    case Edge::r_max: outward = {1.0, 0.0}; break;
    case Edge::s_min: outward = {0.0, -1.0}; break;
    case Edge::s_max: outward = {0.0, 1.0}; break;
  }

  BoundaryFrame b;
  b.x = f.x;
  b.n = f.n;
  const Vec3 tangent = f.J.col(along_r ? 0 : 1);
  b.ds_scale = tangent.norm();
  if (!(b.ds_scale > 0.0)) throw DegenerateGeometryError(std::string("degenerate tangent on edge ") + edge_name(edge));
  b.t_b = tangent / b.ds_scale;
  b.n_b = f.n.cross(b.t_b);
  if (b.n_b.dot(f.J * outward) < 0.0) {
    b.t_b = -b.t_b;
    b.n_b = -b.n_b;
  }
  return b;
}

JetVec3 surface_grad_scalar(const FrameJet& fj, const Jet& f) {
  JetVec2 g(f.d_r(), f.d_s());
  return fj.J_G_inv * g;
}

JetMat3 surface_grad_vector_dir(const FrameJet& fj, const JetVec3& v) {
  JetMat32 rows;
  for (int i = 0; i < 3; ++i) {
    rows(i, 0) = v[i].d_r();
    rows(i, 1) = v[i].d_s();
  }
  return rows * fj.J_G_inv.transpose();
}

double surface_div(const FrameJet& fj, const JetVec3& v) {
  double d = 0.0;
  for (int j = 0; j < 3; ++j) {
    require_first_derivative(v[j]);
    d += fj.J_G_inv(j, 0).value() * v[j].d_r_value() + fj.J_G_inv(j, 1).value() * v[j].d_s_value();
  }
  return d;
}

Vec3 surface_div(const FrameJet& fj, const JetMat3& a) {
  Vec3 d = Vec3::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      require_first_derivative(a(i, j));
      d[i] += fj.J_G_inv(j, 0).value() * a(i, j).d_r_value() + fj.J_G_inv(j, 1).value() * a(i, j).d_s_value();
    }
  }
  return d;
}

}  // namespace tdcshell
