#pragma once

// Tangential differential calculus on a parametrized middle surface, expressed
// in global Cartesian coordinates.

#include <array>

#include <Eigen/Dense>

#include "tdcshell/geometry.hpp"
#include "tdcshell/jet.hpp"

namespace tdcshell {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;

/// Pointwise geometry bundle at a parameter point.
struct SurfaceFrame {
  using Scalar = double;

  Vec3 x;
  Mat32 J;      // dx/dr
  Mat2 G;       // J^T J
  Mat2 G_inv;
  Mat32 J_G_inv;  // maps parametric gradients to tangential gradients
  double area_element = 0.0;  // sqrt(det G)
  Vec3 n;
  Mat3 P;
  Mat3 Q;
  Mat3 H;  // Weingarten map, directional surface gradient of n
  std::array<Mat3, 3> dH{};  // dH[k] = dH/dx_k (tangential derivative)
  bool has_dH = false;
  double kappa = 0.0;  // tr(H)
};

/// Same quantities carried as Jets, for operators that need one more
/// parametric derivative (surface divergence, dH). Orders: n, P, Q, J_G_inv
/// are exact to order 2 and H to order 1 when built from an order-3 map.
struct FrameJet {
  using Scalar = Jet;

  JetVec3 x;
  JetMat32 J;
  JetMat32 J_G_inv;
  Jet area_element;
  JetVec3 n;
  JetMat3 P;
  JetMat3 Q;
  JetMat3 H;
};

enum class Edge { r_min = 0, r_max = 1, s_min = 2, s_max = 3 };

const char* edge_name(Edge e);

struct BoundaryFrame {
  Vec3 x;
  Vec3 t_b;  // unit tangent along the edge
  Vec3 n_b;  // outward co-normal n x t_b
  Vec3 n;
  double ds_scale = 0.0;  // |dx/d(edge parameter)|
};

FrameJet frame_jet(const JetVec3& x);

/// Evaluates the surface frame; with need_dH the tangential derivatives of the
/// Weingarten map are filled from third parametric derivatives of the map.
SurfaceFrame frame_at(const GeometryMap& geom, double r, double s, bool need_dH);
SurfaceFrame frame_from_jet(const FrameJet& fj, bool need_dH);

Vec3 surface_grad_scalar(const SurfaceFrame& frame, const Vec2& grad_param);

/// Rows of the result are the tangential gradients of the three components.
Mat3 surface_grad_vector_dir(const SurfaceFrame& frame, const Mat32& grad_param_rows);
Mat3 surface_grad_vector_cov(const SurfaceFrame& frame, const Mat32& grad_param_rows);

/// Maps an edge parameter to the (r, s) point on that edge.
Vec2 edge_point(const ParamDomain& dom, Edge edge, double param);
BoundaryFrame boundary_frame_at(const GeometryMap& geom, Edge edge, double param);

// Jet-valued operators.

JetVec3 surface_grad_scalar(const FrameJet& fj, const Jet& f);
JetMat3 surface_grad_vector_dir(const FrameJet& fj, const JetVec3& v);

/// Value of the tangential divergence of a vector field.
double surface_div(const FrameJet& fj, const JetVec3& v);
/// Value of the row-wise tangential divergence of a tensor field.
Vec3 surface_div(const FrameJet& fj, const JetMat3& a);

}  // namespace tdcshell
