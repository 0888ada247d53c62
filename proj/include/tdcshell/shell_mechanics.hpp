#pragma once

// Linear Reissner-Mindlin kinematics, plane-stress constitutive law and
// thickness-integrated stress resultants, written with projectors P, Q and the
// Weingarten map H. Templated on the scalar so the same formulas run on plain
// doubles (assembly) and on Jets (strong-form residuals).

#include <Eigen/Core>

#include "tdcshell/tdc.hpp"

namespace tdcshell {

struct Material {
  double E = 1.0;
  double nu = 0.0;
  double alpha_s = 1.0;
  double t = 1.0;

  double mu() const { return E / (2.0 * (1.0 + nu)); }
  double lambda() const { return E * nu / (1.0 - nu * nu); }
  double D_B() const { return E * t * t * t / (12.0 * (1.0 - nu * nu)); }
  double D_M() const { return E * t / (1.0 - nu * nu); }
  double D_shear() const { return alpha_s * E * t / (2.0 * (1.0 + nu)); }

  /// Throws ArgumentError unless E > 0, t > 0, nu in [0, 0.5], alpha_s > 0.
  void validate() const;
};

template <typename T>
using Mat3T = Eigen::Matrix<T, 3, 3>;

template <typename T>
struct FieldPointState {
  Vec3T<T> u = Vec3T<T>::Zero();
  Vec3T<T> w = Vec3T<T>::Zero();
  Mat3T<T> grad_u_dir = Mat3T<T>::Zero();  // rows: tangential gradients of the components
  Mat3T<T> grad_w_dir = Mat3T<T>::Zero();
};

template <typename T>
struct StrainState {
  Mat3T<T> eps_mem;
  Mat3T<T> eps_bend;
  Mat3T<T> eps_shear;
};

template <typename T>
struct StressResultants {
  Mat3T<T> m;
  Mat3T<T> n_eff;
  Mat3T<T> n_real;
  Mat3T<T> q;
};

template <typename M>
auto sym(const M& a) {
  return (0.5 * (a + a.transpose())).eval();
}

template <typename Frame>
StrainState<typename Frame::Scalar> strains(const Frame& f, const FieldPointState<typename Frame::Scalar>& s) {
  using T = typename Frame::Scalar;
  StrainState<T> e;
  e.eps_mem = sym((f.P * s.grad_u_dir).eval());
  e.eps_bend = sym((f.H * s.grad_u_dir + f.P * s.grad_w_dir).eval());
  const Mat3T<T> qgu = f.Q * s.grad_u_dir;
  const Mat3T<T> nw = f.n * s.w.transpose();
  e.eps_shear = sym((qgu + nw).eval());
  return e;
}

/// In-plane plane-stress law applied to an in-plane strain: rigidity * [(1-nu) eps + nu tr(eps) P].
template <typename T>
Mat3T<T> inplane_law(const Mat3T<T>& eps, const Mat3T<T>& P, double rigidity, double nu) {
  const T tr = eps.trace();
  Mat3T<T> out = (rigidity * (1.0 - nu)) * eps;
  out += (rigidity * nu) * (tr * P);
  return out;
}

template <typename Frame>
StressResultants<typename Frame::Scalar> stress_resultants(const Frame& f, const Material& mat,
                                                           const FieldPointState<typename Frame::Scalar>& s) {
  using T = typename Frame::Scalar;
  const StrainState<T> e = strains(f, s);
  StressResultants<T> r;
  r.m = inplane_law<T>(e.eps_bend, f.P, mat.D_B(), mat.nu);
  r.n_eff = inplane_law<T>(e.eps_mem, f.P, mat.D_M(), mat.nu);
  r.n_real = r.n_eff + f.H * r.m;
  r.q = (2.0 * mat.D_shear()) * e.eps_shear;
  return r;
}

/// gamma = w + (grad_u_dir)^T n
template <typename Frame>
Vec3T<typename Frame::Scalar> shear_angle(const Frame& f, const FieldPointState<typename Frame::Scalar>& s) {
  return s.w + s.grad_u_dir.transpose() * f.n;
}

struct EnergyDensity {
  double membrane = 0.0;
  double bending = 0.0;
  double shear = 0.0;
  double total() const { return membrane + bending + shear; }
};

/// 1/2 (eps_m : n_eff + eps_b : m + eps_s : q) per unit area.
EnergyDensity energy_density(const SurfaceFrame& f, const Material& mat, const FieldPointState<double>& s);

}  // namespace tdcshell
