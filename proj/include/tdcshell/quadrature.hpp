#pragma once

#include <vector>

#include <Eigen/Core>

namespace tdcshell {

struct GaussRule1D {
  std::vector<double> points;   // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n points, exact for polynomials of degree 2n - 1.
const GaussRule1D& gauss_legendre(int n);

struct QuadPoint {
  Eigen::Vector2d rs;
  double weight = 0.0;
};

/// Tensor Gauss rule on the reference span [0, 1]^2 with p + 1 + order_bump
/// points per direction.
std::vector<QuadPoint> quadrature_rule(int p_r, int p_s, int order_bump);

/// Maps a 1D rule to [a, b].
std::vector<std::pair<double, double>> gauss_on_interval(int n, double a, double b);

}  // namespace tdcshell
