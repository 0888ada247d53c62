#include "tdcshell/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "tdcshell/errors.hpp"

namespace tdcshell {

namespace {

GaussRule1D compute_rule(int n) {
  GaussRule1D rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = x;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = -x;
    rule.points[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule1D& gauss_legendre(int n) {
  if (n < 1 || n > 64) throw ArgumentError("Gauss-Legendre point count must lie in [1, 64]");
  static std::mutex mtx;
  static std::map<int, GaussRule1D> cache;
  std::lock_guard lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
  return it->second;
}

std::vector<std::pair<double, double>> gauss_on_interval(int n, double a, double b) {
  const GaussRule1D& g = gauss_legendre(n);
  std::vector<std::pair<double, double>> out(n);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) out[i] = {a + half * (g.points[i] + 1.0), half * g.weights[i]};
  return out;
}

std::vector<QuadPoint> quadrature_rule(int p_r, int p_s, int order_bump) {
  if (p_r < 1 || p_s < 1) throw ArgumentError("quadrature needs degrees >= 1");
  const int nr = p_r + 1 + order_bump;
  const int ns = p_s + 1 + order_bump;
  if (nr < 1 || ns < 1) throw ArgumentError("quadrature order bump leaves no points");
  const auto gr = gauss_on_interval(nr, 0.0, 1.0);
  const auto gs = gauss_on_interval(ns, 0.0, 1.0);
  std::vector<QuadPoint> out;
  out.reserve(static_cast<std::size_t>(nr) * ns);
  for (const auto& [s, ws] : gs) {
    for (const auto& [r, wr] : gr) out.push_back({Eigen::Vector2d(r, s), wr * ws});
  }
  return out;
}

}  // namespace tdcshell
