#include "tdcshell/nurbs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "tdcshell/errors.hpp"

namespace tdcshell {

namespace {

constexpr double kKnotTol = 1e-12;

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

// Homogeneous control net (w*P, w), row-major in the same id order as the patch.
using HomogeneousNet = std::vector<Eigen::Vector4d>;

HomogeneousNet to_homogeneous(const NurbsPatch& patch) {
  HomogeneousNet net(patch.control_points.size());
  for (std::size_t k = 0; k < net.size(); ++k) {
    const double w = patch.weights[k];
    net[k] << w * patch.control_points[k], w;
  }
  return net;
}

NurbsPatch from_homogeneous(KnotVector kr, KnotVector ks, const HomogeneousNet& net) {
  std::vector<Eigen::Vector3d> pts(net.size());
  std::vector<double> w(net.size());
  for (std::size_t k = 0; k < net.size(); ++k) {
    w[k] = net[k][3];
    pts[k] = net[k].head<3>() / w[k];
  }
  return NurbsPatch(std::move(kr), std::move(ks), std::move(pts), std::move(w));
}

// Applies a 1D linear map (new_n x old_n) along direction dir of the net.
HomogeneousNet transform_net(const HomogeneousNet& net, int n_r, int n_s, int dir, const Eigen::MatrixXd& map) {
  const int new_n = static_cast<int>(map.rows());
  const int nr_out = dir == 0 ? new_n : n_r;
  const int ns_out = dir == 0 ? n_s : new_n;
  HomogeneousNet out(static_cast<std::size_t>(nr_out) * ns_out, Eigen::Vector4d::Zero());
  for (int a = 0; a < new_n; ++a) {
    for (int b = 0; b < map.cols(); ++b) {
      const double c = map(a, b);
      if (c == 0.0) continue;
      if (dir == 0) {
        for (int j = 0; j < n_s; ++j) out[a + nr_out * j] += c * net[b + n_r * j];
      } else {
        for (int i = 0; i < n_r; ++i) out[i + nr_out * a] += c * net[i + n_r * b];
      }
    }
  }
  return out;
}

// Dense matrix of all basis functions of kv evaluated at the given points.
Eigen::MatrixXd collocation(const KnotVector& kv, const std::vector<double>& pts) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pts.size()), kv.num_basis());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const int span = kv.find_span(pts[k]);
    const Eigen::MatrixXd ders = kv.basis_derivatives(pts[k], span, 0);
    for (int a = 0; a <= kv.degree(); ++a) m(static_cast<Eigen::Index>(k), span - kv.degree() + a) = ders(0, a);
  }
  return m;
}

// Maps old control coefficients onto the elevated space by collocation at
// the Greville abscissae of the elevated basis; exact because the old spline
// space is contained in the elevated one.
Eigen::MatrixXd elevation_map(const KnotVector& kv, int target_p) {
  const int t = target_p - kv.degree();
  std::vector<double> knots;
  for (double b : kv.breakpoints()) {
    const int mult = kv.multiplicity(b) + t;
    for (int k = 0; k < mult; ++k) knots.push_back(b);
  }
  KnotVector elevated(target_p, std::move(knots));
  const auto g = elevated.greville();
  const Eigen::MatrixXd a_new = collocation(elevated, g);
  const Eigen::MatrixXd a_old = collocation(kv, g);
  return a_new.partialPivLu().solve(a_old);
}

// Boehm insertion of a single knot: returns the (n+1) x n refinement matrix.
Eigen::MatrixXd insertion_map(const KnotVector& kv, double u, KnotVector& refined) {
  const int p = kv.degree();
  const int n = kv.num_basis();
  const auto& U = kv.knots();
  const int k = kv.find_span(u);
  Eigen::MatrixXd map = Eigen::MatrixXd::Zero(n + 1, n);
  for (int i = 0; i <= n; ++i) {
    if (i <= k - p) {
      map(i, i) = 1.0;
    } else if (i >= k + 1) {
      map(i, i - 1) = 1.0;
    } else {
      const double alpha = (u - U[i]) / (U[i + p] - U[i]);
      map(i, i) = alpha;
      map(i, i - 1) = 1.0 - alpha;
    }
  }
  std::vector<double> knots = U;
  knots.insert(knots.begin() + k + 1, u);
  refined = KnotVector(p, std::move(knots));
  return map;
}

}  // namespace

bool ParamDomain::contains(double r, double s, double tol) const {
  const double tr = tol * std::max(1.0, std::abs(width_r()));
  const double ts = tol * std::max(1.0, std::abs(width_s()));
  return r >= r0 - tr && r <= r1 + tr && s >= s0 - ts && s <= s1 + ts;
}

KnotVector::KnotVector(int degree, std::vector<double> knots) : degree_(degree), knots_(std::move(knots)) {
  if (degree_ < 0) throw ArgumentError("knot vector degree must be nonnegative");
  const int m = static_cast<int>(knots_.size());
  if (m < 2 * (degree_ + 1)) throw ArgumentError("knot vector too short for its degree");
  for (int k = 1; k < m; ++k) {
    if (knots_[k] < knots_[k - 1]) throw ArgumentError("knot vector must be nondecreasing");
  }
  if (!(knots_.back() > knots_.front())) throw ArgumentError("knot vector has no nonempty span");
  if (multiplicity(knots_.front()) != degree_ + 1 || multiplicity(knots_.back()) != degree_ + 1) {
    throw ArgumentError("knot vector must be clamped (end knots repeated degree+1 times)");
  }
  for (double b : breakpoints()) {
    if (b != knots_.front() && b != knots_.back() && multiplicity(b) > degree_) {
      throw ArgumentError("interior knot multiplicity exceeds degree");
    }
  }
}

KnotVector KnotVector::uniform(int degree, int spans, double lo, double hi) {
  if (spans < 1) throw ArgumentError("uniform knot vector needs at least one span");
  std::vector<double> knots(degree + 1, lo);
  for (int k = 1; k < spans; ++k) knots.push_back(lo + (hi - lo) * k / spans);
  knots.insert(knots.end(), degree + 1, hi);
  return KnotVector(degree, std::move(knots));
}

std::vector<double> KnotVector::breakpoints() const {
  std::vector<double> b;
  for (double u : knots_) {
    if (b.empty() || u > b.back()) b.push_back(u);
  }
  return b;
}

int KnotVector::multiplicity(double u, double tol) const {
  return static_cast<int>(std::count_if(knots_.begin(), knots_.end(), [&](double k) { return std::abs(k - u) <= tol; }));
}

int KnotVector::find_span(double u) const {
  const int n = num_basis();
  if (u >= knots_[n]) return n - 1;
  if (u <= knots_[degree_]) return degree_;
  // Largest l with knots[l] <= u.
  const auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + n + 1, u);
  return static_cast<int>(it - knots_.begin()) - 1;
}

Eigen::MatrixXd KnotVector::basis_derivatives(double u, int span, int nder) const {
  // Cox-de Boor triangle with derivative recurrences.
  const int p = degree_;
  const auto& U = knots_;
  Eigen::MatrixXd ndu(p + 1, p + 1);
  std::vector<double> left(p + 1), right(p + 1);
  ndu(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = u - U[span + 1 - j];
    right[j] = U[span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[r + 1] + left[j - r];
      const double temp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu(j, j) = saved;
  }
  Eigen::MatrixXd ders = Eigen::MatrixXd::Zero(nder + 1, p + 1);
  for (int j = 0; j <= p; ++j) ders(0, j) = ndu(j, p);
  Eigen::MatrixXd a(2, p + 1);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a(0, 0) = 1.0;
    for (int k = 1; k <= nder && k <= p; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        d = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        d += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        d += a(s2, k) * ndu(r, pk);
      }
      ders(k, r) = d;
      std::swap(s1, s2);
    }
  }
  double factor = p;
  for (int k = 1; k <= nder && k <= p; ++k) {
    ders.row(k) *= factor;
    factor *= (p - k);
  }
  return ders;
}

std::vector<double> KnotVector::greville() const {
  const int n = num_basis();
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int k = 1; k <= degree_; ++k) sum += knots_[i + k];
    g[i] = degree_ > 0 ? sum / degree_ : 0.5 * (knots_[i] + knots_[i + 1]);
  }
  return g;
}

NurbsPatch::NurbsPatch(KnotVector r, KnotVector s, std::vector<Eigen::Vector3d> points, std::vector<double> w)
    : kv_r(std::move(r)), kv_s(std::move(s)), control_points(std::move(points)), weights(std::move(w)) {
  validate();
}

bool NurbsPatch::is_rational() const {
  return std::any_of(weights.begin(), weights.end(), [&](double w) { return std::abs(w - weights.front()) > 1e-15; });
}

void NurbsPatch::validate() const {
  const std::size_t expected = static_cast<std::size_t>(n_r()) * n_s();
  if (control_points.size() != expected || weights.size() != expected) {
    std::ostringstream os;
    os << "control net has " << control_points.size() << " points and " << weights.size()
       << " weights, knot vectors imply " << expected;
    throw ArgumentError(os.str());
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw ArgumentError("NURBS weights must be positive");
  }
}

BasisEval eval_basis(const NurbsPatch& patch, double r, double s, int max_deriv) {
  if (max_deriv < 0 || max_deriv > Jet::kMaxOrder) throw ArgumentError("max_deriv must be in 0..3");
  const ParamDomain dom = patch.domain();
  if (!dom.contains(r, s, kKnotTol)) {
    std::ostringstream os;
    os << "parameter (" << r << ", " << s << ") outside [" << dom.r0 << ", " << dom.r1 << "] x [" << dom.s0 << ", "
       << dom.s1 << "]";
    throw DomainError(os.str());
  }
  r = std::clamp(r, dom.r0, dom.r1);
  s = std::clamp(s, dom.s0, dom.s1);

  const int pr = patch.degree_r(), ps = patch.degree_s();
  const int span_r = patch.kv_r.find_span(r);
  const int span_s = patch.kv_s.find_span(s);
  const Eigen::MatrixXd nr = patch.kv_r.basis_derivatives(r, span_r, max_deriv);
  const Eigen::MatrixXd ns = patch.kv_s.basis_derivatives(s, span_s, max_deriv);

  const int count = (pr + 1) * (ps + 1);
  BasisEval out;
  out.max_deriv = max_deriv;
  out.active.resize(count);
  out.partials = Eigen::Matrix<double, Jet::kSize, Eigen::Dynamic>::Zero(Jet::kSize, count);

  // Weighted tensor-product B-spline partials A and their sum W.
  Eigen::Matrix<double, Jet::kSize, Eigen::Dynamic> weighted(Jet::kSize, count);
  weighted.setZero();
  std::array<double, Jet::kSize> wsum{};
  for (int b = 0; b <= ps; ++b) {
    for (int a = 0; a <= pr; ++a) {
      const int local = a + (pr + 1) * b;
      const int gid = patch.id(span_r - pr + a, span_s - ps + b);
      out.active[local] = gid;
      const double w = patch.weights[gid];
      for (int k = 0; k < Jet::kSize; ++k) {
        const int i = Jet::power_r(k), j = Jet::power_s(k);
        if (i + j > max_deriv) continue;
        const double v = w * nr(i, a) * ns(j, b);
        weighted(k, local) = v;
        wsum[k] += v;
      }
    }
  }

  // Quotient rule for R = A / W, degree by degree.
  for (int k = 0; k < Jet::kSize; ++k) {
    const int i = Jet::power_r(k), j = Jet::power_s(k);
    if (i + j > max_deriv) continue;
    for (int local = 0; local < count; ++local) {
      double v = weighted(k, local);
      for (int ii = 0; ii <= i; ++ii) {
        for (int jj = 0; jj <= j; ++jj) {
          if (ii == 0 && jj == 0) continue;
          v -= binomial(i, ii) * binomial(j, jj) * wsum[Jet::index(ii, jj)] * out.partials(Jet::index(i - ii, j - jj), local);
        }
      }
      out.partials(k, local) = v / wsum[0];
    }
  }
  return out;
}

JetVec3 eval_point_jet(const NurbsPatch& patch, double r, double s, int order) {
  const BasisEval be = eval_basis(patch, r, s, order);
  JetVec3 x;
  for (int c = 0; c < 3; ++c) {
    std::array<double, Jet::kSize> partials{};
    for (int a = 0; a < be.size(); ++a) {
      const double pc = patch.control_points[be.active[a]][c];
      for (int k = 0; k < Jet::kSize; ++k) partials[k] += be.partials(k, a) * pc;
    }
    x[c] = Jet::from_partials(partials, order);
  }
  return x;
}

Eigen::Vector3d eval_point(const NurbsPatch& patch, double r, double s) {
  const BasisEval be = eval_basis(patch, r, s, 0);
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  for (int a = 0; a < be.size(); ++a) x += be.value(a) * patch.control_points[be.active[a]];
  return x;
}

NurbsPatch insert_knot(const NurbsPatch& patch, int dir, double u) {
  const KnotVector& kv = dir == 0 ? patch.kv_r : patch.kv_s;
  if (!(u > kv.front() && u < kv.back())) throw DomainError("inserted knot must be interior");
  KnotVector refined;
  const Eigen::MatrixXd map = insertion_map(kv, u, refined);
  const HomogeneousNet net = transform_net(to_homogeneous(patch), patch.n_r(), patch.n_s(), dir, map);
  return dir == 0 ? from_homogeneous(refined, patch.kv_s, net) : from_homogeneous(patch.kv_r, refined, net);
}

NurbsPatch refine_uniform(const NurbsPatch& patch, int n_per_side) {
  if (n_per_side < 1) throw ArgumentError("refine_uniform needs n_per_side >= 1");
  NurbsPatch out = patch;
  for (int dir = 0; dir < 2; ++dir) {
    const KnotVector& kv = dir == 0 ? patch.kv_r : patch.kv_s;
    const double lo = kv.front(), hi = kv.back();
    const double tol = 1e-10 * (hi - lo);
    std::vector<double> targets;
    for (int k = 1; k < n_per_side; ++k) targets.push_back(lo + (hi - lo) * k / n_per_side);
    for (double b : kv.breakpoints()) {
      if (b == lo || b == hi) continue;
      const bool on_grid = std::any_of(targets.begin(), targets.end(), [&](double t) { return std::abs(t - b) <= tol; });
      if (!on_grid) throw ArgumentError("existing interior knot does not lie on the requested uniform grid");
    }
    for (double t : targets) {
      const KnotVector& cur = dir == 0 ? out.kv_r : out.kv_s;
      const auto bp = cur.breakpoints();
      const bool present = std::any_of(bp.begin(), bp.end(), [&](double b) { return std::abs(t - b) <= tol; });
      if (!present) out = insert_knot(out, dir, t);
    }
  }
  return out;
}

NurbsPatch elevate_degree(const NurbsPatch& patch, int target_p) {
  if (target_p < patch.degree_r() || target_p < patch.degree_s()) {
    throw ArgumentError("elevate_degree: target degree below current degree");
  }
  HomogeneousNet net = to_homogeneous(patch);
  KnotVector kr = patch.kv_r, ks = patch.kv_s;
  int n_r = patch.n_r(), n_s = patch.n_s();
  if (target_p > kr.degree()) {
    const Eigen::MatrixXd map = elevation_map(kr, target_p);
    net = transform_net(net, n_r, n_s, 0, map);
    std::vector<double> knots;
    for (double b : kr.breakpoints()) knots.insert(knots.end(), kr.multiplicity(b) + target_p - kr.degree(), b);
    kr = KnotVector(target_p, std::move(knots));
    n_r = kr.num_basis();
  }
  if (target_p > ks.degree()) {
    const Eigen::MatrixXd map = elevation_map(ks, target_p);
    net = transform_net(net, n_r, n_s, 1, map);
    std::vector<double> knots;
    for (double b : ks.breakpoints()) knots.insert(knots.end(), ks.multiplicity(b) + target_p - ks.degree(), b);
    ks = KnotVector(target_p, std::move(knots));
    n_s = ks.num_basis();
  }
  return from_homogeneous(std::move(kr), std::move(ks), net);
}

NurbsPatch cylinder_arc_patch(double radius, double length, double half_angle) {
  // Arc in the x-z plane: point(theta) = R (sin theta, ., cos theta).
  const double c = std::cos(half_angle);
  const Eigen::Vector3d p0(-radius * std::sin(half_angle), 0.0, radius * c);
  const Eigen::Vector3d p1(0.0, 0.0, radius / c);
  const Eigen::Vector3d p2(radius * std::sin(half_angle), 0.0, radius * c);
  const std::array<Eigen::Vector3d, 3> arc{p0, p1, p2};
  const std::array<double, 3> arc_w{1.0, c, 1.0};
  std::vector<Eigen::Vector3d> pts;
  std::vector<double> w;
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 3; ++i) {
      pts.push_back(arc[i] + Eigen::Vector3d(0.0, j * length, 0.0));
      w.push_back(arc_w[i]);
    }
  }
  return NurbsPatch(KnotVector(2, {0, 0, 0, 1, 1, 1}), KnotVector(1, {0, 0, 1, 1}), std::move(pts), std::move(w));
}

}  // namespace tdcshell
