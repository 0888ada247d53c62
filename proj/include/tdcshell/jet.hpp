#pragma once

// Truncated bivariate Taylor arithmetic in the parameters (r, s).
//
// A Jet carries the Taylor coefficients of a function about a parameter point
// up to total degree 3. Arithmetic is exact on the truncated polynomial ring,
// so composing a parametrization with the tangential calculus operators yields
// parametric derivatives to rounding accuracy without finite differences.

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>

#include <Eigen/Core>

namespace tdcshell {

namespace jet_detail {

constexpr int index(int i, int j) { return (i + j) * (i + j + 1) / 2 + j; }
constexpr int degree(int k) { return k == 0 ? 0 : k < 3 ? 1 : k < 6 ? 2 : 3; }
constexpr int power_s(int k) { return k - degree(k) * (degree(k) + 1) / 2; }
constexpr int power_r(int k) { return degree(k) - power_s(k); }

// (a, b, c): coefficient a times coefficient b contributes to c; sorted by degree of c.
constexpr auto make_product_table() {
  std::array<std::array<int, 3>, 35> table{};
  std::size_t n = 0;
  for (int target_degree = 0; target_degree <= 3; ++target_degree) {
    for (int a = 0; a < 10; ++a) {
      for (int b = 0; b < 10; ++b) {
        if (degree(a) + degree(b) != target_degree) continue;
        table[n++] = {a, b, index(power_r(a) + power_r(b), power_s(a) + power_s(b))};
      }
    }
  }
  return table;
}
inline constexpr std::array<std::array<int, 3>, 35> kProductTable = make_product_table();

}  // namespace jet_detail

class Jet {
 public:
  static constexpr int kMaxOrder = 3;
  static constexpr int kSize = 10;

  Jet() : c_{}, order_(kMaxOrder) {}
  Jet(double value) : c_{}, order_(kMaxOrder) { c_[0] = value; }  // NOLINT: implicit by design of scalar promotion

  /// Independent variable: dir 0 is r, dir 1 is s.
  static Jet variable(double value, int dir) {
    Jet j(value);
    j.c_[dir == 0 ? 1 : 2] = 1.0;
    return j;
  }

  /// Builds a jet from parametric partial derivatives d^(i+j) f / dr^i ds^j.
  static Jet from_partials(const std::array<double, kSize>& partials, int order) {
    Jet j;
    j.order_ = order;
    for (int k = 0; k < kSize; ++k) {
      if (degree(k) <= order) j.c_[k] = partials[k] / (factorial(power_r(k)) * factorial(power_s(k)));
    }
    return j;
  }

  static constexpr int index(int i, int j) { return jet_detail::index(i, j); }
  static constexpr int degree(int k) { return jet_detail::degree(k); }
  static constexpr int power_s(int k) { return jet_detail::power_s(k); }
  static constexpr int power_r(int k) { return jet_detail::power_r(k); }

  double value() const { return c_[0]; }
  int order() const { return order_; }
  double coeff(int i, int j) const { return c_[index(i, j)]; }
  double& coeff(int i, int j) { return c_[index(i, j)]; }
  double coeff_at(int k) const { return c_[k]; }

  /// Parametric partial derivative d^(i+j)/dr^i ds^j at the expansion point.
  double partial(int i, int j) const { return c_[index(i, j)] * factorial(i) * factorial(j); }
  double d_r_value() const { return c_[1]; }
  double d_s_value() const { return c_[2]; }

  Jet d_r() const { return derivative(0); }
  Jet d_s() const { return derivative(1); }

  Jet derivative(int dir) const {
    Jet out;
    out.order_ = order_ > 0 ? order_ - 1 : 0;
    for (int k = 0; k < kSize; ++k) {
      const int i = power_r(k), j = power_s(k);
      if (i + j > out.order_) continue;
      if (dir == 0) {
        out.c_[k] = (i + 1) * c_[index(i + 1, j)];
      } else {
        out.c_[k] = (j + 1) * c_[index(i, j + 1)];
      }
    }
    if (order_ == 0) out.c_.fill(0.0);
    return out;
  }

  Jet truncated(int order) const {
    Jet out = *this;
    out.set_order(order < order_ ? order : order_);
    return out;
  }

  Jet& operator+=(const Jet& o) {
    for (int k = 0; k < kSize; ++k) c_[k] += o.c_[k];
    set_order(order_ < o.order_ ? order_ : o.order_);
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int k = 0; k < kSize; ++k) c_[k] -= o.c_[k];
    set_order(order_ < o.order_ ? order_ : o.order_);
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }
  Jet& operator*=(double a) {
    for (double& v : c_) v *= a;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) {
    for (double& v : a.c_) v = -v;
    return a;
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet out;
    out.order_ = a.order_ < b.order_ ? a.order_ : b.order_;
    for (const auto& t : jet_detail::kProductTable) {
      if (degree(t[2]) > out.order_) break;
      out.c_[t[2]] += a.c_[t[0]] * b.c_[t[1]];
    }
    return out;
  }
  friend Jet operator*(double a, Jet b) { return b *= a; }
  friend Jet operator*(Jet b, double a) { return b *= a; }
  friend Jet operator/(const Jet& a, const Jet& b) { return a * inverse(b); }
  friend Jet operator/(Jet a, double b) { return a *= 1.0 / b; }

  friend bool operator==(const Jet& a, const Jet& b) { return a.c_ == b.c_ && a.order_ == b.order_; }
  friend bool operator!=(const Jet& a, const Jet& b) { return !(a == b); }

  /// f(a) from the Taylor coefficients f^(k)(a0)/k!, k = 0..3.
  friend Jet compose(const Jet& a, const std::array<double, 4>& f) {
    Jet delta = a;
    delta.c_[0] = 0.0;
    Jet out(f[0]);
    out.order_ = a.order_;
    Jet power = delta;
    for (int k = 1; k <= kMaxOrder && k <= a.order_; ++k) {
      for (int m = 0; m < kSize; ++m) out.c_[m] += f[k] * power.c_[m];
      if (k < kMaxOrder) power = power * delta;
    }
    out.set_order(a.order_);
    return out;
  }

  friend Jet inverse(const Jet& a) {
    const double x = a.c_[0];
    const double ix = 1.0 / x;
    return compose(a, {ix, -ix * ix, ix * ix * ix, -ix * ix * ix * ix});
  }
  friend Jet sqrt(const Jet& a) {
    const double x = a.c_[0];
    const double r = std::sqrt(x);
    return compose(a, {r, 0.5 / r, -0.125 / (r * x), 0.0625 / (r * x * x)});
  }
  friend Jet sin(const Jet& a) {
    const double sv = std::sin(a.c_[0]), cv = std::cos(a.c_[0]);
    return compose(a, {sv, cv, -sv / 2.0, -cv / 6.0});
  }
  friend Jet cos(const Jet& a) {
    const double sv = std::sin(a.c_[0]), cv = std::cos(a.c_[0]);
    return compose(a, {cv, -sv, -cv / 2.0, sv / 6.0});
  }

  friend std::ostream& operator<<(std::ostream& os, const Jet& j) {
    os << "Jet[" << j.order_ << "](";
    for (int k = 0; k < kSize; ++k) os << (k ? ", " : "") << j.c_[k];
    return os << ")";
  }

 private:
  static constexpr double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

  void set_order(int order) {
    order_ = order;
    for (int k = 0; k < kSize; ++k) {
      if (degree(k) > order_) c_[k] = 0.0;
    }
  }

  std::array<double, kSize> c_;
  int order_;
};

using JetVec2 = Eigen::Matrix<Jet, 2, 1>;
using JetVec3 = Eigen::Matrix<Jet, 3, 1>;
using JetMat2 = Eigen::Matrix<Jet, 2, 2>;
using JetMat3 = Eigen::Matrix<Jet, 3, 3>;
using JetMat32 = Eigen::Matrix<Jet, 3, 2>;

inline double value_of(double v) { return v; }
inline double value_of(const Jet& v) { return v.value(); }

template <typename Derived>
auto values_of(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<double, Derived::RowsAtCompileTime, Derived::ColsAtCompileTime> out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if constexpr (std::is_same_v<Scalar, Jet>) {
        out(i, j) = m(i, j).value();
      } else {
        out(i, j) = m(i, j);
      }
    }
  }
  return out;
}

}  // namespace tdcshell

namespace Eigen {

template <>
struct NumTraits<tdcshell::Jet> : GenericNumTraits<tdcshell::Jet> {
  using Real = tdcshell::Jet;
  using NonInteger = tdcshell::Jet;
  using Nested = tdcshell::Jet;
  using Literal = tdcshell::Jet;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 10,
    AddCost = 10,
    MulCost = 40
  };
  static inline Real epsilon() { return Real(std::numeric_limits<double>::epsilon()); }
  static inline Real dummy_precision() { return Real(1e-12); }
  static inline Real highest() { return Real(std::numeric_limits<double>::max()); }
  static inline Real lowest() { return Real(std::numeric_limits<double>::lowest()); }
  static inline int digits10() { return std::numeric_limits<double>::digits10; }
};

template <typename BinaryOp>
struct ScalarBinaryOpTraits<tdcshell::Jet, double, BinaryOp> {
  using ReturnType = tdcshell::Jet;
};
template <typename BinaryOp>
struct ScalarBinaryOpTraits<double, tdcshell::Jet, BinaryOp> {
  using ReturnType = tdcshell::Jet;
};

}  // namespace Eigen
