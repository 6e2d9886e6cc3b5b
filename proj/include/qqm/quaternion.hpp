#pragma once

// Real quaternion algebra in the Hamilton convention (ij = k), plus the
// symplectic view q = z0 + z1 j and the quaternionic vector product.

#include <array>
#include <cmath>
#include <complex>
#include <iosfwd>

namespace qqm {

using Complex = std::complex<double>;

/// Symplectic components of a quaternion, q = z0 + z1 j.
struct SymplecticPair {
  Complex z0;
  Complex z1;
};

/// An immutable quaternion x0 + x1 i + x2 j + x3 k.
class Quaternion {
 public:
  constexpr Quaternion() = default;
  constexpr Quaternion(double x0, double x1, double x2, double x3)
      : x0_(x0), x1_(x1), x2_(x2), x3_(x3) {}
  // Implicit: a real number is a quaternion.
  constexpr Quaternion(double real) : x0_(real) {}  // NOLINT
  // Implicit: a complex number a + bi embeds as a + bi + 0j + 0k.
  constexpr Quaternion(Complex z) : x0_(z.real()), x1_(z.imag()) {}  // NOLINT

  constexpr double x0() const { return x0_; }
  constexpr double x1() const { return x1_; }
  constexpr double x2() const { return x2_; }
  constexpr double x3() const { return x3_; }
  constexpr double real() const { return x0_; }
  constexpr std::array<double, 4> components() const { return {x0_, x1_, x2_, x3_}; }

  static constexpr Quaternion i() { return {0.0, 1.0, 0.0, 0.0}; }
  static constexpr Quaternion j() { return {0.0, 0.0, 1.0, 0.0}; }
  static constexpr Quaternion k() { return {0.0, 0.0, 0.0, 1.0}; }

  friend constexpr Quaternion operator+(const Quaternion& a, const Quaternion& b) {
    return {a.x0_ + b.x0_, a.x1_ + b.x1_, a.x2_ + b.x2_, a.x3_ + b.x3_};
  }
  friend constexpr Quaternion operator-(const Quaternion& a, const Quaternion& b) {
    return {a.x0_ - b.x0_, a.x1_ - b.x1_, a.x2_ - b.x2_, a.x3_ - b.x3_};
  }
  friend constexpr Quaternion operator-(const Quaternion& a) {
    return {-a.x0_, -a.x1_, -a.x2_, -a.x3_};
  }
  friend constexpr Quaternion operator*(double s, const Quaternion& a) {
    return {s * a.x0_, s * a.x1_, s * a.x2_, s * a.x3_};
  }
  friend constexpr Quaternion operator*(const Quaternion& a, double s) { return s * a; }
  friend constexpr Quaternion operator/(const Quaternion& a, double s) {
    return {a.x0_ / s, a.x1_ / s, a.x2_ / s, a.x3_ / s};
  }

  // Hamilton product.
  friend constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) {
    return {a.x0_ * b.x0_ - a.x1_ * b.x1_ - a.x2_ * b.x2_ - a.x3_ * b.x3_,
            a.x0_ * b.x1_ + a.x1_ * b.x0_ + a.x2_ * b.x3_ - a.x3_ * b.x2_,
            a.x0_ * b.x2_ - a.x1_ * b.x3_ + a.x2_ * b.x0_ + a.x3_ * b.x1_,
            a.x0_ * b.x3_ + a.x1_ * b.x2_ - a.x2_ * b.x1_ + a.x3_ * b.x0_};
  }

  friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;

 private:
  double x0_ = 0.0;
  double x1_ = 0.0;
  double x2_ = 0.0;
  double x3_ = 0.0;
};

constexpr Quaternion qmul(const Quaternion& a, const Quaternion& b) { return a * b; }

constexpr Quaternion qconj(const Quaternion& a) { return {a.x0(), -a.x1(), -a.x2(), -a.x3()}; }

constexpr double norm2(const Quaternion& a) {
  return a.x0() * a.x0() + a.x1() * a.x1() + a.x2() * a.x2() + a.x3() * a.x3();
}

inline double abs(const Quaternion& a) { return std::sqrt(norm2(a)); }

/// Imaginary part x1 i + x2 j + x3 k.
constexpr Quaternion imag(const Quaternion& a) { return {0.0, a.x1(), a.x2(), a.x3()}; }

/// Four-component Euclidean dot product; equals Re(a b*).
constexpr double dot(const Quaternion& a, const Quaternion& b) {
  return a.x0() * b.x0() + a.x1() * b.x1() + a.x2() * b.x2() + a.x3() * b.x3();
}

/// Largest absolute component difference.
inline double max_abs_diff(const Quaternion& a, const Quaternion& b) {
  const auto d = (a - b).components();
  double m = 0.0;
  for (double v : d) m = std::max(m, std::abs(v));
  return m;
}

constexpr SymplecticPair to_symplectic(const Quaternion& a) {
  return {Complex(a.x0(), a.x1()), Complex(a.x2(), a.x3())};
}

constexpr Quaternion from_symplectic(const SymplecticPair& p) {
  return {p.z0.real(), p.z0.imag(), p.z1.real(), p.z1.imag()};
}

std::ostream& operator<<(std::ostream& os, const Quaternion& q);

// ---------------------------------------------------------------------------
// Complex and quaternionic 3-vectors.

using CVec3 = std::array<Complex, 3>;

constexpr CVec3 cross(const CVec3& a, const CVec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

constexpr CVec3 conj(const CVec3& a) {
  return {std::conj(a[0]), std::conj(a[1]), std::conj(a[2])};
}

struct QVector3 {
  std::array<Quaternion, 3> v{};

  constexpr const Quaternion& operator[](int a) const { return v[static_cast<std::size_t>(a)]; }

  /// Complex 3-vector X0 of X = X0 + X1 j.
  constexpr CVec3 x0() const {
    return {to_symplectic(v[0]).z0, to_symplectic(v[1]).z0, to_symplectic(v[2]).z0};
  }
  /// Complex 3-vector X1 of X = X0 + X1 j.
  constexpr CVec3 x1() const {
    return {to_symplectic(v[0]).z1, to_symplectic(v[1]).z1, to_symplectic(v[2]).z1};
  }

  static constexpr QVector3 from_symplectic(const CVec3& x0, const CVec3& x1) {
    return {{qqm::from_symplectic({x0[0], x1[0]}), qqm::from_symplectic({x0[1], x1[1]}),
             qqm::from_symplectic({x0[2], x1[2]})}};
  }

  friend constexpr QVector3 operator+(const QVector3& a, const QVector3& b) {
    return {{a.v[0] + b.v[0], a.v[1] + b.v[1], a.v[2] + b.v[2]}};
  }
  friend constexpr QVector3 operator-(const QVector3& a, const QVector3& b) {
    return {{a.v[0] - b.v[0], a.v[1] - b.v[1], a.v[2] - b.v[2]}};
  }
  friend constexpr QVector3 operator*(double s, const QVector3& a) {
    return {{s * a.v[0], s * a.v[1], s * a.v[2]}};
  }
  friend constexpr bool operator==(const QVector3&, const QVector3&) = default;
};

/// Quaternionic vector product
///   X x Y = X0 x Y0 - X1 x Y1* + (X0 x Y1 + X1 x Y0*) j.
/// Not antisymmetric unless both arguments are complex.
constexpr QVector3 qcross(const QVector3& x, const QVector3& y) {
  const CVec3 x0 = x.x0(), x1 = x.x1(), y0 = y.x0(), y1 = y.x1();
  const CVec3 a = cross(x0, y0);
  const CVec3 b = cross(x1, conj(y1));
  const CVec3 c = cross(x0, y1);
  const CVec3 d = cross(x1, conj(y0));
  return QVector3::from_symplectic({a[0] - b[0], a[1] - b[1], a[2] - b[2]},
                                   {c[0] + d[0], c[1] + d[1], c[2] + d[2]});
}

/// Levi-Civita contraction with ordered quaternion products,
/// (X x Y)_c = eps_cab X_a Y_b.
constexpr QVector3 ordered_cross(const QVector3& x, const QVector3& y) {
  return {{x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]}};
}

/// Levi-Civita symbol for indices in {0,1,2}.
constexpr int levi_civita(int a, int b, int c) {
  if (a == b || b == c || a == c) return 0;
  return ((a == 0 && b == 1) || (a == 1 && b == 2) || (a == 2 && b == 0)) ? 1 : -1;
}

}  // namespace qqm
