#pragma once

// Quaternions, their complexification, imaginary units and slice embeddings.

#include <array>
#include <cmath>
#include <numbers>
#include <ostream>

#include "sliceforge/errors.hpp"

namespace sliceforge {

inline constexpr double kUnitTolerance = 1e-12;
inline constexpr double kRenormalizeTolerance = 1e-9;

struct Quaternion {
  double w = 0, x = 0, y = 0, z = 0;

  constexpr Quaternion() = default;
  constexpr Quaternion(double w_) : w(w_) {}  // NOLINT(google-explicit-constructor)
  constexpr Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

  static constexpr Quaternion i() { return {0, 1, 0, 0}; }
  static constexpr Quaternion j() { return {0, 0, 1, 0}; }
  static constexpr Quaternion k() { return {0, 0, 0, 1}; }

  constexpr Quaternion conj() const { return {w, -x, -y, -z}; }
  constexpr double trace() const { return 2 * w; }
  constexpr double norm() const { return w * w + x * x + y * y + z * z; }
  double abs() const { return std::sqrt(norm()); }
  constexpr double re() const { return w; }
  constexpr Quaternion im() const { return {0, x, y, z}; }
  constexpr bool is_real() const { return x == 0 && y == 0 && z == 0; }

  constexpr Quaternion operator-() const { return {-w, -x, -y, -z}; }
  constexpr Quaternion& operator+=(const Quaternion& o) {
    w += o.w; x += o.x; y += o.y; z += o.z;
    return *this;
  }
  constexpr Quaternion& operator-=(const Quaternion& o) {
    w -= o.w; x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  constexpr Quaternion& operator*=(double s) {
    w *= s; x *= s; y *= s; z *= s;
    return *this;
  }
  constexpr bool operator==(const Quaternion&) const = default;
};

constexpr Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
constexpr Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
constexpr Quaternion operator*(Quaternion a, double s) { return a *= s; }
constexpr Quaternion operator*(double s, Quaternion a) { return a *= s; }
constexpr Quaternion operator/(Quaternion a, double s) { return a *= (1.0 / s); }

constexpr Quaternion quat_mul(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) { return quat_mul(a, b); }

inline Quaternion quat_inv(const Quaternion& a) {
  const double n = a.norm();
  if (n == 0) throw Error(ErrorCode::ZeroDivision, "inverse of zero quaternion");
  return a.conj() / n;
}

constexpr double dot(const Quaternion& a, const Quaternion& b) {
  return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

inline double distance(const Quaternion& a, const Quaternion& b) { return (a - b).abs(); }

inline std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
  return os << '[' << q.w << ", " << q.x << ", " << q.y << ", " << q.z << ']';
}

/// Element of the imaginary sphere: trace 0, norm 1.
class ImaginaryUnit {
 public:
  ImaginaryUnit() : q_(Quaternion::i()) {}

  /// Validates and, within the renormalization band, renormalizes.
  static ImaginaryUnit make(const Quaternion& q) {
    if (std::abs(q.w) > kRenormalizeTolerance)
      throw Error(ErrorCode::NotAUnit, "nonzero real part");
    Quaternion v = q.im();
    const double n = v.norm();
    if (std::abs(n - 1) > kRenormalizeTolerance)
      throw Error(ErrorCode::NotAUnit, "norm differs from 1");
    if (std::abs(n - 1) > kUnitTolerance) v = v / std::sqrt(n);
    return ImaginaryUnit(v);
  }
  static ImaginaryUnit make(double x, double y, double z) { return make({0, x, y, z}); }

  /// Unit at latitude r (its k-coordinate) and longitude theta measured from i toward j.
  static ImaginaryUnit at_latitude(double r, double theta) {
    const double s = std::sqrt(std::max(0.0, 1 - r * r));
    return ImaginaryUnit(Quaternion{0, s * std::cos(theta), s * std::sin(theta), r});
  }

  const Quaternion& q() const { return q_; }
  operator const Quaternion&() const { return q_; }  // NOLINT(google-explicit-constructor)
  double latitude() const { return q_.z; }
  double longitude() const { return std::atan2(q_.y, q_.x); }
  ImaginaryUnit operator-() const { return ImaginaryUnit(-q_); }

 private:
  explicit ImaginaryUnit(const Quaternion& q) : q_(q) {}
  Quaternion q_;
};

/// Element p + ı q of the complexified quaternions; ı is central.
struct CQuat {
  Quaternion p, q;

  CQuat bar() const { return {p, -q}; }
  CQuat star() const { return {p.conj(), q.conj()}; }
  double abs() const { return std::sqrt(p.norm() + q.norm()); }

  CQuat& operator+=(const CQuat& o) {
    p += o.p; q += o.q;
    return *this;
  }
  CQuat& operator-=(const CQuat& o) {
    p -= o.p; q -= o.q;
    return *this;
  }
  bool operator==(const CQuat&) const = default;
};

inline CQuat operator+(CQuat a, const CQuat& b) { return a += b; }
inline CQuat operator-(CQuat a, const CQuat& b) { return a -= b; }
inline CQuat operator*(double s, const CQuat& a) { return {s * a.p, s * a.q}; }

inline CQuat cq_mul(const CQuat& a, const CQuat& b) {
  return {a.p * b.p - a.q * b.q, a.p * b.q + a.q * b.p};
}
inline CQuat operator*(const CQuat& a, const CQuat& b) { return cq_mul(a, b); }

struct CqInvolutions {
  CQuat bar, star;
};
inline CqInvolutions cq_involutions(const CQuat& a) { return {a.bar(), a.star()}; }

/// Point alpha + ı beta of the complex line R_C.
struct CPoint {
  double alpha = 0, beta = 0;

  CPoint conj() const { return {alpha, -beta}; }
  bool operator==(const CPoint&) const = default;
};

/// Product in R_C, which is isomorphic to the complex numbers.
inline CPoint cmul(const CPoint& a, const CPoint& b) {
  return {a.alpha * b.alpha - a.beta * b.beta, a.alpha * b.beta + a.beta * b.alpha};
}

struct Decomposition {
  double alpha = 0, beta = 0;
  ImaginaryUnit unit;
  bool arbitrary = false;  // set for real inputs, where any unit works
};

inline Decomposition decompose(const Quaternion& x) {
  const Quaternion v = x.im();
  const double b = v.abs();
  if (b == 0) return {x.w, 0, ImaginaryUnit(), true};
  return {x.w, b, ImaginaryUnit::make(v / b), false};
}

inline Quaternion phi(const ImaginaryUnit& I, const CPoint& z) {
  return Quaternion{z.alpha} + z.beta * I.q();
}

inline Quaternion phi_extended(const ImaginaryUnit& I, const CQuat& v) { return v.p + I.q() * v.q; }

struct SplittingBasis {
  ImaginaryUnit J;
  Quaternion K;  // I * J
};

/// Gram-Schmidt against span(1, I) with seeds i, j, k in that order.
inline SplittingBasis splitting_basis(const Quaternion& I) {
  if (std::abs(I.norm() - 1) > kUnitTolerance || std::abs(I.w) > kUnitTolerance)
    throw Error(ErrorCode::NotAUnit, "splitting basis needs a unit");
  for (const Quaternion& seed : {Quaternion::i(), Quaternion::j(), Quaternion::k()}) {
    const Quaternion v = seed - dot(seed, I) * I;
    const double n = v.abs();
    if (n >= 0.5) {
      const ImaginaryUnit J = ImaginaryUnit::make(v / n);
      return {J, I * J.q()};
    }
  }
  throw Error(ErrorCode::InternalInconsistency, "no seed left a usable remainder");
}

/// Trace (alpha, beta) in the closed upper half of R_C of the sphere through x.
inline CPoint sphere_trace(const Quaternion& x) {
  const Decomposition d = decompose(x);
  return {d.alpha, d.beta};
}

inline bool same_sphere(const Quaternion& x, const Quaternion& y, double tol = 1e-12) {
  const CPoint a = sphere_trace(x), b = sphere_trace(y);
  return std::abs(a.alpha - b.alpha) <= tol && std::abs(a.beta - b.beta) <= tol;
}

/// True when q lies on the complex line spanned by 1 and I.
inline bool in_slice(const Quaternion& q, const ImaginaryUnit& I, double tol = 1e-12) {
  const Quaternion v = q.im();
  const Quaternion along = dot(v, I.q()) * I.q();
  return (v - along).abs() <= tol * std::max(1.0, v.abs());
}

}  // namespace sliceforge
