#pragma once

// Power series, stem functions and the slice functions they induce.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sliceforge/algebra.hpp"

namespace sliceforge {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kStemSymmetryTolerance = 1e-10;

/// f(x) = sum x^n a_n with powers on the left, by Horner's rule.
inline Quaternion series_eval(const std::vector<Quaternion>& coeffs, const Quaternion& x) {
  Quaternion acc;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = x * acc + *it;
  return acc;
}

/// Radius of convergence guessed from the upper half of the coefficient tail.
inline double estimate_radius(const std::vector<Quaternion>& coeffs) {
  const std::size_t n = coeffs.size();
  if (n < 2) return kInfinity;
  double limsup = 0;
  for (std::size_t m = std::max<std::size_t>(1, n / 2); m < n; ++m) {
    const double a = coeffs[m].abs();
    if (a > 0) limsup = std::max(limsup, std::pow(a, 1.0 / static_cast<double>(m)));
  }
  return limsup == 0 ? kInfinity : 1.0 / limsup;
}

struct SphereCoeffs {
  Quaternion b, c;
};

/// f(alpha + beta I) = b + I c for every unit I.
inline SphereCoeffs series_sphere_coeffs(const std::vector<Quaternion>& coeffs, double alpha, double beta,
                                         double radius = kInfinity) {
  if (std::isfinite(radius) && alpha * alpha + beta * beta >= radius * radius)
    throw Error(ErrorCode::OutsideRadius, "point outside the ball of convergence");
  SphereCoeffs out;
  double s = 1, t = 0;
  for (const Quaternion& a : coeffs) {
    out.b += s * a;
    out.c += t * a;
    const double s1 = alpha * s - beta * t;
    t = beta * s + alpha * t;
    s = s1;
  }
  return out;
}

/// Coefficients of the term-wise derivative.
inline std::vector<Quaternion> series_derivative(const std::vector<Quaternion>& coeffs) {
  std::vector<Quaternion> d;
  for (std::size_t n = 1; n < coeffs.size(); ++n) d.push_back(static_cast<double>(n) * coeffs[n]);
  return d;
}

struct StemFunction {
  std::function<CQuat(const CPoint&)> eval;
  std::function<bool(const CPoint&)> contains = [](const CPoint&) { return true; };
  // Sampling disk used by symmetry checks.
  CPoint sample_center{0, 0};
  double sample_radius = 1;
  bool symmetry_validated = false;

  CQuat operator()(const CPoint& z) const {
    if (!contains(z)) throw Error(ErrorCode::OutsideDomain, "stem evaluated outside its domain");
    return eval(z);
  }
};

/// F(z) = sum z^n a_n with z^n computed in R_C.
inline StemFunction series_stem(std::vector<Quaternion> coeffs, double radius = kInfinity) {
  StemFunction F;
  F.eval = [coeffs = std::move(coeffs)](const CPoint& z) {
    CQuat acc;
    CPoint zn{1, 0};
    for (const Quaternion& a : coeffs) {
      acc.p += zn.alpha * a;
      acc.q += zn.beta * a;
      zn = cmul(zn, z);
    }
    return acc;
  };
  F.contains = [radius](const CPoint& z) {
    return !std::isfinite(radius) || z.alpha * z.alpha + z.beta * z.beta < radius * radius;
  };
  F.sample_radius = std::isfinite(radius) ? 0.9 * radius : 2.0;
  F.symmetry_validated = true;
  return F;
}

/// Stem sampled on nodes of [alpha_min, alpha_max] x [0, beta_max]; bilinear in between,
/// extended to the lower half by reflection.
struct StemGrid {
  double alpha_min = 0, alpha_max = 1, beta_max = 1;
  int nx = 2, ny = 2;              // node counts
  std::vector<CQuat> values;       // row-major, row = beta index
};

inline StemFunction grid_stem(StemGrid g) {
  if (g.nx < 2 || g.ny < 2 || g.values.size() != static_cast<std::size_t>(g.nx * g.ny))
    throw Error(ErrorCode::InvalidConfig, "stem grid dimensions do not match values");
  StemFunction F;
  const double a0 = g.alpha_min, a1 = g.alpha_max, bm = g.beta_max;
  F.contains = [a0, a1, bm](const CPoint& z) {
    return z.alpha >= a0 && z.alpha <= a1 && std::abs(z.beta) <= bm;
  };
  F.eval = [g = std::move(g)](const CPoint& z0) {
    const bool lower = z0.beta < 0;
    const CPoint z = lower ? z0.conj() : z0;
    const double u = (z.alpha - g.alpha_min) / (g.alpha_max - g.alpha_min) * (g.nx - 1);
    const double v = z.beta / g.beta_max * (g.ny - 1);
    const int p = std::clamp(static_cast<int>(std::floor(u)), 0, g.nx - 2);
    const int q = std::clamp(static_cast<int>(std::floor(v)), 0, g.ny - 2);
    const double fu = u - p, fv = v - q;
    auto at = [&](int pp, int qq) { return g.values[static_cast<std::size_t>(qq * g.nx + pp)]; };
    const CQuat val = (1 - fu) * (1 - fv) * at(p, q) + fu * (1 - fv) * at(p + 1, q) +
                      (1 - fu) * fv * at(p, q + 1) + fu * fv * at(p + 1, q + 1);
    return lower ? val.bar() : val;
  };
  F.sample_center = {(a0 + a1) / 2, 0};
  F.sample_radius = std::min((a1 - a0) / 2, bm);
  return F;
}

/// f = I(F): f(alpha + beta I) = phi_I(F(alpha + ı beta)).
inline Quaternion induce(const StemFunction& F, const Quaternion& x) {
  const Decomposition d = decompose(x);
  return phi_extended(d.unit, F(CPoint{d.alpha, d.beta}));
}

/// Same, with an explicit representative (alpha, beta, I); beta may be negative.
inline Quaternion induce(const StemFunction& F, const ImaginaryUnit& I, const CPoint& z) {
  return phi_extended(I, F(z));
}

/// Extends data given on the closed upper half by F(conj z) = bar F(z).
inline StemFunction schwarz_reflect(const StemFunction& upper, const std::vector<double>& real_samples) {
  for (double a : real_samples) {
    const CQuat v = upper(CPoint{a, 0});
    if ((v.bar() - v).abs() > kStemSymmetryTolerance)
      throw Error(ErrorCode::RealAxisMismatch, "stem value on the real axis is not bar-fixed");
  }
  StemFunction F = upper;
  F.eval = [up = upper.eval](const CPoint& z) { return z.beta >= 0 ? up(z) : up(z.conj()).bar(); };
  F.contains = [c = upper.contains](const CPoint& z) { return c(z.beta >= 0 ? z : z.conj()); };
  F.symmetry_validated = true;
  return F;
}

struct SymmetryReport {
  std::size_t samples = 0;
  double max_err = 0;
  double tolerance = kStemSymmetryTolerance;
  bool pass = true;
  bool vacuous = false;
};

inline SymmetryReport stem_symmetry_check(const StemFunction& F, std::size_t samples, std::uint64_t seed = 1) {
  SymmetryReport rep;
  if (samples == 0) {
    rep.vacuous = true;
    return rep;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::size_t tries = 0;
  while (rep.samples < samples && tries < 100 * samples) {
    ++tries;
    const CPoint z{F.sample_center.alpha + F.sample_radius * u(rng), F.sample_radius * u(rng)};
    if (std::hypot(z.alpha - F.sample_center.alpha, z.beta) >= F.sample_radius) continue;
    if (!F.contains(z) || !F.contains(z.conj())) continue;
    rep.max_err = std::max(rep.max_err, (F(z.conj()) - F(z).bar()).abs());
    ++rep.samples;
  }
  rep.vacuous = rep.samples == 0;
  rep.pass = rep.max_err <= rep.tolerance;
  return rep;
}

struct PowerSeries {
  std::vector<Quaternion> coeffs;
  double radius = kInfinity;
};

struct Pointwise {
  std::function<Quaternion(const Quaternion&)> eval;
};

using Backend = std::variant<PowerSeries, StemFunction, Pointwise>;

struct AxialDomain;

struct BallDescriptor {
  double center = 0;
  double radius = kInfinity;
};

/// Membership of alpha + beta I, given as (alpha, beta >= 0, I).
using SliceMembership = std::function<bool(double alpha, double beta, const ImaginaryUnit& I)>;

class SliceFunctionHandle {
 public:
  SliceFunctionHandle() = default;
  explicit SliceFunctionHandle(Backend b, std::string label = {}) : backend_(std::move(b)), label_(std::move(label)) {}

  static SliceFunctionHandle series(std::vector<Quaternion> coeffs, std::optional<double> radius = std::nullopt) {
    PowerSeries s{std::move(coeffs), kInfinity};
    if (radius) s.radius = *radius;
    return SliceFunctionHandle(std::move(s), "series");
  }

  const Backend& backend() const { return backend_; }
  const std::string& label() const { return label_; }
  const PowerSeries* as_series() const { return std::get_if<PowerSeries>(&backend_); }

  /// Restricts the handle to a ball centered on the real axis.
  SliceFunctionHandle restricted_to_ball(BallDescriptor b) const {
    SliceFunctionHandle h = *this;
    h.ball_ = b;
    h.axial_.reset();
    h.membership_ = [b](double a, double be, const ImaginaryUnit&) {
      return (a - b.center) * (a - b.center) + be * be < b.radius * b.radius;
    };
    return h;
  }

  /// Restricts the handle to an axial domain; the membership test comes from the domain.
  SliceFunctionHandle restricted_to(std::shared_ptr<const AxialDomain> dom, SliceMembership membership) const {
    SliceFunctionHandle h = *this;
    h.ball_.reset();
    h.axial_ = std::move(dom);
    h.membership_ = std::move(membership);
    return h;
  }

  const std::shared_ptr<const AxialDomain>& axial() const { return axial_; }
  const std::optional<BallDescriptor>& ball() const { return ball_; }

  bool in_domain(double alpha, double beta, const ImaginaryUnit& I) const {
    if (beta < 0) return in_domain(alpha, -beta, -I);
    if (membership_ && !membership_(alpha, beta, I)) return false;
    if (const auto* s = as_series(); s && std::isfinite(s->radius))
      return alpha * alpha + beta * beta < s->radius * s->radius;
    if (const auto* F = std::get_if<StemFunction>(&backend_)) return F->contains(CPoint{alpha, beta});
    return true;
  }

  bool in_domain(const Quaternion& x) const {
    const Decomposition d = decompose(x);
    return in_domain(d.alpha, d.beta, d.unit);
  }

  /// f(alpha + beta I) with beta of either sign.
  Quaternion on_slice(const ImaginaryUnit& I, const CPoint& z) const {
    if (!in_domain(z.alpha, z.beta, I)) throw Error(ErrorCode::OutsideDomain, "point outside the function domain");
    return raw(I, z);
  }

  Quaternion operator()(const Quaternion& x) const {
    const Decomposition d = decompose(x);
    if (!in_domain(d.alpha, d.beta, d.unit))
      throw Error(ErrorCode::OutsideDomain, "point outside the function domain");
    if (const auto* s = as_series()) return series_eval(s->coeffs, x);
    return raw(d.unit, CPoint{d.alpha, d.beta});
  }

 private:
  Quaternion raw(const ImaginaryUnit& I, const CPoint& z) const {
    if (const auto* s = as_series()) {
      if (std::isfinite(s->radius) && z.alpha * z.alpha + z.beta * z.beta >= s->radius * s->radius)
        throw Error(ErrorCode::OutsideRadius, "point outside the ball of convergence");
      return series_eval(s->coeffs, phi(I, z));
    }
    if (const auto* F = std::get_if<StemFunction>(&backend_)) return induce(*F, I, z);
    return std::get<Pointwise>(backend_).eval(phi(I, z));
  }

  Backend backend_ = PowerSeries{};
  std::string label_;
  std::optional<BallDescriptor> ball_;
  std::shared_ptr<const AxialDomain> axial_;
  SliceMembership membership_;
};

struct SphericalData {
  Quaternion value;
  std::optional<Quaternion> derivative;
};

/// Spherical value and derivative from f(x) and f(x^c).
inline SphericalData spherical_data_raw(const SliceFunctionHandle& f, const Quaternion& x) {
  const Quaternion fx = f(x);
  const Quaternion fc = f(x.conj());
  SphericalData out{0.5 * (fx + fc), std::nullopt};
  if (!x.is_real()) out.derivative = quat_inv(x.im()) * (0.5 * (fx - fc));
  return out;
}

}  // namespace sliceforge
