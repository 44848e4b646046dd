#pragma once

// Representation and extension formulas, spherical data and differential checks.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "sliceforge/algebra.hpp"
#include "sliceforge/domains.hpp"
#include "sliceforge/slicefun.hpp"

namespace sliceforge {

inline constexpr double kCoincidentUnits = 1e-9;
inline constexpr double kCapAgreement = 1e-8;
inline constexpr double kDefaultStep = 1e-5;
inline constexpr int kCapProbes = 8;

inline void require_distinct(const ImaginaryUnit& J, const ImaginaryUnit& K) {
  if (distance(J, K) <= kCoincidentUnits) throw Error(ErrorCode::CoincidentUnits, "J and K coincide");
}

/// Value at alpha + beta I from the values at alpha + beta J and alpha + beta K.
inline Quaternion rep_formula(const Quaternion& fJ, const Quaternion& fK, const ImaginaryUnit& J,
                              const ImaginaryUnit& K, const ImaginaryUnit& I) {
  require_distinct(J, K);
  const Quaternion inv = quat_inv(J.q() - K.q());
  return inv * (J.q() * fJ - K.q() * fK) + I.q() * (inv * (fJ - fK));
}

/// The pair (b, c) with f(alpha + beta I) = b + I c.
inline SphereCoeffs sphere_coeffs_from_values(const Quaternion& fJ, const Quaternion& fK, const ImaginaryUnit& J,
                                              const ImaginaryUnit& K) {
  require_distinct(J, K);
  const Quaternion inv = quat_inv(J.q() - K.q());
  return {inv * (J.q() * fJ - K.q() * fK), inv * (fJ - fK)};
}

struct StemSampleRequest {
  const SliceFunctionHandle* f = nullptr;
  ImaginaryUnit J, K;
  CPoint z;
};

inline CQuat stem_double_index(const StemSampleRequest& req) {
  require_distinct(req.J, req.K);
  const CPoint up{req.z.alpha, std::abs(req.z.beta)};
  if (!req.f->in_domain(up.alpha, up.beta, req.J) || !req.f->in_domain(up.alpha, up.beta, req.K))
    throw Error(ErrorCode::OutsideDJK, "point outside the double-index stem domain");
  const SphereCoeffs bc =
      sphere_coeffs_from_values(req.f->on_slice(req.J, up), req.f->on_slice(req.K, up), req.J, req.K);
  const CQuat value{bc.b, bc.c};
  return req.z.beta < 0 ? value.bar() : value;
}

struct SingleIndexResult {
  CQuat value;
  double cap_spread = 0;
  double epsilon_used = 0;
};

/// Evaluates the double-index stem at units on the circle of chord radius eps around J.
inline SingleIndexResult stem_single_index_probe(const SliceFunctionHandle& f, const ImaginaryUnit& J,
                                                 const CPoint& z, double eps) {
  const CPoint up{z.alpha, std::abs(z.beta)};
  if (!f.in_domain(up.alpha, up.beta, J)) throw Error(ErrorCode::OutsideDomain, "point outside the domain");
  const SplittingBasis sb = splitting_basis(J.q());
  const Quaternion J2 = sb.K;
  const double theta = 2 * std::asin(std::min(1.0, eps / 2));
  SingleIndexResult res;
  res.epsilon_used = eps;
  for (int m = 0; m < kCapProbes; ++m) {
    const double ph = 2 * std::numbers::pi * m / kCapProbes;
    const Quaternion k = std::cos(theta) * J.q() + std::sin(theta) * (std::cos(ph) * sb.J.q() + std::sin(ph) * J2);
    const ImaginaryUnit K = ImaginaryUnit::make(k / k.abs());
    const CQuat v = stem_double_index({&f, J, K, z});
    if (m == 0)
      res.value = v;
    else
      res.cap_spread = std::max(res.cap_spread, (v - res.value).abs());
  }
  return res;
}

inline SingleIndexResult stem_single_index(const SliceFunctionHandle& f, const ImaginaryUnit& J, const CPoint& z,
                                           double eps, double tol = kCapAgreement) {
  SingleIndexResult res = stem_single_index_probe(f, J, z, eps);
  if (res.cap_spread > tol) throw Error(ErrorCode::CapDisagreement, "probe values disagree across the cap");
  return res;
}

/// Maximal runs of latitude samples whose slice contains (alpha, beta).
struct LatBand {
  std::size_t lo = 0, hi = 0;  // inclusive sample indices
};

inline std::vector<LatBand> latitude_bands(const AxialDomain& dom, double alpha, double beta) {
  std::vector<LatBand> bands;
  bool open = false;
  for (std::size_t i = 0; i < dom.n_lat(); ++i) {
    const bool in = dom.contains(alpha, beta, dom.latitudes[i]);
    if (in && !open) bands.push_back({i, i});
    if (in) bands.back().hi = i;
    open = in;
  }
  return bands;
}

/// Two units with latitudes in the band, chosen to maximize |J - K|.
inline std::pair<ImaginaryUnit, ImaginaryUnit> band_units(const AxialDomain& dom, const LatBand& band) {
  double best = -1;
  std::size_t bi = band.lo, bj = band.lo;
  auto sep = [&](std::size_t a, std::size_t b) {
    const double ra = dom.latitudes[a], rb = dom.latitudes[b];
    const double s = std::sqrt(std::max(0.0, 1 - ra * ra)) + std::sqrt(std::max(0.0, 1 - rb * rb));
    return s * s + (ra - rb) * (ra - rb);
  };
  for (std::size_t a = band.lo; a <= band.hi; ++a)
    for (std::size_t b = a; b <= band.hi; ++b)
      if (const double v = sep(a, b); v > best) {
        best = v;
        bi = a;
        bj = b;
      }
  if (best <= kCoincidentUnits * kCoincidentUnits) throw Error(ErrorCode::NoSecondUnit, "band holds a single unit");
  return {ImaginaryUnit::at_latitude(dom.latitudes[bi], 0),
          ImaginaryUnit::at_latitude(dom.latitudes[bj], std::numbers::pi)};
}

/// Units used for the spherical data at x: from x's latitude band on axial domains, else I and -I.
inline std::pair<ImaginaryUnit, ImaginaryUnit> formula_units(const SliceFunctionHandle& f, const Decomposition& d) {
  if (const auto& dom = f.axial()) {
    const std::vector<LatBand> bands = latitude_bands(*dom, d.alpha, d.beta);
    if (bands.empty()) throw Error(ErrorCode::OutsideDomain, "point outside the domain");
    const std::size_t own = dom->nearest_latitude(d.unit.latitude());
    const LatBand* pick = &bands.front();
    std::size_t gap = std::numeric_limits<std::size_t>::max();
    for (const LatBand& b : bands) {
      const std::size_t g = own < b.lo ? b.lo - own : (own > b.hi ? own - b.hi : 0);
      if (g < gap) {
        gap = g;
        pick = &b;
      }
    }
    return band_units(*dom, *pick);
  }
  return {d.unit, -d.unit};
}

struct ExtensionResult {
  Quaternion value;
  double consistency_spread = 0;
  std::size_t bands = 0;
};

/// Value of the extension to the symmetric completion; the caller is responsible for the hinge check.
inline ExtensionResult extend_global(const SliceFunctionHandle& f, const Quaternion& x, double tol) {
  const auto& dom = f.axial();
  if (!dom) throw Error(ErrorCode::InvalidConfig, "global extension needs an axial domain");
  const Decomposition d = decompose(x);
  const std::vector<LatBand> bands = latitude_bands(*dom, d.alpha, d.beta);
  if (bands.empty()) throw Error(ErrorCode::OutsideCompletion, "point outside the symmetric completion");
  ExtensionResult res;
  const CPoint z{d.alpha, d.beta};
  bool first = true;
  for (const LatBand& band : bands) {
    std::pair<ImaginaryUnit, ImaginaryUnit> units;
    try {
      units = band_units(*dom, band);
    } catch (const Error&) {
      continue;
    }
    const auto& [J, K] = units;
    const Quaternion v = rep_formula(f.on_slice(J, z), f.on_slice(K, z), J, K, d.unit);
    if (first) {
      res.value = v;
      first = false;
    } else {
      res.consistency_spread = std::max(res.consistency_spread, distance(v, res.value));
    }
    ++res.bands;
  }
  if (first) throw Error(ErrorCode::NoSecondUnit, "no latitude band offers two units");
  if (res.consistency_spread > tol)
    throw Error(ErrorCode::InconsistentExtension, "latitude bands disagree beyond tolerance");
  return res;
}

inline SphericalData spherical_data_formula(const SliceFunctionHandle& f, const Quaternion& x,
                                            const ImaginaryUnit& J, const ImaginaryUnit& K) {
  const Decomposition d = decompose(x);
  const CPoint z{d.alpha, d.beta};
  const Quaternion fJ = f.on_slice(J, z), fK = f.on_slice(K, z);
  const SphereCoeffs bc = sphere_coeffs_from_values(fJ, fK, J, K);
  SphericalData out{bc.b, std::nullopt};
  if (d.beta > 0) out.derivative = bc.c / d.beta;
  return out;
}

inline SphericalData spherical_data_formula(const SliceFunctionHandle& f, const Quaternion& x) {
  const Decomposition d = decompose(x);
  const auto [J, K] = formula_units(f, d);
  return spherical_data_formula(f, x, J, K);
}

namespace detail {
inline void require_margin(const SliceFunctionHandle& f, const ImaginaryUnit& I, const CPoint& z, double h) {
  for (const CPoint& p : {CPoint{z.alpha + 2 * h, z.beta}, CPoint{z.alpha - 2 * h, z.beta},
                          CPoint{z.alpha, z.beta + 2 * h}, CPoint{z.alpha, z.beta - 2 * h}})
    if (!f.in_domain(p.alpha, p.beta, I)) throw Error(ErrorCode::TooCloseToBoundary, "finite-difference stencil leaves the domain");
}

struct SlicePartials {
  Quaternion d_alpha, d_beta;
};

inline SlicePartials slice_partials(const SliceFunctionHandle& f, const ImaginaryUnit& I, const CPoint& z, double h) {
  require_margin(f, I, z, h);
  const Quaternion da =
      (f.on_slice(I, {z.alpha + h, z.beta}) - f.on_slice(I, {z.alpha - h, z.beta})) / (2 * h);
  const Quaternion db =
      (f.on_slice(I, {z.alpha, z.beta + h}) - f.on_slice(I, {z.alpha, z.beta - h})) / (2 * h);
  return {da, db};
}
}  // namespace detail

/// f'_c = (1/2)(d/d alpha - I d/d beta) f_I; exact for series backends.
inline Quaternion slice_derivative(const SliceFunctionHandle& f, const Quaternion& x, double h = kDefaultStep) {
  if (const auto* s = f.as_series()) {
    if (!f.in_domain(x)) throw Error(ErrorCode::OutsideDomain, "point outside the domain");
    return series_eval(series_derivative(s->coeffs), x);
  }
  const Decomposition d = decompose(x);
  const auto p = detail::slice_partials(f, d.unit, {d.alpha, d.beta}, h);
  return 0.5 * (p.d_alpha - d.unit.q() * p.d_beta);
}

/// |(1/2)(d/d alpha + I d/d beta) f_I| by central differences.
inline double dbar_residual(const SliceFunctionHandle& f, const ImaginaryUnit& I, const CPoint& z,
                            double h = kDefaultStep) {
  const auto p = detail::slice_partials(f, I, z, h);
  return (0.5 * (p.d_alpha + I.q() * p.d_beta)).abs();
}

struct DifferentialCheck {
  Quaternion lhs, rhs;
  double err = 0;
};

/// Central difference of f along v against v f'_c (real x0) or v1 f'_c + v2 f'_s.
inline DifferentialCheck differential_check(const SliceFunctionHandle& f, const Quaternion& x0, const Quaternion& v,
                                            double h = kDefaultStep) {
  if (!f.in_domain(x0 + h * v) || !f.in_domain(x0 - h * v))
    throw Error(ErrorCode::TooCloseToBoundary, "difference points leave the domain");
  DifferentialCheck out;
  out.lhs = (f(x0 + h * v) - f(x0 - h * v)) / (2 * h);
  const Quaternion fc = slice_derivative(f, x0, h);
  const Decomposition d = decompose(x0);
  if (d.beta == 0) {
    out.rhs = v * fc;
  } else {
    const Quaternion J = d.unit.q();
    const Quaternion v1 = Quaternion{v.w} + dot(v.im(), J) * J;
    const Quaternion v2 = v - v1;
    const SphericalData sd = spherical_data_formula(f, x0);
    out.rhs = v1 * fc + v2 * *sd.derivative;
  }
  out.err = distance(out.lhs, out.rhs);
  return out;
}

}  // namespace sliceforge
