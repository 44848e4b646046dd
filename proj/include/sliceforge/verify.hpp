#pragma once

// Randomized property suites over a slice function. Samples come from std::mt19937_64,
// so a seed fixes every sample set on every platform.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sliceforge/extension.hpp"
#include "sliceforge/io.hpp"

namespace sliceforge {

enum class ToleranceClass { Algebraic, FiniteDifference };

inline const char* tolerance_class_name(ToleranceClass c) {
  return c == ToleranceClass::Algebraic ? "algebraic" : "finite-difference";
}

struct CheckResult {
  std::string name;
  std::size_t samples = 0;
  double max_err = 0;
  double tolerance = 0;
  bool pass = true;
  ToleranceClass tolerance_class = ToleranceClass::Algebraic;
  bool expected_failure = false;  // passes when the property is violated
  json worst;                     // sample with the largest error
};

struct VerifyReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
  }
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  std::size_t samples = 200;
  std::optional<double> tol;  // overrides the default of every check
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"rep", "stem", "spherical", "dbar", "differential"};
  return names;
}

// ---------------------------------------------------------------------------
// Sampling

inline ImaginaryUnit random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0, 1);
  while (true) {
    const double x = n(rng), y = n(rng), z = n(rng);
    const double r = std::sqrt(x * x + y * y + z * z);
    if (r > 1e-3) return ImaginaryUnit::make(x / r, y / r, z / r);
  }
}

inline Quaternion random_quaternion(std::mt19937_64& rng, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  const double w = u(rng), x = u(rng), y = u(rng), z = u(rng);
  return {w, x, y, z};
}

inline std::vector<Quaternion> random_polynomial(std::mt19937_64& rng, int max_degree, int min_degree = 0) {
  std::uniform_int_distribution<int> deg(min_degree, max_degree);
  std::vector<Quaternion> c(static_cast<std::size_t>(deg(rng)) + 1);
  for (Quaternion& q : c) q = random_quaternion(rng);
  return c;
}

/// Sum |a_n| |x|^n: the natural magnitude against which series errors are relative.
inline double series_scale(const std::vector<Quaternion>& coeffs, double abs_x) {
  double s = 0, p = 1;
  for (const Quaternion& a : coeffs) {
    s += a.abs() * p;
    p *= abs_x;
  }
  return s;
}

namespace detail {

/// Disk (in the upper half) where samples of f are safe.
inline std::pair<CPoint, double> sample_disk(const SliceFunctionHandle& f) {
  if (const auto* s = f.as_series()) return {{0, 0}, std::isfinite(s->radius) ? 0.8 * s->radius : 1.5};
  if (const auto* F = std::get_if<StemFunction>(&f.backend())) return {F->sample_center, 0.8 * F->sample_radius};
  return {{0, 0}, 1.5};
}

inline CPoint random_upper(std::mt19937_64& rng, const CPoint& center, double radius, double min_beta = 0) {
  std::uniform_real_distribution<double> u(-1, 1);
  while (true) {
    const double a = u(rng), b = std::abs(u(rng));
    if (a * a + b * b >= 1) continue;
    const CPoint z{center.alpha + radius * a, radius * b};
    if (z.beta >= min_beta) return z;
  }
}

inline double magnitude(const SliceFunctionHandle& f, const Quaternion& x, const Quaternion& value) {
  if (const auto* s = f.as_series()) return std::max(1.0, series_scale(s->coeffs, x.abs()));
  return std::max(1.0, value.abs());
}

struct Tracker {
  CheckResult r;
  void add(double err, const json& sample) {
    if (std::isnan(err)) err = std::numeric_limits<double>::infinity();
    if (r.samples == 0 || err > r.max_err) {
      r.max_err = err;
      r.worst = sample;
    }
    ++r.samples;
  }
  CheckResult done() {
    r.pass = r.expected_failure ? r.max_err > r.tolerance : r.max_err <= r.tolerance;
    return r;
  }
};

inline Tracker tracker(std::string name, double tol, ToleranceClass cls, const VerifyOptions& opt) {
  Tracker t;
  t.r.name = std::move(name);
  t.r.tolerance = opt.tol.value_or(tol);
  t.r.tolerance_class = cls;
  return t;
}

inline json sample_json(const Quaternion& x, const ImaginaryUnit& J, const ImaginaryUnit& K) {
  return {{"x", quaternion_to_json(x)}, {"J", quaternion_to_json(J)}, {"K", quaternion_to_json(K)}};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Suites

/// Representation formula from two slices against direct evaluation, relative error.
inline VerifyReport verify_rep(const SliceFunctionHandle& f, const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  const auto [center, radius] = detail::sample_disk(f);
  auto t = detail::tracker("rep_formula_vs_direct", 1e-9, ToleranceClass::Algebraic, opt);
  while (t.r.samples < opt.samples) {
    const CPoint z = detail::random_upper(rng, center, radius);
    const ImaginaryUnit I = random_unit(rng), J = random_unit(rng), K = random_unit(rng);
    if (distance(J, K) < 0.1) continue;
    const Quaternion x = phi(I, z);
    const Quaternion direct = f.on_slice(I, z);
    const Quaternion viaJK = rep_formula(f.on_slice(J, z), f.on_slice(K, z), J, K, I);
    t.add(distance(direct, viaJK) / detail::magnitude(f, x, direct), detail::sample_json(x, J, K));
  }
  return {"rep", opt.seed, {t.done()}};
}

/// Stem symmetry F(conj z) = bar F(z) for the stem and for the two-unit stem built from slices.
inline VerifyReport verify_stem(const SliceFunctionHandle& f, const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  VerifyReport rep{"stem", opt.seed, {}};
  if (const auto* F = std::get_if<StemFunction>(&f.backend())) {
    const SymmetryReport s = stem_symmetry_check(*F, opt.samples, opt.seed);
    CheckResult c;
    c.name = "stem_symmetry";
    c.samples = s.samples;
    c.max_err = s.max_err;
    c.tolerance = opt.tol.value_or(s.tolerance);
    c.pass = s.max_err <= c.tolerance;
    rep.checks.push_back(c);
  }
  const auto [center, radius] = detail::sample_disk(f);
  auto t = detail::tracker("double_index_stem_symmetry", 1e-12, ToleranceClass::Algebraic, opt);
  auto sph = detail::tracker("double_index_induces_f", 1e-10, ToleranceClass::Algebraic, opt);
  while (t.r.samples < opt.samples) {
    const CPoint z = detail::random_upper(rng, center, radius);
    const ImaginaryUnit J = random_unit(rng), K = random_unit(rng), I = random_unit(rng);
    if (distance(J, K) < 0.1) continue;
    const CQuat up = stem_double_index({&f, J, K, z});
    const CQuat down = stem_double_index({&f, J, K, z.conj()});
    const double scale = std::max(1.0, up.abs());
    t.add((down - up.bar()).abs() / scale, detail::sample_json(phi(J, z), J, K));
    const Quaternion direct = f.on_slice(I, z);
    sph.add(distance(phi_extended(I, up), direct) / detail::magnitude(f, phi(I, z), direct),
            detail::sample_json(phi(I, z), J, K));
  }
  rep.checks.push_back(t.done());
  rep.checks.push_back(sph.done());
  return rep;
}

/// f = value + Im(x) derivative, and the two-unit formula against the conjugate-pair definition.
inline VerifyReport verify_spherical(const SliceFunctionHandle& f, const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  const auto [center, radius] = detail::sample_disk(f);
  auto split = detail::tracker("spherical_decomposition", 1e-12, ToleranceClass::Algebraic, opt);
  auto agree = detail::tracker("formula_vs_raw", 1e-11, ToleranceClass::Algebraic, opt);
  while (split.r.samples < opt.samples) {
    const CPoint z = detail::random_upper(rng, center, radius, 1e-3);
    const ImaginaryUnit I = random_unit(rng), J = random_unit(rng), K = random_unit(rng);
    if (distance(J, K) < 0.1) continue;
    const Quaternion x = phi(I, z);
    const Quaternion fx = f.on_slice(I, z);
    const double scale = detail::magnitude(f, x, fx);
    const SphericalData raw = spherical_data_raw(f, x);
    split.add(distance(raw.value + x.im() * *raw.derivative, fx) / scale, detail::sample_json(x, J, K));
    const SphericalData viaJK = spherical_data_formula(f, x, J, K);
    const double e = std::max(distance(raw.value, viaJK.value),
                              z.beta * distance(*raw.derivative, *viaJK.derivative));
    agree.add(e / scale, detail::sample_json(x, J, K));
  }
  return {"spherical", opt.seed, {split.done(), agree.done()}};
}

/// Cauchy-Riemann residual: small, and second order in h where it is above roundoff.
/// A function that is not slice regular is reported as an expected failure.
inline VerifyReport verify_dbar(const SliceFunctionHandle& f, const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  auto [center, radius] = detail::sample_disk(f);
  radius *= 0.9;
  const double h = 1e-4;
  const bool regular = f.label() != "x^c";
  VerifyReport rep{"dbar", opt.seed, {}};
  if (!regular) {
    auto t = detail::tracker("dbar_residual_nonregular", 0.9, ToleranceClass::FiniteDifference, opt);
    t.r.expected_failure = true;
    double min_res = std::numeric_limits<double>::infinity();
    json worst;
    for (std::size_t i = 0; i < opt.samples; ++i) {
      const CPoint z = detail::random_upper(rng, center, radius, 4 * h);
      const ImaginaryUnit I = random_unit(rng);
      const double res = dbar_residual(f, I, z, h);
      if (res < min_res) {
        min_res = res;
        worst = quaternion_to_json(phi(I, z));
      }
    }
    // The property "residual is small" must fail everywhere: track the smallest residual.
    t.r.samples = opt.samples;
    t.r.max_err = min_res;
    t.r.worst = worst;
    rep.checks.push_back(t.done());
    return rep;
  }
  auto small = detail::tracker("dbar_residual_small", 10 * h * h, ToleranceClass::FiniteDifference, opt);
  auto order = detail::tracker("dbar_order_deviation", 0.3, ToleranceClass::FiniteDifference, opt);
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t i = 0; i < opt.samples; ++i) {
    const CPoint z = detail::random_upper(rng, center, radius, 4 * h);
    const ImaginaryUnit I = random_unit(rng);
    const Quaternion x = phi(I, z);
    const double scale = detail::magnitude(f, x, f.on_slice(I, z));
    const double r1 = dbar_residual(f, I, z, h), r2 = dbar_residual(f, I, z, h / 2);
    small.add(r1 / scale, quaternion_to_json(x));
    if (r2 > 1e2 * eps * scale / (h / 2)) order.add(std::abs(std::log2(r1 / r2) - 2), quaternion_to_json(x));
  }
  rep.checks.push_back(small.done());
  rep.checks.push_back(order.done());
  return rep;
}

/// Difference quotient along v against v f'_c (real points) or v1 f'_c + v2 f'_s.
inline VerifyReport verify_differential(const SliceFunctionHandle& f, const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  const auto [center, radius] = detail::sample_disk(f);
  const double h = 1e-4;
  auto real = detail::tracker("differential_real_points", 10 * h * h, ToleranceClass::FiniteDifference, opt);
  auto nonreal = detail::tracker("differential_nonreal_points", 10 * h * h, ToleranceClass::FiniteDifference, opt);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t i = 0; i < opt.samples; ++i) {
    const bool on_axis = i % 2 == 0;
    CPoint z = detail::random_upper(rng, center, 0.8 * radius, 1e-2);
    if (on_axis) z.beta = 0;
    const ImaginaryUnit I = random_unit(rng);
    const Quaternion x0 = phi(I, z);
    Quaternion v = random_quaternion(rng);
    v = v / std::max(1.0, v.abs());
    const DifferentialCheck d = differential_check(f, x0, v, h);
    const double scale = detail::magnitude(f, x0, d.rhs);
    (on_axis ? real : nonreal).add(d.err / scale, {{"x0", quaternion_to_json(x0)}, {"v", quaternion_to_json(v)}});
  }
  return {"differential", opt.seed, {real.done(), nonreal.done()}};
}

inline VerifyReport run_suite(const std::string& suite, const SliceFunctionHandle& f, const VerifyOptions& opt) {
  if (suite == "rep") return verify_rep(f, opt);
  if (suite == "stem") return verify_stem(f, opt);
  if (suite == "spherical") return verify_spherical(f, opt);
  if (suite == "dbar") return verify_dbar(f, opt);
  if (suite == "differential") return verify_differential(f, opt);
  throw Error(ErrorCode::InvalidConfig, "unknown suite '" + suite + "'");
}

inline json verify_report_to_json(const VerifyReport& r) {
  json checks = json::array();
  for (const CheckResult& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"samples", c.samples},
                      {"max_err", c.max_err},
                      {"tolerance", c.tolerance},
                      {"tolerance_class", tolerance_class_name(c.tolerance_class)},
                      {"expected_failure", c.expected_failure},
                      {"pass", c.pass},
                      {"worst_sample", c.worst}});
  return {{"suite", r.suite}, {"seed", r.seed}, {"pass", r.pass()}, {"checks", checks}};
}

}  // namespace sliceforge
