#include <gtest/gtest.h>

#include <cmath>

#include "sliceforge/slicefun.hpp"
#include "support.hpp"

using namespace sliceforge;
using sliceforge::testing::random_i;
using sliceforge::testing::random_q;

namespace {
const Quaternion I_ = Quaternion::i(), J_ = Quaternion::j(), K_ = Quaternion::k();

// Oracle: sum of x^n a_n with x^n built by repeated left multiplication.
Quaternion naive_series(const std::vector<Quaternion>& a, const Quaternion& x) {
  Quaternion sum, xn = 1;
  for (const Quaternion& c : a) {
    sum += xn * c;
    xn = x * xn;
  }
  return sum;
}

std::vector<Quaternion> random_poly(std::mt19937_64& rng, int degree) {
  std::vector<Quaternion> a(static_cast<std::size_t>(degree) + 1);
  for (Quaternion& c : a) c = random_q(rng);
  return a;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InternalInconsistency;
}
}  // namespace

TEST(SeriesEval, Examples) {
  EXPECT_EQ(series_eval({0, 0, 1}, {1, 2, 0, 0}), (Quaternion{-3, 4, 0, 0}));
  const Quaternion q{0.5, -1, 2, 3};
  EXPECT_EQ(series_eval({q}, {7, 1, 1, 1}), q);
  EXPECT_EQ(series_eval({0, I_}, J_), -K_);  // j i = -k
}

TEST(SeriesEval, MatchesNaiveExpansion) {
  std::mt19937_64 rng(21);
  for (int n = 0; n < 200; ++n) {
    const auto a = random_poly(rng, 8);
    const Quaternion x = random_q(rng, 1.2);
    EXPECT_QNEAR(series_eval(a, x), naive_series(a, x), 1e-12);
  }
}

TEST(EstimateRadius, PolynomialsAndGeometricTails) {
  EXPECT_TRUE(std::isinf(SliceFunctionHandle::series({1, 2, 3}).as_series()->radius));
  EXPECT_TRUE(std::isinf(estimate_radius({1})));
  std::vector<Quaternion> geo;
  for (int n = 0; n < 60; ++n) geo.push_back(std::pow(0.5, n));
  EXPECT_NEAR(estimate_radius(geo), 2.0, 1e-9);
}

TEST(SeriesSphereCoeffs, Examples) {
  const SphereCoeffs sq = series_sphere_coeffs({0, 0, 1}, 0, 1);
  EXPECT_EQ(sq.b, Quaternion(-1));
  EXPECT_EQ(sq.c, Quaternion(0));
  const SphereCoeffs xi = series_sphere_coeffs({0, I_}, 0, 1);
  EXPECT_EQ(xi.b, Quaternion(0));
  EXPECT_EQ(xi.c, I_);
  const Quaternion a1{1, 2, -1, 0.5};
  const SphereCoeffs lin = series_sphere_coeffs({0, a1}, 0.3, 1.7);
  EXPECT_QNEAR(lin.b, 0.3 * a1, 1e-16);
  EXPECT_QNEAR(lin.c, 1.7 * a1, 1e-16);
}

TEST(SeriesSphereCoeffs, ConsistentWithEvaluationOnEverySlice) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int n = 0; n < 200; ++n) {
    const auto a = random_poly(rng, 8);
    const double alpha = u(rng), beta = std::abs(u(rng));
    const ImaginaryUnit I = random_i(rng);
    const SphereCoeffs bc = series_sphere_coeffs(a, alpha, beta);
    const Quaternion x = phi(I, {alpha, beta});
    double scale = 0, p = 1;
    for (const Quaternion& c : a) scale += c.abs() * p, p *= x.abs();
    EXPECT_LE(distance(series_eval(a, x), bc.b + I.q() * bc.c), 1e-10 * std::max(1.0, scale));
  }
}

TEST(SeriesSphereCoeffs, OutsideRadius) {
  EXPECT_EQ(code_of([] { series_sphere_coeffs({1, 1, 1}, 0.8, 0.8, 1.0); }), ErrorCode::OutsideRadius);
}

TEST(SeriesEval, RealCoefficientsPreserveSlices) {
  std::mt19937_64 rng(23);
  for (int n = 0; n < 100; ++n) {
    std::vector<Quaternion> a;
    for (int k = 0; k < 6; ++k) a.push_back(random_q(rng).w);
    const ImaginaryUnit I = random_i(rng);
    EXPECT_TRUE(in_slice(series_eval(a, phi(I, {0.4, 0.9})), I, 1e-12));
  }
}

TEST(Induce, Examples) {
  const StemFunction id = series_stem({0, 1});
  EXPECT_EQ(induce(id, Quaternion{1, 0, 2, 0}), (Quaternion{1, 0, 2, 0}));
  const StemFunction sq = series_stem({0, 0, 1});
  EXPECT_QNEAR(induce(sq, K_), Quaternion(-1), 1e-15);
  // At a real point the ı-part of the stem vanishes.
  const StemFunction F = series_stem({Quaternion{0.4, -1, 2, 0.5}, I_, J_});
  EXPECT_EQ(F(CPoint{0.7, 0}).q, Quaternion(0));
  EXPECT_EQ(induce(F, 0.7), F(CPoint{0.7, 0}).p);
}

TEST(Induce, RepresentativeChoiceIrrelevant) {
  std::mt19937_64 rng(24);
  for (int n = 0; n < 200; ++n) {
    const StemFunction F = series_stem(random_poly(rng, 6));
    const ImaginaryUnit I = random_i(rng);
    const CPoint z{0.3, 0.8};
    EXPECT_QNEAR(induce(F, I, z), induce(F, -I, z.conj()), 1e-14);
  }
}

TEST(Induce, SeriesStemInducesTheSeries) {
  std::mt19937_64 rng(25);
  for (int n = 0; n < 200; ++n) {
    const auto a = random_poly(rng, 7);
    const Quaternion x = random_q(rng, 1.2);
    EXPECT_QNEAR(induce(series_stem(a), x), series_eval(a, x), 1e-12);
  }
}

TEST(SphericalDataRaw, Examples) {
  const auto sq = SliceFunctionHandle::series({0, 0, 1});
  const SphericalData d = spherical_data_raw(sq, {1, 2, 0, 0});
  EXPECT_QNEAR(d.value, Quaternion(-3), 1e-15);
  ASSERT_TRUE(d.derivative);
  EXPECT_QNEAR(*d.derivative, Quaternion(2), 1e-15);

  const Quaternion q{1, -1, 2, 0};
  const SphericalData c = spherical_data_raw(SliceFunctionHandle::series({q}), {0.5, 0, 1, 1});
  EXPECT_EQ(c.value, q);
  EXPECT_QNEAR(*c.derivative, Quaternion(0), 0);

  const SphericalData id = spherical_data_raw(SliceFunctionHandle::series({0, 1}), {0.25, 0.3, -0.4, 1.2});
  EXPECT_QNEAR(id.value, Quaternion(0.25), 1e-15);
  EXPECT_QNEAR(*id.derivative, Quaternion(1), 1e-15);

  EXPECT_FALSE(spherical_data_raw(sq, 2.0).derivative.has_value());
}

TEST(SphericalDataRaw, DecompositionIdentity) {
  std::mt19937_64 rng(26);
  for (int n = 0; n < 500; ++n) {
    const auto a = random_poly(rng, 6);
    const Quaternion x = random_q(rng, 1.3);
    const SphericalData d = spherical_data_raw(SliceFunctionHandle::series(a), x);
    EXPECT_QNEAR(d.value + x.im() * *d.derivative, series_eval(a, x), 1e-12);
  }
}

TEST(SchwarzReflect, Examples) {
  StemFunction upper;
  upper.eval = [](const CPoint& z) {
    if (z.beta < 0) ADD_FAILURE() << "upper stem evaluated below the axis";
    return CQuat{z.alpha, z.beta};
  };
  const StemFunction F = schwarz_reflect(upper, {-0.5, 0, 0.5});
  EXPECT_EQ(F(CPoint{0.2, -0.3}), (CQuat{0.2, -0.3}));

  const Quaternion q1{1, 2, 3, 4}, q2{-1, 0, 1, 0};
  StemFunction given;
  given.eval = [&](const CPoint& z) { return z.beta > 0 ? CQuat{q1, q2} : CQuat{q1, 0}; };
  const StemFunction G = schwarz_reflect(given, {1.0});
  EXPECT_EQ(G(CPoint{1, -1}), (CQuat{q1, -q2}));

  StemFunction bad;
  bad.eval = [](const CPoint& z) { return CQuat{z.alpha, J_}; };
  EXPECT_EQ(code_of([&] { schwarz_reflect(bad, {0.5}); }), ErrorCode::RealAxisMismatch);
}

TEST(StemSymmetryCheck, SeriesStemPasses) {
  std::mt19937_64 rng(27);
  for (int n = 0; n < 20; ++n) {
    const SymmetryReport r = stem_symmetry_check(series_stem(random_poly(rng, 8)), 200, 5);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.samples, 200u);
    EXPECT_LE(r.max_err, 1e-12);
  }
}

TEST(StemSymmetryCheck, ImaginaryConstantFails) {
  StemFunction F;
  F.eval = [](const CPoint&) { return CQuat{0, 1}; };
  EXPECT_FALSE(stem_symmetry_check(F, 50).pass);
}

TEST(StemSymmetryCheck, EmptySampleIsVacuous) {
  const SymmetryReport r = stem_symmetry_check(series_stem({1}), 0);
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.vacuous);
}

TEST(GridStem, BilinearReproducesAffineStems) {
  StemGrid g;
  g.alpha_min = -1;
  g.alpha_max = 1;
  g.beta_max = 1;
  g.nx = 5;
  g.ny = 3;
  for (int q = 0; q < g.ny; ++q)
    for (int p = 0; p < g.nx; ++p) g.values.push_back({-1 + 0.5 * p, 0.5 * q});
  const StemFunction F = grid_stem(g);
  EXPECT_LE((F(CPoint{0.3, 0.7}) - CQuat{0.3, 0.7}).abs(), 1e-15);
  EXPECT_LE((F(CPoint{0.3, -0.7}) - CQuat{0.3, -0.7}).abs(), 1e-15);
  EXPECT_TRUE(stem_symmetry_check(F, 100).pass);
  EXPECT_EQ(code_of([&] { F(CPoint{2, 0}); }), ErrorCode::OutsideDomain);
}

TEST(Handle, DomainRestrictions) {
  const auto f = SliceFunctionHandle::series({1, 1, 1}, 1.0);
  EXPECT_TRUE(f.in_domain(Quaternion{0.5, 0.5, 0, 0}));
  EXPECT_FALSE(f.in_domain(Quaternion{0.9, 0.9, 0, 0}));
  EXPECT_EQ(code_of([&] { f(Quaternion{0.9, 0.9, 0, 0}); }), ErrorCode::OutsideDomain);

  const auto g = SliceFunctionHandle::series({0, 0, 1}).restricted_to_ball({2, 1});
  EXPECT_TRUE(g.in_domain(Quaternion{2, 0, 0.5, 0}));
  EXPECT_FALSE(g.in_domain(Quaternion{0, 0, 0.5, 0}));
  // Negative beta is read as (alpha, -beta, -I).
  EXPECT_TRUE(g.in_domain(2.2, -0.5, ImaginaryUnit::make(0, 0, 1)));
}
