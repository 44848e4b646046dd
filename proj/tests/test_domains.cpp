#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>

#include "sliceforge/domains.hpp"

using namespace sliceforge;

namespace {

const RegionSpec kR = RegionSpec::unite({RegionSpec::rect(-1, 0, 0, 4), RegionSpec::rect(2, 3, 0, 4)});
const RegionSpec kC = RegionSpec::unite({kR, RegionSpec::rect(-1, 3, 3, 4)});

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InternalInconsistency;
}

const AxialDomain& builtin(const std::string& name) {
  static std::map<std::string, AxialDomain> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, builtin_domain(name)).first;
  return it->second;
}

AxialDomain c_shape_everywhere(const Grid& g = Grid::standard()) {
  return build_from_profile([](double, double a, double b) { return kC.contains(a, b); }, g, 33, "c_everywhere");
}

// Five latitudes, each a random union of rectangles; some touch the real axis, some float.
AxialDomain random_table(std::mt19937_64& rng) {
  Grid g;
  g.h = 0.25;
  std::uniform_real_distribution<double> ua(-2, 5), ub(0, 8), size(0.3, 3);
  std::bernoulli_distribution grounded(0.7);
  const std::vector<double> lats{-1, -0.5, 0, 0.5, 1};
  std::vector<RegionSpec> specs;
  for (std::size_t i = 0; i < lats.size(); ++i) {
    std::vector<RegionSpec> parts;
    for (int n = 0; n < 4; ++n) {
      const double a0 = ua(rng), b0 = grounded(rng) ? 0 : ub(rng);
      parts.push_back(RegionSpec::rect(a0, a0 + size(rng), b0, b0 + size(rng)));
    }
    specs.push_back(RegionSpec::unite(parts));
  }
  return build_table(lats, specs, g, "random");
}

}  // namespace

TEST(LatitudeSamples, DefaultLayout) {
  const std::vector<double> r = latitude_samples(kDefaultLatitudes);
  ASSERT_EQ(r.size(), 129u);
  EXPECT_EQ(r.front(), -1.0);
  EXPECT_EQ(r.back(), 1.0);
  EXPECT_EQ(r[64], 0.0);
  EXPECT_TRUE(std::is_sorted(r.begin(), r.end()));
  EXPECT_NE(std::find(r.begin(), r.end(), std::numbers::sqrt2 / 2), r.end());
  EXPECT_NE(std::find(r.begin(), r.end(), -std::numbers::sqrt2 / 2), r.end());
  EXPECT_EQ(code_of([] { latitude_samples(10); }), ErrorCode::InvalidConfig);
}

TEST(WidthFunction, Validation) {
  using P = WidthPiece;
  const auto [w1, w2] = reference_widths(0);
  EXPECT_NO_THROW(w1.validate());
  EXPECT_DOUBLE_EQ(w1(0), 2);
  EXPECT_DOUBLE_EQ(w1(0.5), 1);
  EXPECT_DOUBLE_EQ(w1(-1), 0);
  EXPECT_EQ(code_of([] { WidthFunction{{P::affine(-1, 1, 0, 3)}}.validate(); }), ErrorCode::InvalidWidth);
  EXPECT_EQ(code_of([] { WidthFunction{{P::constant(-1, 1, 1)}}.validate(); }), ErrorCode::InvalidWidth);
  EXPECT_EQ(code_of([] { WidthFunction{{P::constant(0.5, 0.2, 1)}}.validate(); }), ErrorCode::InvalidWidth);
}

TEST(WidthFunction, OpenPiecesExcludeEndpoints) {
  const auto [w1, w2] = reference_widths(3);
  EXPECT_EQ(w1(-0.75), 0);
  EXPECT_EQ(w1(-0.6), 1.5);
  EXPECT_EQ(w1(-0.5), 0);
  EXPECT_EQ(w2(0.25), 0);
  EXPECT_EQ(w2(0.6), 1.5);
}

TEST(BuildAxial, OmegaZeroEquatorIsCShapeAndPolesAreR) {
  const AxialDomain& dom = builtin("omega0");
  EXPECT_EQ(slice_region(dom, 0), rasterize(kC, dom.grid));
  EXPECT_EQ(slice_region(dom, 1), rasterize(kR, dom.grid));
  EXPECT_EQ(slice_region(dom, -1), rasterize(kR, dom.grid));
}

TEST(BuildAxial, OmegaThreeLeftBarOnly) {
  const AxialDomain& dom = builtin("omega3");
  const PlanarRegion expected = rasterize(RegionSpec::unite({kR, RegionSpec::rect(-1, 1.5, 3, 4)}), dom.grid);
  EXPECT_EQ(slice_region(dom, -0.6), expected);
  EXPECT_EQ(slice_region(dom, 1), rasterize(kR, dom.grid));
}

TEST(BuildAxial, OmegaTwoAtDiagonalLatitude) {
  const AxialDomain& dom = builtin("omega2");
  const double s = std::numbers::sqrt2;
  ASSERT_TRUE(dom.sample_index(s / 2).has_value());
  EXPECT_NEAR((*dom.w1)(s / 2), 4 - 2 * s, 1e-12);
  EXPECT_NEAR(2 - (*dom.w2)(s / 2), s, 1e-12);
  const PlanarRegion expected = rasterize(
      RegionSpec::unite({kR, RegionSpec::rect(-1, 4 - 2 * s, 3, 4), RegionSpec::rect(s, 3, 3, 4)}), dom.grid);
  EXPECT_EQ(slice_region(dom, s / 2), expected);
}

TEST(BuildAxial, SailedOmegaThreeAcceptedAndCarriesSail) {
  AxialDomain dom;
  ASSERT_NO_THROW(dom = builtin_domain("omega3p"));
  const PlanarRegion expected = rasterize(
      RegionSpec::unite({kR, RegionSpec::rect(0.5, 3, 3, 4), RegionSpec::rect(0.5, 1.5, 3, 6)}), dom.grid);
  EXPECT_EQ(slice_region(dom, 0.6), expected);
  // Outside the sail latitudes the sail is absent.
  EXPECT_FALSE(slice_region(dom, 0.9).at(*dom.grid.locate({1, 5})));
}

TEST(BuildAxial, EveryReferenceSliceSitsInsideCShapeBelowTheSails) {
  for (const std::string& name : builtin_names()) {
    const AxialDomain& dom = builtin(name);
    const PlanarRegion c = rasterize(kC, dom.grid);
    const PlanarRegion r = rasterize(kR, dom.grid);
    for (std::size_t lat = 0; lat < dom.n_lat(); ++lat) {
      const PlanarRegion& s = dom.slice_at(lat);
      PlanarRegion base = s;
      for (const SailAttachment& sail : dom.sails)
        if (sail.active(dom.latitudes[lat])) base = minus(base, rasterize(sail.d_prime, dom.grid));
      EXPECT_TRUE(is_subset(base, c)) << name << " r=" << dom.latitudes[lat];
      EXPECT_TRUE(is_subset(r, s)) << name << " r=" << dom.latitudes[lat];
    }
  }
}

TEST(Sails, Validation) {
  const Grid g = Grid::standard();
  const auto [w1, w2] = reference_widths(3);
  auto build = [&](SailAttachment s) { build_axial(w1, w2, {std::move(s)}, g, 33); };
  // Attaching region not inside the sail.
  EXPECT_EQ(code_of([&] {
              build({{{0.5, 0.75}}, RegionSpec::rect(0.5, 1.5, 3, 6), RegionSpec::rect(0.5, 2, 3, 4)});
            }),
            ErrorCode::InvalidSail);
  // A sail component never touches the attaching region.
  EXPECT_EQ(code_of([&] {
              build({{{0.5, 0.75}},
                     RegionSpec::unite({RegionSpec::rect(0.5, 1.5, 3, 6), RegionSpec::rect(3.5, 4.5, 5, 6)}),
                     RegionSpec::rect(0.5, 1.5, 3, 4)});
            }),
            ErrorCode::InvalidSail);
  // The loose part of the sail overlaps the base domain.
  EXPECT_EQ(code_of([&] {
              build({{{0.5, 0.75}}, RegionSpec::rect(-1, 1.5, 2, 6), RegionSpec::rect(0.5, 1.5, 3, 4)});
            }),
            ErrorCode::InvalidSail);
  // No sampled latitude of the interval contains the attaching region.
  EXPECT_EQ(code_of([&] {
              build({{{0.8, 0.9}}, RegionSpec::rect(0.5, 1.5, 3, 6), RegionSpec::rect(0.5, 1.5, 3, 4)});
            }),
            ErrorCode::InvalidSail);
}

TEST(Sails, AcceptedSailsSatisfyConditions) {
  for (const std::string name : {"omega0p", "omega1p", "omega2p", "omega3p"}) {
    const AxialDomain& dom = builtin(name);
    ASSERT_EQ(dom.sails.size(), 1u);
    const PlanarRegion dp = rasterize(dom.sails[0].d_prime, dom.grid), d = rasterize(dom.sails[0].d, dom.grid);
    EXPECT_TRUE(is_subset(d, dp));
    const ComponentLabels lab = components(dp);
    for (int id = 0; id < lab.count; ++id)
      EXPECT_FALSE(intersect(component_region(lab, dom.grid, id), d).empty());
    const AxialDomain base = reference_domain(name[5] - '0', false);
    EXPECT_TRUE(intersect(minus(dp, d), symmetric_completion_region(base)).empty()) << name;
  }
}

TEST(Speared, ReferenceDomains) {
  for (const std::string& name : builtin_names()) EXPECT_TRUE(is_speared(builtin(name)).speared) << name;
}

TEST(Speared, FloatingRectangleGivesWitness) {
  const Grid g = Grid::standard();
  const RegionSpec disk = RegionSpec::half_disk(0, 1);
  const AxialDomain dom = build_table({-1, 0, 1}, {disk, RegionSpec::unite({disk, RegionSpec::rect(2, 3, 2, 3)}), disk},
                                      g, "floating");
  const SpearedReport r = is_speared(dom);
  EXPECT_FALSE(r.speared);
  ASSERT_TRUE(r.latitude.has_value());
  EXPECT_EQ(*r.latitude, 0.0);
  EXPECT_DOUBLE_EQ(r.component.a0, 2);
  EXPECT_DOUBLE_EQ(r.component.a1, 3);
  EXPECT_DOUBLE_EQ(r.component.b0, 2);
  EXPECT_DOUBLE_EQ(r.component.b1, 3);
}

TEST(SliceDomain, Examples) {
  for (const std::string& name : builtin_names()) EXPECT_FALSE(is_slice_domain(builtin(name))) << name;
  EXPECT_TRUE(is_slice_domain(build_ball(0, 1, Grid::standard(), 33)));
  EXPECT_TRUE(is_slice_domain(c_shape_everywhere()));
}

TEST(SliceDomain, ImpliesSpeared) {
  std::mt19937_64 rng(41);
  int slice_count = 0;
  for (int n = 0; n < 50; ++n) {
    const AxialDomain dom = random_table(rng);
    if (is_slice_domain(dom)) {
      ++slice_count;
      EXPECT_TRUE(is_speared(dom).speared);
    }
  }
  for (const std::string& name : builtin_names())
    if (is_slice_domain(builtin(name))) {
      EXPECT_TRUE(is_speared(builtin(name)).speared);
    }
  const AxialDomain ball = build_ball(1, 0.75, Grid::standard(), 33);
  EXPECT_TRUE(is_slice_domain(ball) && is_speared(ball).speared);
  RecordProperty("random_slice_domains", slice_count);
}

TEST(SpineCore, ReferenceFamily) {
  const AxialDomain& dom = builtin("omega0");
  const SpineCore sc = spine_core(dom);
  EXPECT_EQ(sc.core, rasterize(kR, dom.grid));
  const PlanarRegion disks = rasterize(
      RegionSpec::unite({RegionSpec::half_disk(-0.5, 0.5), RegionSpec::half_disk(2.5, 0.5)}), dom.grid);
  EXPECT_LE(hausdorff_cells(sc.spine, disks), 1);
}

TEST(SpineCore, Ball) {
  const AxialDomain ball = build_ball(0, 1, Grid::standard(), 33);
  const SpineCore sc = spine_core(ball);
  const PlanarRegion disk = rasterize(RegionSpec::half_disk(0, 1), ball.grid);
  EXPECT_EQ(sc.core, disk);
  EXPECT_LE(hausdorff_cells(sc.spine, disk), 1);
}

TEST(SpineCore, FloatingPartOfIntersectionIsNotCore) {
  const Grid g = Grid::standard();
  const RegionSpec both = RegionSpec::unite({RegionSpec::half_disk(0, 1), RegionSpec::rect(2, 3, 2, 3)});
  const AxialDomain dom = build_table({-1, 1}, {both, both}, g, "float_core");
  const SpineCore sc = spine_core(dom);
  EXPECT_EQ(sc.intersection, rasterize(both, g));
  EXPECT_EQ(sc.core, rasterize(RegionSpec::half_disk(0, 1), g));
}

TEST(SpineCore, NestingOnAllDomains) {
  std::mt19937_64 rng(42);
  std::vector<AxialDomain> doms;
  for (const std::string& name : builtin_names()) doms.push_back(builtin(name));
  for (int n = 0; n < 10; ++n) doms.push_back(random_table(rng));
  for (const AxialDomain& dom : doms) {
    const SpineCore sc = spine_core(dom);
    EXPECT_TRUE(is_subset(sc.spine, sc.core)) << dom.name;
    EXPECT_TRUE(is_subset(sc.core, sc.intersection)) << dom.name;
    for (const PlanarRegion& m : dom.masks) EXPECT_TRUE(is_subset(sc.intersection, m)) << dom.name;
  }
}

TEST(SymmetricCompletion, Examples) {
  const Grid g = Grid::standard();
  for (const std::string name : {"omega0", "omega1", "omega2", "omega3"})
    EXPECT_EQ(symmetric_completion_region(builtin(name)), rasterize(kC, g)) << name;
  EXPECT_EQ(symmetric_completion_region(builtin("omega3p")),
            rasterize(RegionSpec::unite({kC, RegionSpec::rect(0.5, 1.5, 3, 6)}), g));
  const AxialDomain one = build_table({0}, {RegionSpec::half_disk(1, 0.5)}, g, "single");
  EXPECT_EQ(symmetric_completion_region(one), rasterize(RegionSpec::half_disk(1, 0.5), g));
}

TEST(DomainReport, Fields) {
  const DomainReport r = domain_report(builtin("omega1"));
  EXPECT_TRUE(r.speared);
  EXPECT_FALSE(r.slice_domain);
  EXPECT_EQ(r.n_lat, 129u);
  EXPECT_DOUBLE_EQ(r.h, 1.0 / 16);
  EXPECT_FALSE(r.core.empty());
}

TEST(Contains, QuaternionMembership) {
  const AxialDomain& dom = builtin("omega0");
  EXPECT_TRUE(dom.contains(Quaternion{1, 0, 3.5, 0}));    // unit j, equator
  EXPECT_FALSE(dom.contains(Quaternion{1, 0, 0, 3.5}));   // unit k, pole
  EXPECT_TRUE(dom.contains(Quaternion{-0.5, 0, 0, 0}));
  EXPECT_FALSE(dom.contains(Quaternion{1, 0, 0, 0}));
}

TEST(LocalSliceDomain, RealPoint) {
  const LocalSliceDomain l = local_slice_domain(builtin("omega0"), -0.5);
  EXPECT_TRUE(l.real_point);
  EXPECT_NEAR(l.delta, 0.5, 1.0 / 16);
  EXPECT_TRUE(l.verified);
}

TEST(LocalSliceDomain, PointOnTheBar) {
  const AxialDomain& dom = builtin("omega0");
  const LocalSliceDomain l = local_slice_domain(dom, Quaternion{1, 0, 3.5, 0});
  EXPECT_FALSE(l.real_point);
  EXPECT_EQ(l.latitude, 0.0);
  EXPECT_TRUE(l.verified);
  EXPECT_GT(l.epsilon, 0);
  EXPECT_TRUE((l.center > -1 && l.center < 0) || (l.center > 2 && l.center < 3));
  EXPECT_FALSE(l.path.empty());

  // The returned family, taken at every latitude within epsilon, is a slice domain inside dom.
  const PlanarRegion whole = unite(l.disk, l.tube);
  for (std::size_t lat = 0; lat < dom.n_lat(); ++lat) {
    if (std::abs(dom.latitudes[lat]) >= l.epsilon) continue;
    EXPECT_TRUE(is_subset(whole, dom.slice_at(lat)));
  }
  const AxialDomain local = build_from_profile(
      [&](double r, double a, double b) {
        if (std::abs(r) < l.epsilon) return whole.contains(CPoint{a, b});
        return l.disk.contains(CPoint{a, b});
      },
      dom.grid, 33, "local");
  EXPECT_TRUE(is_slice_domain(local));
}

TEST(LocalSliceDomain, OutsidePoint) {
  EXPECT_EQ(code_of([] { local_slice_domain(builtin("omega0"), Quaternion{1, 0, 0, 3.5}); }),
            ErrorCode::PointOutsideDomain);
}

TEST(Builtins, NamesAndBall) {
  EXPECT_EQ(builtin_names().size(), 8u);
  const AxialDomain b = builtin_domain("ball(1,0.5)", Grid::standard(), 33);
  ASSERT_TRUE(b.ball.has_value());
  EXPECT_DOUBLE_EQ(b.ball->center, 1);
  EXPECT_DOUBLE_EQ(b.ball->radius, 0.5);
  EXPECT_EQ(code_of([] { builtin_domain("omega9"); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { builtin_domain("ball(x,1)"); }), ErrorCode::InvalidConfig);
}
