// End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "sliceforge/extension.hpp"
#include "sliceforge/hinge.hpp"

using namespace sliceforge;

namespace {

// Pinned tolerances. Relative errors are taken against the term sum of the series at the point.
constexpr double kRepTol = 1e-9;
constexpr double kExtendTol = 1e-9;
constexpr double kExtendExampleTol = 1e-10;
constexpr double kDecompositionTol = 1e-12;
constexpr double kSphereConstancyTol = 1e-10;
constexpr double kCoeffTol = 1e-10;
constexpr double kOrderTarget = 2.0;
constexpr double kOrderSlack = 0.3;
constexpr double kDbarStep = 1e-4;
constexpr double kNonRegularFloor = 0.9;
constexpr double kDifferentialStep = kDefaultStep;
constexpr double kDifferentialFactor = 10;
constexpr double kMinUnitGap = 0.1;

const double kDiag = std::numbers::sqrt2 / 2;

std::mt19937_64& rng() {
  static std::mt19937_64 r(20240611);
  return r;
}

double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

Quaternion random_q(double scale = 1) { return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)}; }

ImaginaryUnit random_unit() {
  std::normal_distribution<double> n(0, 1);
  while (true) {
    const double x = n(rng()), y = n(rng()), z = n(rng());
    const double r = std::sqrt(x * x + y * y + z * z);
    if (r > 1e-3) return ImaginaryUnit::make(x / r, y / r, z / r);
  }
}

std::vector<Quaternion> random_poly(int min_degree, int max_degree) {
  std::uniform_int_distribution<int> deg(min_degree, max_degree);
  std::vector<Quaternion> a(static_cast<std::size_t>(deg(rng())) + 1);
  for (Quaternion& c : a) c = random_q();
  return a;
}

double magnitude(const std::vector<Quaternion>& a, const Quaternion& x) {
  double m = 0, p = 1;
  for (const Quaternion& c : a) m += c.abs() * p, p *= x.abs();
  return std::max(1.0, m);
}

std::shared_ptr<const AxialDomain> domain(const std::string& name) {
  static std::map<std::string, std::shared_ptr<const AxialDomain>> cache;
  auto& slot = cache[name];
  if (!slot) slot = std::make_shared<const AxialDomain>(builtin_domain(name));
  return slot;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& run) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s [%s] (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(),
              secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

Outcome table1() {
  int wrong = 0;
  std::ostringstream os;
  for (const Table1Row& row : table1_golden()) {
    const auto got = table1_cells(classify(*domain(row.domain)));
    for (int k = 0; k < 4; ++k)
      if (got[static_cast<std::size_t>(k)] != row.cells[static_cast<std::size_t>(k)]) {
        ++wrong;
        os << row.domain << "#" << k << " ";
      }
  }
  return {wrong == 0, std::to_string(32 - wrong) + "/32 cells" + (wrong ? ", mismatched: " + os.str() : "")};
}

Outcome representation() {
  double worst = 0;
  for (int p = 0; p < 100; ++p) {
    const auto a = random_poly(0, 8);
    for (int s = 0; s < 50;) {
      const ImaginaryUnit I = random_unit(), J = random_unit(), K = random_unit();
      if (distance(J, K) < kMinUnitGap) continue;
      ++s;
      const CPoint z{uniform(-1.5, 1.5), uniform(0, 1.5)};
      const Quaternion x = phi(I, z);
      const Quaternion got = rep_formula(series_eval(a, phi(J, z)), series_eval(a, phi(K, z)), J, K, I);
      worst = std::max(worst, distance(got, series_eval(a, x)) / magnitude(a, x));
    }
  }
  return {worst <= kRepTol, fmt("5000 samples, max relative error %.2e <= %.0e", worst, kRepTol)};
}

Outcome global_extension() {
  const auto dom = domain("omega0");
  const PlanarRegion completion = symmetric_completion_region(*dom);
  std::vector<std::size_t> cells;
  for (std::size_t c = 0; c < completion.mask.size(); ++c)
    if (completion.mask[c]) cells.push_back(c);
  std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
  double worst = 0, spread = 0;
  for (int p = 0; p < 20; ++p) {
    const auto a = random_poly(0, 5);
    const SliceFunctionHandle f = restrict_to(SliceFunctionHandle::series(a), dom);
    for (int s = 0; s < 200;) {
      const Quaternion x = phi(random_unit(), dom->grid.center(cells[pick(rng())]));
      if (dom->contains(x)) continue;
      ++s;
      const double m = magnitude(a, x);
      const ExtensionResult r = extend_global(f, x, kExtendTol * m);
      worst = std::max(worst, distance(r.value, series_eval(a, x)) / m);
      spread = std::max(spread, r.consistency_spread / m);
    }
  }
  const SliceFunctionHandle sq = restrict_to(SliceFunctionHandle::series({0, 0, 1}), dom);
  const double example = distance(extend_global(sq, Quaternion{1, 0, 0, 3.5}, kExtendTol).value,
                                  Quaternion{-11.25, 0, 0, 7});
  const bool ok = worst <= kExtendTol && spread <= kExtendTol && example <= kExtendExampleTol;
  return {ok, fmt("4000 points, max relative error %.2e, spread %.2e", worst, spread) +
                  fmt("; x^2 at 1+3.5k off by %.2e", example)};
}

Outcome spherical() {
  double decomposition = 0, constancy = 0;
  const auto& names = builtin_names();
  for (int n = 0; n < 1000; ++n) {
    const auto dom = domain(names[static_cast<std::size_t>(n) % names.size()]);
    const LatticeIndex& idx = [&]() -> const LatticeIndex& {
      static std::map<std::string, LatticeIndex> cache;
      auto it = cache.find(dom->name);
      if (it == cache.end()) it = cache.emplace(dom->name, build_lattice(*dom)).first;
      return it->second;
    }();
    std::uniform_int_distribution<std::size_t> cell(0, dom->grid.cells() - 1), lat(0, dom->n_lat() - 1);
    std::size_t c, l;
    do {
      c = cell(rng());
      l = lat(rng());
    } while (!dom->slice_at(l).mask[c] || dom->grid.center(c).beta <= 0);
    const int node = idx.node(c, l);
    std::uniform_int_distribution<std::size_t> same_run(idx.run_lo[static_cast<std::size_t>(node)],
                                                        idx.run_hi[static_cast<std::size_t>(node)]);
    const CPoint z = dom->grid.center(c);
    const Quaternion x = phi(ImaginaryUnit::at_latitude(dom->latitudes[l], uniform(0, 2 * std::numbers::pi)), z);
    const Quaternion y =
        phi(ImaginaryUnit::at_latitude(dom->latitudes[same_run(rng())], uniform(0, 2 * std::numbers::pi)), z);
    if (!dom->contains(x) || !dom->contains(y)) throw Error(ErrorCode::InternalInconsistency, "sample left domain");
    const auto a = random_poly(0, 4);
    const SliceFunctionHandle f = restrict_to(SliceFunctionHandle::series(a), dom);
    const double m = magnitude(a, x);
    const SphericalData dx = spherical_data_formula(f, x), dy = spherical_data_formula(f, y);
    decomposition = std::max(decomposition, distance(dx.value + x.im() * *dx.derivative, series_eval(a, x)) / m);
    constancy = std::max(constancy, std::max(distance(dx.value, dy.value), distance(*dx.derivative, *dy.derivative)) / m);
  }
  return {decomposition <= kDecompositionTol && constancy <= kSphereConstancyTol,
          fmt("1000 points, decomposition %.2e, sphere spread %.2e", decomposition, constancy)};
}

Outcome double_step() {
  const auto dom = domain("omega3p");
  const std::size_t cell = *dom->grid.locate({1, 5});
  const std::size_t lo = *dom->sample_index(-kDiag), hi = *dom->sample_index(kDiag);
  ClosureOptions off;
  off.transfer = ClosureOptions::Transfer::Off;
  const bool apart = !hinge_closure(*dom, off).equivalent(cell, lo, hi);
  const bool merged = hinge_closure(*dom).equivalent(cell, lo, hi);
  const ImaginaryUnit J = ImaginaryUnit::at_latitude(kDiag, 0.3);
  const auto chain = chain_find(*dom, phi(-J, {1, 5}), phi(J, {1, 5}));
  const bool one_double = chain && chain->double_steps() == 1 && validate_chain(*dom, *chain).valid;
  std::string d = std::string("separate without transfer: ") + (apart ? "yes" : "no") +
                  ", merged by full closure: " + (merged ? "yes" : "no") + ", chain double steps: " +
                  (chain ? std::to_string(chain->double_steps()) : "none");
  return {apart && merged && one_double, d};
}

Outcome spear_witness() {
  const auto dom = domain("omega2");
  const SpearSimpleReport r = is_spear_simple(*dom);
  const double s = std::numbers::sqrt2, h = dom->grid.h;
  for (const PairWitness& w : r.antipodal_witnesses) {
    const Box& b = w.component;
    if (std::abs(b.a0 - (2 * s - 2)) <= h && std::abs(b.a1 - (4 - 2 * s)) <= h && std::abs(b.b0 - 3) <= h &&
        std::abs(b.b1 - 4) <= h && !r.spear_simple)
      return {true, fmt("witness (%.4f, %.4f)", b.a0, b.a1) + fmt(" x (%.4f, %.4f)", b.b0, b.b1) +
                        fmt(" at latitudes %.4f / %.4f", w.r, w.r2)};
  }
  return {false, "no antipodal witness within one cell of the expected box; spear-simple = " +
                     std::string(r.spear_simple ? "true" : "false")};
}

Outcome spine() {
  int worst = 0;
  bool core_ok = true;
  // The two towers shared by every slice.
  const RegionSpec towers = RegionSpec::unite({RegionSpec::rect(-1, 0, 0, 4), RegionSpec::rect(2, 3, 0, 4)});
  for (int s = 0; s < 4; ++s) {
    const AxialDomain& dom = *domain("omega" + std::to_string(s));
    const SpineCore sc = spine_core(dom);
    const PlanarRegion disks = rasterize(
        RegionSpec::unite({RegionSpec::half_disk(-0.5, 0.5), RegionSpec::half_disk(2.5, 0.5)}), dom.grid);
    worst = std::max(worst, hausdorff_cells(sc.spine, disks));
    core_ok = core_ok && sc.core == rasterize(towers, dom.grid);
  }
  return {worst <= 1 && core_ok,
          "max spine Hausdorff distance " + std::to_string(worst) + " cells, core is the two towers: " +
              (core_ok ? "yes" : "no")};
}

Outcome coefficients() {
  double worst = 0;
  for (int n = 0; n < 500;) {
    const auto a = random_poly(0, 8);
    const ImaginaryUnit J = random_unit(), K = random_unit();
    if (distance(J, K) < kMinUnitGap) continue;
    ++n;
    const CPoint z{uniform(-1.5, 1.5), uniform(0, 1.5)};
    const SphereCoeffs got = sphere_coeffs_from_values(series_eval(a, phi(J, z)), series_eval(a, phi(K, z)), J, K);
    const SphereCoeffs want = series_sphere_coeffs(a, z.alpha, z.beta);
    const double m = magnitude(a, phi(J, z));
    worst = std::max(worst, std::max(distance(got.b, want.b), distance(got.c, want.c)) / m);
  }
  return {worst <= kCoeffTol, fmt("500 cases, max relative difference %.2e <= %.0e", worst, kCoeffTol)};
}

Outcome dbar() {
  const double eps = std::numeric_limits<double>::epsilon();
  double deviation = 0;
  int measured = 0;
  for (int n = 0; n < 200; ++n) {
    // Truncation is driven by the third derivative, so degrees start at 3.
    const int degree = 3 + n % 6;
    std::vector<Quaternion> a(static_cast<std::size_t>(degree) + 1);
    a.back() = random_q();
    a.back() = a.back() / a.back().abs();
    const SliceFunctionHandle f = SliceFunctionHandle::series(a);
    const ImaginaryUnit I = random_unit();
    const CPoint z{uniform(-1, 1), uniform(0.2, 1)};
    const double r1 = dbar_residual(f, I, z, kDbarStep), r2 = dbar_residual(f, I, z, kDbarStep / 2);
    // Skip samples where cancellation noise dominates the truncation term.
    if (r2 < 1e3 * eps * magnitude(a, phi(I, z)) / kDbarStep) continue;
    ++measured;
    deviation = std::max(deviation, std::abs(std::log2(r1 / r2) - kOrderTarget));
  }
  const SliceFunctionHandle conj(Pointwise{[](const Quaternion& q) { return q.conj(); }}, "x^c");
  double floor = std::numeric_limits<double>::infinity();
  for (int n = 0; n < 100; ++n)
    floor = std::min(floor, dbar_residual(conj, random_unit(), {uniform(-1, 1), uniform(0.2, 1)}, kDbarStep));
  const bool ok = measured >= 100 && deviation <= kOrderSlack && floor >= kNonRegularFloor;
  return {ok, std::to_string(measured) + " measured samples, max order deviation " + fmt("%.3f", deviation) +
                  fmt("; conjugation residual >= %.3f", floor)};
}

Outcome differential() {
  const double h = kDifferentialStep, tol = kDifferentialFactor * h * h;
  double real = 0, nonreal = 0;
  for (int n = 0; n < 200; ++n) {
    const auto a = random_poly(0, 6);
    const SliceFunctionHandle f = SliceFunctionHandle::series(a);
    const bool on_axis = n < 100;
    const Quaternion x = on_axis ? Quaternion(uniform(-1, 1)) : phi(random_unit(), {uniform(-1, 1), uniform(0.1, 1)});
    const Quaternion v = random_q();
    const double err = differential_check(f, x, v, h).err / magnitude(a, x);
    (on_axis ? real : nonreal) = std::max(on_axis ? real : nonreal, err);
  }
  return {real <= tol && nonreal <= tol,
          fmt("max relative error real %.2e, ", real) + fmt("non-real %.2e <= %.0e", nonreal, tol)};
}

}  // namespace

int main() {
  report(1, "classification table for the eight reference domains", table1);
  report(2, "representation formula vs direct evaluation", representation);
  report(3, "global extension on the symmetric completion", global_extension);
  report(4, "spherical value and derivative", spherical);
  report(5, "double step needed on the sailed third domain", double_step);
  report(6, "antipodal spear-simple witness box", spear_witness);
  report(7, "spine and core of the reference family", spine);
  report(8, "sphere coefficients from two slices", coefficients);
  report(9, "holomorphy residual order", dbar);
  report(10, "differential of slice regular functions", differential);
  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
