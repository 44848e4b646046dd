#pragma once

// Axial domains described by a latitude-indexed family of planar slices.

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sliceforge/algebra.hpp"
#include "sliceforge/planar.hpp"
#include "sliceforge/slicefun.hpp"

namespace sliceforge {

struct WidthPiece {
  enum class Kind { Affine, Constant, Zero };
  double r0 = -1, r1 = 1;
  bool open = false;  // evaluate only strictly inside (r0, r1)
  Kind kind = Kind::Zero;
  double a = 0, b = 0, c = 0;

  bool covers(double r) const { return open ? (r > r0 && r < r1) : (r >= r0 && r <= r1); }
  double value(double r) const {
    switch (kind) {
      case Kind::Affine: return a * r + b;
      case Kind::Constant: return c;
      case Kind::Zero: return 0;
    }
    return 0;
  }

  static WidthPiece affine(double r0, double r1, double a, double b) {
    return {r0, r1, false, Kind::Affine, a, b, 0};
  }
  static WidthPiece constant(double r0, double r1, double c, bool open = false) {
    return {r0, r1, open, Kind::Constant, 0, 0, c};
  }
};

/// Piecewise width on [-1, 1]; the first covering piece wins, uncovered points have width 0.
struct WidthFunction {
  std::vector<WidthPiece> pieces;

  double operator()(double r) const {
    for (const WidthPiece& p : pieces)
      if (p.covers(r)) return p.value(r);
    return 0;
  }

  void validate() const {
    for (const WidthPiece& p : pieces) {
      if (!(p.r0 < p.r1) || p.r0 < -1 || p.r1 > 1) throw Error(ErrorCode::InvalidWidth, "piece interval out of [-1,1]");
      for (double r : {p.r0, p.r1, 0.5 * (p.r0 + p.r1)}) {
        const double v = p.value(r);
        if (!(v >= -1e-12 && v <= 2 + 1e-12)) throw Error(ErrorCode::InvalidWidth, "width outside [0,2]");
      }
    }
    if (std::abs((*this)(-1)) > 1e-12 || std::abs((*this)(1)) > 1e-12)
      throw Error(ErrorCode::InvalidWidth, "width must vanish at the poles");
  }
};

/// Open latitude interval; an endpoint at a pole is included.
struct LatInterval {
  double lo = -1, hi = 1;
  bool contains(double r) const {
    const bool above = lo <= -1 ? r >= -1 : r > lo;
    const bool below = hi >= 1 ? r <= 1 : r < hi;
    return above && below;
  }
};

struct SailAttachment {
  std::vector<LatInterval> latitudes;
  RegionSpec d_prime;
  RegionSpec d;

  bool active(double r) const {
    return std::any_of(latitudes.begin(), latitudes.end(), [r](const LatInterval& i) { return i.contains(r); });
  }
};

/// Membership of (alpha, beta) in the slice trace at latitude r.
using Profile = std::function<bool(double r, double alpha, double beta)>;

struct AxialDomain {
  std::string name;
  Grid grid;
  std::vector<double> latitudes;     // ascending
  std::vector<int> mask_of;          // latitude index -> distinct mask
  std::vector<PlanarRegion> masks;   // distinct slice rasters
  Profile profile;
  std::optional<WidthFunction> w1, w2;
  std::vector<SailAttachment> sails;
  std::optional<BallDescriptor> ball;

  std::size_t n_lat() const { return latitudes.size(); }
  const PlanarRegion& slice_at(std::size_t lat) const { return masks[static_cast<std::size_t>(mask_of[lat])]; }

  bool contains(double alpha, double beta, double r) const { return profile(r, alpha, std::abs(beta)); }
  bool contains(const Quaternion& x) const {
    const Decomposition d = decompose(x);
    return contains(d.alpha, d.beta, d.unit.latitude());
  }

  std::size_t nearest_latitude(double r) const {
    const auto it = std::lower_bound(latitudes.begin(), latitudes.end(), r);
    if (it == latitudes.begin()) return 0;
    if (it == latitudes.end()) return latitudes.size() - 1;
    const std::size_t hi = static_cast<std::size_t>(it - latitudes.begin());
    return (r - latitudes[hi - 1] <= latitudes[hi] - r) ? hi - 1 : hi;
  }

  /// Index of the sample equal to r within 1e-12, if any.
  std::optional<std::size_t> sample_index(double r) const {
    const std::size_t i = nearest_latitude(r);
    if (std::abs(latitudes[i] - r) <= 1e-12) return i;
    return std::nullopt;
  }
};

inline constexpr int kDefaultLatitudes = 129;

/// Uniform samples on [-1, 1] with the samples nearest to +-sqrt(2)/2 moved onto them.
inline std::vector<double> latitude_samples(int n) {
  if (n < 3 || n % 2 == 0) throw Error(ErrorCode::InvalidConfig, "latitude count must be odd and at least 3");
  std::vector<double> r(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) r[i] = -1.0 + 2.0 * i / (n - 1);
  r[(n - 1) / 2] = 0.0;
  for (double special : {-std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2}) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < r.size(); ++i)
      if (std::abs(r[i] - special) < std::abs(r[best] - special)) best = i;
    r[best] = special;
  }
  return r;
}

namespace detail {
inline void rasterize_latitudes(AxialDomain& dom) {
  dom.grid.validate();
  std::map<std::vector<std::uint8_t>, int> seen;
  dom.masks.clear();
  dom.mask_of.assign(dom.latitudes.size(), -1);
  for (std::size_t i = 0; i < dom.latitudes.size(); ++i) {
    const double r = dom.latitudes[i];
    PlanarRegion reg(dom.grid);
    for (std::size_t c = 0; c < reg.mask.size(); ++c) {
      const CPoint z = dom.grid.center(c);
      reg.mask[c] = dom.profile(r, z.alpha, z.beta) ? 1 : 0;
    }
    auto [it, inserted] = seen.emplace(reg.mask, static_cast<int>(dom.masks.size()));
    if (inserted) dom.masks.push_back(std::move(reg));
    dom.mask_of[i] = it->second;
  }
}

inline bool in_base(const WidthFunction& w1, const WidthFunction& w2, double r, double a, double b) {
  if (b < 0 || b >= 4) return false;
  if ((a > -1 && a < 0) || (a > 2 && a < 3)) return true;
  if (b <= 3) return false;
  return (a > -1 && a < w1(r)) || (a > 2 - w2(r) && a < 3);
}
}  // namespace detail

/// Slice trace at an arbitrary latitude.
inline PlanarRegion slice_region(const AxialDomain& dom, double r) {
  if (const auto i = dom.sample_index(r)) return dom.slice_at(*i);
  PlanarRegion reg(dom.grid);
  for (std::size_t c = 0; c < reg.mask.size(); ++c) {
    const CPoint z = dom.grid.center(c);
    reg.mask[c] = dom.profile(r, z.alpha, z.beta) ? 1 : 0;
  }
  return reg;
}

inline void validate_sail(const SailAttachment& sail, const WidthFunction& w1, const WidthFunction& w2,
                          const Grid& grid, const std::vector<double>& latitudes) {
  if (sail.latitudes.empty()) throw Error(ErrorCode::InvalidSail, "sail without latitudes");
  for (const LatInterval& iv : sail.latitudes)
    if (!(iv.lo < iv.hi) || iv.lo < -1 || iv.hi > 1) throw Error(ErrorCode::InvalidSail, "bad latitude interval");
  const PlanarRegion dp = rasterize(sail.d_prime, grid);
  const PlanarRegion d = rasterize(sail.d, grid);
  if (d.empty()) throw Error(ErrorCode::InvalidSail, "empty attaching region");
  if (!is_subset(d, dp)) throw Error(ErrorCode::InvalidSail, "attaching region not inside the sail");
  const ComponentLabels lab = components(dp);
  std::vector<std::uint8_t> touched(static_cast<std::size_t>(lab.count), 0);
  for (std::size_t c = 0; c < d.mask.size(); ++c)
    if (d.mask[c]) touched[static_cast<std::size_t>(lab.labels[c])] = 1;
  if (std::find(touched.begin(), touched.end(), 0) != touched.end())
    throw Error(ErrorCode::InvalidSail, "a sail component misses the attaching region");
  const PlanarRegion loose = minus(dp, d);
  for (double r : latitudes)
    for (std::size_t c = 0; c < loose.mask.size(); ++c) {
      if (!loose.mask[c]) continue;
      const CPoint z = grid.center(c);
      if (detail::in_base(w1, w2, r, z.alpha, z.beta))
        throw Error(ErrorCode::InvalidSail, "sail overlaps the base domain outside its attaching region");
    }
  for (const LatInterval& iv : sail.latitudes) {
    bool anchored = false;
    for (double r : latitudes) {
      if (!iv.contains(r)) continue;
      bool inside = true;
      for (std::size_t c = 0; c < d.mask.size() && inside; ++c) {
        if (!d.mask[c]) continue;
        const CPoint z = grid.center(c);
        inside = detail::in_base(w1, w2, r, z.alpha, z.beta);
      }
      if (inside) {
        anchored = true;
        break;
      }
    }
    if (!anchored) throw Error(ErrorCode::InvalidSail, "no sampled latitude of an interval contains the attaching region");
  }
}

inline AxialDomain build_axial(WidthFunction w1, WidthFunction w2, std::vector<SailAttachment> sails,
                               const Grid& grid, int n_lat, std::string name = "custom") {
  w1.validate();
  w2.validate();
  AxialDomain dom;
  dom.name = std::move(name);
  dom.grid = grid;
  dom.latitudes = latitude_samples(n_lat);
  for (const SailAttachment& s : sails) validate_sail(s, w1, w2, grid, dom.latitudes);
  dom.w1 = w1;
  dom.w2 = w2;
  dom.sails = sails;
  dom.profile = [w1 = std::move(w1), w2 = std::move(w2), sails = std::move(sails)](double r, double a, double b) {
    if (detail::in_base(w1, w2, r, a, b)) return true;
    for (const SailAttachment& s : sails)
      if (s.active(r) && s.d_prime.contains(a, b)) return true;
    return false;
  };
  detail::rasterize_latitudes(dom);
  return dom;
}

/// Domain with an arbitrary profile, e.g. one slice region used at every latitude.
inline AxialDomain build_from_profile(Profile profile, const Grid& grid, int n_lat, std::string name) {
  AxialDomain dom;
  dom.name = std::move(name);
  dom.grid = grid;
  dom.latitudes = latitude_samples(n_lat);
  dom.profile = std::move(profile);
  detail::rasterize_latitudes(dom);
  return dom;
}

/// Domain given by one region spec per latitude sample.
inline AxialDomain build_table(const std::vector<double>& latitudes, const std::vector<RegionSpec>& specs,
                               const Grid& grid, std::string name) {
  if (latitudes.empty() || latitudes.size() != specs.size() || !std::is_sorted(latitudes.begin(), latitudes.end()))
    throw Error(ErrorCode::InvalidConfig, "latitude table must be sorted and match the region list");
  AxialDomain dom;
  dom.name = std::move(name);
  dom.grid = grid;
  dom.latitudes = latitudes;
  auto table = std::make_shared<std::vector<RegionSpec>>(specs);
  auto lats = std::make_shared<std::vector<double>>(latitudes);
  dom.profile = [table, lats](double r, double a, double b) {
    const auto it = std::lower_bound(lats->begin(), lats->end(), r);
    std::size_t i = static_cast<std::size_t>(it - lats->begin());
    if (i == lats->size() || (i > 0 && r - (*lats)[i - 1] < (*lats)[i] - r)) --i;
    return (*table)[i].contains(a, b);
  };
  detail::rasterize_latitudes(dom);
  return dom;
}

inline AxialDomain build_ball(double center, double radius, const Grid& grid, int n_lat) {
  if (!(radius > 0)) throw Error(ErrorCode::InvalidConfig, "ball radius must be positive");
  AxialDomain dom = build_from_profile(
      [center, radius](double, double a, double b) { return (a - center) * (a - center) + b * b < radius * radius; },
      grid, n_lat, "ball(" + std::to_string(center) + "," + std::to_string(radius) + ")");
  dom.ball = BallDescriptor{center, radius};
  return dom;
}

/// Width functions and sails of the eight reference domains, s in {0,1,2,3}.
inline std::pair<WidthFunction, WidthFunction> reference_widths(int s) {
  using P = WidthPiece;
  switch (s) {
    case 0: {
      WidthFunction w{{P::affine(-1, 0, 2, 2), P::affine(0, 1, -2, 2)}};
      return {w, w};
    }
    case 1: {
      WidthFunction w{{P::affine(-1, -0.5, 4, 4), P::affine(-0.5, 0, -4, 0), P::affine(0, 0.5, 4, 0),
                       P::affine(0.5, 1, -4, 4)}};
      return {w, w};
    }
    case 2: {
      WidthFunction w1{{P::affine(-1, -0.2, 2, 2), P::constant(-0.2, 0.6, 1.6), P::affine(0.6, 1, -4, 4)}};
      WidthFunction w2{{P::affine(-1, -0.6, 4, 4), P::constant(-0.6, 0.2, 1.6), P::affine(0.2, 1, -2, 2)}};
      return {w1, w2};
    }
    case 3: {
      WidthFunction w1{{P::constant(-0.75, -0.5, 1.5, true), P::constant(-0.25, 0.25, 1.5, true)}};
      WidthFunction w2{{P::constant(-0.25, 0.25, 1.5, true), P::constant(0.5, 0.75, 1.5, true)}};
      return {w1, w2};
    }
    default: throw Error(ErrorCode::InvalidConfig, "reference family index must be 0..3");
  }
}

inline std::vector<SailAttachment> reference_sails(int s) {
  if (s == 3)
    return {SailAttachment{{{-0.75, -0.5}, {0.5, 0.75}},
                           RegionSpec::rect(0.5, 1.5, 3, 6),
                           RegionSpec::rect(0.5, 1.5, 3, 4)}};
  static constexpr double rho[] = {0.5, 0.75, 2.0 / 3.0};
  if (s < 0 || s > 2) throw Error(ErrorCode::InvalidConfig, "reference family index must be 0..3");
  return {SailAttachment{{{rho[s], 1.0}}, RegionSpec::rect(2, 4, 3, 4), RegionSpec::rect(2, 3, 3, 4)}};
}

inline AxialDomain reference_domain(int s, bool with_sails, const Grid& grid = Grid::standard(),
                                    int n_lat = kDefaultLatitudes) {
  auto [w1, w2] = reference_widths(s);
  std::vector<SailAttachment> sails;
  if (with_sails) sails = reference_sails(s);
  return build_axial(std::move(w1), std::move(w2), std::move(sails), grid, n_lat,
                     "omega" + std::to_string(s) + (with_sails ? "p" : ""));
}

inline const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"omega0",  "omega1",  "omega2",  "omega3",
                                              "omega0p", "omega1p", "omega2p", "omega3p"};
  return names;
}

/// Built-in by name: omegaS, omegaSp, or ball(c,R).
inline AxialDomain builtin_domain(const std::string& name, const Grid& grid = Grid::standard(),
                                  int n_lat = kDefaultLatitudes) {
  for (int s = 0; s < 4; ++s) {
    if (name == "omega" + std::to_string(s)) return reference_domain(s, false, grid, n_lat);
    if (name == "omega" + std::to_string(s) + "p") return reference_domain(s, true, grid, n_lat);
  }
  if (name.rfind("ball(", 0) == 0 && name.back() == ')') {
    const std::string inner = name.substr(5, name.size() - 6);
    const auto comma = inner.find(',');
    if (comma != std::string::npos) {
      try {
        return build_ball(std::stod(inner.substr(0, comma)), std::stod(inner.substr(comma + 1)), grid, n_lat);
      } catch (const std::invalid_argument&) {
      }
    }
  }
  throw Error(ErrorCode::InvalidConfig, "unknown domain '" + name + "'");
}

/// The function restricted to the domain, with membership read off the domain profile.
inline SliceFunctionHandle restrict_to(const SliceFunctionHandle& f, std::shared_ptr<const AxialDomain> dom) {
  const AxialDomain* raw = dom.get();
  return f.restricted_to(std::move(dom), [raw](double a, double b, const ImaginaryUnit& I) {
    return raw->contains(a, b, I.latitude());
  });
}

struct SpearedReport {
  bool speared = true;
  std::optional<double> latitude;  // failing latitude
  Box component;                   // failing component
};

inline SpearedReport is_speared(const AxialDomain& dom) {
  for (std::size_t lat = 0; lat < dom.n_lat(); ++lat) {
    if (lat > 0 && dom.mask_of[lat] == dom.mask_of[lat - 1]) continue;
    const PlanarRegion& reg = dom.slice_at(lat);
    const ComponentLabels lab = components(reg);
    for (int id = 0; id < lab.count; ++id)
      if (!lab.meets_real[static_cast<std::size_t>(id)])
        return {false, dom.latitudes[lat], bounding_box(component_region(lab, reg.grid, id))};
  }
  return {};
}

/// Every full slice (upper trace at r, mirrored trace at -r) is connected, and some slice meets R.
inline bool is_slice_domain(const AxialDomain& dom) {
  const Grid& g = dom.grid;
  const int nx = g.nx(), ny = g.ny();
  bool meets_real = false;
  std::vector<std::uint8_t> full(static_cast<std::size_t>(nx) * 2 * ny);
  std::vector<int> labels, stack;
  std::vector<std::uint8_t> real;
  for (std::size_t lat = 0; lat < dom.n_lat(); ++lat) {
    const PlanarRegion& up = dom.slice_at(lat);
    const PlanarRegion& down = dom.slice_at(dom.nearest_latitude(-dom.latitudes[lat]));
    for (int q = 0; q < ny; ++q)
      for (int p = 0; p < nx; ++p) {
        full[static_cast<std::size_t>(ny + q) * nx + p] = up.at(p, q) ? 1 : 0;
        full[static_cast<std::size_t>(ny - 1 - q) * nx + p] = down.at(p, q) ? 1 : 0;
      }
    for (int p = 0; p < nx; ++p) meets_real = meets_real || up.at(p, 0);
    const int count = label_components(full.data(), nx, 2 * ny, labels, real, stack);
    if (count > 1) return false;
  }
  return meets_real;
}

struct SpineCore {
  PlanarRegion intersection, spine, core;
};

inline SpineCore spine_core(const AxialDomain& dom) {
  PlanarRegion inter = dom.masks.front();
  for (const PlanarRegion& m : dom.masks) inter = intersect(inter, m);
  const ComponentLabels lab = components(inter);
  PlanarRegion core(dom.grid);
  for (std::size_t c = 0; c < core.mask.size(); ++c)
    core.mask[c] = lab.labels[c] >= 0 && lab.meets_real[static_cast<std::size_t>(lab.labels[c])] ? 1 : 0;
  PlanarRegion spine = real_disk_union(inter);
  return {std::move(inter), std::move(spine), std::move(core)};
}

inline PlanarRegion symmetric_completion_region(const AxialDomain& dom) {
  PlanarRegion out(dom.grid);
  for (const PlanarRegion& m : dom.masks) out = unite(out, m);
  return out;
}

struct DomainReport {
  bool speared = false, slice_domain = false;
  SpearedReport speared_detail;
  PlanarRegion spine, core;
  double h = 0;
  std::size_t n_lat = 0;
};

inline DomainReport domain_report(const AxialDomain& dom) {
  DomainReport r;
  r.speared_detail = is_speared(dom);
  r.speared = r.speared_detail.speared;
  r.slice_domain = is_slice_domain(dom);
  SpineCore sc = spine_core(dom);
  r.spine = std::move(sc.spine);
  r.core = std::move(sc.core);
  r.h = dom.grid.h;
  r.n_lat = dom.n_lat();
  return r;
}

/// Slice domain around a point: a real-centered half-disk plus, for non-real points,
/// a tube of radius epsilon around a path from the disk to the point.
struct LocalSliceDomain {
  bool real_point = false;
  double center = 0;      // real center of the disk
  double delta = 0;       // disk radius
  double latitude = 0;    // latitude of the point's unit
  std::vector<std::size_t> path;  // cells from the disk to the point
  double path_length = 0;
  double epsilon = 0;     // cap and tube radius
  PlanarRegion disk, tube;
  bool verified = false;
};

inline LocalSliceDomain local_slice_domain(const AxialDomain& dom, const Quaternion& x0) {
  if (!dom.contains(x0)) throw Error(ErrorCode::PointOutsideDomain, "point not in the domain");
  const Grid& g = dom.grid;
  const Decomposition dx = decompose(x0);
  const SpineCore sc = spine_core(dom);
  const std::vector<double> radii = real_disk_radii(sc.intersection);
  LocalSliceDomain out;
  out.latitude = dx.unit.latitude();

  auto disk_region = [&](double c, double rho) {
    return rasterize(RegionSpec::half_disk(c, rho), g);
  };
  auto contained_everywhere = [&](const PlanarRegion& reg, double r, double eps) {
    if (!is_subset(reg, slice_region(dom, r))) return false;
    for (std::size_t lat = 0; lat < dom.n_lat(); ++lat)
      if (std::abs(dom.latitudes[lat] - r) < eps && !is_subset(reg, dom.slice_at(lat))) return false;
    return true;
  };

  if (dx.beta == 0) {
    const auto idx = g.locate(CPoint{dx.alpha, 0});
    if (!idx) throw Error(ErrorCode::PointOutsideDomain, "point outside the grid");
    const int p = g.cell(*idx).p;
    out.real_point = true;
    out.center = dx.alpha;
    out.delta = std::max(radii[p] - std::abs(dx.alpha - g.center(p, 0).alpha), 0.0);
    out.disk = disk_region(out.center, out.delta);
    out.tube = PlanarRegion(g);
    bool inside = true;
    for (const PlanarRegion& m : dom.masks) inside = inside && is_subset(out.disk, m);
    out.verified = out.delta > 0 && inside && components(out.disk).count == 1;
    return out;
  }

  const PlanarRegion slice = slice_region(dom, out.latitude);
  const auto target = g.locate(CPoint{dx.alpha, dx.beta});
  if (!target || !slice.at(*target)) throw Error(ErrorCode::PointOutsideDomain, "point outside the raster slice");

  // Breadth-first search from every real cell that carries a disk.
  const int nx = g.nx(), ny = g.ny();
  std::vector<int> parent(g.cells(), -2);
  std::deque<int> queue;
  for (int p = 0; p < nx; ++p)
    if (radii[p] > 0 && slice.at(p, 0)) {
      parent[g.index(p, 0)] = -1;
      queue.push_back(static_cast<int>(g.index(p, 0)));
    }
  while (!queue.empty() && parent[*target] == -2) {
    const int c = queue.front();
    queue.pop_front();
    const int p = c % nx, q = c / nx;
    const int nbs[4] = {p > 0 ? c - 1 : -1, p + 1 < nx ? c + 1 : -1, q > 0 ? c - nx : -1, q + 1 < ny ? c + nx : -1};
    for (int nb : nbs)
      if (nb >= 0 && slice.mask[nb] && parent[nb] == -2) {
        parent[nb] = c;
        queue.push_back(nb);
      }
  }
  if (parent[*target] == -2) throw Error(ErrorCode::InternalInconsistency, "point not reachable from a real disk");
  std::vector<std::size_t> path;
  for (int c = static_cast<int>(*target); c >= 0; c = parent[c]) path.push_back(static_cast<std::size_t>(c));
  std::reverse(path.begin(), path.end());
  const int p0 = g.cell(path.front()).p;
  out.center = g.center(p0, 0).alpha;
  out.delta = radii[p0];
  out.disk = disk_region(out.center, out.delta);

  const std::vector<double> d2 = squared_distance_to_complement(slice);
  double dist = std::numeric_limits<double>::infinity();
  for (std::size_t c : path) {
    if (out.disk.at(c)) continue;
    out.path.push_back(c);
    const CPoint z = g.center(c);
    dist = std::min({dist, (std::sqrt(d2[c]) - 0.5) * g.h, z.beta});
  }
  if (out.path.empty()) {
    out.path.push_back(*target);
    const CPoint z = g.center(*target);
    dist = std::min((std::sqrt(d2[*target]) - 0.5) * g.h, z.beta);
  }
  out.path_length = static_cast<double>(out.path.size()) * g.h;
  double eps = tube_epsilon(std::max(dist, 0.5 * g.h), out.path_length);

  auto tube_of = [&](double e) {
    PlanarRegion t(g);
    const int reach = static_cast<int>(std::ceil(e / g.h));
    for (std::size_t c : out.path) {
      t.mask[c] = 1;
      const Cell cc = g.cell(c);
      const CPoint zc = g.center(c);
      for (int q = std::max(0, cc.q - reach); q <= std::min(ny - 1, cc.q + reach); ++q)
        for (int p = std::max(0, cc.p - reach); p <= std::min(nx - 1, cc.p + reach); ++p) {
          const CPoint z = g.center(p, q);
          if (std::hypot(z.alpha - zc.alpha, z.beta - zc.beta) < e) t.mask[g.index(p, q)] = 1;
        }
    }
    return t;
  };
  for (int attempt = 0; attempt < 60; ++attempt) {
    out.tube = tube_of(eps);
    if (contained_everywhere(out.tube, out.latitude, eps)) break;
    eps /= 2;
  }
  out.epsilon = eps;
  bool disk_inside = true;
  for (const PlanarRegion& m : dom.masks) disk_inside = disk_inside && is_subset(out.disk, m);
  const PlanarRegion whole = unite(out.disk, out.tube);
  const ComponentLabels lab = components(whole);
  out.verified = out.delta > 0 && disk_inside && contained_everywhere(out.tube, out.latitude, eps) &&
                 lab.count == 1 && lab.meets_real[0] && whole.contains(CPoint{dx.alpha, dx.beta});
  return out;
}

}  // namespace sliceforge
