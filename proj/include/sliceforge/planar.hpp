#pragma once

// Raster geometry on the closed upper half of R_C.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "sliceforge/algebra.hpp"

namespace sliceforge {

struct Cell {
  int p = 0, q = 0;
  bool operator==(const Cell&) const = default;
};

/// Uniform grid over [alpha_min, alpha_max] x [0, beta_max]; row q = 0 touches the real axis.
struct Grid {
  double alpha_min = -2, alpha_max = 5, beta_max = 8, h = 1.0 / 16;

  static Grid standard() { return {}; }

  int nx() const { return static_cast<int>(std::ceil((alpha_max - alpha_min) / h - 1e-9)); }
  int ny() const { return static_cast<int>(std::ceil(beta_max / h - 1e-9)); }
  std::size_t cells() const { return static_cast<std::size_t>(nx()) * static_cast<std::size_t>(ny()); }
  std::size_t index(int p, int q) const { return static_cast<std::size_t>(q) * nx() + p; }
  Cell cell(std::size_t idx) const {
    return {static_cast<int>(idx % nx()), static_cast<int>(idx / nx())};
  }
  CPoint center(int p, int q) const { return {alpha_min + (p + 0.5) * h, (q + 0.5) * h}; }
  CPoint center(std::size_t idx) const {
    const Cell c = cell(idx);
    return center(c.p, c.q);
  }
  /// Cell containing z (beta taken as |beta|), if any.
  std::optional<std::size_t> locate(const CPoint& z) const {
    const double b = std::abs(z.beta);
    const int p = static_cast<int>(std::floor((z.alpha - alpha_min) / h));
    const int q = static_cast<int>(std::floor(b / h));
    if (p < 0 || q < 0 || p >= nx() || q >= ny()) return std::nullopt;
    return index(p, q);
  }

  void validate() const {
    if (!(h > 0) || !(alpha_max > alpha_min) || !(beta_max > 0) || nx() <= 0 || ny() <= 0)
      throw Error(ErrorCode::EmptyGrid, "grid has no cells");
  }
  bool operator==(const Grid&) const = default;
};

/// Finite boolean combination of open rectangles and half-disks.
/// A rectangle whose lower edge is at or below 0 contains the real axis.
struct RegionSpec {
  enum class Kind { Empty, Rect, HalfDisk, Union, Intersect, Minus };
  Kind kind = Kind::Empty;
  double a0 = 0, a1 = 0, b0 = 0, b1 = 0;
  double center = 0, radius = 0;
  std::vector<RegionSpec> args;

  static RegionSpec empty() { return {}; }
  static RegionSpec rect(double a0, double a1, double b0, double b1) {
    RegionSpec s;
    s.kind = Kind::Rect;
    s.a0 = a0; s.a1 = a1; s.b0 = b0; s.b1 = b1;
    return s;
  }
  static RegionSpec half_disk(double c, double r) {
    RegionSpec s;
    s.kind = Kind::HalfDisk;
    s.center = c;
    s.radius = r;
    return s;
  }
  static RegionSpec unite(std::vector<RegionSpec> parts) {
    RegionSpec s;
    s.kind = Kind::Union;
    s.args = std::move(parts);
    return s;
  }
  static RegionSpec intersect(std::vector<RegionSpec> parts) {
    RegionSpec s;
    s.kind = Kind::Intersect;
    s.args = std::move(parts);
    return s;
  }
  static RegionSpec minus(RegionSpec a, RegionSpec b) {
    RegionSpec s;
    s.kind = Kind::Minus;
    s.args = {std::move(a), std::move(b)};
    return s;
  }

  bool contains(double alpha, double beta) const {
    switch (kind) {
      case Kind::Empty: return false;
      case Kind::Rect:
        return alpha > a0 && alpha < a1 && (b0 <= 0 ? beta >= b0 : beta > b0) && beta < b1;
      case Kind::HalfDisk:
        return beta >= 0 && (alpha - center) * (alpha - center) + beta * beta < radius * radius;
      case Kind::Union:
        return std::any_of(args.begin(), args.end(), [&](const RegionSpec& s) { return s.contains(alpha, beta); });
      case Kind::Intersect:
        return !args.empty() &&
               std::all_of(args.begin(), args.end(), [&](const RegionSpec& s) { return s.contains(alpha, beta); });
      case Kind::Minus: return args[0].contains(alpha, beta) && !args[1].contains(alpha, beta);
    }
    return false;
  }
};

struct PlanarRegion {
  Grid grid;
  std::vector<std::uint8_t> mask;

  PlanarRegion() = default;
  explicit PlanarRegion(const Grid& g) : grid(g), mask(g.cells(), 0) {}

  bool at(std::size_t idx) const { return mask[idx] != 0; }
  bool at(int p, int q) const { return mask[grid.index(p, q)] != 0; }
  bool contains(const CPoint& z) const {
    const auto idx = grid.locate(z);
    return idx && at(*idx);
  }
  std::size_t count() const { return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1)); }
  bool empty() const { return count() == 0; }
  bool operator==(const PlanarRegion& o) const { return grid == o.grid && mask == o.mask; }
};

inline PlanarRegion rasterize(const RegionSpec& spec, const Grid& grid) {
  grid.validate();
  PlanarRegion r(grid);
  for (int q = 0; q < grid.ny(); ++q)
    for (int p = 0; p < grid.nx(); ++p) {
      const CPoint c = grid.center(p, q);
      r.mask[grid.index(p, q)] = spec.contains(c.alpha, c.beta) ? 1 : 0;
    }
  return r;
}

namespace detail {
inline void require_same_grid(const PlanarRegion& a, const PlanarRegion& b) {
  if (!(a.grid == b.grid)) throw Error(ErrorCode::GridMismatch, "regions live on different grids");
}
template <class Op>
PlanarRegion cellwise(const PlanarRegion& a, const PlanarRegion& b, Op op) {
  require_same_grid(a, b);
  PlanarRegion out(a.grid);
  for (std::size_t i = 0; i < out.mask.size(); ++i) out.mask[i] = op(a.mask[i] != 0, b.mask[i] != 0) ? 1 : 0;
  return out;
}
}  // namespace detail

inline PlanarRegion unite(const PlanarRegion& a, const PlanarRegion& b) {
  return detail::cellwise(a, b, [](bool x, bool y) { return x || y; });
}
inline PlanarRegion intersect(const PlanarRegion& a, const PlanarRegion& b) {
  return detail::cellwise(a, b, [](bool x, bool y) { return x && y; });
}
inline PlanarRegion minus(const PlanarRegion& a, const PlanarRegion& b) {
  return detail::cellwise(a, b, [](bool x, bool y) { return x && !y; });
}
inline PlanarRegion complement(const PlanarRegion& a) {
  PlanarRegion out(a.grid);
  for (std::size_t i = 0; i < out.mask.size(); ++i) out.mask[i] = a.mask[i] ? 0 : 1;
  return out;
}
inline bool is_subset(const PlanarRegion& a, const PlanarRegion& b) {
  detail::require_same_grid(a, b);
  for (std::size_t i = 0; i < a.mask.size(); ++i)
    if (a.mask[i] && !b.mask[i]) return false;
  return true;
}

struct ComponentLabels {
  std::vector<int> labels;  // -1 outside the mask
  int count = 0;
  std::vector<std::uint8_t> meets_real;
  std::vector<std::size_t> sizes;
};

/// 4-connected labeling in row-major seed order; workspace buffers are reused across calls.
inline int label_components(const std::uint8_t* mask, int nx, int ny, std::vector<int>& labels,
                            std::vector<std::uint8_t>& meets_real, std::vector<int>& stack) {
  const std::size_t n = static_cast<std::size_t>(nx) * ny;
  labels.assign(n, -1);
  meets_real.clear();
  int count = 0;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (!mask[seed] || labels[seed] >= 0) continue;
    const int id = count++;
    std::uint8_t real = 0;
    stack.clear();
    stack.push_back(static_cast<int>(seed));
    labels[seed] = id;
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      const int p = c % nx, q = c / nx;
      if (q == 0) real = 1;
      auto visit = [&](int nb) {
        if (mask[nb] && labels[nb] < 0) {
          labels[nb] = id;
          stack.push_back(nb);
        }
      };
      if (p > 0) visit(c - 1);
      if (p + 1 < nx) visit(c + 1);
      if (q > 0) visit(c - nx);
      if (q + 1 < ny) visit(c + nx);
    }
    meets_real.push_back(real);
  }
  return count;
}

inline ComponentLabels components(const PlanarRegion& a) {
  ComponentLabels out;
  std::vector<int> stack;
  out.count = label_components(a.mask.data(), a.grid.nx(), a.grid.ny(), out.labels, out.meets_real, stack);
  out.sizes.assign(static_cast<std::size_t>(out.count), 0);
  for (int l : out.labels)
    if (l >= 0) ++out.sizes[static_cast<std::size_t>(l)];
  return out;
}

/// Cells carrying a given label.
inline PlanarRegion component_region(const ComponentLabels& labels, const Grid& grid, int id) {
  PlanarRegion out(grid);
  for (std::size_t i = 0; i < labels.labels.size(); ++i) out.mask[i] = labels.labels[i] == id ? 1 : 0;
  return out;
}

inline std::size_t require_cell(const PlanarRegion& a, const CPoint& z) {
  const auto idx = a.grid.locate(z);
  if (!idx || !a.at(*idx)) throw Error(ErrorCode::PointOutsideRegion, "point not in a marked cell");
  return *idx;
}

inline bool path_exists(const PlanarRegion& a, const CPoint& from, const CPoint& to) {
  const std::size_t s = require_cell(a, from), t = require_cell(a, to);
  if (s == t) return true;
  const ComponentLabels lab = components(a);
  return lab.labels[s] == lab.labels[t];
}

/// Axis-aligned bounding box of a set of cells, in cell-edge coordinates.
struct Box {
  double a0 = 0, a1 = 0, b0 = 0, b1 = 0;
  std::size_t cells = 0;
};

inline Box bounding_box(const PlanarRegion& a) {
  Box b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < a.mask.size(); ++i) {
    if (!a.mask[i]) continue;
    const Cell c = a.grid.cell(i);
    const double x0 = a.grid.alpha_min + c.p * a.grid.h, y0 = c.q * a.grid.h;
    b.a0 = std::min(b.a0, x0);
    b.a1 = std::max(b.a1, x0 + a.grid.h);
    b.b0 = std::min(b.b0, y0);
    b.b1 = std::max(b.b1, y0 + a.grid.h);
    ++b.cells;
  }
  return b;
}

namespace detail {
// Lower envelope of parabolas: squared distance transform of a sampled function.
inline void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
                   std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  d.assign(f.size(), inf);
  v.assign(f.size(), 0);
  z.assign(f.size() + 1, 0);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (!std::isfinite(f[q])) continue;
    double s = -inf;
    while (k >= 0) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * q - 2.0 * p);
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = k == 0 ? -inf : s;
    z[k + 1] = inf;
  }
  if (k < 0) return;
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double dq = q - v[j];
    d[q] = dq * dq + f[v[j]];
  }
}
}  // namespace detail

/// Squared center-to-center distance (in cells) from each cell to the nearest unmarked cell.
/// Cells beyond the left, right and top edges count as unmarked; the real axis does not.
inline std::vector<double> squared_distance_to_complement(const PlanarRegion& a) {
  const int nx = a.grid.nx(), ny = a.grid.ny();
  const int W = nx + 2, H = ny + 1;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> g(static_cast<std::size_t>(W) * H, 0.0);
  for (int q = 0; q < ny; ++q)
    for (int p = 0; p < nx; ++p) g[static_cast<std::size_t>(q) * W + p + 1] = a.at(p, q) ? inf : 0.0;
  std::vector<double> f, d, zbuf;
  std::vector<int> v;
  f.resize(H);
  for (int x = 0; x < W; ++x) {
    for (int y = 0; y < H; ++y) f[y] = g[static_cast<std::size_t>(y) * W + x];
    detail::edt_1d(f, d, v, zbuf);
    for (int y = 0; y < H; ++y) g[static_cast<std::size_t>(y) * W + x] = d[y];
  }
  f.resize(W);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) f[x] = g[static_cast<std::size_t>(y) * W + x];
    detail::edt_1d(f, d, v, zbuf);
    for (int x = 0; x < W; ++x) g[static_cast<std::size_t>(y) * W + x] = d[x];
  }
  std::vector<double> out(a.grid.cells(), 0.0);
  for (int q = 0; q < ny; ++q)
    for (int p = 0; p < nx; ++p) out[a.grid.index(p, q)] = g[static_cast<std::size_t>(q) * W + p + 1];
  return out;
}

/// Radius of the largest half-disk centered at each real-row cell's alpha that fits in the region
/// (0 where the real cell is unmarked). The boundary is placed half a cell from unmarked centers.
inline std::vector<double> real_disk_radii(const PlanarRegion& a) {
  const std::vector<double> d2 = squared_distance_to_complement(a);
  std::vector<double> radii(static_cast<std::size_t>(a.grid.nx()), 0.0);
  for (int p = 0; p < a.grid.nx(); ++p) {
    if (!a.at(p, 0)) continue;
    radii[p] = std::max(0.0, (std::sqrt(d2[a.grid.index(p, 0)]) - 0.5) * a.grid.h);
  }
  return radii;
}

inline PlanarRegion real_disk_union(const PlanarRegion& a) {
  const Grid& g = a.grid;
  const std::vector<double> radii = real_disk_radii(a);
  PlanarRegion out(g);
  for (int p = 0; p < g.nx(); ++p) {
    const double rho = radii[p];
    if (rho <= 0) continue;
    const double c = g.center(p, 0).alpha;
    const int span = static_cast<int>(std::ceil(rho / g.h)) + 1;
    for (int q = 0; q < std::min(g.ny(), span + 1); ++q)
      for (int pp = std::max(0, p - span); pp <= std::min(g.nx() - 1, p + span); ++pp) {
        const CPoint z = g.center(pp, q);
        if ((z.alpha - c) * (z.alpha - c) + z.beta * z.beta < rho * rho) out.mask[g.index(pp, q)] = 1;
      }
  }
  return out;
}

inline double tube_epsilon(double complement_distance, double ell) {
  if (!(complement_distance > 0)) throw Error(ErrorCode::NonpositiveDistance, "distance must be positive");
  if (ell < 0) throw Error(ErrorCode::InvalidConfig, "path length must be nonnegative");
  return complement_distance / (ell + 1);
}

/// Rows as (start, length) runs, bottom row first.
inline std::vector<std::vector<std::pair<int, int>>> to_rle(const PlanarRegion& a) {
  std::vector<std::vector<std::pair<int, int>>> rows(static_cast<std::size_t>(a.grid.ny()));
  for (int q = 0; q < a.grid.ny(); ++q) {
    int p = 0;
    while (p < a.grid.nx()) {
      if (!a.at(p, q)) {
        ++p;
        continue;
      }
      const int start = p;
      while (p < a.grid.nx() && a.at(p, q)) ++p;
      rows[q].emplace_back(start, p - start);
    }
  }
  return rows;
}

/// Hausdorff distance between two cell sets, in cells (Chebyshev metric on indices).
inline int hausdorff_cells(const PlanarRegion& a, const PlanarRegion& b) {
  detail::require_same_grid(a, b);
  auto directed = [](const PlanarRegion& x, const PlanarRegion& y) {
    int worst = 0;
    std::vector<Cell> ys;
    for (std::size_t i = 0; i < y.mask.size(); ++i)
      if (y.mask[i]) ys.push_back(y.grid.cell(i));
    for (std::size_t i = 0; i < x.mask.size(); ++i) {
      if (!x.mask[i]) continue;
      const Cell c = x.grid.cell(i);
      int best = std::numeric_limits<int>::max();
      for (const Cell& d : ys) best = std::min(best, std::max(std::abs(c.p - d.p), std::abs(c.q - d.q)));
      worst = std::max(worst, best);
    }
    return worst;
  };
  if (a.empty() || b.empty()) return (a.empty() && b.empty()) ? 0 : std::numeric_limits<int>::max();
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace sliceforge
