#pragma once

// Shadowing, the chain equivalence as a union-find closure, and the domain classifiers.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "sliceforge/domains.hpp"
#include "sliceforge/parallel.hpp"
#include "sliceforge/planar.hpp"

namespace sliceforge {

// ---------------------------------------------------------------------------
// Point-level tests

inline PlanarRegion pair_region(const AxialDomain& dom, double r, double r2) {
  return intersect(slice_region(dom, r), slice_region(dom, r2));
}

inline bool shadow_test(const AxialDomain& dom, double r, double r2, const CPoint& z_from, const CPoint& z_to) {
  return path_exists(pair_region(dom, r, r2), z_from, z_to);
}

inline bool strongly_hinged_test(const AxialDomain& dom, double r, double r2, const CPoint& z) {
  const PlanarRegion e = pair_region(dom, r, r2);
  const std::size_t c = require_cell(e, z);
  const ComponentLabels lab = components(e);
  return lab.meets_real[static_cast<std::size_t>(lab.labels[c])] != 0;
}

// ---------------------------------------------------------------------------
// Nodes: (cell, run of consecutive latitudes containing the cell)

/// Maximal runs of consecutive latitude samples whose slice contains each cell.
/// A node of the closure is one such run; latitudes inside a run are already equivalent.
struct LatticeIndex {
  struct Group {
    std::size_t lat_lo = 0, lat_hi = 0;  // consecutive latitudes sharing one raster
    int mask = 0;
  };

  std::size_t n_cells = 0;
  std::vector<std::uint32_t> run_begin;  // per cell, into run_lo / run_hi
  std::vector<std::uint16_t> run_lo, run_hi;
  std::vector<Group> groups;

  std::size_t runs_of(std::size_t cell) const { return run_begin[cell + 1] - run_begin[cell]; }

  /// Node holding (cell, lat), or -1 when the cell is not in that slice.
  int node(std::size_t cell, std::size_t lat) const {
    for (std::uint32_t k = run_begin[cell]; k < run_begin[cell + 1]; ++k)
      if (lat >= run_lo[k] && lat <= run_hi[k]) return static_cast<int>(k);
    return -1;
  }
  std::size_t node_count() const { return run_lo.size(); }
};

inline LatticeIndex build_lattice(const AxialDomain& dom) {
  if (dom.n_lat() > std::numeric_limits<std::uint16_t>::max())
    throw Error(ErrorCode::InvalidConfig, "too many latitude samples");
  LatticeIndex idx;
  idx.n_cells = dom.grid.cells();
  for (std::size_t lat = 0; lat < dom.n_lat(); ++lat) {
    if (lat > 0 && dom.mask_of[lat] == dom.mask_of[lat - 1])
      idx.groups.back().lat_hi = lat;
    else
      idx.groups.push_back({lat, lat, dom.mask_of[lat]});
  }
  // Runs only start or end at group boundaries.
  std::vector<std::uint32_t> counts(idx.n_cells, 0);
  for (std::size_t g = 0; g < idx.groups.size(); ++g) {
    const auto& cur = dom.masks[static_cast<std::size_t>(idx.groups[g].mask)].mask;
    const std::uint8_t* prev = g > 0 ? dom.masks[static_cast<std::size_t>(idx.groups[g - 1].mask)].mask.data() : nullptr;
    for (std::size_t c = 0; c < idx.n_cells; ++c)
      if (cur[c] && !(prev && prev[c])) ++counts[c];
  }
  idx.run_begin.assign(idx.n_cells + 1, 0);
  for (std::size_t c = 0; c < idx.n_cells; ++c) idx.run_begin[c + 1] = idx.run_begin[c] + counts[c];
  idx.run_lo.assign(idx.run_begin.back(), 0);
  idx.run_hi.assign(idx.run_begin.back(), 0);
  std::vector<std::uint32_t> fill(idx.run_begin.begin(), idx.run_begin.end() - 1);
  for (std::size_t g = 0; g < idx.groups.size(); ++g) {
    const auto& grp = idx.groups[g];
    const auto& cur = dom.masks[static_cast<std::size_t>(grp.mask)].mask;
    const std::uint8_t* prev = g > 0 ? dom.masks[static_cast<std::size_t>(idx.groups[g - 1].mask)].mask.data() : nullptr;
    for (std::size_t c = 0; c < idx.n_cells; ++c) {
      if (!cur[c]) continue;
      if (!(prev && prev[c])) {
        idx.run_lo[fill[c]] = static_cast<std::uint16_t>(grp.lat_lo);
        ++fill[c];
      }
      idx.run_hi[fill[c] - 1] = static_cast<std::uint16_t>(grp.lat_hi);
    }
  }
  return idx;
}

// ---------------------------------------------------------------------------
// Closure

struct ClosureOptions {
  enum class Transfer { Off, RealAnchored, Full };
  Transfer transfer = Transfer::Full;
  std::optional<std::uint64_t> shuffle_seed;  // permutes the pair order inside each round
  unsigned workers = worker_count();
};

struct MergeEdge {
  enum class Kind { RealPoint, Shadow };
  int u = 0, v = 0;  // nodes of one cell
  int time = 0, round = 0;
  Kind kind = Kind::RealPoint;
  std::size_t lat_u = 0, lat_v = 0;  // latitudes at which the step is taken
  std::size_t witness = 0;           // cell whose nodes were already equivalent
  bool real_witness = false;
};

class HingeClosure {
 public:
  LatticeIndex index;
  std::vector<MergeEdge> edges;
  std::vector<std::vector<int>> incident;  // node -> edge ids
  int rounds = 0;
  bool converged = false;

  int find(int n) const {
    while (parent_[static_cast<std::size_t>(n)] != n) n = parent_[static_cast<std::size_t>(n)];
    return n;
  }
  bool equivalent(std::size_t cell, std::size_t lat_a, std::size_t lat_b) const {
    const int a = index.node(cell, lat_a), b = index.node(cell, lat_b);
    return a >= 0 && b >= 0 && find(a) == find(b);
  }

  void reset(std::size_t nodes) {
    parent_.resize(nodes);
    std::iota(parent_.begin(), parent_.end(), 0);
    incident.assign(nodes, {});
    edges.clear();
  }

  bool unite(MergeEdge e) {
    int a = find(e.u), b = find(e.v);
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    compress(e.u, a);
    compress(e.v, a);
    e.time = static_cast<int>(edges.size());
    incident[static_cast<std::size_t>(e.u)].push_back(e.time);
    incident[static_cast<std::size_t>(e.v)].push_back(e.time);
    edges.push_back(e);
    return true;
  }

  /// Edge ids on the forest path from node a to node b, oriented from a; empty if a == b.
  std::optional<std::vector<std::pair<int, bool>>> forest_path(int a, int b) const {
    if (a == b) return std::vector<std::pair<int, bool>>{};
    std::map<int, std::pair<int, int>> came;  // node -> (edge, previous node)
    std::vector<int> frontier{a};
    came[a] = {-1, -1};
    while (!frontier.empty()) {
      std::vector<int> next;
      for (int n : frontier)
        for (int eid : incident[static_cast<std::size_t>(n)]) {
          const MergeEdge& e = edges[static_cast<std::size_t>(eid)];
          const int o = e.u == n ? e.v : e.u;
          if (came.count(o)) continue;
          came[o] = {eid, n};
          next.push_back(o);
        }
      frontier = std::move(next);
      if (came.count(b)) break;
    }
    if (!came.count(b)) return std::nullopt;
    std::vector<std::pair<int, bool>> path;
    for (int n = b; n != a;) {
      const auto [eid, prev] = came[n];
      path.emplace_back(eid, edges[static_cast<std::size_t>(eid)].u == prev);
      n = prev;
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  /// Latest merge time on the path between two latitudes of a cell; -1 when they share a node.
  int merge_time(std::size_t cell, std::size_t lat_a, std::size_t lat_b) const {
    const auto path = forest_path(index.node(cell, lat_a), index.node(cell, lat_b));
    if (!path) return std::numeric_limits<int>::max();
    int t = -1;
    for (const auto& [eid, fwd] : *path) t = std::max(t, edges[static_cast<std::size_t>(eid)].time);
    return t;
  }

 private:
  void compress(int n, int root) {
    while (parent_[static_cast<std::size_t>(n)] != root) {
      const int next = parent_[static_cast<std::size_t>(n)];
      parent_[static_cast<std::size_t>(n)] = root;
      n = next;
    }
  }
  std::vector<int> parent_;
};

namespace detail {
struct Workspace {
  std::vector<std::uint8_t> inter, meets_real;
  std::vector<int> labels, stack, witness, real_witness;
};

inline void intersect_masks(const PlanarRegion& a, const PlanarRegion& b, std::vector<std::uint8_t>& out) {
  out.resize(a.mask.size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = a.mask[c] & b.mask[c];
}
}  // namespace detail

/// Fixpoint of: real-row nodes of a cell merged; shadow transfer across each pair of latitude groups.
/// Rounds are Jacobi sweeps: candidates are discovered against the classes frozen at round start.
inline HingeClosure hinge_closure(const AxialDomain& dom, const ClosureOptions& opt = {}) {
  if (!is_speared(dom).speared) throw Error(ErrorCode::NotSpeared, "closure needs a speared domain");
  HingeClosure cl;
  cl.index = build_lattice(dom);
  const LatticeIndex& idx = cl.index;
  cl.reset(idx.node_count());
  const Grid& g = dom.grid;
  const int nx = g.nx(), ny = g.ny();

  for (int p = 0; p < nx; ++p) {
    const std::size_t c = g.index(p, 0);
    for (std::uint32_t k = idx.run_begin[c] + 1; k < idx.run_begin[c + 1]; ++k) {
      MergeEdge e;
      e.u = static_cast<int>(idx.run_begin[c]);
      e.v = static_cast<int>(k);
      e.kind = MergeEdge::Kind::RealPoint;
      e.lat_u = idx.run_lo[idx.run_begin[c]];
      e.lat_v = idx.run_lo[k];
      e.witness = c;
      e.real_witness = true;
      cl.unite(e);
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < idx.groups.size(); ++a)
    for (std::size_t b = a + 1; b < idx.groups.size(); ++b) pairs.emplace_back(a, b);
  std::mt19937_64 shuffle_rng(opt.shuffle_seed.value_or(0));

  if (opt.transfer == ClosureOptions::Transfer::Off) {
    cl.converged = true;
    return cl;
  }
  const bool anchored_only = opt.transfer == ClosureOptions::Transfer::RealAnchored;
  const unsigned workers = std::max(1u, opt.workers);
  std::vector<detail::Workspace> ws(workers);
  std::vector<int> rep(idx.node_count());

  while (true) {
    ++cl.rounds;
    for (std::size_t n = 0; n < rep.size(); ++n) rep[n] = cl.find(static_cast<int>(n));
    if (opt.shuffle_seed) std::shuffle(pairs.begin(), pairs.end(), shuffle_rng);
    std::vector<std::vector<MergeEdge>> found(pairs.size());
    parallel_for(pairs.size(), workers, [&](unsigned w, std::size_t pi) {
      detail::Workspace& W = ws[w];
      const auto& ga = idx.groups[pairs[pi].first];
      const auto& gb = idx.groups[pairs[pi].second];
      detail::intersect_masks(dom.masks[static_cast<std::size_t>(ga.mask)], dom.masks[static_cast<std::size_t>(gb.mask)],
                              W.inter);
      const int count = label_components(W.inter.data(), nx, ny, W.labels, W.meets_real, W.stack);
      if (count == 0) return;
      W.witness.assign(static_cast<std::size_t>(count), -1);
      W.real_witness.assign(static_cast<std::size_t>(count), -1);
      bool pending = false;
      for (std::size_t c = 0; c < W.inter.size(); ++c) {
        if (!W.inter[c]) continue;
        const std::size_t l = static_cast<std::size_t>(W.labels[c]);
        const bool same = rep[static_cast<std::size_t>(idx.node(c, ga.lat_lo))] ==
                          rep[static_cast<std::size_t>(idx.node(c, gb.lat_lo))];
        if (same) {
          if (W.witness[l] < 0) W.witness[l] = static_cast<int>(c);
          if (W.real_witness[l] < 0 && c < static_cast<std::size_t>(nx)) W.real_witness[l] = static_cast<int>(c);
        } else {
          pending = true;
        }
      }
      if (!pending) return;
      for (std::size_t c = 0; c < W.inter.size(); ++c) {
        if (!W.inter[c]) continue;
        const std::size_t l = static_cast<std::size_t>(W.labels[c]);
        const int wit = W.real_witness[l] >= 0 ? W.real_witness[l] : (anchored_only ? -1 : W.witness[l]);
        if (wit < 0) continue;
        const int u = idx.node(c, ga.lat_lo), v = idx.node(c, gb.lat_lo);
        if (rep[static_cast<std::size_t>(u)] == rep[static_cast<std::size_t>(v)]) continue;
        MergeEdge e;
        e.u = u;
        e.v = v;
        e.round = cl.rounds;
        e.kind = MergeEdge::Kind::Shadow;
        e.lat_u = ga.lat_lo;
        e.lat_v = gb.lat_lo;
        e.witness = static_cast<std::size_t>(wit);
        e.real_witness = W.real_witness[l] >= 0;
        found[pi].push_back(e);
      }
    });
    bool merged = false;
    for (const auto& list : found)
      for (const MergeEdge& e : list) merged = cl.unite(e) || merged;
    if (!merged) break;
  }
  cl.converged = true;
  return cl;
}

// ---------------------------------------------------------------------------
// Classifiers

struct HingedReport {
  bool hinged = true;
  std::optional<std::size_t> cell;
  double r = 0, r2 = 0;
};

inline HingedReport is_hinged(const AxialDomain& dom, const HingeClosure& cl) {
  const LatticeIndex& idx = cl.index;
  for (std::size_t c = 0; c < idx.n_cells; ++c) {
    const std::uint32_t b = idx.run_begin[c];
    for (std::uint32_t k = b + 1; k < idx.run_begin[c + 1]; ++k)
      if (cl.find(static_cast<int>(k)) != cl.find(static_cast<int>(b)))
        return {false, c, dom.latitudes[idx.run_lo[b]], dom.latitudes[idx.run_lo[k]]};
  }
  return {};
}

inline HingedReport is_hinged(const AxialDomain& dom) { return is_hinged(dom, hinge_closure(dom)); }

struct PairWitness {
  double r = 0, r2 = 0;
  std::size_t lat = 0, lat2 = 0;
  Box component;
};

/// Components of the pair intersection that miss the real axis.
inline std::vector<Box> floating_components(const AxialDomain& dom, std::size_t lat, std::size_t lat2) {
  const PlanarRegion e = intersect(dom.slice_at(lat), dom.slice_at(lat2));
  const ComponentLabels lab = components(e);
  std::vector<Box> out;
  for (int id = 0; id < lab.count; ++id)
    if (!lab.meets_real[static_cast<std::size_t>(id)]) out.push_back(bounding_box(component_region(lab, e.grid, id)));
  return out;
}

struct SpearSimpleReport {
  bool spear_simple = true;
  std::size_t failing_pairs = 0;  // over distinct slice rasters
  std::vector<PairWitness> witnesses;            // one per failing raster pair
  std::vector<PairWitness> antipodal_witnesses;  // pairs (r, -r)
};

inline SpearSimpleReport is_spear_simple(const AxialDomain& dom, unsigned workers = worker_count()) {
  if (!is_speared(dom).speared) throw Error(ErrorCode::NotSpeared, "spear-simplicity needs a speared domain");
  const std::size_t M = dom.masks.size();
  std::vector<std::size_t> first_lat(M, 0);
  for (std::size_t lat = dom.n_lat(); lat-- > 0;) first_lat[static_cast<std::size_t>(dom.mask_of[lat])] = lat;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < M; ++a)
    for (std::size_t b = a; b < M; ++b) pairs.emplace_back(a, b);
  const Grid& g = dom.grid;
  std::vector<detail::Workspace> ws(std::max(1u, workers));
  std::vector<std::optional<PairWitness>> result(pairs.size());
  parallel_for(pairs.size(), static_cast<unsigned>(ws.size()), [&](unsigned w, std::size_t pi) {
    detail::Workspace& W = ws[w];
    detail::intersect_masks(dom.masks[pairs[pi].first], dom.masks[pairs[pi].second], W.inter);
    const int count = label_components(W.inter.data(), g.nx(), g.ny(), W.labels, W.meets_real, W.stack);
    for (int id = 0; id < count; ++id) {
      if (W.meets_real[static_cast<std::size_t>(id)]) continue;
      PlanarRegion comp(g);
      for (std::size_t c = 0; c < comp.mask.size(); ++c) comp.mask[c] = W.labels[c] == id ? 1 : 0;
      const std::size_t la = first_lat[pairs[pi].first], lb = first_lat[pairs[pi].second];
      result[pi] = PairWitness{dom.latitudes[la], dom.latitudes[lb], la, lb, bounding_box(comp)};
      return;
    }
  });
  SpearSimpleReport rep;
  for (auto& r : result)
    if (r) {
      rep.witnesses.push_back(*r);
      ++rep.failing_pairs;
    }
  rep.spear_simple = rep.failing_pairs == 0;
  for (std::size_t lat = 0; lat < dom.n_lat() / 2; ++lat) {
    const std::size_t other = dom.nearest_latitude(-dom.latitudes[lat]);
    for (const Box& b : floating_components(dom, other, lat))
      rep.antipodal_witnesses.push_back({dom.latitudes[other], dom.latitudes[lat], other, lat, b});
  }
  return rep;
}

/// Latitude intervals (as sample values) over which the cell containing z lies in the slice.
inline std::vector<std::pair<double, double>> latitude_runs(const AxialDomain& dom, const LatticeIndex& idx,
                                                            const CPoint& z) {
  const auto cell = dom.grid.locate(z);
  std::vector<std::pair<double, double>> out;
  if (!cell) return out;
  for (std::uint32_t k = idx.run_begin[*cell]; k < idx.run_begin[*cell + 1]; ++k)
    out.emplace_back(dom.latitudes[idx.run_lo[k]], dom.latitudes[idx.run_hi[k]]);
  return out;
}

struct SConnectedReport {
  bool s_connected = true;
  std::optional<std::size_t> cell;
  std::vector<std::pair<double, double>> runs;
};

inline SConnectedReport is_s_connected(const AxialDomain& dom, const LatticeIndex& idx) {
  for (std::size_t c = 0; c < idx.n_cells; ++c)
    if (idx.runs_of(c) > 1) return {false, c, latitude_runs(dom, idx, dom.grid.center(c))};
  return {};
}

inline SConnectedReport is_s_connected(const AxialDomain& dom) { return is_s_connected(dom, build_lattice(dom)); }

/// A latitude whose slice contains every other slice; the one closest to the equator.
inline std::optional<double> main_sail(const AxialDomain& dom) {
  const PlanarRegion all = symmetric_completion_region(dom);
  std::optional<double> best;
  for (std::size_t lat = 0; lat < dom.n_lat(); ++lat)
    if (dom.slice_at(lat) == all && (!best || std::abs(dom.latitudes[lat]) < std::abs(*best)))
      best = dom.latitudes[lat];
  return best;
}

struct ClassReport {
  std::string domain;
  double h = 0;
  std::size_t n_lat = 0;
  bool spear_simple = false, s_connected = false, has_main_sail = false, hinged = false;
  std::optional<double> main_sail_latitude;
  SpearSimpleReport spear;
  SConnectedReport sconn;
  HingedReport hinge;
  int closure_rounds = 0;
};

inline ClassReport classify(const AxialDomain& dom, const ClosureOptions& opt = {}) {
  if (!is_speared(dom).speared) throw Error(ErrorCode::NotSpeared, "classification needs a speared domain");
  ClassReport r;
  r.domain = dom.name;
  r.h = dom.grid.h;
  r.n_lat = dom.n_lat();
  r.spear = is_spear_simple(dom, opt.workers);
  r.spear_simple = r.spear.spear_simple;
  const HingeClosure cl = hinge_closure(dom, opt);
  r.sconn = is_s_connected(dom, cl.index);
  r.s_connected = r.sconn.s_connected;
  r.main_sail_latitude = main_sail(dom);
  r.has_main_sail = r.main_sail_latitude.has_value();
  r.hinge = is_hinged(dom, cl);
  r.hinged = r.hinge.hinged;
  r.closure_rounds = cl.rounds;
  if ((r.spear_simple || r.s_connected || r.has_main_sail) && !r.hinged)
    throw Error(ErrorCode::InternalInconsistency, "a sufficient condition holds but the closure is not hinged");
  return r;
}

struct Table1Row {
  std::string domain;
  std::array<bool, 4> cells;  // spear-simple, S-connected, main sail, hinged
};

inline const std::vector<Table1Row>& table1_golden() {
  static const std::vector<Table1Row> rows{
      {"omega0", {true, true, true, true}},    {"omega1", {true, false, true, true}},
      {"omega2", {false, true, true, true}},   {"omega3", {false, false, true, true}},
      {"omega0p", {true, true, false, true}},  {"omega1p", {true, false, false, true}},
      {"omega2p", {false, true, false, true}}, {"omega3p", {false, false, false, true}},
  };
  return rows;
}

inline std::array<bool, 4> table1_cells(const ClassReport& r) {
  return {r.spear_simple, r.s_connected, r.has_main_sail, r.hinged};
}

// ---------------------------------------------------------------------------
// Chains

struct ChainPoint {
  Quaternion x;
  std::size_t cell = 0;
  std::size_t lat = 0;
};

enum class StepKind { SphereComponent, StronglyHinged, DoubleOpen, DoubleClose };

inline const char* step_name(StepKind k) {
  switch (k) {
    case StepKind::SphereComponent: return "simple-sphere";
    case StepKind::StronglyHinged: return "simple-hinged";
    case StepKind::DoubleOpen: return "double-open";
    case StepKind::DoubleClose: return "double-close";
  }
  return "?";
}

struct ChainStep {
  StepKind kind = StepKind::SphereComponent;
  int partner = -1;  // matching step of a double step
};

/// Points x_0..x_t with one annotation per step (x_s, x_{s+1}).
struct Chain {
  std::vector<ChainPoint> points;
  std::vector<ChainStep> steps;

  std::size_t length() const { return steps.size(); }
  std::size_t double_steps() const {
    return static_cast<std::size_t>(
        std::count_if(steps.begin(), steps.end(), [](const ChainStep& s) { return s.kind == StepKind::DoubleOpen; }));
  }
};

namespace detail {

struct Segment {
  std::vector<std::pair<std::size_t, std::size_t>> nodes;  // (cell, lat)
  std::vector<ChainStep> steps;

  void append(const Segment& o) {
    // o starts where this one ends.
    const int off = static_cast<int>(steps.size());
    for (std::size_t i = 1; i < o.nodes.size(); ++i) nodes.push_back(o.nodes[i]);
    for (ChainStep s : o.steps) {
      if (s.partner >= 0) s.partner += off;
      steps.push_back(s);
    }
  }
};

class ChainBuilder {
 public:
  ChainBuilder(const AxialDomain& dom, const HingeClosure& cl) : dom_(dom), cl_(cl) {}

  Segment build(std::size_t c, std::size_t a, std::size_t b, int depth = 0) {
    if (depth > 10000) throw Error(ErrorCode::InternalInconsistency, "chain construction does not terminate");
    Segment s{{{c, a}}, {}};
    if (a == b) return s;
    if (const auto k = direct(c, a, b)) return single(c, a, b, *k);
    if (const auto m = via_intermediate(c, a, b)) {
      Segment first = single(c, a, *m, *direct(c, a, *m));
      first.append(single(c, *m, b, *direct(c, *m, b)));
      return first;
    }
    if (const auto w = double_witness(c, a, b)) return wrap(c, a, b, build(*w, a, b, depth + 1));
    const auto path = cl_.forest_path(cl_.index.node(c, a), cl_.index.node(c, b));
    if (!path || path->empty()) throw Error(ErrorCode::InternalInconsistency, "latitudes are not equivalent");
    if (path->size() >= 2) {
      const auto& [eid, fwd] = path->front();
      const MergeEdge& e = cl_.edges[static_cast<std::size_t>(eid)];
      const std::size_t m = fwd ? e.lat_v : e.lat_u;
      Segment first = build(c, a, m, depth + 1);
      first.append(build(c, m, b, depth + 1));
      return first;
    }
    const auto& [eid, fwd] = path->front();
    const MergeEdge& e = cl_.edges[static_cast<std::size_t>(eid)];
    const std::size_t la = fwd ? e.lat_u : e.lat_v, lb = fwd ? e.lat_v : e.lat_u;
    Segment out = build(c, a, la, depth + 1);
    Segment mid;
    if (e.kind == MergeEdge::Kind::RealPoint)
      mid = single(c, la, lb, StepKind::SphereComponent);
    else if (e.real_witness || strongly(c, la, lb))
      mid = single(c, la, lb, StepKind::StronglyHinged);
    else
      mid = wrap(c, la, lb, build(e.witness, la, lb, depth + 1));
    out.append(mid);
    out.append(build(c, lb, b, depth + 1));
    return out;
  }

 private:
  static Segment single(std::size_t c, std::size_t a, std::size_t b, StepKind k) {
    return Segment{{{c, a}, {c, b}}, {ChainStep{k, -1}}};
  }

  static Segment wrap(std::size_t c, std::size_t a, std::size_t b, const Segment& inner) {
    Segment s{{{c, a}}, {}};
    const int close = static_cast<int>(inner.steps.size()) + 1;
    s.steps.push_back({StepKind::DoubleOpen, close});
    for (const auto& n : inner.nodes) s.nodes.push_back(n);
    for (ChainStep st : inner.steps) {
      if (st.partner >= 0) st.partner += 1;
      s.steps.push_back(st);
    }
    s.nodes.emplace_back(c, b);
    s.steps.push_back({StepKind::DoubleClose, 0});
    return s;
  }

  const ComponentLabels& pair_labels(std::size_t a, std::size_t b) {
    std::pair<int, int> key{dom_.mask_of[a], dom_.mask_of[b]};
    if (key.first > key.second) std::swap(key.first, key.second);
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(key, components(intersect(dom_.masks[static_cast<std::size_t>(key.first)],
                                                    dom_.masks[static_cast<std::size_t>(key.second)])))
               .first;
    return it->second;
  }

  bool strongly(std::size_t c, std::size_t a, std::size_t b) {
    const ComponentLabels& lab = pair_labels(a, b);
    const int l = lab.labels[c];
    return l >= 0 && lab.meets_real[static_cast<std::size_t>(l)];
  }

  bool on_real_row(std::size_t c) const { return c < static_cast<std::size_t>(dom_.grid.nx()); }

  std::optional<StepKind> direct(std::size_t c, std::size_t a, std::size_t b) {
    const int na = cl_.index.node(c, a), nb = cl_.index.node(c, b);
    if (na < 0 || nb < 0) return std::nullopt;
    if (na == nb || on_real_row(c)) return StepKind::SphereComponent;
    if (strongly(c, a, b)) return StepKind::StronglyHinged;
    return std::nullopt;
  }

  /// Latitude m with direct steps a -> m -> b, closest to the equator.
  std::optional<std::size_t> via_intermediate(std::size_t c, std::size_t a, std::size_t b) {
    std::optional<std::size_t> best;
    for (std::size_t m = 0; m < dom_.n_lat(); ++m) {
      if (m == a || m == b || cl_.index.node(c, m) < 0) continue;
      if (best && std::abs(dom_.latitudes[m]) >= std::abs(dom_.latitudes[*best])) continue;
      if (direct(c, a, m) && direct(c, m, b)) best = m;
    }
    return best;
  }

  /// Cell in the pair component of c, equivalent across (a, b) strictly earlier than c.
  std::optional<std::size_t> double_witness(std::size_t c, std::size_t a, std::size_t b) {
    const ComponentLabels& lab = pair_labels(a, b);
    const int l = lab.labels[c];
    if (l < 0) return std::nullopt;
    const int tc = cl_.merge_time(c, a, b);
    const CPoint zc = dom_.grid.center(c);
    std::optional<std::size_t> best;
    std::tuple<int, double, int> best_key{};
    for (std::size_t z = 0; z < lab.labels.size(); ++z) {
      if (z == c || lab.labels[z] != l || !cl_.equivalent(z, a, b)) continue;
      const int tz = cl_.merge_time(z, a, b);
      if (tz >= tc) continue;
      int score = 3;
      if (direct(z, a, b))
        score = 0;
      else if (via_intermediate(z, a, b))
        score = 2;
      const CPoint zz = dom_.grid.center(z);
      const std::tuple<int, double, int> key{score, std::hypot(zz.alpha - zc.alpha, zz.beta - zc.beta), tz};
      if (!best || key < best_key) {
        best = z;
        best_key = key;
      }
    }
    return best;
  }

  const AxialDomain& dom_;
  const HingeClosure& cl_;
  std::map<std::pair<int, int>, ComponentLabels> cache_;
};

}  // namespace detail

/// Explicit chain between two points of one sphere, or nothing if the closure keeps them apart.
inline std::optional<Chain> chain_find(const AxialDomain& dom, const HingeClosure& cl, const Quaternion& x,
                                       const Quaternion& y) {
  const Grid& g = dom.grid;
  auto locate = [&](const Quaternion& q) {
    if (!dom.contains(q)) throw Error(ErrorCode::PointOutsideDomain, "chain endpoint outside the domain");
    const Decomposition d = decompose(q);
    const auto cell = g.locate({d.alpha, d.beta});
    const std::size_t lat = dom.nearest_latitude(d.unit.latitude());
    if (!cell || !dom.slice_at(lat).at(*cell))
      throw Error(ErrorCode::PointOutsideDomain, "chain endpoint outside the raster slice");
    return std::make_pair(*cell, lat);
  };
  const auto [cx, lx] = locate(x);
  auto [cy, ly] = locate(y);
  // Rounding in alpha, beta can split one sphere across a cell edge.
  if (cx != cy && same_sphere(x, y, 1e-9 * std::max(1.0, x.abs())) && dom.slice_at(ly).at(cx)) cy = cx;
  if (cx != cy || !cl.equivalent(cx, lx, ly)) return std::nullopt;

  detail::ChainBuilder builder(dom, cl);
  detail::Segment seg = builder.build(cx, lx, ly);
  if (seg.steps.empty()) seg = detail::Segment{{{cx, lx}, {cx, ly}}, {ChainStep{StepKind::SphereComponent, -1}}};

  const Decomposition dx = decompose(x), dy = decompose(y);
  Chain chain;
  for (std::size_t i = 0; i < seg.nodes.size(); ++i) {
    const auto [c, lat] = seg.nodes[i];
    ChainPoint pt{{}, c, lat};
    if (i == 0) {
      pt.x = x;
    } else if (i + 1 == seg.nodes.size()) {
      pt.x = y;
    } else {
      const CPoint z = g.center(c);
      const double beta = c < static_cast<std::size_t>(g.nx()) ? 0.0 : z.beta;
      const double r = dom.latitudes[lat];
      ImaginaryUnit u = ImaginaryUnit::make(0, std::sqrt(std::max(0.0, 1 - r * r)), r);
      if (lat == lx && !dx.arbitrary)
        u = dx.unit;
      else if (lat == ly && !dy.arbitrary)
        u = dy.unit;
      pt.x = phi(u, {z.alpha, beta});
    }
    chain.points.push_back(pt);
  }
  chain.steps = seg.steps;
  return chain;
}

inline std::optional<Chain> chain_find(const AxialDomain& dom, const Quaternion& x, const Quaternion& y) {
  return chain_find(dom, hinge_closure(dom), x, y);
}

struct ChainValidation {
  bool valid = true;
  std::string message;
};

/// Re-checks every step with the point-level shadow and strongly-hinged tests.
inline ChainValidation validate_chain(const AxialDomain& dom, const Chain& chain) {
  const Grid& g = dom.grid;
  const std::size_t t = chain.steps.size();
  if (chain.points.size() != t + 1) return {false, "point and step counts disagree"};
  const LatticeIndex idx = build_lattice(dom);
  auto r = [&](std::size_t i) { return dom.latitudes[chain.points[i].lat]; };
  auto z = [&](std::size_t i) { return g.center(chain.points[i].cell); };
  std::vector<std::pair<int, int>> doubles;
  for (std::size_t s = 0; s < t; ++s) {
    const ChainStep& st = chain.steps[s];
    const ChainPoint &p = chain.points[s], &q = chain.points[s + 1];
    switch (st.kind) {
      case StepKind::SphereComponent:
        if (p.cell != q.cell) return {false, "sphere step changes sphere at " + std::to_string(s)};
        if (p.cell >= static_cast<std::size_t>(g.nx()) && idx.node(p.cell, p.lat) != idx.node(q.cell, q.lat))
          return {false, "sphere step leaves the sphere component at " + std::to_string(s)};
        break;
      case StepKind::StronglyHinged:
        if (p.cell != q.cell || !strongly_hinged_test(dom, r(s), r(s + 1), z(s)))
          return {false, "strongly hinged step fails at " + std::to_string(s)};
        break;
      case StepKind::DoubleOpen: {
        const int e = st.partner;
        if (e <= static_cast<int>(s) || e >= static_cast<int>(t) || chain.steps[e].kind != StepKind::DoubleClose ||
            chain.steps[e].partner != static_cast<int>(s))
          return {false, "unmatched double step at " + std::to_string(s)};
        const std::size_t ue = static_cast<std::size_t>(e);
        if (chain.points[s].lat != chain.points[s + 1].lat || chain.points[ue].lat != chain.points[ue + 1].lat ||
            chain.points[s].cell != chain.points[ue + 1].cell || chain.points[s + 1].cell != chain.points[ue].cell)
          return {false, "double step endpoints do not pair up at " + std::to_string(s)};
        if (!shadow_test(dom, r(s), r(ue + 1), z(s), z(s + 1)))
          return {false, "double step is not a shadowing pair at " + std::to_string(s)};
        doubles.emplace_back(static_cast<int>(s), e);
        break;
      }
      case StepKind::DoubleClose:
        if (st.partner < 0 || chain.steps[static_cast<std::size_t>(st.partner)].kind != StepKind::DoubleOpen)
          return {false, "unmatched double close at " + std::to_string(s)};
        break;
    }
  }
  for (const auto& [a, b] : doubles)
    for (const auto& [c, d] : doubles) {
      const bool disjoint = b < c || d < a;
      const bool nested = (a < c && d < b) || (c < a && b < d) || (a == c && b == d);
      if (!disjoint && !nested) return {false, "double steps interleave"};
    }
  return {};
}

}  // namespace sliceforge
