#pragma once

// JSON ingestion of functions, regions and domains; JSON emission of reports.

#include <cmath>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sliceforge/domains.hpp"
#include "sliceforge/hinge.hpp"
#include "sliceforge/slicefun.hpp"
#include "sliceforge/version.hpp"

namespace sliceforge {

using json = nlohmann::ordered_json;

inline json config_parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("malformed JSON: ") + e.what());
  }
}

/// Parses inline JSON, or reads it from a file when the text names one.
inline json config_load(const std::string& text_or_path) {
  std::ifstream in(text_or_path);
  if (in) {
    std::stringstream ss;
    ss << in.rdbuf();
    return config_parse(ss.str());
  }
  return config_parse(text_or_path);
}

namespace detail {
inline double number(const json& j, const char* what) {
  if (!j.is_number()) throw Error(ErrorCode::InvalidConfig, std::string("expected a number for ") + what);
  return j.get<double>();
}

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::InvalidConfig, std::string("missing field '") + key + "'");
  return j.at(key);
}

inline double number_or(const json& j, const char* key, double fallback) {
  return j.is_object() && j.contains(key) ? number(j.at(key), key) : fallback;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Points

inline Quaternion quaternion_from_json(const json& j) {
  if (j.is_number()) return Quaternion(j.get<double>());
  if (!j.is_array() || j.size() != 4) throw Error(ErrorCode::InvalidConfig, "quaternion must be [w,x,y,z]");
  return {detail::number(j[0], "w"), detail::number(j[1], "x"), detail::number(j[2], "y"), detail::number(j[3], "z")};
}

inline json quaternion_to_json(const Quaternion& q) { return json::array({q.w, q.x, q.y, q.z}); }

/// Accepts [x,y,z] or [0,x,y,z].
inline ImaginaryUnit unit_from_json(const json& j) {
  if (j.is_array() && j.size() == 3)
    return ImaginaryUnit::make(detail::number(j[0], "x"), detail::number(j[1], "y"), detail::number(j[2], "z"));
  return ImaginaryUnit::make(quaternion_from_json(j));
}

inline Quaternion parse_point(const std::string& text) { return quaternion_from_json(config_parse(text)); }

// ---------------------------------------------------------------------------
// Functions

/// Named samples: x, x^n (also x² and x³), conj / x^c (not slice regular).
inline std::optional<SliceFunctionHandle> named_function(const std::string& name) {
  if (name == "conj" || name == "x^c") {
    return SliceFunctionHandle(Pointwise{[](const Quaternion& q) { return q.conj(); }}, "x^c");
  }
  std::string n = name;
  for (const auto& [from, to] : {std::pair<std::string, std::string>{"²", "^2"}, {"³", "^3"}}) {
    const auto pos = n.find(from);
    if (pos != std::string::npos) n.replace(pos, from.size(), to);
  }
  if (n == "x") n = "x^1";
  std::smatch m;
  static const std::regex power(R"(x\^([0-9]{1,2}))");
  if (!std::regex_match(n, m, power)) return std::nullopt;
  const int k = std::stoi(m[1]);
  std::vector<Quaternion> coeffs(static_cast<std::size_t>(k) + 1, Quaternion(0.0));
  coeffs.back() = 1;
  return SliceFunctionHandle(PowerSeries{std::move(coeffs), kInfinity}, n);
}

inline SliceFunctionHandle function_from_json(const json& j) {
  if (j.is_string()) {
    if (auto f = named_function(j.get<std::string>())) return *f;
    throw Error(ErrorCode::InvalidConfig, "unknown function name '" + j.get<std::string>() + "'");
  }
  if (j.is_object() && j.contains("series")) {
    const json& s = j.at("series");
    if (!s.is_array() || s.empty()) throw Error(ErrorCode::InvalidConfig, "series needs at least one coefficient");
    std::vector<Quaternion> coeffs;
    for (const json& c : s) coeffs.push_back(quaternion_from_json(c));
    std::optional<double> radius;
    if (j.contains("radius")) radius = detail::number(j.at("radius"), "radius");
    return SliceFunctionHandle::series(std::move(coeffs), radius);
  }
  if (j.is_object() && j.contains("stem_grid")) {
    const json& g = j.at("stem_grid");
    StemGrid sg;
    sg.alpha_min = detail::number(detail::field(g, "alpha_min"), "alpha_min");
    sg.alpha_max = detail::number(detail::field(g, "alpha_max"), "alpha_max");
    sg.beta_max = detail::number(detail::field(g, "beta_max"), "beta_max");
    sg.nx = static_cast<int>(detail::number(detail::field(g, "nx"), "nx"));
    sg.ny = static_cast<int>(detail::number(detail::field(g, "ny"), "ny"));
    for (const json& v : detail::field(g, "values")) {
      if (!v.is_array() || v.size() != 2) throw Error(ErrorCode::InvalidConfig, "stem value must be [[p],[q]]");
      sg.values.push_back({quaternion_from_json(v[0]), quaternion_from_json(v[1])});
    }
    std::vector<double> real_samples;
    for (int p = 0; p < sg.nx; ++p) real_samples.push_back(sg.alpha_min + (sg.alpha_max - sg.alpha_min) * p / (sg.nx - 1));
    StemFunction F = grid_stem(std::move(sg));
    return SliceFunctionHandle(schwarz_reflect(F, real_samples), "stem_grid");
  }
  throw Error(ErrorCode::InvalidConfig, "function spec needs 'series' or 'stem_grid'");
}

/// Function from a name, inline JSON, or a JSON file.
inline SliceFunctionHandle parse_function(const std::string& text) {
  if (auto f = named_function(text)) return *f;
  return function_from_json(config_load(text));
}

// ---------------------------------------------------------------------------
// Regions and domains

inline RegionSpec region_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "region spec must be an object");
  std::vector<RegionSpec> parts;
  if (j.contains("rects"))
    for (const json& r : j.at("rects")) {
      if (!r.is_array() || r.size() != 4) throw Error(ErrorCode::InvalidConfig, "rect must be [a0,a1,b0,b1]");
      parts.push_back(RegionSpec::rect(detail::number(r[0], "a0"), detail::number(r[1], "a1"), detail::number(r[2], "b0"),
                                       detail::number(r[3], "b1")));
    }
  if (j.contains("half_disks"))
    for (const json& d : j.at("half_disks")) {
      if (!d.is_array() || d.size() != 2) throw Error(ErrorCode::InvalidConfig, "half disk must be [center,radius]");
      parts.push_back(RegionSpec::half_disk(detail::number(d[0], "center"), detail::number(d[1], "radius")));
    }
  RegionSpec spec = parts.empty() ? RegionSpec::empty() : RegionSpec::unite(std::move(parts));
  if (j.contains("ops"))
    for (const json& op : j.at("ops")) {
      const std::string kind = detail::field(op, "op").get<std::string>();
      RegionSpec other = region_from_json(detail::field(op, "with"));
      if (kind == "union")
        spec = RegionSpec::unite({spec, other});
      else if (kind == "intersect")
        spec = RegionSpec::intersect({spec, other});
      else if (kind == "minus")
        spec = RegionSpec::minus(spec, other);
      else
        throw Error(ErrorCode::InvalidConfig, "unknown region op '" + kind + "'");
    }
  return spec;
}

/// {"pieces": [{"r0", "r1", "affine": [a, b]} | {"r0", "r1", "constant": c, "open"?}]}
inline WidthFunction width_from_json(const json& j) {
  WidthFunction w;
  for (const json& p : detail::field(j, "pieces")) {
    const double r0 = detail::number(detail::field(p, "r0"), "r0"), r1 = detail::number(detail::field(p, "r1"), "r1");
    WidthPiece piece;
    if (p.contains("affine")) {
      const json& ab = p.at("affine");
      if (!ab.is_array() || ab.size() != 2) throw Error(ErrorCode::InvalidWidth, "affine piece must be [a,b]");
      piece = WidthPiece::affine(r0, r1, detail::number(ab[0], "a"), detail::number(ab[1], "b"));
    } else if (p.contains("constant")) {
      piece = WidthPiece::constant(r0, r1, detail::number(p.at("constant"), "constant"));
    } else {
      throw Error(ErrorCode::InvalidWidth, "width piece needs 'affine' or 'constant'");
    }
    piece.open = p.value("open", false);
    w.pieces.push_back(piece);
  }
  return w;
}

inline Grid grid_from_json(const json& j, Grid g = Grid::standard()) {
  g.alpha_min = detail::number_or(j, "alpha_min", g.alpha_min);
  g.alpha_max = detail::number_or(j, "alpha_max", g.alpha_max);
  g.beta_max = detail::number_or(j, "beta_max", g.beta_max);
  g.h = detail::number_or(j, "h", g.h);
  g.validate();
  return g;
}

struct Resolution {
  std::optional<double> h;
  std::optional<int> n_lat;
};

inline void check_resolution(const Resolution& res) {
  if (res.h && !(*res.h >= 1.0 / 64 && *res.h <= 0.25))
    throw Error(ErrorCode::InvalidConfig, "h must lie in [1/64, 1/4]");
  if (res.n_lat && !(*res.n_lat >= 33 && *res.n_lat <= 513))
    throw Error(ErrorCode::InvalidConfig, "n_lat must lie in [33, 513]");
}

/// Axial domain from widths and sails, or from a per-latitude region table.
inline AxialDomain domain_from_json(const json& j, const Resolution& res = {}) {
  Grid grid = j.contains("grid") ? grid_from_json(j.at("grid")) : Grid::standard();
  if (res.h) grid.h = *res.h;
  grid.validate();
  const int n_lat = res.n_lat.value_or(j.is_object() && j.contains("n_lat") ? j.at("n_lat").get<int>() : kDefaultLatitudes);
  const std::string name = j.value("name", std::string("custom"));
  if (j.contains("slices")) {
    std::vector<double> lats;
    std::vector<RegionSpec> specs;
    for (const json& s : j.at("slices")) {
      lats.push_back(detail::number(detail::field(s, "latitude"), "latitude"));
      specs.push_back(region_from_json(detail::field(s, "region")));
    }
    return build_table(lats, specs, grid, name);
  }
  std::vector<SailAttachment> sails;
  if (j.contains("sails"))
    for (const json& s : j.at("sails")) {
      SailAttachment sail;
      for (const json& iv : detail::field(s, "latitudes")) {
        if (!iv.is_array() || iv.size() != 2) throw Error(ErrorCode::InvalidSail, "latitude interval must be [lo,hi]");
        sail.latitudes.push_back({detail::number(iv[0], "lo"), detail::number(iv[1], "hi")});
      }
      sail.d_prime = region_from_json(detail::field(s, "Dprime"));
      sail.d = region_from_json(detail::field(s, "D"));
      sails.push_back(std::move(sail));
    }
  return build_axial(width_from_json(detail::field(j, "w1")), width_from_json(detail::field(j, "w2")), std::move(sails),
                     grid, n_lat, name);
}

/// Built-in name or JSON (inline or file), at the requested resolution.
inline AxialDomain load_domain(const std::string& name_or_spec, const Resolution& res = {}) {
  check_resolution(res);
  const auto& names = builtin_names();
  if (std::find(names.begin(), names.end(), name_or_spec) != names.end() || name_or_spec.rfind("ball(", 0) == 0) {
    Grid g = Grid::standard();
    if (res.h) g.h = *res.h;
    return builtin_domain(name_or_spec, g, res.n_lat.value_or(kDefaultLatitudes));
  }
  return domain_from_json(config_load(name_or_spec), res);
}

// ---------------------------------------------------------------------------
// Reports

inline json box_to_json(const Box& b) {
  return {{"alpha", {b.a0, b.a1}}, {"beta", {b.b0, b.b1}}, {"cells", b.cells}};
}

inline json region_to_json(const PlanarRegion& r) {
  json rows = json::array();
  for (const auto& row : to_rle(r)) {
    json runs = json::array();
    for (const auto& [start, len] : row) runs.push_back({start, len});
    rows.push_back(runs);
  }
  return {{"nx", r.grid.nx()}, {"ny", r.grid.ny()}, {"cells", r.count()}, {"rle_rows", rows}};
}

/// Fields every report starts with.
inline json report_header(const std::string& command, double h, std::size_t n_lat, const json& tolerances,
                          std::uint64_t seed) {
  return {{"command", command},
          {"version", kVersion},
          {"resolution", {{"h", h}, {"n_lat", n_lat}}},
          {"tolerances", tolerances},
          {"seed", seed}};
}

inline json pair_witness_to_json(const PairWitness& w) {
  return {{"latitudes", {w.r, w.r2}}, {"component", box_to_json(w.component)}};
}

inline json class_report_to_json(const ClassReport& r, const AxialDomain& dom) {
  json witnesses = json::array();
  if (!r.spear_simple) {
    json pairs = json::array();
    for (const PairWitness& w : r.spear.antipodal_witnesses) pairs.push_back(pair_witness_to_json(w));
    witnesses.push_back({{"property", "spear_simple"},
                         {"failing_pairs", r.spear.failing_pairs},
                         {"first", pair_witness_to_json(r.spear.witnesses.front())},
                         {"antipodal", pairs}});
  }
  if (!r.s_connected && r.sconn.cell) {
    json runs = json::array();
    for (const auto& [lo, hi] : r.sconn.runs) runs.push_back({lo, hi});
    const CPoint z = dom.grid.center(*r.sconn.cell);
    witnesses.push_back({{"property", "s_connected"}, {"point", {z.alpha, z.beta}}, {"latitude_runs", runs}});
  }
  if (!r.hinged && r.hinge.cell) {
    const CPoint z = dom.grid.center(*r.hinge.cell);
    witnesses.push_back({{"property", "hinged"}, {"point", {z.alpha, z.beta}}, {"latitudes", {r.hinge.r, r.hinge.r2}}});
  }
  json out = {{"domain", r.domain},
              {"resolution", {{"h", r.h}, {"n_lat", r.n_lat}}},
              {"spear_simple", r.spear_simple},
              {"s_connected", r.s_connected},
              {"main_sail", r.has_main_sail},
              {"main_sail_latitude", r.main_sail_latitude ? json(*r.main_sail_latitude) : json(nullptr)},
              {"hinged", r.hinged},
              {"closure_rounds", r.closure_rounds},
              {"witnesses", witnesses}};
  return out;
}

inline json domain_report_to_json(const DomainReport& r) {
  json out = {{"speared", r.speared}, {"slice_domain", r.slice_domain}};
  if (!r.speared) {
    out["speared_witness"] = {{"latitude", r.speared_detail.latitude.value_or(0.0)},
                              {"component", box_to_json(r.speared_detail.component)}};
  }
  out["spine"] = region_to_json(r.spine);
  out["core"] = region_to_json(r.core);
  return out;
}

inline json chain_to_json(const Chain& c, const AxialDomain& dom) {
  json pts = json::array();
  for (const ChainPoint& p : c.points)
    pts.push_back({{"x", quaternion_to_json(p.x)}, {"latitude", dom.latitudes[p.lat]}});
  json steps = json::array();
  for (std::size_t s = 0; s < c.steps.size(); ++s) {
    json st = {{"index", s}, {"kind", step_name(c.steps[s].kind)}};
    if (c.steps[s].partner >= 0) st["partner"] = c.steps[s].partner;
    steps.push_back(st);
  }
  return {{"length", c.length()}, {"double_steps", c.double_steps()}, {"points", pts}, {"steps", steps}};
}

}  // namespace sliceforge
