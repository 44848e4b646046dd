// slice_forge: classification, verification, extension and chain queries from the command line.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sliceforge/domains.hpp"
#include "sliceforge/extension.hpp"
#include "sliceforge/hinge.hpp"
#include "sliceforge/io.hpp"
#include "sliceforge/verify.hpp"

namespace {

using namespace sliceforge;

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kNotSpeared = 3, kNotHinged = 3, kOutsideCompletion = 4 };

struct Options {
  std::string domain = "omega0";
  std::string fn;
  std::string h;
  std::optional<int> n_lat;
  std::optional<double> tol;
  std::uint64_t seed = 1;
  std::size_t samples = 200;
  std::string out;
  std::string point, from, to;
  std::string suite;
};

/// Accepts decimals and fractions such as 1/16.
double parse_length(const std::string& s) {
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return std::stod(s);
    return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidConfig, "cannot read length '" + s + "'");
  }
}

Resolution resolution(const Options& o) {
  Resolution r;
  if (!o.h.empty()) r.h = parse_length(o.h);
  r.n_lat = o.n_lat;
  check_resolution(r);
  return r;
}

void emit(const json& report, const Options& o) {
  const std::string text = report.dump(2);
  std::cout << text << "\n";
  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) throw Error(ErrorCode::InvalidConfig, "cannot write " + o.out);
    f << text << "\n";
  }
}

json tolerances(const Options& o, double fallback) { return {{"tol", o.tol.value_or(fallback)}}; }

int cmd_classify(const Options& o) {
  const AxialDomain dom = load_domain(o.domain, resolution(o));
  json report = report_header("classify", dom.grid.h, dom.n_lat(), tolerances(o, 0), o.seed);
  const DomainReport dr = domain_report(dom);
  report["domain_report"] = domain_report_to_json(dr);
  if (!dr.speared) {
    emit(report, o);
    std::cerr << "domain '" << dom.name << "' is not speared\n";
    return kNotSpeared;
  }
  report["classification"] = class_report_to_json(classify(dom), dom);
  emit(report, o);
  return kOk;
}

int cmd_table1(const Options& o) {
  const Resolution res = resolution(o);
  json report = report_header("table1", res.h.value_or(Grid{}.h),
                              static_cast<std::size_t>(res.n_lat.value_or(kDefaultLatitudes)), tolerances(o, 0), o.seed);
  static const char* columns[] = {"spear-simple", "S-connected", "main sail", "hinged"};
  json rows = json::array(), mismatches = json::array();
  std::cerr << "domain    spear-simple  S-connected  main-sail  hinged\n";
  for (const Table1Row& golden : table1_golden()) {
    const AxialDomain dom = load_domain(golden.domain, res);
    const ClassReport cr = classify(dom);
    const auto cells = table1_cells(cr);
    std::cerr << golden.domain << std::string(10 - golden.domain.size(), ' ');
    for (std::size_t k = 0; k < 4; ++k) {
      std::cerr << (cells[k] ? "    v        " : "    x        ");
      if (cells[k] != golden.cells[k])
        mismatches.push_back({{"domain", golden.domain}, {"property", columns[k]}, {"expected", golden.cells[k]},
                              {"computed", cells[k]}});
    }
    std::cerr << "\n";
    rows.push_back(class_report_to_json(cr, dom));
  }
  report["rows"] = rows;
  report["matches_golden"] = mismatches.empty();
  report["mismatches"] = mismatches;
  emit(report, o);
  return mismatches.empty() ? kOk : kFailure;
}

int cmd_verify(const Options& o) {
  if (o.fn.empty()) throw Error(ErrorCode::InvalidConfig, "verify needs --fn");
  const SliceFunctionHandle f = parse_function(o.fn);
  const VerifyReport vr = run_suite(o.suite, f, {o.seed, o.samples, o.tol});
  json tols = json::object();
  for (const CheckResult& c : vr.checks) tols[c.name] = c.tolerance;
  json report = report_header("verify", 0, 0, tols, o.seed);
  report.erase("resolution");
  report["function"] = f.label();
  report["result"] = verify_report_to_json(vr);
  emit(report, o);
  return vr.pass() ? kOk : kFailure;
}

int cmd_extend(const Options& o) {
  if (o.fn.empty() || o.point.empty()) throw Error(ErrorCode::InvalidConfig, "extend needs --fn and --point");
  const double tol = o.tol.value_or(1e-9);
  auto dom = std::make_shared<const AxialDomain>(load_domain(o.domain, resolution(o)));
  const Quaternion x = parse_point(o.point);
  const SliceFunctionHandle f = restrict_to(parse_function(o.fn), dom);
  json report = report_header("extend", dom->grid.h, dom->n_lat(), tolerances(o, tol), o.seed);
  report["domain"] = dom->name;
  report["point"] = quaternion_to_json(x);
  if (!is_speared(*dom).speared) {
    std::cerr << "domain is not speared\n";
    return kNotHinged;
  }
  const HingedReport hr = is_hinged(*dom);
  if (!hr.hinged) {
    report["hinged"] = false;
    emit(report, o);
    std::cerr << "domain is not hinged at this resolution\n";
    return kNotHinged;
  }
  try {
    const ExtensionResult r = extend_global(f, x, tol);
    report["value"] = quaternion_to_json(r.value);
    report["consistency_spread"] = r.consistency_spread;
    report["bands"] = r.bands;
    report["inside_domain"] = dom->contains(x);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::OutsideCompletion) throw;
    std::cerr << e.what() << "\n";
    return kOutsideCompletion;
  }
  emit(report, o);
  return kOk;
}

int cmd_chain(const Options& o) {
  if (o.from.empty() || o.to.empty()) throw Error(ErrorCode::InvalidConfig, "chain needs --from and --to");
  const AxialDomain dom = load_domain(o.domain, resolution(o));
  const Quaternion x = parse_point(o.from), y = parse_point(o.to);
  json report = report_header("chain", dom.grid.h, dom.n_lat(), tolerances(o, 0), o.seed);
  report["domain"] = dom.name;
  report["from"] = quaternion_to_json(x);
  report["to"] = quaternion_to_json(y);
  const HingeClosure cl = hinge_closure(dom);
  const std::optional<Chain> chain = chain_find(dom, cl, x, y);
  if (!chain) {
    report["equivalent"] = false;
    report["message"] = "not equivalent at resolution";
    emit(report, o);
    return kOk;
  }
  const ChainValidation v = validate_chain(dom, *chain);
  report["equivalent"] = true;
  report["certificate"] = chain_to_json(*chain, dom);
  report["validated"] = v.valid;
  if (!v.valid) report["validation_error"] = v.message;
  emit(report, o);
  return v.valid ? kOk : kFailure;
}

int cmd_domains_list(const Options& o) {
  json list = json::array();
  for (const std::string& name : builtin_names()) list.push_back(name);
  list.push_back("ball(c,R)");
  emit({{"version", kVersion}, {"domains", list}}, o);
  return kOk;
}

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::NotSpeared: return kNotSpeared;
    case ErrorCode::OutsideCompletion: return kOutsideCompletion;
    case ErrorCode::PointOutsideDomain:
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidWidth:
    case ErrorCode::InvalidSail:
    case ErrorCode::NotAUnit:
    case ErrorCode::EmptyGrid:
    case ErrorCode::RealAxisMismatch: return kConfig;
    default: return kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slice regular functions on axially symmetric quaternionic domains"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");  // --h is the grid step
  Options o;

  auto resolution_flags = [&](CLI::App* c) {
    c->add_option("--domain", o.domain, "Built-in name, ball(c,R), or domain JSON (inline or file)");
    c->add_option("--h", o.h, "Grid step, e.g. 0.0625 or 1/16");
    c->add_option("--n-lat", o.n_lat, "Number of latitude samples (odd)");
  };
  auto common_flags = [&](CLI::App* c) {
    c->add_option("--out", o.out, "Also write the JSON report to this file");
    c->add_option("--seed", o.seed, "Seed for randomized sampling");
    c->add_option("--tol", o.tol, "Tolerance override");
  };

  CLI::App* classify = app.add_subcommand("classify", "Classify a domain");
  resolution_flags(classify);
  common_flags(classify);
  CLI::App* table1 = app.add_subcommand("table1", "Classify the eight reference domains against the golden table");
  resolution_flags(table1);
  common_flags(table1);
  CLI::App* verify = app.add_subcommand("verify", "Run a property suite on a function");
  verify->add_option("suite", o.suite, "rep | stem | spherical | dbar | differential")
      ->required()
      ->check(CLI::IsMember(suite_names()));
  verify->add_option("--fn", o.fn, "Function: name, JSON spec, or JSON file")->required();
  verify->add_option("--samples", o.samples, "Samples per check");
  common_flags(verify);
  CLI::App* extend = app.add_subcommand("extend", "Evaluate the extension to the symmetric completion");
  resolution_flags(extend);
  common_flags(extend);
  extend->add_option("--fn", o.fn, "Function: name, JSON spec, or JSON file")->required();
  extend->add_option("--point", o.point, "Point as [w,x,y,z]")->required();
  CLI::App* chain = app.add_subcommand("chain", "Find a chain between two points of one sphere");
  resolution_flags(chain);
  common_flags(chain);
  chain->add_option("--from", o.from, "Start point as [w,x,y,z]")->required();
  chain->add_option("--to", o.to, "End point as [w,x,y,z]")->required();
  CLI::App* list = app.add_subcommand("domains-list", "List built-in domains");
  list->add_option("--out", o.out, "Also write the JSON list to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*classify) return cmd_classify(o);
    if (*table1) return cmd_table1(o);
    if (*verify) return cmd_verify(o);
    if (*extend) return cmd_extend(o);
    if (*chain) return cmd_chain(o);
    if (*list) return cmd_domains_list(o);
  } catch (const Error& e) {
    std::cerr << "error [" << error_name(e.code()) << "]: " << e.what() << "\n";
    return exit_for(e);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error [InvalidConfig]: " << e.what() << "\n";
    return kConfig;
  }
  return kConfig;
}
