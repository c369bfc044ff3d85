#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "stringlab/json_io.hpp"
#include "stringlab/lorentz.hpp"
#include "stringlab/mass_shell.hpp"
#include "stringlab/physical_spectrum.hpp"
#include "stringlab/propagator_locality.hpp"
#include "stringlab/string_field.hpp"
#include "stringlab/virasoro.hpp"

namespace stringlab::cli {

namespace fs = std::filesystem;

namespace {

struct usage_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Io {
  std::ostream& out;
  std::ostream& err;
  int jobs = 1;
};

fs::path resolve(const std::string& path, const std::string& fallback) {
  const char* env = std::getenv("STRINGLAB_OUT_DIR");
  const std::string base = env ? env : "";
  if (path.empty()) return base.empty() ? fs::path{} : fs::path(base) / fallback;
  fs::path p(path);
  if (p.is_relative() && !base.empty()) p = fs::path(base) / p;
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

// JSON to --out (or stdout); the CSV mirror goes next to it.
void emit(Io& io, const std::string& out, const std::string& fallback, const json& j, const std::string* csv = nullptr) {
  const fs::path p = resolve(out, fallback);
  const std::string text = dump(j) + "\n";
  if (p.empty()) {
    io.out << text;
    return;
  }
  write_file(p, text);
  if (csv) {
    fs::path c = p;
    c.replace_extension(".csv");
    write_file(c, *csv);
  }
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw usage_error("cannot read config " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw usage_error("config " + path + " is not valid JSON: " + e.what());
  }
}

json header(const std::string& schema) { return json{{"schema", schema}, {"schema_version", kSchemaVersion}}; }

std::vector<Momentum> parse_momenta(const std::vector<std::string>& texts, int d) {
  std::vector<Momentum> out;
  for (const auto& t : texts) {
    try {
      out.push_back(parse_momentum(t, d));
    } catch (const std::exception& e) {
      throw usage_error("bad --momentum \"" + t + "\": " + e.what());
    }
  }
  return out;
}

SpectrumRoute parse_route(const std::string& s) {
  if (s == "auto") return SpectrumRoute::automatic;
  if (s == "explicit") return SpectrumRoute::explicit_gram;
  if (s == "bordered") return SpectrumRoute::bordered;
  throw usage_error("--route must be auto, explicit or bordered");
}

// Config keys that are not flags; everything else in a config file must name a flag.
const std::map<std::string, std::set<std::string>>& structured_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"commutator", {"f", "g", "r", "sampling", "scan", "position_nodes"}},
      {"decay-scan", {"f", "g", "r", "sampling", "scan", "max_slope"}},
      {"field-ccr", {"f", "g", "covariance", "tolerance"}},
  };
  return keys;
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_number()) return v.dump();
  throw usage_error("config value " + v.dump() + " cannot be used as a flag value");
}

// Appends config entries that name flags of `sub` unless the flag was given on the command line.
// Returns the structured part of the config.
json merge_config(CLI::App* sub, const std::string& name, const std::string& path, std::vector<std::string>& args) {
  const json cfg = read_json_file(path);
  if (!cfg.is_object()) throw usage_error("config must be a JSON object");
  json structured = json::object();
  const auto& sk = structured_keys();
  const auto it = sk.find(name);
  for (const auto& [key, value] : cfg.items()) {
    if (it != sk.end() && it->second.count(key)) {
      structured[key] = value;
      continue;
    }
    if (key == "config" || !sub->get_option_no_throw("--" + key))
      throw usage_error("unknown config key \"" + key + "\" for " + name);
    const std::string flag = "--" + key;
    if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
    if (std::any_of(args.begin(), args.end(), [&](const std::string& a) { return a.rfind(flag + "=", 0) == 0; }))
      continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) {
        args.push_back(flag);
        args.push_back(scalar_text(v));
      }
    } else {
      args.push_back(flag);
      args.push_back(scalar_text(value));
    }
  }
  return structured;
}

void require_keys(const json& j, const std::string& what, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw usage_error(what + " must be an object");
  for (const auto& [k, v] : j.items())
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }) == allowed.end())
      throw usage_error("unknown key \"" + k + "\" in " + what);
}

template <class Fn>
void parallel_for(int jobs, std::size_t n, Fn fn) {
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto work = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs && static_cast<std::size_t>(t) < n; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------- spectrum / noghost

struct SpectrumArgs {
  int d = 26;
  int max_level = 2;
  std::vector<std::string> momenta;
  std::string route = "auto";
  std::string out;
};

std::string spectrum_csv(const std::vector<PhysicalLevelReport>& reports) {
  std::vector<std::vector<json>> rows;
  for (const auto& r : reports) {
    rows.push_back({r.d, r.level, r.r.to_string(), momentum_to_string(r.p), r.dim_total, r.dim_constrained, r.dim_null,
                    r.dim_physical, r.inertia.n_plus, r.inertia.n_zero, r.inertia.n_minus,
                    transverse_count(r.d, r.level), r.route});
  }
  std::ostringstream os;
  write_csv(os,
            {"d", "level", "r", "p", "dim_total", "dim_constrained", "dim_null", "dim_physical", "n_plus", "n_zero",
             "n_minus", "transverse_count", "route"},
            rows);
  return os.str();
}

int run_spectrum(Io& io, const SpectrumArgs& a) {
  const auto reports = spectrum_table(a.d, a.max_level, parse_momenta(a.momenta, a.d), parse_route(a.route), io.jobs);
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  const std::string csv = spectrum_csv(reports);
  emit(io, a.out, "spectrum.json", arr, &csv);
  return kOk;
}

struct NoghostArgs {
  int d = 26;
  int level = 1;
  std::vector<std::string> momenta;
  std::string route = "auto";
  bool inject_fault = false;
  std::string out;
};

int run_noghost(Io& io, const NoghostArgs& a) {
  if (a.level < 0) throw usage_error("--level must be >= 0");
  std::vector<Momentum> points = parse_momenta(a.momenta, a.d);
  const Rational r = level_mass(a.level);
  if (points.empty()) {
    points.push_back(rational_shell_point(r, a.d, Sheet::plus, Rational(2)));
    points.push_back(rational_shell_point(r, a.d, Sheet::plus, Rational(3)));
  }
  for (const auto& p : points)
    if (minkowski_square(p) != -r) throw usage_error("momentum " + momentum_to_string(p) + " is not on the level shell");
  std::vector<PhysicalLevelReport> reports(points.size());
  parallel_for(io.jobs, points.size(),
               [&](std::size_t i) { reports[i] = physical_gram(a.d, a.level, points[i], parse_route(a.route)); });
  if (a.inject_fault) ++reports.front().inertia.n_minus;
  const std::uint64_t expected = transverse_count(a.d, a.level);
  bool pass = true, same = true;
  json arr = json::array();
  for (const auto& rep : reports) {
    const bool ok = rep.inertia.n_minus == 0 && rep.inertia.n_zero == 0 && rep.dim_physical == expected;
    pass = pass && ok;
    same = same && rep.dim_physical == reports.front().dim_physical && rep.dim_null == reports.front().dim_null &&
           rep.dim_constrained == reports.front().dim_constrained && rep.inertia == reports.front().inertia;
    json j = to_json(rep);
    j["positive"] = ok;
    arr.push_back(std::move(j));
  }
  json j = header("noghost");
  j["d"] = a.d;
  j["level"] = a.level;
  j["transverse_count"] = expected;
  j["fault_injected"] = a.inject_fault;
  j["reports"] = std::move(arr);
  j["momentum_independent"] = same;
  j["pass"] = pass && same;
  emit(io, a.out, "noghost.json", j);
  return pass && same ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- virasoro-check

struct VirasoroArgs {
  int d = 26;
  int mmax = 3;
  int level = 2;
  std::string momentum;
  std::string out;
};

int run_virasoro(Io& io, const VirasoroArgs& a) {
  if (a.mmax < 1 || a.level < 0) throw usage_error("--mmax must be >= 1 and --level >= 0");
  const Momentum p = a.momentum.empty() ? rational_shell_point(Rational(2), a.d) : parse_momenta({a.momentum}, a.d)[0];
  const auto brackets = virasoro_sweep(a.mmax, p, a.level);
  bool pass = true;
  json arr = json::array(), central = json::array();
  for (const auto& b : brackets) {
    const Rational expect = b.m + b.n == 0 ? expected_central_term(a.d, b.m) : Rational(0);
    const bool ok = b.matches_closure && b.central_coefficient == expect;
    pass = pass && ok;
    json j = to_json(b);
    j["expected_central"] = to_json(expect);
    j["pass"] = ok;
    arr.push_back(std::move(j));
    if (b.m + b.n == 0 && b.m > 0)
      central.push_back(json{{"m", b.m}, {"measured", to_json(b.central_coefficient)}, {"expected", to_json(expect)}});
    if (b.m + b.n == 0 && b.m < 0)
      central.push_back(json{{"m", b.n}, {"measured", to_json(-b.central_coefficient)}, {"expected", to_json(-expect)}});
  }
  json j = header("virasoro-check");
  j["d"] = a.d;
  j["mmax"] = a.mmax;
  j["probe_level"] = a.level;
  j["p"] = to_json(p);
  j["brackets"] = std::move(arr);
  j["central_terms"] = std::move(central);
  j["pass"] = pass;
  emit(io, a.out, "virasoro-check.json", j);
  return pass ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- measure

struct MeasureArgs {
  double r = 1.0;
  int d = 2;
  std::string check = "invariance";
  int nodes = 0;  // 0: per-check default
  std::string rule = "gauss_legendre";
  double tolerance = -1.0;
  std::string out;
};

int run_measure(Io& io, const MeasureArgs& a) {
  if (a.d < 2) throw usage_error("--d must be >= 2");
  if (a.nodes < 0) throw usage_error("--nodes must be >= 1");
  int nodes = a.nodes;
  if (nodes == 0) nodes = a.check == "lightcone" || (a.check == "fiber" && a.d == 2) ? 64 : 128;
  QuadratureSpec q;
  q.nodes = nodes;
  if (a.rule == "tanh_sinh") q.rule = QuadRule::tanh_sinh;
  else if (a.rule != "gauss_legendre") throw usage_error("--rule must be gauss_legendre or tanh_sinh");
  const std::size_t d = static_cast<std::size_t>(a.d);
  json j = header("measure");
  j["check"] = a.check;
  j["d"] = a.d;
  j["nodes"] = nodes;
  j["rule"] = a.rule;
  double err = 0.0, tol = a.tolerance;
  if (a.check == "invariance") {
    if (a.r < 0) throw usage_error("--r must be >= 0 for the invariance check");
    if (tol < 0) tol = 1e-8;
    q.box.assign(d - 1, {-9.0, 9.0});
    const auto L = to_double(rational_boost(Rational(5, 4), Rational(3, 4), 1, a.d));
    const auto rep = check_invariance(gaussian_function(std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)),
                                      {a.r, ShellRegion::plus_sheet, a.d}, L, q);
    j["r"] = a.r;
    j["report"] = to_json(rep);
    err = rep.rel_err;
  } else if (a.check == "lightcone") {
    if (a.r < 0) throw usage_error("--r must be >= 0 for the light-cone comparison");
    if (tol < 0) tol = 1e-8;
    // Bump around (0, ..., 0, 1.5) in the spatial momentum, so p+ stays away from 0.
    std::vector<double> c(d - 1, 0.0);
    c.back() = 1.5;
    auto f = [c](std::span<const double> p) {
      double v = 1.0;
      for (std::size_t i = 0; i < c.size() && v != 0.0; ++i) v *= bump1(p[i + 1] - c[i]);
      return v;
    };
    QuadratureSpec qe = q;
    for (double ci : c) qe.box.push_back({ci - 1.0, ci + 1.0});
    const double energy = integrate_energy_param(f, {a.r, ShellRegion::plus_sheet, a.d}, qe);
    QuadratureSpec ql = q;
    ql.box.assign(d - 2, {-1.0, 1.0});
    const double t2max = static_cast<double>(d - 2);
    const double lo = (std::sqrt(a.r + 0.25) + 0.5) / std::numbers::sqrt2;
    const double hi = (std::sqrt(a.r + t2max + 6.25) + 2.5) / std::numbers::sqrt2;
    ql.box.push_back({lo, hi});
    std::vector<std::string> warnings;
    const double lc = integrate_lightcone_param(f, {a.r, ShellRegion::lightcone_plus, a.d}, ql, &warnings);
    err = std::abs(energy - lc) / std::max(std::abs(energy), std::abs(lc));
    j["r"] = a.r;
    j["report"] = json{{"energy", energy}, {"lightcone", lc}, {"rel_err", err}, {"warnings", warnings}};
  } else if (a.check == "fiber") {
    if (tol < 0) tol = 1e-6;
    FiberReport rep;
    if (a.d == 2) {
      rep = fiber_decomposition_check(gaussian_function({3.0, 0.0}, {0.5, 0.5}), {{0.5, 5.5}, {-2.5, 2.5}}, nodes,
                                      std::nullopt, q.rule);
    } else {
      std::vector<double> c(d, 0.0), w(d, 0.6);
      c[0] = 2.0;
      c[1] = 1.6;
      std::vector<std::pair<double, double>> box;
      for (std::size_t i = 0; i < d; ++i) box.push_back({c[i] - w[i], c[i] + w[i]});
      rep = fiber_decomposition_check(bump_function(c, w), box, nodes, std::nullopt, q.rule);
    }
    j["report"] = to_json(rep);
    err = rep.rel_err;
  } else {
    throw usage_error("--check must be invariance, lightcone or fiber");
  }
  j["tolerance"] = tol;
  j["pass"] = err <= tol;
  emit(io, a.out, "measure.json", j);
  return err <= tol ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- commutator / decay-scan

struct CommutatorSetup {
  TestFunctionSpec f, g;
  std::vector<double> masses;
  std::vector<ShellSampling> samplings;
  double pmax = 0.0;
};

CommutatorSetup commutator_setup(const json& cfg) {
  if (!cfg.contains("f") || !cfg.contains("g")) throw usage_error("config needs test functions \"f\" and \"g\"");
  CommutatorSetup s;
  try {
    s.f = test_function_from_json(cfg.at("f"));
    s.g = test_function_from_json(cfg.at("g"));
  } catch (const json::exception& e) {
    throw usage_error(std::string("bad test function: ") + e.what());
  }
  if (s.f.d() != s.g.d()) throw usage_error("f and g have different dimensions");
  const json rj = cfg.value("r", json(1.0));
  s.masses = rj.is_array() ? rj.get<std::vector<double>>() : std::vector<double>{rj.get<double>()};
  const json sp = cfg.value("sampling", json::object());
  require_keys(sp, "sampling", {"pmax", "tail", "panels", "panels_per_unit", "nodes_per_panel", "angular"});
  const double tail = sp.value("tail", 1e-8);
  s.pmax = sp.contains("pmax") ? sp.at("pmax").get<double>()
                               : std::max(suggested_pmax(s.f, tail), suggested_pmax(s.g, tail));
  const int nodes = sp.value("nodes_per_panel", 8);
  const int panels = sp.contains("panels") ? sp.at("panels").get<int>()
                                           : static_cast<int>(std::ceil(sp.value("panels_per_unit", 2.0) * s.pmax));
  for (double r : s.masses) s.samplings.push_back(make_sampling(s.f.d(), r, s.pmax, panels, nodes, sp.value("angular", 64)));
  return s;
}

struct ScanSetup {
  std::vector<double> direction;
  std::vector<double> radii;
  double eps = 0.1;
};

ScanSetup scan_setup(const json& cfg, int d) {
  if (!cfg.contains("scan")) throw usage_error("config needs a \"scan\" block with direction and radii");
  const json& sc = cfg.at("scan");
  require_keys(sc, "scan", {"direction", "radii", "eps"});
  ScanSetup s;
  s.direction = sc.at("direction").get<std::vector<double>>();
  s.radii = sc.at("radii").get<std::vector<double>>();
  s.eps = sc.value("eps", 0.1);
  if (static_cast<int>(s.direction.size()) != d) throw usage_error("scan direction has the wrong dimension");
  if (s.radii.empty()) throw usage_error("scan radii are empty");
  return s;
}

std::string decay_csv(const std::vector<DecayRow>& rows) {
  std::vector<std::vector<json>> table;
  for (const auto& r : rows) table.push_back({r.radius, r.value.real(), r.value.imag(), r.reference_scale});
  std::ostringstream os;
  write_csv(os, {"|a|", "re", "im", "reference_scale"}, table);
  return os.str();
}

struct CommutatorArgs {
  std::string config;
  std::string scan = "none";
  std::string out;
};

int run_commutator(Io& io, const CommutatorArgs& a, const json& cfg) {
  const CommutatorSetup s = commutator_setup(cfg);
  if (a.scan == "spacelike") {
    const ScanSetup sc = scan_setup(cfg, s.f.d());
    const auto rows = decay_scan(s.f, s.g, sc.direction, sc.radii, s.samplings, sc.eps);
    const std::string csv = decay_csv(rows);
    const fs::path p = resolve(a.out, "scan.csv");
    if (p.empty()) io.out << csv;
    else write_file(p, csv);
    return kOk;
  }
  if (a.scan != "none") throw usage_error("--scan must be none or spacelike");
  const Complex c = smeared_commutator(s.f, s.g, s.samplings);
  json j = header("commutator");
  j["d"] = s.f.d();
  j["r"] = s.masses;
  j["pmax"] = s.pmax;
  j["nodes"] = s.samplings.front().size();
  j["value"] = to_json(c);
  if (s.f.d() == 2 && !s.f.polarization && !s.g.polarization && s.masses.size() == 1) {
    // Independent route: convolution with the Pauli-Jordan kernel.
    const int n = cfg.value("position_nodes", 48);
    const double pos = position_pairing(s.f, s.g, s.masses[0], n);
    const double mom = c.imag();
    j["position_route"] = json{{"value", pos},
                               {"nodes", n},
                               {"rel_diff", std::abs(pos - mom) / std::max({std::abs(pos), std::abs(mom), 1e-300})}};
  }
  emit(io, a.out, "commutator.json", j);
  return kOk;
}

struct DecayArgs {
  std::string config;
  std::string out;
};

int run_decay(Io& io, const DecayArgs& a, const json& cfg) {
  const CommutatorSetup s = commutator_setup(cfg);
  const ScanSetup sc = scan_setup(cfg, s.f.d());
  const auto rows = decay_scan(s.f, s.g, sc.direction, sc.radii, s.samplings, sc.eps);
  const double slope = loglog_slope(rows);
  const double max_slope = cfg.value("max_slope", -6.0);
  json j = header("decay-scan");
  j["d"] = s.f.d();
  j["direction"] = sc.direction;
  j["eps"] = sc.eps;
  json arr = json::array();
  for (const auto& r : rows) arr.push_back(to_json(r));
  j["rows"] = std::move(arr);
  j["slope"] = slope;
  j["max_slope"] = max_slope;
  j["pass"] = slope <= max_slope;
  const std::string csv = decay_csv(rows);
  emit(io, a.out, "decay-scan.json", j, &csv);
  return slope <= max_slope ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- field-ccr

struct FieldArgs {
  std::string config;
  int d = 4;
  int jmax = 3;
  int probes = 10;
  int max_quanta = 3;
  std::uint64_t seed = 7;
  std::string out;
};

FockVector<Complex> level1(int d, std::initializer_list<std::pair<int, Complex>> terms) {
  FockBuilder<Complex> b(d);
  for (const auto& [mu, c] : terms) b.add(Occupation::single(mu, 1), c);
  return b.finish();
}

MomentumTestFunction field_function(const json& cfg, const char* key, int d, FockVector<Complex> fallback,
                                    double center) {
  json fj = cfg.value(key, json::object());
  require_keys(fj, key, {"polarization", "center", "width"});
  FockVector<Complex> pol = fj.contains("polarization") ? fock_from_json(d, fj.at("polarization")) : std::move(fallback);
  if (pol.homogeneous_level() != std::optional<int>(1))
    throw usage_error(std::string(key) + ": the orbit nodes are massless, so the polarization must be at level 1");
  return orbit_bump_test_function(std::move(pol), fj.value("center", center), fj.value("width", 1.5));
}

int run_field_ccr(Io& io, const FieldArgs& a, const json& cfg) {
  if (a.d < 2 || a.jmax < 1 || a.probes < 1 || a.max_quanta < 1) throw usage_error("field-ccr: bad sizes");
  const auto s = lightlike_orbit_string(a.d, a.jmax);
  const int d = a.d;
  const auto F = field_function(cfg, "f", d, level1(d, {{std::min(2, d - 1), {1.0, 0.2}}, {0, {0.3, 0.0}}}), 0.0);
  const auto G = field_function(cfg, "g", d, level1(d, {{1, {0.5, -0.4}}, {std::min(2, d - 1), {0.2, 1.0}}}), 0.5);
  const json tol = cfg.value("tolerance", json::object());
  require_keys(tol, "tolerance", {"ccr", "covariance"});
  const double tol_ccr = tol.value("ccr", 1e-10), tol_cov = tol.value("covariance", 1e-8);
  const json cov = cfg.value("covariance", json::object());
  require_keys(cov, "covariance", {"a", "probes"});
  std::vector<double> shift = cov.value("a", std::vector<double>{0.3, -0.2, 0.7, 0.1});
  shift.resize(static_cast<std::size_t>(d), 0.0);

  const auto f = discretize(F, s), g = discretize(G, s);
  const auto battery = probe_battery(s, static_cast<std::size_t>(a.max_quanta), static_cast<std::size_t>(a.probes), a.seed);
  std::vector<double> ccr(battery.size());
  parallel_for(io.jobs, battery.size(), [&](std::size_t i) { ccr[i] = field_commutator_residual(s, f, g, battery[i]); });

  const auto L = to_double(orbit_boost(d));
  const auto cprobes = covariance_probes(s, L, static_cast<std::size_t>(a.max_quanta),
                                         static_cast<std::size_t>(cov.value("probes", 6)), a.seed + 1);
  std::vector<double> covr(cprobes.size());
  parallel_for(io.jobs, cprobes.size(), [&](std::size_t i) { covr[i] = covariance_residual(s, F, shift, L, cprobes[i]); });

  const double ccr_max = *std::max_element(ccr.begin(), ccr.end());
  const double cov_max = *std::max_element(covr.begin(), covr.end());
  const bool pass = ccr_max <= tol_ccr && cov_max <= tol_cov;
  json j = header("field-ccr");
  j["d"] = d;
  j["nodes"] = s.nodes().size();
  j["elements"] = s.size();
  j["pairing"] = to_json(s.pairing(f, g));
  j["ccr"] = json{{"residuals", ccr}, {"max", ccr_max}, {"tolerance", tol_ccr}, {"pass", ccr_max <= tol_ccr}};
  j["covariance"] = json{{"a", shift}, {"residuals", covr}, {"max", cov_max}, {"tolerance", tol_cov}, {"pass", cov_max <= tol_cov}};
  j["pass"] = pass;
  emit(io, a.out, "field-ccr.json", j);
  return pass ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- observable-check

struct ObservableArgs {
  int level = 1;
  int d = 26;
  int jmax = 2;
  int probes = 8;
  int max_quanta = 2;
  std::uint64_t seed = 11;
  double tolerance = 1e-8;
  std::string out;
};

int run_observable(Io& io, const ObservableArgs& a) {
  if (a.level != 1 || a.d != 26)
    throw usage_error("observable-check supports --level 1 --d 26 (the no-ghost dimension with a level-1 F)");
  if (a.jmax < 1 || a.probes < 1 || a.max_quanta < 1) throw usage_error("observable-check: bad sizes");
  const auto s = observable_string_d26(a.jmax);
  const auto pp = prime_probes(s, static_cast<std::size_t>(a.max_quanta), static_cast<std::size_t>(a.probes), a.seed);
  const auto np = null_probes(s, static_cast<std::size_t>(a.max_quanta), static_cast<std::size_t>(a.probes), a.seed + 1);
  ObservableReport main, control;
  parallel_for(io.jobs, 2, [&](std::size_t i) {
    if (i == 0) main = observable_lift_check(s, observable_test_function(s), pp, np, 2, a.tolerance);
    else control = observable_lift_check(s, unconstrained_test_function(s), pp, np, 2, a.tolerance);
  });
  json counts = json::object();
  for (auto k : {ElementKind::physical, ElementKind::null, ElementKind::complement})
    counts[to_string(k)] = std::count_if(s.elements().begin(), s.elements().end(),
                                         [k](const StringElement& e) { return e.kind == k; });
  const bool pass = main.passed() && !control.pass_i;
  json j = header("observable-check");
  j["d"] = a.d;
  j["level"] = a.level;
  j["nodes"] = s.nodes().size();
  j["elements"] = counts;
  j["prime_probes"] = pp.size();
  j["null_probes"] = np.size();
  j["constrained"] = to_json(main);
  j["negative_control"] = to_json(control);
  j["negative_control_detected"] = !control.pass_i;
  j["pass"] = pass;
  emit(io, a.out, "observable-check.json", j);
  return pass ? kOk : kCheckFailed;
}

}  // namespace

std::string usage() {
  return "usage: stringlab [--jobs N] <subcommand> [options]\n"
         "\n"
         "subcommands:\n"
         "  spectrum          --d D --max-level L [--momentum \"num/den,...\"] [--route auto|explicit|bordered] --out F\n"
         "  noghost           --d D --level L [--momentum ...] [--inject-fault] --out F\n"
         "  virasoro-check    --d D --mmax M --level L [--momentum ...] --out F\n"
         "  measure           --r R --d D --check invariance|lightcone|fiber --nodes N --out F\n"
         "  commutator        --config spec.json [--scan none|spacelike] --out F\n"
         "  decay-scan        --config spec.json --out F\n"
         "  field-ccr         [--config spec.json] [--d D --jmax J --probes P] --out F\n"
         "  observable-check  --level 1 --d 26 --out F\n"
         "\n"
         "Every subcommand accepts --config FILE (JSON; flags override) and --help.\n"
         "Relative --out paths and the default output file go to $STRINGLAB_OUT_DIR when it is set.\n"
         "Exit codes: 0 success, 1 check failed, 2 usage error.\n";
}

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  if (args_in.empty()) {
    err << usage();
    return kUsage;
  }
  CLI::App app{"Desk-scale checks for the covariantly quantized free bosonic string", "stringlab"};
  app.require_subcommand(1);
  Io io{out, err};
  app.add_option("--jobs", io.jobs, "Worker threads for parallel sweeps")->check(CLI::PositiveNumber);

  std::map<std::string, std::string> config_paths;
  auto with_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_paths[sub->get_name()], "JSON config; flags override");
    return sub;
  };

  SpectrumArgs sa;
  auto* spectrum = with_config(app.add_subcommand("spectrum", "Physical spectrum table"));
  spectrum->add_option("--d", sa.d, "Spacetime dimension")->required();
  spectrum->add_option("--max-level", sa.max_level, "Highest level")->required()->check(CLI::NonNegativeNumber);
  spectrum->add_option("--momentum", sa.momenta, "On-shell momentum \"num/den,...\"");
  spectrum->add_option("--route", sa.route, "auto, explicit or bordered");
  spectrum->add_option("--out", sa.out, "Output JSON (CSV mirror alongside)");

  NoghostArgs na;
  auto* noghost = with_config(app.add_subcommand("noghost", "No-ghost check at one level"));
  noghost->add_option("--d", na.d)->required();
  noghost->add_option("--level", na.level)->required();
  noghost->add_option("--momentum", na.momenta);
  noghost->add_option("--route", na.route);
  noghost->add_flag("--inject-fault", na.inject_fault, "Add a spurious negative direction to test the exit path");
  noghost->add_option("--out", na.out);

  VirasoroArgs va;
  auto* vir = with_config(app.add_subcommand("virasoro-check", "Virasoro closure report"));
  vir->add_option("--d", va.d)->required();
  vir->add_option("--mmax", va.mmax)->required();
  vir->add_option("--level", va.level, "Probe level")->required();
  vir->add_option("--momentum", va.momentum);
  vir->add_option("--out", va.out);

  MeasureArgs ma;
  auto* measure = with_config(app.add_subcommand("measure", "Invariant-measure checks"));
  measure->add_option("--r", ma.r);
  measure->add_option("--d", ma.d)->required();
  measure->add_option("--check", ma.check)->required();
  measure->add_option("--nodes", ma.nodes, "Nodes per axis (default 128, or 64 for lightcone and the d = 2 fiber)");
  measure->add_option("--rule", ma.rule);
  measure->add_option("--tolerance", ma.tolerance);
  measure->add_option("--out", ma.out);

  CommutatorArgs ca;
  auto* comm = with_config(app.add_subcommand("commutator", "Smeared field commutator"));
  comm->add_option("--scan", ca.scan);
  comm->add_option("--out", ca.out);

  DecayArgs da;
  auto* decay = with_config(app.add_subcommand("decay-scan", "Spacelike decay of the commutator"));
  decay->add_option("--out", da.out);

  FieldArgs fa;
  auto* field = with_config(app.add_subcommand("field-ccr", "Field CCR and covariance on a boost-orbit discretization"));
  field->add_option("--d", fa.d);
  field->add_option("--jmax", fa.jmax);
  field->add_option("--probes", fa.probes);
  field->add_option("--max-quanta", fa.max_quanta);
  field->add_option("--seed", fa.seed);
  field->add_option("--out", fa.out);

  ObservableArgs oa;
  auto* obs = with_config(app.add_subcommand("observable-check", "Observable-field lift at d = 26"));
  obs->add_option("--level", oa.level);
  obs->add_option("--d", oa.d);
  obs->add_option("--jmax", oa.jmax);
  obs->add_option("--probes", oa.probes);
  obs->add_option("--max-quanta", oa.max_quanta);
  obs->add_option("--seed", oa.seed);
  obs->add_option("--tolerance", oa.tolerance);
  obs->add_option("--out", oa.out);

  try {
    // Config files: find the subcommand and its --config, then append non-overridden keys as flags.
    std::vector<std::string> args = args_in;
    json structured = json::object();
    std::size_t sub_at = 0;
    while (sub_at < args.size() && !app.get_subcommand_no_throw(args[sub_at])) ++sub_at;
    if (sub_at < args.size()) {
      CLI::App* sub = app.get_subcommand(args[sub_at]);
      std::string cfg_path;
      for (std::size_t i = sub_at + 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) cfg_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) cfg_path = args[i].substr(9);
      }
      if (!cfg_path.empty()) structured = merge_config(sub, sub->get_name(), cfg_path, args);
    }
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::CallForHelp&) {
      const auto subs = app.get_subcommands();
      out << (subs.empty() ? app.help() : subs.front()->help());
      return kOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help();
      return kOk;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << "\n\n" << usage();
      return kUsage;
    }

    if (*spectrum) return run_spectrum(io, sa);
    if (*noghost) return run_noghost(io, na);
    if (*vir) return run_virasoro(io, va);
    if (*measure) return run_measure(io, ma);
    if (*comm) {
      if (config_paths["commutator"].empty()) throw usage_error("commutator needs --config");
      return run_commutator(io, ca, structured);
    }
    if (*decay) {
      if (config_paths["decay-scan"].empty()) throw usage_error("decay-scan needs --config");
      return run_decay(io, da, structured);
    }
    if (*field) return run_field_ccr(io, fa, structured);
    if (*obs) return run_observable(io, oa);
  } catch (const usage_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const json::exception& e) {
    err << "error: config: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  err << usage();
  return kUsage;
}

}  // namespace stringlab::cli
