#include "stringlab/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace stringlab {

std::string format_double(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void dump_into(const json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ',';
        first = false;
        out += pad;
        out += json(k).dump();
        out += indent > 0 ? ": " : ":";
        dump_into(v, indent, depth + 1, out);
      }
      out += close;
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); });
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) out += pad;
        dump_into(v, indent, depth + 1, out);
      }
      if (!flat) out += close;
      out += ']';
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump(const json& j, int indent) {
  std::string out;
  dump_into(j, indent, 0, out);
  return out;
}

json to_json(const Rational& q) { return q.to_string(); }

json to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json to_json(const Occupation& occ) {
  json a = json::array();
  for (const auto& e : occ.entries()) a.push_back(json::array({e.mu, e.n, e.count}));
  return a;
}

namespace {

template <class T>
json fock_json(const FockVector<T>& v) {
  json a = json::array();
  for (const auto& [occ, c] : v.terms()) a.push_back(json{{"occupation", to_json(occ)}, {"coeff", to_json(c)}});
  return a;
}

}  // namespace

json to_json(const FockVector<Rational>& v) { return fock_json(v); }
json to_json(const FockVector<Complex>& v) { return fock_json(v); }

json to_json(const Momentum& p) {
  json a = json::array();
  for (const auto& x : p) a.push_back(x.to_string());
  return a;
}

json to_json(const Inertia& in) {
  return json{{"n_plus", in.n_plus}, {"n_zero", in.n_zero}, {"n_minus", in.n_minus}};
}

json to_json(const PhysicalLevelReport& r) {
  return json{{"d", r.d},
              {"level", r.level},
              {"r", to_json(r.r)},
              {"p", to_json(r.p)},
              {"dim_total", r.dim_total},
              {"dim_constrained", r.dim_constrained},
              {"dim_null", r.dim_null},
              {"dim_physical", r.dim_physical},
              {"inertia", to_json(r.inertia)},
              {"constrained_inertia", to_json(r.constrained_inertia)},
              {"route", r.route}};
}

json to_json(const BracketReport& r) {
  return json{{"m", r.m},
              {"n", r.n},
              {"d", r.d},
              {"probe_level", r.probe_level},
              {"probes", r.probes},
              {"matches_closure", r.matches_closure},
              {"central_coefficient", to_json(r.central_coefficient)},
              {"failure", r.failure}};
}

json to_json(const CcrReport& r) {
  return json{{"d", r.d},
              {"max_level", r.max_level},
              {"max_mode", r.max_mode},
              {"monomials", r.monomials},
              {"checks", r.checks},
              {"failures", r.failures},
              {"first_failure", r.first_failure}};
}

json to_json(const InvarianceReport& r) {
  return json{{"integral", r.integral}, {"transformed", r.transformed}, {"rel_err", r.rel_err}};
}

json to_json(const FiberReport& r) {
  return json{{"lhs", r.lhs},
              {"rhs", r.rhs},
              {"rel_err", r.rel_err},
              {"r_range", json::array({r.r_range.first, r.r_range.second})},
              {"charts", r.charts}};
}

json to_json(const GreensReport& r) {
  return json{{"times", r.times},
              {"sigma", r.sigma},
              {"max_deviation", r.max_deviation},
              {"rel_deviation", r.rel_deviation},
              {"pairing_direct", r.pairing_direct},
              {"sigma_vs_direct", r.sigma_vs_direct},
              {"coarse_delta", r.coarse_delta},
              {"grid_ok", r.grid_ok},
              {"warnings", r.warnings}};
}

json to_json(const DecayRow& r) {
  return json{{"radius", r.radius}, {"re", r.value.real()}, {"im", r.value.imag()}, {"reference_scale", r.reference_scale}};
}

json to_json(const ObservableReport& r) {
  return json{{"outside_component", r.outside_component},
              {"null_pairing", r.null_pairing},
              {"annihilator", r.annihilator},
              {"annihilator_scale", r.annihilator_scale},
              {"tolerance", r.tolerance},
              {"pass_i", r.pass_i},
              {"pass_ii", r.pass_ii},
              {"pass_iii", r.pass_iii},
              {"passed", r.passed()}};
}

Occupation occupation_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("occupation must be an array of [mu, n, count]");
  std::vector<Occupation::Entry> entries;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 3) throw std::invalid_argument("occupation entries are [mu, n, count]");
    const long long count = e[2].get<long long>();
    if (count < 0) throw std::invalid_argument("occupation count must be >= 0");
    entries.push_back({e[0].get<int>(), e[1].get<int>(), static_cast<unsigned>(count)});
  }
  return Occupation::from_entries(entries);
}

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_string()) return {Rational::parse(j.get<std::string>()).to_double(), 0.0};
  if (j.is_array() && j.size() == 2) return {complex_from_json(j[0]).real(), complex_from_json(j[1]).real()};
  throw std::invalid_argument("coefficient must be a number, a \"num/den\" string or [re, im]");
}

FockVector<Complex> fock_from_json(int d, const json& j) {
  if (!j.is_array()) throw std::invalid_argument("Fock vector must be an array of terms");
  FockBuilder<Complex> b(d);
  for (const auto& t : j) {
    if (!t.contains("occupation") || !t.contains("coeff"))
      throw std::invalid_argument("Fock terms need \"occupation\" and \"coeff\"");
    const Occupation occ = occupation_from_json(t.at("occupation"));
    for (const auto& e : occ.entries())
      if (e.mu < 0 || e.mu >= d || e.n < 1) throw std::invalid_argument("occupation label out of range");
    b.add(occ, complex_from_json(t.at("coeff")));
  }
  return b.finish();
}

TestFunctionSpec test_function_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("test function must be an object");
  TestFunctionSpec f;
  const std::string profile = j.value("profile", std::string("gaussian"));
  if (profile == "gaussian") f.profile = Profile::gaussian;
  else if (profile == "bump") f.profile = Profile::bump;
  else throw std::invalid_argument("profile must be \"gaussian\" or \"bump\"");
  f.center = j.at("center").get<std::vector<double>>();
  if (j.contains("width")) {
    const auto& w = j.at("width");
    f.width = w.is_number() ? std::vector<double>(f.center.size(), w.get<double>()) : w.get<std::vector<double>>();
  } else {
    f.width.assign(f.center.size(), 1.0);
  }
  if (j.contains("amplitude")) f.amplitude = complex_from_json(j.at("amplitude"));
  if (j.contains("polarization")) f.polarization = fock_from_json(f.d(), j.at("polarization"));
  validate(f);
  return f;
}

void write_csv(std::ostream& os, const std::vector<std::string>& header, const std::vector<std::vector<json>>& rows) {
  auto cell = [](const json& v) -> std::string {
    if (v.is_number_float()) {
      const double x = v.get<double>();
      return std::isfinite(x) ? format_double(x) : (std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf"));
    }
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return q + "\"";
    }
    return v.dump();
  };
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell(row[i]);
    os << '\n';
  }
}

}  // namespace stringlab
