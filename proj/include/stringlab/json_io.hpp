#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "stringlab/fock.hpp"
#include "stringlab/mass_shell.hpp"
#include "stringlab/metric_linalg.hpp"
#include "stringlab/physical_spectrum.hpp"
#include "stringlab/propagator_locality.hpp"
#include "stringlab/string_field.hpp"
#include "stringlab/virasoro.hpp"

namespace stringlab {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Serializes with every float printed as %.17g. Key order is insertion order.
std::string dump(const json& j, int indent = 2);

json to_json(const Rational& q);
json to_json(const Complex& z);
json to_json(const Occupation& occ);
json to_json(const FockVector<Rational>& v);
json to_json(const FockVector<Complex>& v);
json to_json(const Momentum& p);
json to_json(const Inertia& in);
json to_json(const PhysicalLevelReport& r);
json to_json(const BracketReport& r);
json to_json(const CcrReport& r);
json to_json(const InvarianceReport& r);
json to_json(const FiberReport& r);
json to_json(const GreensReport& r);
json to_json(const DecayRow& r);
json to_json(const ObservableReport& r);

/// Inverse of to_json(Occupation): sorted [mu, n, count] triples.
Occupation occupation_from_json(const json& j);

/// Complex coefficients may be a number, [re, im], or a "num/den" string.
Complex complex_from_json(const json& j);

/// [{"occupation": [[mu, n, count], ...], "coeff": ...}, ...]
FockVector<Complex> fock_from_json(int d, const json& j);

/// {"profile": "gaussian"|"bump", "center": [...], "width": [...], "amplitude": c, "polarization": [...]}
TestFunctionSpec test_function_from_json(const json& j);

/// One row per line, header first; floats as %.17g, strings quoted when they contain a comma.
void write_csv(std::ostream& os, const std::vector<std::string>& header, const std::vector<std::vector<json>>& rows);

std::string format_double(double x);

}  // namespace stringlab
