#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "stringlab/fock.hpp"

namespace stringlab {

/// Center-of-mass momentum p^0..p^{d-1}, signature (-,+,...,+).
template <class T>
using MomentumT = std::vector<T>;
using Momentum = MomentumT<Rational>;

template <class T>
T minkowski_square(const MomentumT<T>& p) {
  T s{};
  for (std::size_t mu = 0; mu < p.size(); ++mu) s += (mu == 0 ? -(p[mu] * p[mu]) : p[mu] * p[mu]);
  return s;
}

std::string momentum_to_string(const Momentum& p);
/// Parses "a/b,c,d/e,..."; components beyond the given ones are zero up to d.
Momentum parse_momentum(const std::string& text, int d);
MomentumT<Complex> to_complex(const Momentum& p);

/// Adds L_m(p) applied to c * occ into `out`.
template <class T>
void apply_L_monomial(int m, const MomentumT<T>& p, const Occupation& occ, const T& c, FockBuilder<T>& out);

/// L_0 = p^2/2 + N and L_m = alpha_m . p + 1/2 sum_{n not in {0,m}} alpha_{m-n} . alpha_n.
template <class T>
FockVector<T> apply_L(int m, const MomentumT<T>& p, const FockVector<T>& v);

struct BracketReport {
  int m = 0;
  int n = 0;
  int d = 0;
  int probe_level = 0;
  std::size_t probes = 0;
  bool matches_closure = false;
  /// Common scalar c with ([L_m, L_n] - (m-n) L_{m+n}) v = c v on every probe.
  Rational central_coefficient;
  /// First offending probe when the residual is not a scalar multiple, else empty.
  std::string failure;
};

/// Checks [L_m, L_n] - (m-n) L_{m+n} on every PBW monomial up to probe_level.
BracketReport virasoro_bracket(int m, int n, const Momentum& p, int probe_level);

/// All pairs m < n with |m|, |n| <= mmax, sharing the per-probe work.
std::vector<BracketReport> virasoro_sweep(int mmax, const Momentum& p, int probe_level, bool include_zero = true);

/// Expected central term d (m^3 - m) / 12.
Rational expected_central_term(int d, int m);

enum class Sheet { plus, minus, any };

/// Rational p with p^2 = -r, nonzero only in p^0, p^1:
/// p^0 = (a + r/a)/2, p^1 = (a - r/a)/2 for the seed a > 0.
Momentum rational_shell_point(const Rational& r, int d, Sheet sheet = Sheet::plus, const Rational& seed = Rational(2));

}  // namespace stringlab
