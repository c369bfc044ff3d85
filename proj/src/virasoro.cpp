#include "stringlab/virasoro.hpp"

#include <sstream>
#include <stdexcept>

namespace stringlab {

std::string momentum_to_string(const Momentum& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ',';
    s += p[i].is_integer() ? p[i].numerator_string() : p[i].to_string();
  }
  return s;
}

Momentum parse_momentum(const std::string& text, int d) {
  Momentum p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) p.push_back(Rational::parse(item));
  if (static_cast<int>(p.size()) > d) throw std::invalid_argument("momentum has more than d components");
  p.resize(d, Rational(0));
  return p;
}

MomentumT<Complex> to_complex(const Momentum& p) {
  MomentumT<Complex> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = Complex(p[i].to_double(), 0.0);
  return out;
}

template <class T>
void apply_L_monomial(int m, const MomentumT<T>& p, const Occupation& occ, const T& c, FockBuilder<T>& out) {
  using S = ScalarTraits<T>;
  const int d = static_cast<int>(p.size());
  const T half = S::from_rational(Rational(1, 2));
  if (m == 0) {
    out.add(occ, c * (half * minkowski_square(p) + S::from_int(occ.level())));
    return;
  }
  Occupation tmp, tmp2;
  if (m > 0) {
    // alpha_m . p
    for (int mu = 0; mu < d; ++mu) {
      if (S::is_zero(p[mu])) continue;
      const unsigned nm = occ.count(mu, m);
      if (nm == 0) continue;
      occ.shift_into(mu, m, -1, tmp);
      out.add(tmp, c * p[mu] * S::from_int(static_cast<long long>(m) * nm));
    }
    for (std::size_t i = 0; i < occ.distinct(); ++i) {
      const auto e = occ.entry(i);
      // Two annihilators alpha_a alpha_b, a + b = m, a < b (each unordered pair appears twice).
      const int b = e.n;
      const int a = m - b;
      if (a >= 1 && a < b) {
        const unsigned na = occ.count(e.mu, a);
        if (na) {
          occ.shift_into(e.mu, b, -1, tmp);
          tmp.shift_into(e.mu, a, -1, tmp2);
          out.add(tmp2, c * S::from_int(static_cast<long long>(eta(e.mu)) * a * b * na * e.count));
        }
      } else if (a == b && e.count >= 2) {
        occ.shift_into(e.mu, b, -2, tmp);
        out.add(tmp, c * half * S::from_int(static_cast<long long>(eta(e.mu)) * a * b * e.count * (e.count - 1)));
      }
      // alpha_{-(k-m)} alpha_k for k > m
      if (e.n > m) {
        occ.shift_into(e.mu, e.n, -1, tmp);
        tmp.shift_into(e.mu, e.n - m, +1, tmp2);
        out.add(tmp2, c * S::from_int(static_cast<long long>(e.n) * e.count));
      }
    }
    return;
  }
  const int M = -m;
  for (int mu = 0; mu < d; ++mu) {
    if (S::is_zero(p[mu])) continue;
    occ.shift_into(mu, M, +1, tmp);
    out.add(tmp, c * p[mu] * S::from_int(eta(mu)));
  }
  for (int a = 1; 2 * a <= M; ++a) {
    const int b = M - a;
    for (int mu = 0; mu < d; ++mu) {
      occ.shift_into(mu, a, +1, tmp);
      tmp.shift_into(mu, b, +1, tmp2);
      out.add(tmp2, a == b ? c * half * S::from_int(eta(mu)) : c * S::from_int(eta(mu)));
    }
  }
  for (std::size_t i = 0; i < occ.distinct(); ++i) {
    const auto e = occ.entry(i);
    occ.shift_into(e.mu, e.n, -1, tmp);
    tmp.shift_into(e.mu, e.n + M, +1, tmp2);
    out.add(tmp2, c * S::from_int(static_cast<long long>(e.n) * e.count));
  }
}

template <class T>
FockVector<T> apply_L(int m, const MomentumT<T>& p, const FockVector<T>& v) {
  if (static_cast<int>(p.size()) != v.d()) throw std::invalid_argument("apply_L: momentum dimension differs from Fock dimension");
  FockBuilder<T> b(v.d());
  b.reserve(v.size() * 4);
  for (const auto& [occ, c] : v.terms()) apply_L_monomial(m, p, occ, c, b);
  return b.finish();
}

Rational expected_central_term(int d, int m) {
  return Rational(static_cast<long long>(d) * (static_cast<long long>(m) * m * m - m), 12);
}

namespace {

// Residual r = c v for a single monomial probe; returns false if r is not such a multiple.
bool residual_scalar(const FockVector<Rational>& r, const Occupation& probe, Rational& c) {
  if (r.is_zero()) {
    c = 0;
    return true;
  }
  if (r.size() != 1 || !(r.terms().front().first == probe)) return false;
  c = r.terms().front().second;
  return true;
}

struct PairState {
  BracketReport report;
  bool have_c = false;
};

void sweep_probe(const Momentum& p, const Occupation& probe, int mmax, std::vector<PairState>& pairs) {
  const int d = static_cast<int>(p.size());
  const FockVector<Rational> v = FockVector<Rational>::monomial(d, probe);
  const int kmax = 2 * mmax;
  std::vector<FockVector<Rational>> single(2 * kmax + 1, FockVector<Rational>(d));
  for (int k = -kmax; k <= kmax; ++k) single[k + kmax] = apply_L(k, p, v);
  // double_[(a, b)] = L_a L_b v
  std::vector<FockVector<Rational>> dbl((2 * mmax + 1) * (2 * mmax + 1), FockVector<Rational>(d));
  std::vector<bool> have((2 * mmax + 1) * (2 * mmax + 1), false);
  auto get = [&](int a, int b) -> const FockVector<Rational>& {
    const std::size_t idx = static_cast<std::size_t>((a + mmax) * (2 * mmax + 1) + (b + mmax));
    if (!have[idx]) {
      dbl[idx] = apply_L(a, p, single[b + kmax]);
      have[idx] = true;
    }
    return dbl[idx];
  };
  for (auto& st : pairs) {
    if (!st.report.failure.empty()) continue;
    const int m = st.report.m, n = st.report.n;
    FockVector<Rational> r = get(m, n) - get(n, m);
    r -= Rational(m - n) * single[m + n + kmax];
    Rational c;
    if (!residual_scalar(r, probe, c) || (m + n != 0 && !c.is_zero())) {
      st.report.matches_closure = false;
      st.report.failure = "residual on probe " + probe.label() + " is not " +
                          (m + n != 0 ? std::string("zero") : std::string("a multiple of the probe"));
      continue;
    }
    if (!st.have_c) {
      st.report.central_coefficient = c;
      st.have_c = true;
    } else if (!(st.report.central_coefficient == c)) {
      st.report.matches_closure = false;
      st.report.failure = "central term differs on probe " + probe.label() + ": " + c.to_string() + " vs " +
                          st.report.central_coefficient.to_string();
      continue;
    }
    ++st.report.probes;
  }
}

std::vector<BracketReport> run_sweep(const std::vector<std::pair<int, int>>& mn, int mmax, const Momentum& p,
                                     int probe_level) {
  const int d = static_cast<int>(p.size());
  std::vector<PairState> pairs;
  for (auto [m, n] : mn) {
    PairState st;
    st.report.m = m;
    st.report.n = n;
    st.report.d = d;
    st.report.probe_level = probe_level;
    st.report.matches_closure = true;
    pairs.push_back(st);
  }
  for (int level = 0; level <= probe_level; ++level)
    for (const auto& occ : level_basis(d, level)) sweep_probe(p, occ, mmax, pairs);
  std::vector<BracketReport> out;
  for (auto& st : pairs) out.push_back(std::move(st.report));
  return out;
}

}  // namespace

BracketReport virasoro_bracket(int m, int n, const Momentum& p, int probe_level) {
  const int mmax = std::max(std::abs(m), std::abs(n));
  return run_sweep({{m, n}}, mmax, p, probe_level).front();
}

std::vector<BracketReport> virasoro_sweep(int mmax, const Momentum& p, int probe_level, bool include_zero) {
  std::vector<std::pair<int, int>> mn;
  for (int m = -mmax; m <= mmax; ++m)
    for (int n = m + 1; n <= mmax; ++n) {
      if (!include_zero && (m == 0 || n == 0)) continue;
      mn.emplace_back(m, n);
    }
  return run_sweep(mn, mmax, p, probe_level);
}

Momentum rational_shell_point(const Rational& r, int d, Sheet sheet, const Rational& seed) {
  if (d < 2) throw std::invalid_argument("rational_shell_point: need d >= 2");
  if (seed.sign() <= 0) throw std::invalid_argument("rational_shell_point: seed must be positive");
  Rational a = seed;
  // For r < 0 a larger seed keeps p^0 > 0.
  if (sheet != Sheet::any)
    while ((a * a + r).sign() <= 0) a += 1;
  Momentum p(d, Rational(0));
  p[0] = (a + r / a) / Rational(2);
  p[1] = (a - r / a) / Rational(2);
  if (sheet == Sheet::minus) {
    p[0] = -p[0];
    p[1] = -p[1];
  }
  return p;
}

template void apply_L_monomial<Rational>(int, const MomentumT<Rational>&, const Occupation&, const Rational&,
                                         FockBuilder<Rational>&);
template void apply_L_monomial<Complex>(int, const MomentumT<Complex>&, const Occupation&, const Complex&,
                                        FockBuilder<Complex>&);
template FockVector<Rational> apply_L<Rational>(int, const MomentumT<Rational>&, const FockVector<Rational>&);
template FockVector<Complex> apply_L<Complex>(int, const MomentumT<Complex>&, const FockVector<Complex>&);

}  // namespace stringlab
