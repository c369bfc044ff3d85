#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stringlab/lorentz.hpp"
#include "stringlab/mass_shell.hpp"
#include "stringlab/metric_linalg.hpp"
#include "stringlab/string_field.hpp"

using namespace stringlab;

namespace {

FockVector<Complex> level1(int d, std::initializer_list<std::pair<int, Complex>> terms) {
  FockBuilder<Complex> b(d);
  for (const auto& [mu, c] : terms) b.add(Occupation::single(mu, 1), c);
  return b.finish();
}

double norm(const MultiStringState& a) {
  double s = 0.0;
  for (const auto& [k, c] : a.terms) s += std::norm(c);
  return std::sqrt(s);
}

// Level-1 polarization p^2 a^0 - p^0 a^2, which satisfies L_1 on V_0.
FockVector<Complex> transverse_psi(std::span<const double> p) {
  const double amp = bump1(std::hypot(p[1] - 1.0, p[2] - 0.5, p[3]));
  FockBuilder<Complex> b(4);
  if (amp != 0.0) {
    b.add(Occupation::single(0, 1), amp * p[2]);
    b.add(Occupation::single(2, 1), -amp * p[0]);
  }
  return b.finish();
}

double chi(double s) { return bump1(s / 4) / bump1(0.0); }

std::vector<double> on_shell(double r, std::vector<double> spatial) {
  double w = r;
  for (double x : spatial) w += x * x;
  spatial.insert(spatial.begin(), std::sqrt(w));
  return spatial;
}

double fock_diff(const FockVector<Complex>& a, const FockVector<Complex>& b) {
  double m = 0.0;
  for (const auto& [o, c] : (a - b).terms()) m = std::max(m, std::abs(c));
  return m;
}

struct Setup {
  DiscretizedSingleString s = lightlike_orbit_string(4, 3);
  MomentumTestFunction F = orbit_bump_test_function(level1(4, {{2, {1.0, 0.2}}, {0, {0.3, 0.0}}}), 0.0);
  MomentumTestFunction G = orbit_bump_test_function(level1(4, {{1, {0.5, -0.4}}, {2, {0.2, 1.0}}}), 0.5);
  std::vector<Complex> f = discretize(F, s), g = discretize(G, s);
};

}  // namespace

TEST_CASE("single-string discretization invariants") {
  const auto s = lightlike_orbit_string(4, 2);
  CHECK(s.nodes().size() == 10);
  CHECK(s.size() == 40);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) CHECK(std::abs(s.gram()(i, j) - std::conj(s.gram()(j, i))) < 1e-15);
  CHECK_THROWS_AS(DiscretizedSingleString(4, s.nodes(), s.elements(), 16), std::invalid_argument);
  std::vector<ShellNode> tachyon{{{0.5, 1.5, 0.0, 0.0}, -2.0, 1.0, std::nullopt}};
  CHECK_THROWS_AS(DiscretizedSingleString(4, tachyon, {}), std::invalid_argument);
  // A level-2 value is not in the span of the level-1 elements at a node.
  const auto v = FockVector<Complex>::monomial(4, Occupation::single(1, 2));
  CHECK_THROWS_WITH_AS(s.node_coordinates(0, v), doctest::Contains("basis mismatch"), std::invalid_argument);
}

TEST_CASE("field on the vacuum and the two-point function") {
  Setup x;
  const auto vac = MultiStringState::vacuum();
  const auto one = field_apply(x.s, x.f, vac);
  for (const auto& [k, c] : one.terms) {
    REQUIRE(k.size() == 1);
    CHECK(std::abs(c - x.f[k[0]]) < 1e-15);
  }
  const auto two = field_apply(x.s, x.f, field_apply(x.s, x.g, vac));
  CHECK(std::abs(inner(x.s, vac, two) - x.s.pairing(x.f, x.g)) < 1e-14);
  // Odd numbers of fields have zero vacuum expectation.
  CHECK(std::abs(inner(x.s, vac, one)) == 0.0);
  const auto three = field_apply(x.s, x.f, two);
  CHECK(std::abs(inner(x.s, vac, three)) == 0.0);
}

TEST_CASE("field operator is symmetric for the indefinite pairing") {
  Setup x;
  const auto probes = probe_battery(x.s, 3, 8, 41);
  for (const auto& a : probes)
    for (const auto& b : probes) {
      const Complex lhs = inner(x.s, field_apply(x.s, x.f, a), b);
      const Complex rhs = inner(x.s, a, field_apply(x.s, x.f, b));
      CHECK(std::abs(lhs - rhs) <= 1e-12 * (1 + std::abs(lhs)));
    }
}

TEST_CASE("field commutator residuals") {
  Setup x;
  for (const auto& psi : probe_battery(x.s, 3, 10, 7)) {
    CHECK(field_commutator_residual(x.s, x.f, x.g, psi) <= 1e-10);
    CHECK(field_commutator_residual(x.s, x.f, x.f, psi) <= 1e-14);
  }
  // <f, i f> = i <f, f>: the commutator on the vacuum is 2i <f, f>.
  std::vector<Complex> h(x.f.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = Complex(0, 1) * x.f[i];
  const auto vac = MultiStringState::vacuum();
  const auto comm = field_apply(x.s, x.f, field_apply(x.s, h, vac)) - field_apply(x.s, h, field_apply(x.s, x.f, vac));
  const Complex ff = x.s.pairing(x.f, x.f);
  CHECK(std::abs(ff.imag()) < 1e-15);
  auto expect = Complex(0, 2) * ff * vac;
  auto diff = comm - expect;
  diff.prune(1e-15);
  CHECK(norm(diff) <= 1e-14 * std::abs(ff));
}

TEST_CASE("Poincare action") {
  Setup x;
  const auto probes = probe_battery(x.s, 2, 6, 3);
  const double zero[4] = {0, 0, 0, 0};
  for (const auto& psi : probes) {
    auto d = poincare_act(x.s, zero, Matrix<double>::identity(4), psi) - psi;
    d.prune(1e-15);
    CHECK(d.terms.empty());
  }
  const double a[4] = {0.3, -0.2, 0.7, 0.1};
  for (std::size_t e = 0; e < x.s.size(); e += 5) {
    const auto& p = x.s.nodes()[x.s.elements()[e].node].p;
    const double pa = -p[0] * a[0] + p[1] * a[1] + p[2] * a[2] + p[3] * a[3];
    const auto out = poincare_act(x.s, a, Matrix<double>::identity(4), MultiStringState::one({static_cast<std::uint16_t>(e)}));
    REQUIRE(out.terms.size() == 1);
    CHECK(std::abs(out.terms.begin()->second - std::exp(Complex(0, -pa))) < 1e-14);
  }
  // The orbit ends leave the node set.
  const auto L = to_double(orbit_boost(4));
  const std::uint16_t last = static_cast<std::uint16_t>(x.s.size() - 1);
  bool threw = false;
  for (std::uint16_t e : {std::uint16_t{0}, last}) {
    try {
      poincare_act(x.s, zero, L, MultiStringState::one({e}));
    } catch (const std::invalid_argument&) {
      threw = true;
    }
  }
  CHECK(threw);
}

TEST_CASE("Poincare action preserves the pairing") {
  Setup x;
  const auto L = to_double(orbit_boost(4));
  const double a[4] = {0.3, -0.2, 0.7, 0.1};
  const auto probes = covariance_probes(x.s, lorentz_inverse(L), 2, 6, 5);
  for (const auto& u : probes)
    for (const auto& v : probes) {
      const Complex before = inner(x.s, u, v);
      const Complex after = inner(x.s, poincare_act(x.s, a, L, u), poincare_act(x.s, a, L, v));
      CHECK(std::abs(before - after) <= 1e-12 * (1 + std::abs(before)));
    }
}

TEST_CASE("covariance of the field") {
  Setup x;
  const auto L = to_double(orbit_boost(4));
  const double a[4] = {0.3, -0.2, 0.7, 0.1};
  const auto probes = covariance_probes(x.s, L, 3, 6, 8);
  CHECK(probes.size() == 6);
  for (const auto& psi : probes) CHECK(covariance_residual(x.s, x.F, a, L, psi) <= 1e-8);
}

TEST_CASE("constrained test functions") {
  const std::vector<std::vector<double>> checks{on_shell(0.0, {1.0, 0.5, 0.0}), on_shell(0.0, {0.5, 0.8, 0.3}),
                                                on_shell(0.0, {1.4, 0.2, -0.5})};
  const auto F = constrained_test_function(4, 0.0, transverse_psi, chi, checks);
  const double root = std::sqrt(2 * std::numbers::pi);
  for (auto sp : {std::vector<double>{1.1, 0.4, 0.2}, {0.7, 0.9, -0.3}, {-1.0, -0.5, 0.1}, {1.3, 0.6, 0.6}}) {
    const auto p = on_shell(0.0, sp);
    const auto v = F(p);
    // L_1 kills the on-shell value.
    const MomentumT<Complex> pc(p.begin(), p.end());
    CHECK(apply_L<Complex>(1, pc, v).terms().size() <= 1);
    for (const auto& [o, c] : apply_L<Complex>(1, pc, v).terms()) CHECK(std::abs(c) < 1e-14);
    // chi(0) = 1 reproduces psi0 + C1 psi0(-p) on the shell.
    std::vector<double> refl = p;
    for (std::size_t i = 1; i < refl.size(); ++i) refl[i] = -refl[i];
    const auto expect = transverse_psi(p) + conjugation(ConjugationKind::C1, transverse_psi(refl));
    CHECK(fock_diff(root * v, expect) < 1e-14);
    // C1 reality.
    CHECK(fock_diff(conjugation(ConjugationKind::C1, v), F(refl)) < 1e-14);
  }
  // Off the shell the value is damped by chi.
  auto off = on_shell(0.0, {1.0, 0.5, 0.0});
  off[0] += 3.0;
  CHECK(F(off).is_zero());

  auto bad = [](std::span<const double> p) {
    return FockVector<Complex>::monomial(4, Occupation::single(0, 1), Complex(bump1(std::hypot(p[1] - 1.0, p[2] - 0.5, p[3])), 0.0));
  };
  CHECK_THROWS_AS(constrained_test_function(4, 0.0, bad, chi, checks), std::invalid_argument);
  CHECK_THROWS_AS(constrained_test_function(4, 0.0, transverse_psi, [](double s) { return 2 * chi(s); }, checks),
                  std::invalid_argument);
  CHECK_THROWS_AS(constrained_test_function(4, -2.0, transverse_psi, chi, checks), std::invalid_argument);
}

TEST_CASE("observable lift at d = 26") {
  const auto s = observable_string_d26();
  const auto pp = prime_probes(s, 2, 8, 11);
  const auto np = null_probes(s, 2, 8, 12);
  // Null probes are orthogonal to every prime probe.
  for (const auto& n : np)
    for (const auto& p : pp) CHECK(std::abs(inner(s, p, n)) < 1e-12);
  const auto rep = observable_lift_check(s, observable_test_function(s), pp, np);
  CHECK(rep.pass_i);
  CHECK(rep.pass_ii);
  CHECK(rep.pass_iii);
  CHECK(rep.annihilator_scale > 0.1);
  const auto control = observable_lift_check(s, unconstrained_test_function(s), pp, np);
  CHECK_FALSE(control.pass_i);
  // Vacuum probe alone is preserved.
  const auto vac = observable_lift_check(s, observable_test_function(s), {MultiStringState::vacuum()}, {});
  CHECK(vac.pass_i);
}

TEST_CASE("physical multi-string Gram is positive with the lifted radical as kernel") {
  const auto s = observable_string_d26(1, 2, 1);
  std::vector<std::uint16_t> phys, null;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.elements()[i].kind == ElementKind::physical) phys.push_back(static_cast<std::uint16_t>(i));
    if (s.elements()[i].kind == ElementKind::null) null.push_back(static_cast<std::uint16_t>(i));
  }
  REQUIRE_FALSE(phys.empty());
  REQUIRE_FALSE(null.empty());
  std::vector<std::uint16_t> pool = phys;
  pool.insert(pool.end(), null.begin(), null.end());
  std::sort(pool.begin(), pool.end());
  std::vector<MultiStringState> family{MultiStringState::vacuum()};
  std::size_t with_null = 0;
  auto is_null = [&](std::uint16_t e) { return std::find(null.begin(), null.end(), e) != null.end(); };
  for (std::size_t i = 0; i < pool.size(); ++i) {
    family.push_back(MultiStringState::one({pool[i]}));
    with_null += is_null(pool[i]);
    for (std::size_t j = i; j < pool.size(); ++j) {
      family.push_back(MultiStringState::one({pool[i], pool[j]}));
      with_null += is_null(pool[i]) || is_null(pool[j]);
    }
  }
  Matrix<Complex> g(family.size(), family.size());
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i; j < family.size(); ++j) {
      g(i, j) = inner(s, family[i], family[j]);
      g(j, i) = std::conj(g(i, j));
    }
  const Inertia in = inertia(g, Tolerance{1e-9});
  CHECK(in.n_minus == 0);
  CHECK(in.n_zero == with_null);
  CHECK(in.n_plus == family.size() - with_null);
}

TEST_CASE("multi-string states are symmetric") {
  auto a = MultiStringState::one({3, 1, 2});
  auto b = MultiStringState::one({2, 3, 1});
  auto d = a - b;
  d.prune();
  CHECK(d.terms.empty());
  CHECK(a.max_quanta() == 3);
}
