#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <set>

#include "stringlab/fock.hpp"

using namespace stringlab;

namespace {

using V = FockVector<Rational>;

V mono(int d, std::initializer_list<Occupation::Entry> e, Rational c = 1) {
  return V::monomial(d, Occupation::from_entries(e), c);
}

V random_vector(std::mt19937_64& rng, int d, int max_level) {
  std::uniform_int_distribution<int> coeff(-3, 3);
  FockBuilder<Rational> b(d);
  for (int level = 0; level <= max_level; ++level)
    for (const auto& occ : level_basis(d, level))
      if (rng() % 3 == 0) b.add(occ, Rational(coeff(rng)));
  return b.finish();
}

// Multisets of (mu, n) with sum n = level, enumerated directly.
std::size_t brute_count(int d, int level) {
  std::set<std::vector<std::pair<int, int>>> seen;
  std::vector<std::pair<int, int>> cur;
  std::function<void(int, int, int)> rec = [&](int remaining, int min_n, int min_mu) {
    if (remaining == 0) {
      seen.insert(cur);
      return;
    }
    for (int n = min_n; n <= remaining; ++n)
      for (int mu = (n == min_n ? min_mu : 0); mu < d; ++mu) {
        cur.push_back({n, mu});
        rec(remaining - n, n, mu);
        cur.pop_back();
      }
  };
  rec(level, 1, 0);
  return seen.size();
}

}  // namespace

TEST_CASE("oscillator action examples") {
  const int d = 4;
  CHECK(apply_alpha(0, 1, V::vacuum(d)).is_zero());
  CHECK(apply_alpha(1, 1, mono(d, {{1, 1, 1}})) == V::vacuum(d));
  CHECK(apply_alpha(0, 2, mono(d, {{0, 2, 1}})) == V::vacuum(d, Rational(-2)));
  CHECK(apply_alpha(2, -1, V::vacuum(d)) == mono(d, {{2, 1, 1}}));
  CHECK(apply_alpha(2, -1, mono(d, {{2, 1, 1}})) == mono(d, {{2, 1, 2}}));
  CHECK(apply_alpha(2, 1, mono(d, {{2, 1, 3}})) == mono(d, {{2, 1, 2}}, 3));
}

TEST_CASE("inner product examples") {
  const int d = 26;
  CHECK(inner_indefinite(mono(d, {{0, 1, 1}}), mono(d, {{0, 1, 1}})) == Rational(-1));
  CHECK(inner_indefinite(mono(d, {{1, 2, 1}}), mono(d, {{1, 2, 1}})) == Rational(2));
  CHECK(inner_indefinite(V::vacuum(d), V::vacuum(d)) == Rational(1));
  CHECK(inner_definite(mono(d, {{0, 1, 1}}), mono(d, {{0, 1, 1}})) == Rational(1));
  CHECK(inner_definite(mono(d, {{0, 1, 1}}), mono(d, {{1, 1, 1}})).is_zero());
  // (alpha_{-1}^0)^2: 2! eta^2 = 2.
  CHECK(inner_indefinite(mono(d, {{0, 1, 2}}), mono(d, {{0, 1, 2}})) == Rational(2));
  CHECK(monomial_norm(Occupation::from_entries({{0, 1, 3}, {2, 2, 1}}), true) == Rational(-12));
  CHECK(monomial_norm(Occupation::from_entries({{0, 1, 3}, {2, 2, 1}}), false) == Rational(12));
}

TEST_CASE("complex pairing is antilinear in the first slot") {
  const int d = 3;
  const auto v = to_complex(mono(d, {{1, 1, 1}}));
  const Complex i(0, 1);
  CHECK(inner_indefinite(i * v, v) == -i);
  CHECK(inner_indefinite(v, i * v) == i);
}

TEST_CASE("number and mass operators") {
  const int d = 26;
  CHECK(number_op(V::vacuum(d)).is_zero());
  const auto v = mono(d, {{1, 2, 1}, {0, 1, 1}});
  CHECK(number_op(v) == Rational(3) * v);
  CHECK(number_op(mono(d, {{0, 1, 1}})) == mono(d, {{0, 1, 1}}));
  CHECK(mass_squared(V::vacuum(d)) == V::vacuum(d, Rational(-2)));
  CHECK(mass_squared(mono(d, {{5, 1, 1}})).is_zero());
  CHECK(mass_squared(mono(d, {{3, 3, 1}})) == Rational(4) * mono(d, {{3, 3, 1}}));
}

TEST_CASE("level basis sizes") {
  CHECK(level_basis(26, 0).size() == 1);
  CHECK(level_basis(26, 0).front().empty());
  CHECK(level_basis(26, 1).size() == 26);
  CHECK(level_basis(26, 2).size() == 377);
  for (int d = 1; d <= 4; ++d)
    for (int level = 0; level <= 5; ++level) {
      CAPTURE(d);
      CAPTURE(level);
      const auto basis = level_basis(d, level);
      CHECK(basis.size() == brute_count(d, level));
      CHECK(basis.size() == colored_partition_count(d, level));
      for (const auto& occ : basis) CHECK(occ.level() == level);
      CHECK(std::is_sorted(basis.begin(), basis.end()));
    }
}

TEST_CASE("number operator is diagonal on the level basis") {
  for (int level = 0; level <= 4; ++level)
    for (const auto& occ : level_basis(3, level)) {
      const auto v = V::monomial(3, occ);
      CHECK(number_op(v) == Rational(level) * v);
      CHECK(mass_squared(v) == Rational(2 * (level - 1)) * v);
    }
}

TEST_CASE("canonical commutation relations on monomials") {
  const auto rep = oscillator_ccr_check(3, 5, 4, 2);
  CHECK(rep.failures == 0);
  CHECK(rep.checks > 0);
  CHECK(rep.first_failure.empty());
}

TEST_CASE("canonical commutation relations on random vectors") {
  std::mt19937_64 rng(5);
  const int d = 4;
  for (int trial = 0; trial < 10; ++trial) {
    const auto v = random_vector(rng, d, 3);
    for (int m : {-2, -1, 1, 2})
      for (int n : {-2, -1, 1, 2})
        for (int mu = 0; mu < d; ++mu)
          for (int nu = 0; nu < d; ++nu) {
            const auto lhs = apply_alpha(mu, m, apply_alpha(nu, n, v)) - apply_alpha(nu, n, apply_alpha(mu, m, v));
            const Rational c = (m + n == 0 && mu == nu) ? Rational(m * eta(mu)) : Rational(0);
            CHECK(lhs == c * v);
          }
  }
}

TEST_CASE("alpha_{-n} is the adjoint of alpha_n") {
  std::mt19937_64 rng(11);
  const int d = 3;
  for (int trial = 0; trial < 10; ++trial) {
    const auto v = random_vector(rng, d, 3), w = random_vector(rng, d, 3);
    for (int n = 1; n <= 3; ++n)
      for (int mu = 0; mu < d; ++mu)
        CHECK(inner_indefinite(apply_alpha(mu, -n, v), w) == inner_indefinite(v, apply_alpha(mu, n, w)));
  }
}

TEST_CASE("indefinite pairing is the definite one twisted by J") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const auto v = random_vector(rng, 3, 3), w = random_vector(rng, 3, 3);
    CHECK(inner_indefinite(v, w) == inner_definite(v, metric_J(w)));
    CHECK(metric_J(metric_J(v)) == v);
    if (!v.is_zero()) CHECK(inner_definite(v, v).sign() > 0);
  }
}

TEST_CASE("operator application does not truncate") {
  auto v = mono(2, {{1, 4, 1}});
  for (int k = 0; k < 5; ++k) v = apply_alpha(0, -3, v);
  CHECK(v.max_level() == 19);
}

TEST_CASE("invalid dimensions are rejected") {
  CHECK_THROWS_AS(V(0), std::invalid_argument);
  CHECK_THROWS_AS(V::monomial(2, Occupation::single(3, 1)), std::invalid_argument);
}

TEST_CASE("worldsheet commutator smearing") {
  const double pi = std::numbers::pi;
  auto c = [](double) { return 1.0 / std::numbers::pi; };
  for (int k : {0, 1, 5}) CHECK(worldsheet_ccr_partial(k, c, c) == doctest::Approx(1.0).epsilon(1e-12));
  auto cs = [](double s) { return std::cos(s); };
  CHECK(std::abs(worldsheet_ccr_partial(0, cs, cs)) < 1e-12);
  CHECK(worldsheet_ccr_partial(1, cs, cs) == doctest::Approx(pi * pi / 2).epsilon(1e-12));
  CHECK(worldsheet_ccr_partial(4, cs, cs) == doctest::Approx(pi * pi / 2).epsilon(1e-12));

  auto f = [](double s) { return std::exp(-std::pow((s - 1.2) / 0.4, 2)); };
  auto g = [](double s) { return std::exp(-std::pow((s - 1.5) / 0.5, 2)); };
  const double oracle =
      pi * boost::math::quadrature::gauss_kronrod<double, 61>::integrate([&](double s) { return f(s) * g(s); }, 0.0, pi,
                                                                        10, 1e-14);
  CHECK(worldsheet_ccr_partial(64, f, g) == doctest::Approx(oracle).epsilon(1e-6));
}
