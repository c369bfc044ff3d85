#include <doctest.h>

#include <random>

#include "stringlab/virasoro.hpp"

using namespace stringlab;

namespace {

using V = FockVector<Rational>;

V random_vector(std::mt19937_64& rng, int d, int max_level) {
  std::uniform_int_distribution<int> coeff(-3, 3);
  FockBuilder<Rational> b(d);
  for (int level = 0; level <= max_level; ++level)
    for (const auto& occ : level_basis(d, level))
      if (rng() % 4 == 0) b.add(occ, Rational(coeff(rng)));
  return b.finish();
}

Momentum momentum(std::initializer_list<Rational> p) { return Momentum(p); }

}  // namespace

TEST_CASE("rational shell points") {
  CHECK(rational_shell_point(Rational(0), 4) == momentum({1, 1, 0, 0}));
  CHECK(rational_shell_point(Rational(2), 3) == momentum({Rational(3, 2), Rational(1, 2), 0}));
  CHECK(rational_shell_point(Rational(-2), 3) == momentum({Rational(1, 2), Rational(3, 2), 0}));
  for (int r : {-2, 0, 2, 4, 6})
    for (int seed : {1, 2, 3, 7}) {
      const auto p = rational_shell_point(Rational(r), 5, Sheet::plus, Rational(seed));
      CHECK(minkowski_square(p) == Rational(-r));
      if (r >= 0) CHECK(p[0].sign() > 0);
    }
  const auto q = rational_shell_point(Rational(2), 3, Sheet::minus);
  CHECK(q[0].sign() < 0);
  CHECK(minkowski_square(q) == Rational(-2));
}

TEST_CASE("momentum text round trip") {
  const Momentum p = parse_momentum("3/2,1/2", 4);
  CHECK(p == momentum({Rational(3, 2), Rational(1, 2), 0, 0}));
  CHECK(parse_momentum(momentum_to_string(p), 4) == p);
}

TEST_CASE("L_m on simple states") {
  const int d = 4;
  const Momentum p = momentum({Rational(3, 2), Rational(1, 2), Rational(1, 3), 0});
  CHECK(apply_L(1, p, V::vacuum(d)).is_zero());
  // L_1 alpha_{-1}^nu Omega = p^nu Omega.
  for (int nu = 0; nu < d; ++nu)
    CHECK(apply_L(1, p, V::monomial(d, Occupation::single(nu, 1))) == V::vacuum(d, p[static_cast<std::size_t>(nu)]));
  // Tachyon: (L_0 - 1) Omega = 0 exactly when p^2 = 2.
  const Momentum t = rational_shell_point(Rational(-2), d);
  CHECK(apply_L(0, t, V::vacuum(d)) == V::vacuum(d));
  const Momentum u = rational_shell_point(Rational(0), d);
  CHECK_FALSE(apply_L(0, u, V::vacuum(d)) == V::vacuum(d));
  // L_{-1} Omega = p . alpha_{-1} Omega.
  FockBuilder<Rational> b(d);
  for (int mu = 0; mu < d; ++mu) b.add(Occupation::single(mu, 1), Rational(eta(mu)) * p[static_cast<std::size_t>(mu)]);
  CHECK(apply_L(-1, p, V::vacuum(d)) == b.finish());
}

TEST_CASE("L_m lowers the level by m") {
  std::mt19937_64 rng(3);
  const int d = 3;
  const Momentum p = rational_shell_point(Rational(2), d);
  for (int level = 0; level <= 4; ++level)
    for (const auto& occ : level_basis(d, level))
      for (int m = -3; m <= 3; ++m) {
        const auto w = apply_L(m, p, V::monomial(d, occ));
        if (!w.is_zero()) CHECK(w.homogeneous_level() == std::optional<int>(level - m));
      }
}

TEST_CASE("L_{-m} is the adjoint of L_m") {
  std::mt19937_64 rng(17);
  const int d = 4;
  const Momentum p = momentum({Rational(5, 3), Rational(1, 2), Rational(-2, 7), 1});
  for (int trial = 0; trial < 6; ++trial) {
    const auto v = random_vector(rng, d, 4), w = random_vector(rng, d, 4);
    for (int m = -3; m <= 3; ++m)
      CHECK(inner_indefinite(apply_L(-m, p, v), w) == inner_indefinite(v, apply_L(m, p, w)));
  }
}

TEST_CASE("bracket examples") {
  const int d = 26;
  const Momentum p = rational_shell_point(Rational(2), d);
  const auto a = virasoro_bracket(1, -1, p, 3);
  CHECK(a.matches_closure);
  CHECK(a.central_coefficient.is_zero());
  const auto b = virasoro_bracket(1, 2, p, 3);
  CHECK(b.matches_closure);
  CHECK(b.central_coefficient.is_zero());
  const auto c = virasoro_bracket(2, -2, p, 3);
  CHECK(c.matches_closure);
  CHECK(c.central_coefficient == Rational(13));
  CHECK(c.failure.empty());
}

TEST_CASE("central term is linear in d") {
  for (int m = 1; m <= 3; ++m) {
    std::vector<Rational> per_d;
    for (int d : {2, 3, 5}) {
      const auto rep = virasoro_bracket(m, -m, rational_shell_point(Rational(0), d), 2);
      REQUIRE(rep.matches_closure);
      CHECK(rep.central_coefficient == expected_central_term(d, m));
      per_d.push_back(rep.central_coefficient / Rational(d));
    }
    CHECK(per_d[0] == per_d[1]);
    CHECK(per_d[1] == per_d[2]);
  }
}

TEST_CASE("sweep covers all pairs and closes") {
  const int d = 3;
  const auto reps = virasoro_sweep(2, rational_shell_point(Rational(4), d), 3);
  CHECK(reps.size() == 10);
  for (const auto& r : reps) {
    CAPTURE(r.m);
    CAPTURE(r.n);
    CHECK(r.m < r.n);
    CHECK(r.matches_closure);
    CHECK(r.central_coefficient == (r.m + r.n == 0 ? expected_central_term(d, r.m) : Rational(0)));
  }
}

TEST_CASE("bracket results do not depend on the momentum") {
  const int d = 3;
  for (const Momentum& p : {rational_shell_point(Rational(2), d), momentum({Rational(1, 5), Rational(-3), Rational(7, 2)})}) {
    const auto r = virasoro_bracket(3, -3, p, 3);
    CHECK(r.matches_closure);
    CHECK(r.central_coefficient == Rational(6));
  }
}
