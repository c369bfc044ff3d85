#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "stringlab/mass_shell.hpp"
#include "stringlab/propagator_locality.hpp"
#include "stringlab/simd.hpp"

using namespace stringlab;

namespace {

struct LevelGuard {
  simd::Level saved = simd::active_level();
  ~LevelGuard() { simd::set_level(saved); }
};

}  // namespace

TEST_CASE("AVX2 kernels match the scalar reference") {
  if (!simd::cpu_has_avx2()) {
    MESSAGE("CPU without AVX2/FMA: only the scalar kernels are exercised");
    return;
  }
  std::mt19937_64 rng(77);
  std::normal_distribution<double> u(0.0, 1.0);
  for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 100, 1023, 4096}) {
    std::vector<double> a(n), b(n), w(n), y(n);
    std::vector<std::complex<double>> ca(n), cb(n);
    double mag = 0.0, cmag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      w[i] = std::abs(u(rng));
      y[i] = u(rng);
      ca[i] = {u(rng), u(rng)};
      cb[i] = {u(rng), u(rng)};
      mag += std::abs(a[i] * b[i]);
      cmag += w[i] * std::abs(ca[i]) * std::abs(cb[i]);
    }
    CAPTURE(n);
    CHECK(std::abs(simd::avx2::dot(a.data(), b.data(), n) - simd::scalar::dot(a.data(), b.data(), n)) <=
          1e-14 * (1 + mag));
    CHECK(std::abs(simd::avx2::weighted_cdot(w.data(), ca.data(), cb.data(), n) -
                   simd::scalar::weighted_cdot(w.data(), ca.data(), cb.data(), n)) <= 1e-14 * (1 + cmag));
    auto y1 = y, y2 = y;
    simd::avx2::axpy(0.37, a.data(), y1.data(), n);
    simd::scalar::axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15 * (1 + std::abs(y2[i])));
  }
}

TEST_CASE("dispatch level can be forced and results agree end to end") {
  LevelGuard guard;
  simd::set_level(simd::Level::scalar);
  CHECK(simd::active_level() == simd::Level::scalar);
  TestFunctionSpec f, g;
  f.center = {0.0, 0.0};
  f.width = {1.0, 1.0};
  g.center = {1.5, 0.2};
  g.width = {0.8, 0.8};
  const std::vector<ShellSampling> ss{make_sampling(2, 1.0, 10.0, 10, 8)};
  const Complex c_scalar = smeared_commutator(f, g, ss);
  QuadratureSpec q;
  q.nodes = 64;
  q.box = {{-9, 9}, {-9, 9}};
  const auto gf = gaussian_function({0, 0, 0}, {1, 1, 1});
  const double i_scalar = integrate_energy_param(gf, {1.0, ShellRegion::plus_sheet, 3}, q);
  if (!simd::cpu_has_avx2()) {
    CHECK_THROWS(simd::set_level(simd::Level::avx2));
    return;
  }
  simd::set_level(simd::Level::avx2);
  CHECK(simd::active_level() == simd::Level::avx2);
  CHECK(std::abs(smeared_commutator(f, g, ss) - c_scalar) <= 1e-13 * std::abs(c_scalar));
  CHECK(integrate_energy_param(gf, {1.0, ShellRegion::plus_sheet, 3}, q) == doctest::Approx(i_scalar).epsilon(1e-13));
}
