#include "stringlab/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "stringlab/simd.hpp"

namespace stringlab {

double Rule::integrate(const std::function<double(double)>& f) const {
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = f(x[i]);
  return simd::dot(w.data(), v.data(), v.size());
}

namespace {

Rule build_gauss_legendre(int n) {
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return r;
}

}  // namespace

const Rule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<Rule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Rule>(build_gauss_legendre(n));
  return *slot;
}

Rule gauss_legendre(int n, double a, double b) {
  const Rule& ref = gauss_legendre(n);
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  const double h = 0.5 * (b - a), c = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    r.x[i] = c + h * ref.x[i];
    r.w[i] = h * ref.w[i];
  }
  return r;
}

Rule composite_gauss_legendre(int n, const std::vector<double>& breaks) {
  Rule r;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    Rule piece = gauss_legendre(n, breaks[p], breaks[p + 1]);
    r.x.insert(r.x.end(), piece.x.begin(), piece.x.end());
    r.w.insert(r.w.end(), piece.w.begin(), piece.w.end());
  }
  return r;
}

Rule composite_gauss_legendre(int n, double a, double b, int panels) {
  if (panels < 1) throw std::invalid_argument("composite_gauss_legendre: need at least one panel");
  std::vector<double> br(panels + 1);
  for (int i = 0; i <= panels; ++i) br[i] = a + (b - a) * i / panels;
  return composite_gauss_legendre(n, br);
}

Rule tanh_sinh(double a, double b, double h) {
  Rule r;
  const double half = 0.5 * (b - a);
  const double hp = 0.5 * std::numbers::pi;
  for (int k = -static_cast<int>(std::ceil(4.0 / h)); k <= static_cast<int>(std::ceil(4.0 / h)); ++k) {
    const double t = k * h;
    const double u = hp * std::sinh(t);
    const double ch = std::cosh(u);
    const double w = h * hp * std::cosh(t) / (ch * ch);
    // 1 - tanh(u) computed without cancellation
    const double e = std::exp(-2.0 * std::abs(u));
    const double one_minus = 2.0 * e / (1.0 + e);
    if (w * half < 1e-300 || one_minus == 0.0) continue;
    const double off = half * one_minus;
    const double x = (u >= 0) ? b - off : a + off;
    if (x <= a || x >= b) continue;
    r.x.push_back(x);
    r.w.push_back(w * half);
  }
  return r;
}

Rule sinh_sinh(double scale, double h) {
  Rule r;
  const double hp = 0.5 * std::numbers::pi;
  for (int k = -static_cast<int>(std::ceil(4.5 / h)); k <= static_cast<int>(std::ceil(4.5 / h)); ++k) {
    const double t = k * h;
    const double u = hp * std::sinh(t);
    const double x = scale * std::sinh(u);
    const double w = scale * h * hp * std::cosh(t) * std::cosh(u);
    if (!std::isfinite(x) || !std::isfinite(w)) continue;
    r.x.push_back(x);
    r.w.push_back(w);
  }
  return r;
}

}  // namespace stringlab
