#pragma once

#include <functional>
#include <vector>

namespace stringlab {

/// Nodes and weights of a one-dimensional rule.
struct Rule {
  std::vector<double> x;
  std::vector<double> w;

  std::size_t size() const noexcept { return x.size(); }
  double integrate(const std::function<double(double)>& f) const;
};

/// n-point Gauss-Legendre on [-1, 1] (cached per n, thread safe).
const Rule& gauss_legendre(int n);

/// n-point Gauss-Legendre mapped to [a, b].
Rule gauss_legendre(int n, double a, double b);

/// Gauss-Legendre with n nodes on each panel [breaks[i], breaks[i+1]].
Rule composite_gauss_legendre(int n, const std::vector<double>& breaks);

/// Uniform panels over [a, b].
Rule composite_gauss_legendre(int n, double a, double b, int panels);

/// Tanh-sinh rule on [a, b] with step h, truncated where weights underflow.
Rule tanh_sinh(double a, double b, double h = 1.0 / 32);

/// Sinh-sinh rule on the whole real line, x = scale * sinh(pi/2 sinh t).
Rule sinh_sinh(double scale = 1.0, double h = 1.0 / 32);

}  // namespace stringlab
