#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stringlab/matrix.hpp"
#include "stringlab/quadrature.hpp"

namespace stringlab {

enum class ShellRegion { plus_sheet, minus_sheet, lightcone_plus, lightcone_minus };

struct ShellSpec {
  double r = 0.0;
  ShellRegion region = ShellRegion::plus_sheet;
  int d = 2;
};

enum class QuadRule { gauss_legendre, tanh_sinh };

/// Tensor rule over a box. For the energy parametrization the box has d-1 axes (p^1..p^{d-1});
/// for the light-cone parametrization it has d-2 transverse axes followed by the p^+ axis.
struct QuadratureSpec {
  QuadRule rule = QuadRule::gauss_legendre;
  int nodes = 64;
  int panels = 1;
  std::vector<std::pair<double, double>> box;
};

/// Integrand on momentum space; receives p^0..p^{d-1}.
using MomentumFunction = std::function<double(std::span<const double>)>;

/// One-dimensional rule for an axis of the spec.
Rule axis_rule(const QuadratureSpec& q, double a, double b);

/// sum over the tensor grid of w * f(x); the innermost axis is reduced with the SIMD dot kernel.
double tensor_integrate(const std::vector<Rule>& axes, const std::function<double(std::span<const double>)>& f);

/// omega_r(p) = sqrt(|p|^2 + r).
double omega(std::span<const double> spatial, double r);

/// Integral of f(+-omega, p) dp / (2 omega) over the spatial box.
double integrate_energy_param(const MomentumFunction& f, const ShellSpec& shell, const QuadratureSpec& quad);

/// Integral of f dp~ dp+ / (2|p+|) with p- = (|p~|^2 + r) / (2 p+), p^{+-} = (p^0 +- p^{d-1}) / sqrt 2.
/// A p+ range touching zero adds a message to `warnings`.
double integrate_lightcone_param(const MomentumFunction& f, const ShellSpec& shell, const QuadratureSpec& quad,
                                 std::vector<std::string>* warnings = nullptr);

/// Dispatches on shell.region.
double integrate_shell(const MomentumFunction& f, const ShellSpec& shell, const QuadratureSpec& quad);

struct InvarianceReport {
  double integral = 0.0;
  double transformed = 0.0;
  double rel_err = 0.0;
};

/// Compares the shell integrals of f and of f o Lambda.
InvarianceReport check_invariance(const MomentumFunction& f, const ShellSpec& shell, const Matrix<double>& L,
                                  const QuadratureSpec& quad);

struct FiberReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_err = 0.0;
  std::pair<double, double> r_range;
  int charts = 0;
};

/// Lebesgue integral of f over `support` (d axes) against the iterated integral over r of the
/// shell integrals. The shells are covered by the 4(d-1) light-cone charts u = s (p^0 + t p^j) / sqrt 2 > 0
/// with a smooth partition of unity, so negative-r fibres are handled too.
/// When r_range is not given it is computed from the support box.
FiberReport fiber_decomposition_check(const MomentumFunction& f, const std::vector<std::pair<double, double>>& support,
                                      int nodes, std::optional<std::pair<double, double>> r_range = std::nullopt,
                                      QuadRule rule = QuadRule::gauss_legendre);

/// Smooth compact bump exp(-1/(1-t^2)) on |t| < 1.
double bump1(double t);

/// Product of bumps centred at c with half-widths w.
MomentumFunction bump_function(std::vector<double> center, std::vector<double> width);

/// exp(-sum ((p_i - c_i)/w_i)^2).
MomentumFunction gaussian_function(std::vector<double> center, std::vector<double> width);

}  // namespace stringlab
