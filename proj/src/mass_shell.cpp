#include "stringlab/mass_shell.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "stringlab/lorentz.hpp"
#include "stringlab/simd.hpp"

namespace stringlab {

Rule axis_rule(const QuadratureSpec& q, double a, double b) {
  if (!(b > a)) throw std::invalid_argument("quadrature box axis must have a < b");
  if (q.rule == QuadRule::tanh_sinh) {
    if (q.nodes < 1) throw std::invalid_argument("tanh-sinh needs nodes >= 1");
    // nodes per unit of t; the rule is truncated where weights underflow.
    return tanh_sinh(a, b, 1.0 / q.nodes);
  }
  if (q.nodes < 1 || q.panels < 1) throw std::invalid_argument("Gauss-Legendre needs nodes >= 1 and panels >= 1");
  return composite_gauss_legendre(q.nodes, a, b, q.panels);
}

double tensor_integrate(const std::vector<Rule>& axes, const std::function<double(std::span<const double>)>& f) {
  if (axes.empty()) {
    return f(std::span<const double>{});
  }
  const std::size_t k = axes.size();
  const Rule& inner = axes.back();
  std::vector<std::size_t> idx(k - 1, 0);
  std::vector<double> x(k, 0.0);
  std::vector<double> vals(inner.size());
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t a = 0; a + 1 < k; ++a) {
      x[a] = axes[a].x[idx[a]];
      w *= axes[a].w[idx[a]];
    }
    for (std::size_t i = 0; i < inner.size(); ++i) {
      x[k - 1] = inner.x[i];
      vals[i] = f(x);
    }
    total += w * simd::dot(inner.w.data(), vals.data(), vals.size());
    std::size_t a = k - 1;
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a].size()) break;
      idx[a] = 0;
      if (a == 0) return total;
    }
    if (k == 1) return total;
  }
}

double omega(std::span<const double> spatial, double r) {
  double s = r;
  for (double v : spatial) s += v * v;
  return std::sqrt(std::max(s, 0.0));
}

namespace {

void check_box(const QuadratureSpec& q, std::size_t axes, const char* what) {
  if (q.box.size() != axes)
    throw std::invalid_argument(std::string(what) + ": quadrature box needs " + std::to_string(axes) + " axes");
}

std::vector<Rule> rules_for(const QuadratureSpec& q) {
  std::vector<Rule> rs;
  for (const auto& [a, b] : q.box) rs.push_back(axis_rule(q, a, b));
  return rs;
}

}  // namespace

double integrate_energy_param(const MomentumFunction& f, const ShellSpec& shell, const QuadratureSpec& quad) {
  if (shell.d < 2) throw std::invalid_argument("dimension must be >= 2");
  if (shell.r < 0) throw std::invalid_argument("energy parametrization requires r >= 0");
  if (shell.region != ShellRegion::plus_sheet && shell.region != ShellRegion::minus_sheet)
    throw std::invalid_argument("energy parametrization needs a plus or minus sheet");
  check_box(quad, static_cast<std::size_t>(shell.d - 1), "integrate_energy_param");
  const double sign = shell.region == ShellRegion::plus_sheet ? 1.0 : -1.0;
  std::vector<double> p(static_cast<std::size_t>(shell.d));
  return tensor_integrate(rules_for(quad), [&](std::span<const double> x) {
    const double w = omega(x, shell.r);
    if (w == 0.0) return 0.0;
    p[0] = sign * w;
    std::copy(x.begin(), x.end(), p.begin() + 1);
    return f(p) / (2.0 * w);
  });
}

double integrate_lightcone_param(const MomentumFunction& f, const ShellSpec& shell, const QuadratureSpec& quad,
                                 std::vector<std::string>* warnings) {
  if (shell.d < 2) throw std::invalid_argument("dimension must be >= 2");
  if (shell.region != ShellRegion::lightcone_plus && shell.region != ShellRegion::lightcone_minus)
    throw std::invalid_argument("light-cone parametrization needs a light-cone region");
  const std::size_t dt = static_cast<std::size_t>(shell.d - 2);
  check_box(quad, dt + 1, "integrate_lightcone_param");
  auto [lo, hi] = quad.box.back();
  const bool plus = shell.region == ShellRegion::lightcone_plus;
  if ((plus && lo <= 0.0) || (!plus && hi >= 0.0)) {
    if (warnings) warnings->push_back("p+ range touches 0: the 1/|p+| weight is singular there");
  }
  const double s2 = std::numbers::sqrt2;
  std::vector<double> p(static_cast<std::size_t>(shell.d));
  return tensor_integrate(rules_for(quad), [&](std::span<const double> x) {
    const double pp = x[dt];
    if (pp == 0.0 || (plus ? pp < 0.0 : pp > 0.0)) return 0.0;
    double t2 = 0.0;
    for (std::size_t i = 0; i < dt; ++i) {
      p[i + 1] = x[i];
      t2 += x[i] * x[i];
    }
    const double pm = (t2 + shell.r) / (2.0 * pp);
    p[0] = (pp + pm) / s2;
    p[dt + 1] = (pp - pm) / s2;
    return f(p) / (2.0 * std::abs(pp));
  });
}

double integrate_shell(const MomentumFunction& f, const ShellSpec& shell, const QuadratureSpec& quad) {
  switch (shell.region) {
    case ShellRegion::plus_sheet:
    case ShellRegion::minus_sheet:
      return integrate_energy_param(f, shell, quad);
    default:
      return integrate_lightcone_param(f, shell, quad);
  }
}

InvarianceReport check_invariance(const MomentumFunction& f, const ShellSpec& shell, const Matrix<double>& L,
                                  const QuadratureSpec& quad) {
  if (static_cast<int>(L.rows()) != shell.d || !is_lorentz(L, 1e-12))
    throw std::invalid_argument("check_invariance: transform is not a Lorentz matrix of the shell dimension");
  if (L(0, 0) < 0) throw std::invalid_argument("check_invariance: transform must be orthochronous");
  InvarianceReport rep;
  rep.integral = integrate_shell(f, shell, quad);
  std::vector<double> q(static_cast<std::size_t>(shell.d));
  const MomentumFunction g = [&](std::span<const double> p) {
    for (std::size_t i = 0; i < q.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < q.size(); ++j) s += L(i, j) * p[j];
      q[i] = s;
    }
    return f(q);
  };
  rep.transformed = integrate_shell(g, shell, quad);
  const double scale = std::max(std::abs(rep.integral), std::abs(rep.transformed));
  rep.rel_err = scale == 0.0 ? 0.0 : std::abs(rep.integral - rep.transformed) / scale;
  return rep;
}

namespace {

// Range of x^2 over [a, b].
std::pair<double, double> square_range(double a, double b) {
  const double lo = (a <= 0.0 && b >= 0.0) ? 0.0 : std::min(a * a, b * b);
  return {lo, std::max(a * a, b * b)};
}

double pou_profile(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

struct Chart {
  double s;   // sheet sign
  double t;   // direction sign
  std::size_t j;
};

}  // namespace

FiberReport fiber_decomposition_check(const MomentumFunction& f, const std::vector<std::pair<double, double>>& support,
                                      int nodes, std::optional<std::pair<double, double>> r_range, QuadRule rule) {
  const std::size_t d = support.size();
  if (d < 2) throw std::invalid_argument("fiber_decomposition_check: need d >= 2");
  QuadratureSpec q;
  q.rule = rule;
  q.nodes = nodes;
  FiberReport rep;

  std::vector<Rule> box;
  for (const auto& [a, b] : support) box.push_back(axis_rule(q, a, b));
  rep.lhs = tensor_integrate(box, f);

  // r = (p^0)^2 - |p|^2 over the box.
  if (!r_range) {
    const auto t0 = square_range(support[0].first, support[0].second);
    double smin = 0.0, smax = 0.0;
    for (std::size_t i = 1; i < d; ++i) {
      const auto ti = square_range(support[i].first, support[i].second);
      smin += ti.first;
      smax += ti.second;
    }
    r_range = std::make_pair(t0.first - smax, t0.second - smin);
  }
  rep.r_range = *r_range;

  std::vector<Chart> charts;
  for (double s : {1.0, -1.0})
    for (double t : {1.0, -1.0})
      for (std::size_t j = 1; j < d; ++j) charts.push_back({s, t, j});
  rep.charts = static_cast<int>(charts.size());

  const double s2 = std::numbers::sqrt2;
  auto chart_u = [&](const Chart& c, std::span<const double> p) { return c.s * (p[0] + c.t * p[c.j]) / s2; };

  std::vector<double> p(d);
  double rhs = 0.0;
  for (const Chart& c : charts) {
    // u range over the support box, clipped to u > 0.
    const auto [a0, b0] = support[0];
    const auto [aj, bj] = support[c.j];
    const double e1 = c.s * a0, e2 = c.s * b0;
    const double f1 = c.s * c.t * aj, f2 = c.s * c.t * bj;
    const double umax = (std::max(e1, e2) + std::max(f1, f2)) / s2;
    const double umin = std::max(0.0, (std::min(e1, e2) + std::min(f1, f2)) / s2);
    if (!(umax > umin)) continue;
    std::vector<Rule> axes;
    axes.push_back(axis_rule(q, r_range->first, r_range->second));
    axes.push_back(axis_rule(q, umin, umax));
    std::vector<std::size_t> transverse;
    for (std::size_t i = 1; i < d; ++i)
      if (i != c.j) {
        transverse.push_back(i);
        axes.push_back(axis_rule(q, support[i].first, support[i].second));
      }
    rhs += tensor_integrate(axes, [&](std::span<const double> x) {
      const double r = x[0], u = x[1];
      if (u <= 0.0) return 0.0;
      double t2 = 0.0;
      for (std::size_t k = 0; k < transverse.size(); ++k) {
        p[transverse[k]] = x[2 + k];
        t2 += x[2 + k] * x[2 + k];
      }
      const double v = (t2 + r) / (2.0 * u);
      p[0] = c.s * (u + v) / s2;
      p[c.j] = c.s * c.t * (u - v) / s2;
      const double fv = f(p);
      if (fv == 0.0) return 0.0;
      double total = 0.0;
      for (const Chart& o : charts) total += pou_profile(chart_u(o, p));
      if (total == 0.0) return 0.0;
      return fv * pou_profile(u) / total / (2.0 * u);
    });
  }
  rep.rhs = rhs;
  const double scale = std::max(std::abs(rep.lhs), std::abs(rep.rhs));
  rep.rel_err = scale == 0.0 ? 0.0 : std::abs(rep.lhs - rep.rhs) / scale;
  return rep;
}

double bump1(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - t * t));
}

MomentumFunction bump_function(std::vector<double> center, std::vector<double> width) {
  if (center.size() != width.size()) throw std::invalid_argument("bump_function: center and width sizes differ");
  return [center = std::move(center), width = std::move(width)](std::span<const double> p) {
    double v = 1.0;
    for (std::size_t i = 0; i < center.size() && v != 0.0; ++i) v *= bump1((p[i] - center[i]) / width[i]);
    return v;
  };
}

MomentumFunction gaussian_function(std::vector<double> center, std::vector<double> width) {
  if (center.size() != width.size()) throw std::invalid_argument("gaussian_function: center and width sizes differ");
  return [center = std::move(center), width = std::move(width)](std::span<const double> p) {
    double s = 0.0;
    for (std::size_t i = 0; i < center.size(); ++i) {
      const double z = (p[i] - center[i]) / width[i];
      s += z * z;
    }
    return std::exp(-s);
  };
}

}  // namespace stringlab
