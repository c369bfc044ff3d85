#include "stringlab/propagator_locality.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "stringlab/mass_shell.hpp"
#include "stringlab/quadrature.hpp"
#include "stringlab/simd.hpp"

namespace stringlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double phi(Profile p, double t) { return p == Profile::gaussian ? std::exp(-t * t) : bump1(t); }

double dphi(Profile p, double t) {
  if (p == Profile::gaussian) return -2.0 * t * std::exp(-t * t);
  if (std::abs(t) >= 1.0) return 0.0;
  const double s = 1.0 - t * t;
  return bump1(t) * (-2.0 * t / (s * s));
}

// Half-width of the numerical support in units of the profile width.
double reach(Profile p) { return p == Profile::gaussian ? 6.5 : 1.0; }

std::vector<std::pair<double, double>> support_box(const TestFunctionSpec& f) {
  std::vector<std::pair<double, double>> box;
  const double k = reach(f.profile);
  for (int i = 0; i < f.d(); ++i) box.emplace_back(f.center[i] - k * f.width[i], f.center[i] + k * f.width[i]);
  return box;
}

std::optional<int> level_of_mass(double r) {
  const double l = r / 2.0 + 1.0;
  const double n = std::round(l);
  if (n < 1.0 || std::abs(l - n) > 1e-12) return std::nullopt;
  return static_cast<int>(n);
}

void require_scalar_real(const TestFunctionSpec& f, const char* what) {
  if (f.d() != 2) throw std::invalid_argument(std::string(what) + ": position-space route is d = 2 only");
  if (f.amplitude.imag() != 0.0) throw std::invalid_argument(std::string(what) + ": amplitude must be real");
}

}  // namespace

void validate(const TestFunctionSpec& f) {
  if (f.center.empty()) throw std::invalid_argument("test function: empty center");
  if (f.center.size() != f.width.size()) throw std::invalid_argument("test function: center and width sizes differ");
  for (double w : f.width)
    if (!(w > 0.0)) throw std::invalid_argument("test function: widths must be positive");
  if (f.polarization) {
    for (const auto& [occ, c] : f.polarization->terms())
      if (occ.level() == 0) throw std::invalid_argument("test function: polarization has a level-0 (tachyon) component");
  }
}

double profile_value(const TestFunctionSpec& f, std::span<const double> x) {
  double v = 1.0;
  for (int i = 0; i < f.d() && v != 0.0; ++i) v *= phi(f.profile, (x[i] - f.center[i]) / f.width[i]);
  return v;
}

double profile_dt(const TestFunctionSpec& f, std::span<const double> x) {
  double v = dphi(f.profile, (x[0] - f.center[0]) / f.width[0]) / f.width[0];
  for (int i = 1; i < f.d() && v != 0.0; ++i) v *= phi(f.profile, (x[i] - f.center[i]) / f.width[i]);
  return v;
}

double profile_transform_1d(Profile profile, double k) {
  if (profile == Profile::gaussian) return std::sqrt(std::numbers::pi) * std::exp(-k * k / 4.0);
  const int panels = std::max(16, static_cast<int>(std::ceil(std::abs(k) / 4.0)));
  const Rule rule = composite_gauss_legendre(20, 0.0, 1.0, panels);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) s += rule.w[i] * std::cos(k * rule.x[i]) * bump1(rule.x[i]);
  return 2.0 * s;
}

Complex fourier_scalar(const TestFunctionSpec& f, std::span<const double> p) {
  if (static_cast<int>(p.size()) != f.d()) throw std::invalid_argument("fourier: momentum dimension mismatch");
  Complex v = f.amplitude * std::pow(kTwoPi, -0.5 * f.d());
  for (int i = 0; i < f.d(); ++i) {
    const double k = i == 0 ? -p[0] : p[i];
    v *= f.width[i] * profile_transform_1d(f.profile, k * f.width[i]) * std::polar(1.0, -k * f.center[i]);
  }
  return v;
}

FourierValue fourier_eval(const TestFunctionSpec& f, std::span<const double> p) {
  return {fourier_scalar(f, p), f.polarization};
}

Complex fourier_quadrature(const std::function<double(std::span<const double>)>& f,
                           const std::vector<std::pair<double, double>>& box, int nodes, int panels,
                           std::span<const double> p) {
  if (box.size() != p.size()) throw std::invalid_argument("fourier_quadrature: box and momentum dimensions differ");
  std::vector<Rule> axes;
  for (const auto& [a, b] : box) axes.push_back(composite_gauss_legendre(nodes, a, b, panels));
  const double norm = std::pow(kTwoPi, -0.5 * static_cast<double>(p.size()));
  auto phase = [&](std::span<const double> x) {
    double s = -p[0] * x[0];
    for (std::size_t i = 1; i < x.size(); ++i) s += p[i] * x[i];
    return s;
  };
  const double re = tensor_integrate(axes, [&](std::span<const double> x) { return f(x) * std::cos(phase(x)); });
  const double im = tensor_integrate(axes, [&](std::span<const double> x) { return -f(x) * std::sin(phase(x)); });
  return norm * Complex(re, im);
}

TestFunctionSpec translated(const TestFunctionSpec& f, std::span<const double> a) {
  if (static_cast<int>(a.size()) != f.d()) throw std::invalid_argument("translated: dimension mismatch");
  TestFunctionSpec out = f;
  for (int i = 0; i < f.d(); ++i) out.center[i] += a[i];
  return out;
}

ShellSampling make_sampling(int d, double r, double pmax, int panels, int nodes_per_panel, int angular) {
  if (d < 2) throw std::invalid_argument("make_sampling: need d >= 2");
  if (r < 0) throw std::invalid_argument("make_sampling: sheets V_r^+ need r >= 0");
  if (d == 2 && r == 0.0) throw std::invalid_argument("make_sampling: r = 0 in d = 2 has an infrared divergent measure");
  if (!(pmax > 0) || panels < 1 || nodes_per_panel < 1) throw std::invalid_argument("make_sampling: bad rule parameters");
  ShellSampling s;
  s.d = d;
  s.r = r;
  auto push = [&](std::vector<double> sp, double w) {
    const double om = omega(sp, r);
    std::vector<double> p(static_cast<std::size_t>(d));
    p[0] = om;
    std::copy(sp.begin(), sp.end(), p.begin() + 1);
    s.nodes.push_back(std::move(p));
    s.weights.push_back(w / (2.0 * om));
  };
  if (d == 2) {
    const Rule rule = composite_gauss_legendre(nodes_per_panel, -pmax, pmax, panels);
    for (std::size_t i = 0; i < rule.size(); ++i) push({rule.x[i]}, rule.w[i]);
  } else if (d == 3) {
    if (angular < 1) throw std::invalid_argument("make_sampling: angular must be >= 1");
    const Rule rule = composite_gauss_legendre(nodes_per_panel, 0.0, pmax, panels);
    const double dth = kTwoPi / angular;
    for (std::size_t i = 0; i < rule.size(); ++i)
      for (int k = 0; k < angular; ++k) {
        const double th = k * dth;
        push({rule.x[i] * std::cos(th), rule.x[i] * std::sin(th)}, rule.w[i] * rule.x[i] * dth);
      }
  } else {
    const Rule rule = composite_gauss_legendre(nodes_per_panel, -pmax, pmax, panels);
    std::vector<std::size_t> idx(static_cast<std::size_t>(d - 1), 0);
    while (true) {
      std::vector<double> sp(idx.size());
      double w = 1.0;
      for (std::size_t a = 0; a < idx.size(); ++a) {
        sp[a] = rule.x[idx[a]];
        w *= rule.w[idx[a]];
      }
      push(std::move(sp), w);
      std::size_t a = 0;
      while (a < idx.size() && ++idx[a] == rule.size()) idx[a++] = 0;
      if (a == idx.size()) break;
    }
  }
  return s;
}

double suggested_pmax(const TestFunctionSpec& f, double tail) {
  validate(f);
  const double ref = std::abs(profile_transform_1d(f.profile, 0.0));
  double kappa = 0.0;
  if (f.profile == Profile::gaussian) {
    kappa = 2.0 * std::sqrt(-std::log(tail));
  } else {
    // Smallest kappa after which a window of length 20 stays below the tail.
    const double step = 0.5, window = 20.0;
    double last_above = 0.0;
    for (double k = 0.0; k < 20000.0; k += step) {
      if (std::abs(profile_transform_1d(f.profile, k)) >= tail * ref) last_above = k;
      if (k - last_above > window) break;
    }
    kappa = last_above + step;
  }
  double pmax = 0.0;
  for (double w : f.width) pmax = std::max(pmax, kappa / w);
  return pmax;
}

ShellVector project_pi(const TestFunctionSpec& f, const ShellSampling& s) {
  validate(f);
  if (f.d() != s.d) throw std::invalid_argument("project_pi: test function and sampling dimensions differ");
  ShellVector out;
  out.r = s.r;
  out.scalar = !f.polarization.has_value();
  out.coeff.assign(s.size(), Complex{});
  if (!out.scalar) {
    const auto level = level_of_mass(s.r);
    if (!level) return out;
    FockBuilder<Complex> b(f.polarization->d());
    for (const auto& [occ, c] : f.polarization->terms())
      if (occ.level() == *level) b.add(occ, c);
    FockVector<Complex> pr = b.finish();
    if (pr.is_zero()) return out;
    out.polarization = std::move(pr);
  }
  const double root = std::sqrt(kTwoPi);
  for (std::size_t j = 0; j < s.size(); ++j) out.coeff[j] = root * fourier_scalar(f, s.nodes[j]);
  return out;
}

Complex pairing_H(const ShellVector& u, const ShellVector& v, const ShellSampling& s) {
  if (u.coeff.size() != s.size() || v.coeff.size() != s.size() || u.r != s.r || v.r != s.r)
    throw std::invalid_argument("pairing_H: vectors were sampled on a different shell");
  if (u.scalar != v.scalar) throw std::invalid_argument("pairing_H: scalar and polarized vectors cannot be paired");
  Complex pol{1.0, 0.0};
  if (!u.scalar) {
    if (!u.polarization || !v.polarization) return {};
    pol = inner_indefinite(*u.polarization, *v.polarization);
  }
  if (pol == Complex{}) return {};
  return pol * simd::weighted_cdot(s.weights.data(), u.coeff.data(), v.coeff.data(), s.size());
}

Complex smeared_commutator(const TestFunctionSpec& f, const TestFunctionSpec& g,
                           const std::vector<ShellSampling>& samplings) {
  Complex total{};
  for (const auto& s : samplings) total += pairing_H(project_pi(f, s), project_pi(g, s), s);
  return {0.0, 2.0 * total.imag()};
}

double pauli_jordan_oracle(double r, std::span<const double> x) {
  if (x.size() != 2) throw std::invalid_argument("pauli_jordan_oracle: d = 2 only");
  if (r < 0) throw std::invalid_argument("pauli_jordan_oracle: r must be >= 0");
  const double s = x[0] * x[0] - x[1] * x[1];
  if (!(s > 0.0)) return 0.0;
  return -0.5 * std::copysign(1.0, x[0]) * std::cyl_bessel_j(0.0, std::sqrt(r * s));
}

double propagate_scalar(const TestFunctionSpec& f, double r, std::span<const double> x, bool time_derivative,
                        int nodes) {
  validate(f);
  require_scalar_real(f, "propagate_scalar");
  if (r < 0) throw std::invalid_argument("propagate_scalar: r must be >= 0");
  const auto box = support_box(f);
  // z = x - y ranges over x - box.
  const double z0lo = x[0] - box[0].second, z0hi = x[0] - box[0].first;
  const double z1lo = x[1] - box[1].second, z1hi = x[1] - box[1].first;
  const double ulo = z0lo + z1lo, uhi = z0hi + z1hi;
  const double vlo = z0lo - z1hi, vhi = z0hi - z1lo;
  const double m = std::sqrt(r);
  double y[2];
  auto quadrant = [&](double ua, double ub, double va, double vb, double sign) {
    if (!(ub > ua) || !(vb > va)) return 0.0;
    const std::vector<Rule> axes{gauss_legendre(nodes, ua, ub), gauss_legendre(nodes, va, vb)};
    return tensor_integrate(axes, [&](std::span<const double> uv) {
      const double u = uv[0], v = uv[1];
      y[0] = x[0] - 0.5 * (u + v);
      y[1] = x[1] - 0.5 * (u - v);
      const double fv = time_derivative ? profile_dt(f, y) : profile_value(f, y);
      if (fv == 0.0) return 0.0;
      // kernel -Delta = +1/2 sgn(z^0) J0(m sqrt(uv)), Jacobian 1/2
      return 0.25 * sign * std::cyl_bessel_j(0.0, m * std::sqrt(u * v)) * fv;
    });
  };
  const double val = quadrant(std::max(0.0, ulo), uhi, std::max(0.0, vlo), vhi, 1.0) +
                     quadrant(ulo, std::min(0.0, uhi), vlo, std::min(0.0, vhi), -1.0);
  return f.amplitude.real() * val;
}

double position_pairing(const TestFunctionSpec& f, const TestFunctionSpec& g, double r, int nodes) {
  require_scalar_real(g, "position_pairing");
  const auto box = support_box(g);
  const std::vector<Rule> axes{gauss_legendre(nodes, box[0].first, box[0].second),
                               gauss_legendre(nodes, box[1].first, box[1].second)};
  return g.amplitude.real() * tensor_integrate(axes, [&](std::span<const double> x) {
           const double gv = profile_value(g, x);
           if (gv == 0.0) return 0.0;
           return propagate_scalar(f, r, x, false, nodes) * gv;
         });
}

double momentum_pairing(const TestFunctionSpec& f, const TestFunctionSpec& g, const ShellSampling& s) {
  if (f.polarization || g.polarization) throw std::invalid_argument("momentum_pairing: scalar test functions only");
  return 2.0 * pairing_H(project_pi(f, s), project_pi(g, s), s).imag();
}

namespace {

std::pair<double, double> x_range(const std::vector<TestFunctionSpec>& fs, double t) {
  double lo = 1e300, hi = -1e300;
  for (const auto& f : fs) {
    const auto box = support_box(f);
    const double dt = std::max(std::abs(t - box[0].first), std::abs(t - box[0].second));
    lo = std::min(lo, box[1].first - dt);
    hi = std::max(hi, box[1].second + dt);
  }
  return {lo, hi};
}

double sigma_at(const TestFunctionSpec& f, const TestFunctionSpec& g, double t, double r, GreensGrid grid) {
  const auto [lo, hi] = x_range({f, g}, t);
  const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / 2.0)));
  const int per = std::max(4, grid.nodes_x / panels);
  const Rule rule = composite_gauss_legendre(per, lo, hi, panels);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double x[2] = {t, rule.x[i]};
    const double u = propagate_scalar(f, r, x, false, grid.nodes_uv);
    const double du = propagate_scalar(f, r, x, true, grid.nodes_uv);
    const double v = propagate_scalar(g, r, x, false, grid.nodes_uv);
    const double dv = propagate_scalar(g, r, x, true, grid.nodes_uv);
    s += rule.w[i] * (u * dv - du * v);
  }
  return s;
}

}  // namespace

GreensReport greens_conservation_check(const TestFunctionSpec& f, const TestFunctionSpec& g,
                                       const std::vector<double>& times, double r, GreensGrid grid,
                                       double tolerance) {
  require_scalar_real(f, "greens_conservation_check");
  require_scalar_real(g, "greens_conservation_check");
  if (times.empty()) throw std::invalid_argument("greens_conservation_check: no times given");
  GreensReport rep;
  rep.times = times;
  for (double t : times) rep.sigma.push_back(sigma_at(f, g, t, r, grid));
  const auto [mn, mx] = std::minmax_element(rep.sigma.begin(), rep.sigma.end());
  rep.max_deviation = *mx - *mn;
  const double sigma_scale = std::max(std::abs(*mn), std::abs(*mx));
  rep.rel_deviation = sigma_scale > 0.0 ? rep.max_deviation / sigma_scale : 0.0;
  rep.pairing_direct = position_pairing(f, g, r, grid.nodes_uv);
  const double scale = std::max(std::abs(rep.pairing_direct), 1e-300);
  rep.sigma_vs_direct = std::abs(rep.sigma.front() - rep.pairing_direct) / scale;

  const GreensGrid coarse{std::max(4, grid.nodes_uv / 2), std::max(8, grid.nodes_x / 2)};
  rep.coarse_delta = std::abs(sigma_at(f, g, times.front(), r, coarse) - rep.sigma.front());
  rep.grid_ok = rep.coarse_delta <= tolerance * std::max(sigma_scale, 1e-300);
  if (!rep.grid_ok) rep.warnings.push_back("grid too coarse: halving the nodes moves sigma by " + std::to_string(rep.coarse_delta));
  return rep;
}

std::vector<DecayRow> decay_scan(const TestFunctionSpec& f, const TestFunctionSpec& g, std::span<const double> direction,
                                 const std::vector<double>& radii, const std::vector<ShellSampling>& samplings,
                                 double eps) {
  if (static_cast<int>(direction.size()) != f.d()) throw std::invalid_argument("decay_scan: direction dimension mismatch");
  double spatial = 0.0;
  for (std::size_t i = 1; i < direction.size(); ++i) spatial += direction[i] * direction[i];
  spatial = std::sqrt(spatial);
  if (!(spatial > 0.0) || !(std::abs(direction[0]) < (1.0 - eps) * spatial))
    throw std::invalid_argument("decay_scan: direction is not in the spacelike region |a^0| < (1 - eps)|a|");
  if (radii.empty()) throw std::invalid_argument("decay_scan: no radii given");

  double ref = 0.0;
  std::vector<double> timelike(direction.size(), 0.0);
  for (double R : radii) {
    timelike[0] = R;
    ref = std::max(ref, std::abs(smeared_commutator(translated(f, timelike), g, samplings)));
  }

  std::vector<DecayRow> rows;
  std::vector<double> a(direction.size());
  for (double R : radii) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = R * direction[i] / spatial;
    rows.push_back({R, smeared_commutator(translated(f, a), g, samplings), ref});
  }
  return rows;
}

double loglog_slope(const std::vector<DecayRow>& rows) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& row : rows) {
    const double v = std::abs(row.value);
    if (!(v > 0.0) || !(row.radius > 0.0)) continue;
    const double x = std::log(row.radius), y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("loglog_slope: need two nonzero rows");
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw std::invalid_argument("loglog_slope: radii must differ");
  return (n * sxy - sx * sy) / den;
}

}  // namespace stringlab
