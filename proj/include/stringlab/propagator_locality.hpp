#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stringlab/fock.hpp"
#include "stringlab/scalar.hpp"

namespace stringlab {

enum class Profile { gaussian, bump };

/// F(x) = amplitude * prod_mu phi((x^mu - c^mu) / w^mu) * polarization, with phi(t) = exp(-t^2)
/// or the bump exp(-1/(1-t^2)). Without a polarization F is a scalar Klein-Gordon test function.
struct TestFunctionSpec {
  Profile profile = Profile::gaussian;
  std::vector<double> center;
  std::vector<double> width;
  Complex amplitude{1.0, 0.0};
  std::optional<FockVector<Complex>> polarization;

  int d() const { return static_cast<int>(center.size()); }
};

/// Throws std::invalid_argument on size mismatches, non-positive widths, or a polarization
/// with a component at level 0.
void validate(const TestFunctionSpec& f);

/// Profile value without amplitude or polarization.
double profile_value(const TestFunctionSpec& f, std::span<const double> x);

/// d/dx^0 of profile_value.
double profile_dt(const TestFunctionSpec& f, std::span<const double> x);

/// Integral of exp(-i k t) phi(t) dt for the one-dimensional profile.
double profile_transform_1d(Profile profile, double k);

/// Scalar part of F~(p) = (2 pi)^{-d/2} int exp(-i p.x) F(x) dx with p.x = -p^0 x^0 + p.x.
Complex fourier_scalar(const TestFunctionSpec& f, std::span<const double> p);

struct FourierValue {
  Complex scalar;
  std::optional<FockVector<Complex>> polarization;
};

FourierValue fourier_eval(const TestFunctionSpec& f, std::span<const double> p);

/// Fourier transform of an arbitrary real function by tensor Gauss-Legendre over `box`.
Complex fourier_quadrature(const std::function<double(std::span<const double>)>& f,
                           const std::vector<std::pair<double, double>>& box, int nodes, int panels,
                           std::span<const double> p);

/// F_a(x) = F(x - a).
TestFunctionSpec translated(const TestFunctionSpec& f, std::span<const double> a);

/// Nodes on V_r^+ with mu_r weights.
struct ShellSampling {
  int d = 2;
  double r = 0.0;
  std::vector<std::vector<double>> nodes;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// d = 2: composite Gauss-Legendre in p^1 on [-pmax, pmax] (r > 0 required).
/// d = 3: polar coordinates, Gauss-Legendre in |p| and `angular` equispaced angles.
/// d >= 4: tensor Gauss-Legendre over the cube.
ShellSampling make_sampling(int d, double r, double pmax, int panels, int nodes_per_panel, int angular = 64);

/// Momentum radius beyond which |F~| along each axis falls below tail * |F~(0)|.
double suggested_pmax(const TestFunctionSpec& f, double tail = 1e-13);

/// (Pi F)_r on the nodes, stored as coeff_j * polarization with the polarization already
/// projected to the level of mass r. An empty polarization means the projection vanished.
struct ShellVector {
  double r = 0.0;
  std::vector<Complex> coeff;
  std::optional<FockVector<Complex>> polarization;
  bool scalar = false;
};

ShellVector project_pi(const TestFunctionSpec& f, const ShellSampling& s);

/// Sum over nodes of w <u(p), v(p)> in the indefinite pairing, antilinear in u.
Complex pairing_H(const ShellVector& u, const ShellVector& v, const ShellSampling& s);

/// 2i Im sum_r <(Pi F)_r, (Pi G)_r>.
Complex smeared_commutator(const TestFunctionSpec& f, const TestFunctionSpec& g,
                           const std::vector<ShellSampling>& samplings);

/// -1/2 sgn(x^0) J0(sqrt r sqrt(-x^2)) for timelike x, 0 otherwise (d = 2 only).
double pauli_jordan_oracle(double r, std::span<const double> x);

/// (E f)(x) = -int Delta(x - y) f(y) dy for a real scalar profile in d = 2, or its x^0 derivative.
/// The y integral is done in light-cone coordinates about x so the kernel support is a pair of quadrants.
double propagate_scalar(const TestFunctionSpec& f, double r, std::span<const double> x, bool time_derivative,
                        int nodes = 48);

/// <E F, G> = int (E F)(x) g(x) dx in d = 2 by position-space convolution.
double position_pairing(const TestFunctionSpec& f, const TestFunctionSpec& g, double r, int nodes = 48);

/// <E F, G> = 2 Im <Pi F, Pi G> for scalar test functions at mass r.
double momentum_pairing(const TestFunctionSpec& f, const TestFunctionSpec& g, const ShellSampling& s);

struct GreensGrid {
  int nodes_uv = 80;
  int nodes_x = 128;
};

struct GreensReport {
  std::vector<double> times;
  std::vector<double> sigma;
  double max_deviation = 0.0;
  /// max_deviation / max |sigma|.
  double rel_deviation = 0.0;
  double pairing_direct = 0.0;
  double sigma_vs_direct = 0.0;
  double coarse_delta = 0.0;
  bool grid_ok = true;
  std::vector<std::string> warnings;
};

/// sigma_t(EF, EG) = int <U, d0 V> - <d0 U, V> dx^1 at each time, d = 2.
/// The coarse grid (half the nodes) is evaluated as well; a relative difference above `tolerance`
/// marks the grid as too coarse.
GreensReport greens_conservation_check(const TestFunctionSpec& f, const TestFunctionSpec& g,
                                       const std::vector<double>& times, double r, GreensGrid grid = {},
                                       double tolerance = 1e-4);

struct DecayRow {
  double radius = 0.0;
  Complex value;
  double reference_scale = 0.0;
};

/// Commutator of F translated by radius * direction against G for each radius.
/// The direction must satisfy |a^0| < (1 - eps) |a|; the reference scale is the largest commutator
/// over the timelike translations (R, 0, ..., 0), R in radii.
std::vector<DecayRow> decay_scan(const TestFunctionSpec& f, const TestFunctionSpec& g, std::span<const double> direction,
                                 const std::vector<double>& radii, const std::vector<ShellSampling>& samplings,
                                 double eps = 0.1);

/// Least-squares slope of log |value| against log radius.
double loglog_slope(const std::vector<DecayRow>& rows);

}  // namespace stringlab
