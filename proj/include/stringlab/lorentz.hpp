#pragma once

#include "stringlab/fock.hpp"
#include "stringlab/matrix.hpp"
#include "stringlab/virasoro.hpp"

namespace stringlab {

/// Lambda as a d x d matrix acting on upper-index vectors: (Lambda p)^mu = Lambda^mu_nu p^nu.
template <class T>
using LorentzTransform = Matrix<T>;

Matrix<Rational> minkowski_metric(int d);

/// Lambda^T eta Lambda == eta, exactly (Rational) or entrywise within tol (double).
bool is_lorentz(const Matrix<Rational>& L);
bool is_lorentz(const Matrix<double>& L, double tol = 1e-12);

/// eta Lambda^T eta.
Matrix<Rational> lorentz_inverse(const Matrix<Rational>& L);
Matrix<double> lorentz_inverse(const Matrix<double>& L);

/// Boost [[c, s], [s, c]] in the (0, axis) plane; requires c^2 - s^2 = 1.
Matrix<Rational> rational_boost(const Rational& c, const Rational& s, int axis, int d);

/// Weinberg's standard boost taking (sqrt r, 0, ..., 0) to p in V_r^+.
Matrix<double> standard_boost(const std::vector<double>& p, double r);

/// Rotation by angle theta in the (i, j) spatial plane.
Matrix<double> spatial_rotation(int i, int j, double theta, int d);

Matrix<double> to_double(const Matrix<Rational>& m);

template <class T, class U>
std::vector<T> apply(const Matrix<U>& L, const std::vector<T>& p) {
  std::vector<T> out(L.rows(), T{});
  for (std::size_t i = 0; i < L.rows(); ++i)
    for (std::size_t j = 0; j < L.cols(); ++j) out[i] += T(L(i, j)) * p[j];
  return out;
}

/// Gamma(Lambda) on the Fock space, defined by Gamma alpha^mu Gamma^{-1} = (Lambda^{-1})^mu_nu alpha^nu
/// and Gamma Omega_0 = Omega_0, so that Gamma(Lambda)^{-1} alpha^mu Gamma(Lambda) = Lambda^mu_nu alpha^nu
/// and Gamma(L1 L2) = Gamma(L1) Gamma(L2).
FockVector<Rational> gamma_lift(const Matrix<Rational>& L, const FockVector<Rational>& v);
FockVector<Complex> gamma_lift(const Matrix<double>& L, const FockVector<Complex>& v);

enum class ConjugationKind { C0, C1 };

/// C0: complex conjugation of coefficients. C1: additionally (-1)^{number of spatial quanta}.
template <class T>
FockVector<T> conjugation(ConjugationKind kind, const FockVector<T>& v);

}  // namespace stringlab
