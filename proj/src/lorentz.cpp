#include "stringlab/lorentz.hpp"

#include <cmath>
#include <stdexcept>

namespace stringlab {

Matrix<Rational> minkowski_metric(int d) {
  Matrix<Rational> e = Matrix<Rational>::identity(d, Rational(1));
  e(0, 0) = -1;
  return e;
}

bool is_lorentz(const Matrix<Rational>& L) {
  if (!L.is_square()) throw std::invalid_argument("is_lorentz: matrix is not square");
  const std::size_t d = L.rows();
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      Rational s = 0;
      for (std::size_t mu = 0; mu < d; ++mu) {
        const Rational t = L(mu, a) * L(mu, b);
        s += mu == 0 ? -t : t;
      }
      const Rational want = a == b ? Rational(a == 0 ? -1 : 1) : Rational(0);
      if (!(s == want)) return false;
    }
  return true;
}

bool is_lorentz(const Matrix<double>& L, double tol) {
  if (!L.is_square()) throw std::invalid_argument("is_lorentz: matrix is not square");
  const std::size_t d = L.rows();
  double scale = 1.0;
  for (double x : L.data()) scale = std::max(scale, std::abs(x));
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      double s = 0;
      for (std::size_t mu = 0; mu < d; ++mu) s += (mu == 0 ? -1.0 : 1.0) * L(mu, a) * L(mu, b);
      const double want = a == b ? (a == 0 ? -1.0 : 1.0) : 0.0;
      if (std::abs(s - want) > tol * scale * scale) return false;
    }
  return true;
}

namespace {

template <class T>
Matrix<T> eta_transpose_eta(const Matrix<T>& L) {
  if (!L.is_square()) throw std::invalid_argument("lorentz_inverse: matrix is not square");
  Matrix<T> out = L.transposed();
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j)
      if ((i == 0) != (j == 0)) out(i, j) = -out(i, j);
  return out;
}

}  // namespace

Matrix<Rational> lorentz_inverse(const Matrix<Rational>& L) { return eta_transpose_eta(L); }
Matrix<double> lorentz_inverse(const Matrix<double>& L) { return eta_transpose_eta(L); }

Matrix<Rational> rational_boost(const Rational& c, const Rational& s, int axis, int d) {
  if (axis < 1 || axis >= d) throw std::invalid_argument("rational_boost: axis must be a spatial index");
  if (!(c * c - s * s == Rational(1))) throw std::invalid_argument("rational_boost: c^2 - s^2 must equal 1");
  Matrix<Rational> L = Matrix<Rational>::identity(d, Rational(1));
  L(0, 0) = c;
  L(axis, axis) = c;
  L(0, axis) = s;
  L(axis, 0) = s;
  return L;
}

Matrix<double> standard_boost(const std::vector<double>& p, double r) {
  if (!(r > 0)) throw std::invalid_argument("standard_boost: r must be positive");
  if (p.empty() || p[0] <= 0) throw std::invalid_argument("standard_boost: p must lie on the forward sheet");
  const std::size_t d = p.size();
  double p2 = -p[0] * p[0];
  for (std::size_t i = 1; i < d; ++i) p2 += p[i] * p[i];
  if (std::abs(p2 + r) > 1e-9 * std::max(1.0, p[0] * p[0])) throw std::invalid_argument("standard_boost: p is not on V_r");
  const double m = std::sqrt(r);
  const double gamma = p[0] / m;
  double pnorm = 0.0;
  for (std::size_t i = 1; i < d; ++i) pnorm += p[i] * p[i];
  pnorm = std::sqrt(pnorm);
  Matrix<double> L = Matrix<double>::identity(d, 1.0);
  L(0, 0) = gamma;
  if (pnorm == 0.0) return L;
  for (std::size_t i = 1; i < d; ++i) {
    const double hi = p[i] / pnorm;
    L(i, 0) = L(0, i) = p[i] / m;
    for (std::size_t k = 1; k < d; ++k) L(i, k) = (i == k ? 1.0 : 0.0) + (gamma - 1.0) * hi * (p[k] / pnorm);
  }
  return L;
}

Matrix<double> spatial_rotation(int i, int j, double theta, int d) {
  if (i < 1 || j < 1 || i >= d || j >= d || i == j) throw std::invalid_argument("spatial_rotation: bad plane");
  Matrix<double> R = Matrix<double>::identity(d, 1.0);
  R(i, i) = std::cos(theta);
  R(j, j) = std::cos(theta);
  R(i, j) = -std::sin(theta);
  R(j, i) = std::sin(theta);
  return R;
}

Matrix<double> to_double(const Matrix<Rational>& m) {
  Matrix<double> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).to_double();
  return out;
}

namespace {

// Gamma alpha_{-n}^mu Omega = sum_nu A^mu_nu alpha_{-n}^nu Omega with A = Lambda^{-1}.
template <class T, class M>
FockVector<T> lift(const Matrix<M>& A, const FockVector<T>& v) {
  const int d = v.d();
  if (static_cast<int>(A.rows()) != d || static_cast<int>(A.cols()) != d)
    throw std::invalid_argument("gamma_lift: transform dimension differs from Fock dimension");
  FockBuilder<T> out(d);
  Occupation tmp;
  for (const auto& [occ, c] : v.terms()) {
    std::vector<typename FockVector<T>::Term> cur{{Occupation{}, c}};
    for (std::size_t i = 0; i < occ.distinct(); ++i) {
      const auto e = occ.entry(i);
      for (unsigned rep = 0; rep < e.count; ++rep) {
        FockBuilder<T> next(d);
        for (const auto& [o, k] : cur)
          for (int nu = 0; nu < d; ++nu) {
            const M& a = A(e.mu, nu);
            if (a == M{}) continue;
            o.shift_into(nu, e.n, +1, tmp);
            next.add(tmp, k * T(a));
          }
        cur = next.finish().terms();
      }
    }
    for (auto& [o, k] : cur) out.add(std::move(o), k);
  }
  return out.finish();
}

}  // namespace

FockVector<Rational> gamma_lift(const Matrix<Rational>& L, const FockVector<Rational>& v) {
  return lift(lorentz_inverse(L), v);
}

FockVector<Complex> gamma_lift(const Matrix<double>& L, const FockVector<Complex>& v) {
  return lift(lorentz_inverse(L), v);
}

template <class T>
FockVector<T> conjugation(ConjugationKind kind, const FockVector<T>& v) {
  FockBuilder<T> b(v.d());
  for (const auto& [occ, c] : v.terms()) {
    T k = ScalarTraits<T>::conj(c);
    if (kind == ConjugationKind::C1 && (occ.quanta() - occ.quanta_of(0)) % 2 == 1) k = -k;
    b.add(occ, k);
  }
  return b.finish();
}

template FockVector<Rational> conjugation<Rational>(ConjugationKind, const FockVector<Rational>&);
template FockVector<Complex> conjugation<Complex>(ConjugationKind, const FockVector<Complex>&);

}  // namespace stringlab
