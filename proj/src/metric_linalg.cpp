#include "stringlab/metric_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace stringlab {

std::string to_string(const Inertia& in) {
  return "(" + std::to_string(in.n_plus) + ", " + std::to_string(in.n_zero) + ", " + std::to_string(in.n_minus) + ")";
}

namespace {

template <class T>
double max_magnitude(const Matrix<T>& a) {
  double m = 0.0;
  for (const auto& x : a.data()) m = std::max(m, ScalarTraits<T>::magnitude(x));
  return m;
}

// Exact LDL^T with symmetric pivoting. Diagonal pivots are preferred, and among
// them the one of smallest height, which keeps the rationals short.
Inertia exact_inertia(Matrix<Rational> a) {
  const std::size_t n = a.rows();
  Inertia out;
  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), 0);

  auto erase = [&](std::size_t idx) { active.erase(std::find(active.begin(), active.end(), idx)); };

  while (!active.empty()) {
    std::size_t best = n;
    std::size_t best_h = std::numeric_limits<std::size_t>::max();
    for (std::size_t i : active) {
      const Rational& v = a(i, i);
      if (v.is_zero()) continue;
      std::size_t h = v.height();
      if (h < best_h) {
        best_h = h;
        best = i;
      }
    }
    if (best != n) {
      const Rational piv = a(best, best);
      (piv.sign() > 0 ? out.n_plus : out.n_minus) += 1;
      erase(best);
      const Rational inv = piv.reciprocal();
      std::vector<Rational> col(active.size());
      for (std::size_t k = 0; k < active.size(); ++k) col[k] = a(active[k], best);
      for (std::size_t k = 0; k < active.size(); ++k) {
        if (col[k].is_zero()) continue;
        const Rational f = col[k] * inv;
        for (std::size_t l = k; l < active.size(); ++l) {
          if (col[l].is_zero()) continue;
          Rational& dst = a(active[k], active[l]);
          dst -= f * col[l];
          a(active[l], active[k]) = dst;
        }
      }
      continue;
    }

    std::size_t bi = n, bj = n;
    best_h = std::numeric_limits<std::size_t>::max();
    for (std::size_t x = 0; x < active.size(); ++x)
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const Rational& v = a(active[x], active[y]);
        if (v.is_zero()) continue;
        std::size_t h = v.height();
        if (h < best_h) {
          best_h = h;
          bi = active[x];
          bj = active[y];
        }
      }
    if (bi == n) {
      out.n_zero += active.size();
      break;
    }
    // [[0, b], [b, 0]] has one positive and one negative eigenvalue.
    const Rational inv = a(bi, bj).reciprocal();
    out.n_plus += 1;
    out.n_minus += 1;
    erase(bi);
    erase(bj);
    std::vector<Rational> ci(active.size()), cj(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
      ci[k] = a(active[k], bi);
      cj[k] = a(active[k], bj);
    }
    for (std::size_t k = 0; k < active.size(); ++k) {
      if (ci[k].is_zero() && cj[k].is_zero()) continue;
      for (std::size_t l = k; l < active.size(); ++l) {
        Rational t = ci[k] * cj[l] + cj[k] * ci[l];
        if (t.is_zero()) continue;
        Rational& dst = a(active[k], active[l]);
        dst -= t * inv;
        a(active[l], active[k]) = dst;
      }
    }
  }
  return out;
}

// Hermitian Bunch-Kaufman style elimination with complete pivot search.
Inertia float_inertia(Matrix<Complex> a, const Tolerance& tol, std::vector<std::string>* warnings) {
  const std::size_t n = a.rows();
  const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
  const double scale = max_magnitude(a);
  const double thresh = tol.relative * scale;
  Inertia out;
  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), 0);
  auto erase = [&](std::size_t idx) { active.erase(std::find(active.begin(), active.end(), idx)); };
  double smallest_pivot = std::numeric_limits<double>::infinity();

  while (!active.empty()) {
    std::size_t di = n;
    double dmax = 0.0;
    for (std::size_t i : active) {
      double v = std::abs(a(i, i).real());
      if (di == n || v > dmax) {
        dmax = v;
        di = i;
      }
    }
    std::size_t oi = n, oj = n;
    double omax = 0.0;
    for (std::size_t x = 0; x < active.size(); ++x)
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        double v = std::abs(a(active[x], active[y]));
        if (v > omax) {
          omax = v;
          oi = active[x];
          oj = active[y];
        }
      }
    if (std::max(dmax, omax) <= thresh) {
      if (warnings && std::max(dmax, omax) > 0.0) {
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "inertia: %zu trailing pivots below %.3g * max|entry| counted as zero; largest %.3e, scale %.3e",
                      active.size(), tol.relative, std::max(dmax, omax), scale);
        warnings->emplace_back(buf);
      }
      out.n_zero += active.size();
      break;
    }
    if (dmax >= alpha * omax) {
      const double piv = a(di, di).real();
      smallest_pivot = std::min(smallest_pivot, std::abs(piv));
      (piv > 0 ? out.n_plus : out.n_minus) += 1;
      erase(di);
      std::vector<Complex> col(active.size());
      for (std::size_t k = 0; k < active.size(); ++k) col[k] = a(active[k], di);
      for (std::size_t k = 0; k < active.size(); ++k)
        for (std::size_t l = k; l < active.size(); ++l) {
          Complex& dst = a(active[k], active[l]);
          dst -= col[k] * std::conj(col[l]) / piv;
          a(active[l], active[k]) = std::conj(dst);
        }
      for (std::size_t k : active) a(k, k) = Complex(a(k, k).real(), 0.0);
      continue;
    }
    // 2x2 block [[p, b], [conj b, q]] with |p|,|q| < alpha |b|, so det < 0.
    const Complex p = a(oi, oi), b = a(oi, oj), q = a(oj, oj);
    const Complex det = p * q - b * std::conj(b);
    smallest_pivot = std::min(smallest_pivot, std::sqrt(std::abs(det)));
    out.n_plus += 1;
    out.n_minus += 1;
    erase(oi);
    erase(oj);
    // inverse of [[p, b], [conj b, q]]
    const Complex i00 = q / det, i01 = -b / det, i10 = -std::conj(b) / det, i11 = p / det;
    std::vector<Complex> ci(active.size()), cj(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
      ci[k] = a(active[k], oi);
      cj[k] = a(active[k], oj);
    }
    for (std::size_t k = 0; k < active.size(); ++k)
      for (std::size_t l = k; l < active.size(); ++l) {
        const Complex rl0 = std::conj(ci[l]), rl1 = std::conj(cj[l]);
        Complex t = ci[k] * (i00 * rl0 + i01 * rl1) + cj[k] * (i10 * rl0 + i11 * rl1);
        Complex& dst = a(active[k], active[l]);
        dst -= t;
        a(active[l], active[k]) = std::conj(dst);
      }
    for (std::size_t k : active) a(k, k) = Complex(a(k, k).real(), 0.0);
  }
  if (warnings && scale > 0.0 && smallest_pivot < 1e3 * thresh && std::isfinite(smallest_pivot)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "inertia: smallest accepted pivot %.3e is close to the zero threshold %.3e", smallest_pivot,
                  thresh);
    warnings->emplace_back(buf);
  }
  return out;
}

Echelon<Rational> exact_echelon(const Matrix<Rational>& in) {
  Matrix<Rational> a = in;
  const std::size_t m = a.rows(), n = a.cols();
  // Clear denominators row by row so the Bareiss divisions stay integral.
  for (std::size_t i = 0; i < m; ++i) {
    mpz_class l = 1;
    for (std::size_t j = 0; j < n; ++j)
      if (!a(i, j).is_zero()) {
        mpz_class d(a(i, j).denominator_string());
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
      }
    if (l != 1) {
      Rational s(mpq_class(l, 1));
      for (std::size_t j = 0; j < n; ++j) a(i, j) *= s;
    }
  }
  Echelon<Rational> out;
  Rational prev = 1;
  std::size_t k = 0;
  for (std::size_t c = 0; c < n && k < m; ++c) {
    std::size_t pr = m;
    std::size_t best_h = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = k; i < m; ++i)
      if (!a(i, c).is_zero() && a(i, c).height() < best_h) {
        best_h = a(i, c).height();
        pr = i;
      }
    if (pr == m) continue;
    if (pr != k)
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(pr, j));
    const Rational piv = a(k, c);
    for (std::size_t i = k + 1; i < m; ++i) {
      const Rational lead = a(i, c);
      for (std::size_t j = c + 1; j < n; ++j) {
        Rational v = piv * a(i, j);
        if (!lead.is_zero()) v -= lead * a(k, j);
        a(i, j) = v / prev;
      }
      a(i, c) = 0;
    }
    prev = piv;
    out.pivots.push_back(c);
    ++k;
  }
  // Back substitution to reduced form.
  for (std::size_t r = out.pivots.size(); r-- > 0;) {
    const std::size_t c = out.pivots[r];
    const Rational inv = a(r, c).reciprocal();
    for (std::size_t j = c; j < n; ++j)
      if (!a(r, j).is_zero()) a(r, j) *= inv;
    for (std::size_t i = 0; i < r; ++i) {
      const Rational f = a(i, c);
      if (f.is_zero()) continue;
      for (std::size_t j = c; j < n; ++j)
        if (!a(r, j).is_zero()) a(i, j) -= f * a(r, j);
    }
  }
  out.rref = Matrix<Rational>(out.pivots.size(), n);
  for (std::size_t r = 0; r < out.pivots.size(); ++r)
    for (std::size_t j = 0; j < n; ++j) out.rref(r, j) = a(r, j);
  return out;
}

Echelon<Complex> float_echelon(const Matrix<Complex>& in, const Tolerance& tol) {
  Matrix<Complex> a = in;
  const std::size_t m = a.rows(), n = a.cols();
  const double thresh = tol.relative * max_magnitude(a);
  Echelon<Complex> out;
  std::size_t k = 0;
  for (std::size_t c = 0; c < n && k < m; ++c) {
    std::size_t pr = k;
    double best = -1.0;
    for (std::size_t i = k; i < m; ++i)
      if (std::abs(a(i, c)) > best) {
        best = std::abs(a(i, c));
        pr = i;
      }
    if (best <= thresh) {
      for (std::size_t i = k; i < m; ++i) a(i, c) = 0.0;
      continue;
    }
    if (pr != k)
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(pr, j));
    const Complex inv = 1.0 / a(k, c);
    for (std::size_t j = c; j < n; ++j) a(k, j) *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == k) continue;
      const Complex f = a(i, c);
      if (f == Complex{}) continue;
      for (std::size_t j = c; j < n; ++j) a(i, j) -= f * a(k, j);
    }
    out.pivots.push_back(c);
    ++k;
  }
  out.rref = Matrix<Complex>(out.pivots.size(), n);
  for (std::size_t r = 0; r < out.pivots.size(); ++r)
    for (std::size_t j = 0; j < n; ++j) out.rref(r, j) = a(r, j);
  return out;
}

}  // namespace

template <class T>
void require_symmetric(const Matrix<T>& g, const Tolerance& tol) {
  if (!g.is_square()) throw linalg_error("Gram matrix is not square");
  const double thresh = ScalarTraits<T>::exact ? 0.0 : tol.relative * max_magnitude(g);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = i; j < g.cols(); ++j) {
      if constexpr (ScalarTraits<T>::exact) {
        if (!(g(i, j) == g(j, i))) throw linalg_error("Gram matrix is not symmetric");
      } else {
        if (std::abs(g(i, j) - std::conj(g(j, i))) > thresh) throw linalg_error("Gram matrix is not Hermitian");
      }
    }
}

template <class T>
Inertia inertia(const Matrix<T>& g, const Tolerance& tol, std::vector<std::string>* warnings) {
  require_symmetric(g, tol);
  if constexpr (ScalarTraits<T>::exact) {
    (void)warnings;
    return exact_inertia(g);
  } else {
    return float_inertia(g, tol, warnings);
  }
}

template <class T>
Echelon<T> row_echelon(const Matrix<T>& a, const Tolerance& tol) {
  if constexpr (ScalarTraits<T>::exact) {
    (void)tol;
    return exact_echelon(a);
  } else {
    return float_echelon(a, tol);
  }
}

template <class T>
std::vector<CoeffVector<T>> kernel_basis(const Matrix<T>& a, const Tolerance& tol) {
  const Echelon<T> e = row_echelon(a, tol);
  const std::size_t n = a.cols();
  std::vector<bool> is_pivot(n, false);
  for (std::size_t c : e.pivots) is_pivot[c] = true;
  std::vector<CoeffVector<T>> out;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    CoeffVector<T> v(n, T{});
    v[f] = ScalarTraits<T>::from_int(1);
    for (std::size_t r = 0; r < e.pivots.size(); ++r) v[e.pivots[r]] = -e.rref(r, f);
    out.push_back(std::move(v));
  }
  return out;
}

template <class T>
std::vector<CoeffVector<T>> radical_basis(const GramMatrix<T>& g, const Tolerance& tol) {
  require_symmetric(g.entries, tol);
  return kernel_basis(g.entries, tol);
}

template <class T>
GramMatrix<T> quotient_gram(const GramMatrix<T>& g, const std::vector<CoeffVector<T>>& radical, const Tolerance& tol,
                            std::vector<std::size_t>* kept) {
  require_symmetric(g.entries, tol);
  const std::size_t n = g.size();
  const double scale = max_magnitude(g.entries);
  for (const auto& v : radical) {
    if (v.size() != n) throw linalg_error("quotient_gram: radical vector has wrong length");
    double vnorm = 0.0;
    for (const auto& x : v) vnorm = std::max(vnorm, ScalarTraits<T>::magnitude(x));
    for (std::size_t i = 0; i < n; ++i) {
      T s{};
      for (std::size_t j = 0; j < n; ++j)
        if (!ScalarTraits<T>::is_zero(v[j])) s += g.entries(i, j) * v[j];
      bool zero;
      if constexpr (ScalarTraits<T>::exact) {
        zero = ScalarTraits<T>::is_zero(s);
      } else {
        zero = std::abs(s) <= tol.relative * scale * vnorm * static_cast<double>(n);
      }
      if (!zero) throw linalg_error("quotient_gram: supplied vector is not in the radical");
    }
  }
  Matrix<T> r(radical.size(), n);
  for (std::size_t i = 0; i < radical.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) r(i, j) = radical[i][j];
  const Echelon<T> e = row_echelon(r, tol);
  std::vector<bool> drop(n, false);
  for (std::size_t c : e.pivots) drop[c] = true;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i)
    if (!drop[i]) keep.push_back(i);

  GramMatrix<T> out;
  out.entries = Matrix<T>(keep.size(), keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j) out.entries(i, j) = g.entries(keep[i], keep[j]);
  if (!g.basis_labels.empty())
    for (std::size_t i : keep) out.basis_labels.push_back(g.basis_labels.at(i));
  if (kept) *kept = std::move(keep);
  return out;
}

SparseEchelon sparse_row_echelon(std::vector<SparseRow> rows) {
  SparseEchelon out;
  std::map<std::size_t, std::size_t> pivot_row;  // pivot column -> index in out.rows
  for (auto& row : rows) {
    for (auto it = row.begin(); it != row.end();) {
      if (it->second.is_zero()) {
        it = row.erase(it);
        continue;
      }
      ++it;
    }
    // Reduce against existing pivots. Existing rows are reduced, so this
    // never re-introduces an already cleared pivot column.
    std::vector<std::size_t> hits;
    for (const auto& [c, _] : row)
      if (pivot_row.count(c)) hits.push_back(c);
    for (std::size_t c : hits) {
      auto f_it = row.find(c);
      if (f_it == row.end()) continue;
      const Rational f = f_it->second;
      for (const auto& [j, v] : out.rows[pivot_row[c]]) {
        Rational& dst = row[j];
        dst -= f * v;
        if (dst.is_zero()) row.erase(j);
      }
    }
    if (row.empty()) continue;
    const std::size_t pc = row.begin()->first;
    const Rational inv = row.begin()->second.reciprocal();
    for (auto& [_, v] : row) v *= inv;
    for (auto& other : out.rows) {
      auto o_it = other.find(pc);
      if (o_it == other.end()) continue;
      const Rational f = o_it->second;
      for (const auto& [j, v] : row) {
        Rational& dst = other[j];
        dst -= f * v;
        if (dst.is_zero()) other.erase(j);
      }
    }
    pivot_row[pc] = out.rows.size();
    out.rows.push_back(std::move(row));
  }
  // Order rows by pivot column.
  std::vector<std::size_t> order;
  for (const auto& [c, idx] : pivot_row) order.push_back(idx);
  SparseEchelon sorted;
  for (std::size_t idx : order) {
    sorted.pivots.push_back(out.rows[idx].begin()->first);
    sorted.rows.push_back(std::move(out.rows[idx]));
  }
  return sorted;
}

std::vector<SparseRow> sparse_kernel_basis(const std::vector<SparseRow>& rows, std::size_t cols) {
  const SparseEchelon e = sparse_row_echelon(rows);
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t c : e.pivots) {
    if (c >= cols) throw linalg_error("sparse_kernel_basis: column index out of range");
    is_pivot[c] = true;
  }
  // Column view of the non-pivot entries.
  std::vector<std::vector<std::pair<std::size_t, Rational>>> by_col(cols);
  for (std::size_t r = 0; r < e.rows.size(); ++r)
    for (const auto& [c, v] : e.rows[r])
      if (!is_pivot[c]) by_col[c].emplace_back(e.pivots[r], v);
  std::vector<SparseRow> out;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    SparseRow v;
    v[f] = 1;
    for (const auto& [p, x] : by_col[f]) v[p] = -x;
    out.push_back(std::move(v));
  }
  return out;
}

#define STRINGLAB_INSTANTIATE(T)                                                                                    \
  template void require_symmetric<T>(const Matrix<T>&, const Tolerance&);                                          \
  template Inertia inertia<T>(const Matrix<T>&, const Tolerance&, std::vector<std::string>*);                       \
  template Echelon<T> row_echelon<T>(const Matrix<T>&, const Tolerance&);                                           \
  template std::vector<CoeffVector<T>> kernel_basis<T>(const Matrix<T>&, const Tolerance&);                         \
  template std::vector<CoeffVector<T>> radical_basis<T>(const GramMatrix<T>&, const Tolerance&);                    \
  template GramMatrix<T> quotient_gram<T>(const GramMatrix<T>&, const std::vector<CoeffVector<T>>&, const Tolerance&, \
                                          std::vector<std::size_t>*);

STRINGLAB_INSTANTIATE(Rational)
STRINGLAB_INSTANTIATE(Complex)

#undef STRINGLAB_INSTANTIATE

}  // namespace stringlab
