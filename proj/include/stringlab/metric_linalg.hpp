#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "stringlab/matrix.hpp"
#include "stringlab/scalar.hpp"

namespace stringlab {

class linalg_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Inertia {
  std::size_t n_plus = 0;
  std::size_t n_zero = 0;
  std::size_t n_minus = 0;

  std::size_t total() const noexcept { return n_plus + n_zero + n_minus; }
  friend bool operator==(const Inertia&, const Inertia&) = default;
  Inertia& operator+=(const Inertia& o) {
    n_plus += o.n_plus;
    n_zero += o.n_zero;
    n_minus += o.n_minus;
    return *this;
  }
};

std::string to_string(const Inertia& in);

/// Float-mode zero threshold: |x| < relative * max|entry| counts as zero.
/// Ignored in exact mode.
struct Tolerance {
  double relative = 1e-10;
};

template <class T>
struct GramMatrix {
  Matrix<T> entries;
  std::vector<std::string> basis_labels;

  std::size_t size() const noexcept { return entries.rows(); }
};

template <class T>
using CoeffVector = std::vector<T>;

/// Throws linalg_error unless g is symmetric (Hermitian in float mode).
template <class T>
void require_symmetric(const Matrix<T>& g, const Tolerance& tol = {});

/// Sylvester inertia by symmetric congruence (LDL^T with 1x1 and 2x2 pivots).
/// In float mode, pivots under tolerance are counted as zero and a message is
/// appended to `warnings` when given.
template <class T>
Inertia inertia(const Matrix<T>& g, const Tolerance& tol = {}, std::vector<std::string>* warnings = nullptr);

template <class T>
Inertia inertia(const GramMatrix<T>& g, const Tolerance& tol = {}, std::vector<std::string>* warnings = nullptr) {
  return inertia(g.entries, tol, warnings);
}

/// Reduced row echelon form. `pivots[i]` is the pivot column of row i.
template <class T>
struct Echelon {
  Matrix<T> rref;
  std::vector<std::size_t> pivots;

  std::size_t rank() const noexcept { return pivots.size(); }
};

/// Exact mode uses fraction-free (Bareiss) elimination followed by
/// normalisation; float mode uses full pivoting with the tolerance.
template <class T>
Echelon<T> row_echelon(const Matrix<T>& a, const Tolerance& tol = {});

template <class T>
std::size_t rank(const Matrix<T>& a, const Tolerance& tol = {}) {
  return row_echelon(a, tol).rank();
}

/// Basis of the right null space {x : a x = 0}.
template <class T>
std::vector<CoeffVector<T>> kernel_basis(const Matrix<T>& a, const Tolerance& tol = {});

template <class T>
std::vector<CoeffVector<T>> radical_basis(const GramMatrix<T>& g, const Tolerance& tol = {});

/// Gram of the induced form on a coordinate complement of span(radical).
/// `kept` receives the indices of the retained basis vectors.
template <class T>
GramMatrix<T> quotient_gram(const GramMatrix<T>& g, const std::vector<CoeffVector<T>>& radical, const Tolerance& tol = {},
                            std::vector<std::size_t>* kept = nullptr);

/// Sparse exact row, sorted by column.
using SparseRow = std::map<std::size_t, Rational>;

/// Exact sparse reduced echelon form; rows are returned normalised with pivot 1.
struct SparseEchelon {
  std::vector<SparseRow> rows;
  std::vector<std::size_t> pivots;
};

SparseEchelon sparse_row_echelon(std::vector<SparseRow> rows);

/// Null space basis of a sparse exact matrix with `cols` columns, one sparse vector per free column.
std::vector<SparseRow> sparse_kernel_basis(const std::vector<SparseRow>& rows, std::size_t cols);

}  // namespace stringlab
