#pragma once

#include <cmath>
#include <complex>

#include "stringlab/rational.hpp"

namespace stringlab {

using Complex = std::complex<double>;

/// Uniform access to the two coefficient fields: exact rationals and complex doubles.
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static Rational conj(const Rational& x) { return x; }
  static bool is_zero(const Rational& x) { return x.is_zero(); }
  static double magnitude(const Rational& x) { return std::abs(x.to_double()); }
  static Rational from_rational(const Rational& q) { return q; }
  static Rational from_int(long long v) { return Rational(v); }
  /// Real part as double; rationals are real.
  static double real(const Rational& x) { return x.to_double(); }
};

template <>
struct ScalarTraits<Complex> {
  static constexpr bool exact = false;
  static Complex conj(const Complex& x) { return std::conj(x); }
  static bool is_zero(const Complex& x) { return x == Complex(0.0, 0.0); }
  static double magnitude(const Complex& x) { return std::abs(x); }
  static Complex from_rational(const Rational& q) { return {q.to_double(), 0.0}; }
  static Complex from_int(long long v) { return {static_cast<double>(v), 0.0}; }
  static double real(const Complex& x) { return x.real(); }
};

template <class T>
concept FieldScalar = requires { ScalarTraits<T>::exact; };

}  // namespace stringlab
