#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

namespace stringlab {

/// Exact rational number.
///
/// Values whose numerator and denominator fit in 63 bits are kept inline and
/// handled with 128-bit intermediates; anything larger is promoted to a shared
/// immutable mpq_class and demoted again when a result becomes small.
class Rational {
 public:
  Rational() noexcept = default;
  Rational(long long n) noexcept : num_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(int n) noexcept : num_(n) {}        // NOLINT(google-explicit-constructor)
  Rational(long long num, long long den);
  explicit Rational(const mpq_class& q);

  /// Parses "num/den", "num" or a decimal such as "-0.25".
  static Rational parse(std::string_view text);

  bool is_zero() const noexcept { return !big_ && num_ == 0; }
  bool is_small() const noexcept { return !big_; }
  bool is_integer() const;
  int sign() const;

  mpq_class to_mpq() const;
  double to_double() const;
  /// Canonical "num/den" form; the denominator is always written.
  std::string to_string() const;
  /// Numerator / denominator as decimal strings.
  std::string numerator_string() const;
  std::string denominator_string() const;

  Rational operator-() const;
  Rational reciprocal() const;
  Rational abs() const { return sign() < 0 ? -*this : *this; }

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b);
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  /// Rough size measure (bits of numerator plus denominator), used for pivot choice.
  std::size_t height() const;

 private:
  static Rational from_mpq(mpq_class q);
  static Rational from_wide(__int128 num, __int128 den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  std::shared_ptr<const mpq_class> big_;
};

std::ostream& operator<<(std::ostream& os, const Rational& q);

}  // namespace stringlab
