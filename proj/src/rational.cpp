#include "stringlab/rational.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace stringlab {
namespace {

using u128 = unsigned __int128;
using i128 = __int128;

constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    // Fall back to 64-bit Euclid as soon as both operands fit.
    if ((a >> 64) == 0 && (b >> 64) == 0) {
      return std::gcd(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b));
    }
    u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

u128 abs128(i128 v) { return v < 0 ? static_cast<u128>(-v) : static_cast<u128>(v); }

void set_mpz_from_u128(mpz_t out, u128 v) {
  std::uint64_t words[2] = {static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(v >> 64)};
  mpz_import(out, 2, -1, sizeof(std::uint64_t), 0, 0, words);
}

// |z| < 2^63, so the value fits int64 and its negation does too.
bool fits_small(const mpz_class& z) { return mpz_sizeinbase(z.get_mpz_t(), 2) <= 63; }

}  // namespace

Rational::Rational(long long num, long long den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  *this = from_wide(num, den);
}

Rational::Rational(const mpq_class& q) { *this = from_mpq(q); }

Rational Rational::from_wide(i128 num, i128 den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Rational out;
  if (num == 0) return out;
  u128 g = gcd128(abs128(num), static_cast<u128>(den));
  if (g > 1) {
    num /= static_cast<i128>(g);
    den /= static_cast<i128>(g);
  }
  if (abs128(num) <= static_cast<u128>(kMax) && static_cast<u128>(den) <= static_cast<u128>(kMax)) {
    out.num_ = static_cast<std::int64_t>(num);
    out.den_ = static_cast<std::int64_t>(den);
    return out;
  }
  mpq_class q;
  set_mpz_from_u128(q.get_num_mpz_t(), abs128(num));
  if (num < 0) mpz_neg(q.get_num_mpz_t(), q.get_num_mpz_t());
  set_mpz_from_u128(q.get_den_mpz_t(), static_cast<u128>(den));
  out.big_ = std::make_shared<const mpq_class>(std::move(q));
  out.num_ = 0;
  out.den_ = 1;
  return out;
}

Rational Rational::from_mpq(mpq_class q) {
  q.canonicalize();
  Rational out;
  if (fits_small(q.get_num()) && fits_small(q.get_den())) {
    out.num_ = q.get_num().get_si();
    out.den_ = q.get_den().get_si();
    return out;
  }
  out.big_ = std::make_shared<const mpq_class>(std::move(q));
  return out;
}

Rational Rational::parse(std::string_view text) {
  std::string s(text);
  auto trim = [](std::string& t) {
    auto b = t.find_first_not_of(" \t");
    auto e = t.find_last_not_of(" \t");
    t = (b == std::string::npos) ? std::string() : t.substr(b, e - b + 1);
  };
  trim(s);
  if (s.empty()) throw std::invalid_argument("Rational::parse: empty string");
  auto dot = s.find('.');
  if (dot != std::string::npos && s.find('/') == std::string::npos) {
    // Decimal literal: exact value of the written digits.
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t frac = s.size() - dot - 1;
    mpz_class numer;
    if (numer.set_str(digits, 10) != 0) throw std::invalid_argument("Rational::parse: bad decimal '" + s + "'");
    mpz_class denom;
    mpz_ui_pow_ui(denom.get_mpz_t(), 10, frac);
    return from_mpq(mpq_class(numer, denom));
  }
  mpq_class q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("Rational::parse: bad rational '" + s + "'");
  if (q.get_den() == 0) throw std::domain_error("Rational::parse: zero denominator");
  return from_mpq(std::move(q));
}

bool Rational::is_integer() const { return big_ ? big_->get_den() == 1 : den_ == 1; }

int Rational::sign() const {
  if (big_) return sgn(*big_);
  return (num_ > 0) - (num_ < 0);
}

mpq_class Rational::to_mpq() const {
  if (big_) return *big_;
  mpq_class q;
  mpz_set_si(q.get_num_mpz_t(), num_);
  mpz_set_si(q.get_den_mpz_t(), den_);
  return q;
}

double Rational::to_double() const {
  if (big_) return big_->get_d();
  return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string Rational::numerator_string() const { return big_ ? big_->get_num().get_str() : std::to_string(num_); }

std::string Rational::denominator_string() const { return big_ ? big_->get_den().get_str() : std::to_string(den_); }

std::string Rational::to_string() const { return numerator_string() + "/" + denominator_string(); }

std::size_t Rational::height() const {
  if (big_) {
    return mpz_sizeinbase(big_->get_num_mpz_t(), 2) + mpz_sizeinbase(big_->get_den_mpz_t(), 2);
  }
  auto bits = [](std::uint64_t v) { return v == 0 ? 1 : 64 - __builtin_clzll(v); };
  return bits(static_cast<std::uint64_t>(num_ < 0 ? -num_ : num_)) + bits(static_cast<std::uint64_t>(den_));
}

Rational Rational::operator-() const {
  if (big_) return from_mpq(-*big_);
  Rational out;
  out.num_ = -num_;
  out.den_ = den_;
  return out;
}

Rational Rational::reciprocal() const {
  if (is_zero()) throw std::domain_error("Rational: reciprocal of zero");
  if (big_) return from_mpq(1 / *big_);
  Rational out;
  out.num_ = num_ < 0 ? -den_ : den_;
  out.den_ = num_ < 0 ? -num_ : num_;
  return out;
}

Rational operator+(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    if (a.num_ == 0) return b;
    if (b.num_ == 0) return a;
    if (a.den_ == 1 && b.den_ == 1) {
      std::int64_t s;
      if (!__builtin_add_overflow(a.num_, b.num_, &s) && s != std::numeric_limits<std::int64_t>::min()) {
        Rational out;
        out.num_ = s;
        return out;
      }
    }
    return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                               static_cast<__int128>(a.den_) * b.den_);
  }
  return Rational::from_mpq(a.to_mpq() + b.to_mpq());
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    if (a.num_ == 0 || b.num_ == 0) return {};
    if (a.den_ == 1 && b.den_ == 1) {
      std::int64_t p;
      if (!__builtin_mul_overflow(a.num_, b.num_, &p) && p != std::numeric_limits<std::int64_t>::min()) {
        Rational out;
        out.num_ = p;
        return out;
      }
    }
    std::int64_t g1 = std::gcd(a.num_, b.den_);
    std::int64_t g2 = std::gcd(b.num_, a.den_);
    std::int64_t n1 = a.num_ / g1, d2 = b.den_ / g1;
    std::int64_t n2 = b.num_ / g2, d1 = a.den_ / g2;
    std::int64_t num, den;
    if (!__builtin_mul_overflow(n1, n2, &num) && !__builtin_mul_overflow(d1, d2, &den) &&
        num != std::numeric_limits<std::int64_t>::min()) {
      Rational out;
      out.num_ = num;
      out.den_ = den;
      return out;
    }
    return Rational::from_wide(static_cast<__int128>(n1) * n2, static_cast<__int128>(d1) * d2);
  }
  return Rational::from_mpq(a.to_mpq() * b.to_mpq());
}

Rational operator/(const Rational& a, const Rational& b) { return a * b.reciprocal(); }

bool operator==(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
  if (a.big_ && b.big_) return *a.big_ == *b.big_;
  return false;  // canonical forms: a big value never equals a small one
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    __int128 l = static_cast<__int128>(a.num_) * b.den_;
    __int128 r = static_cast<__int128>(b.num_) * a.den_;
    return l <=> r;
  }
  int c = cmp(a.to_mpq(), b.to_mpq());
  return c <=> 0;
}

std::ostream& operator<<(std::ostream& os, const Rational& q) { return os << q.to_string(); }

}  // namespace stringlab
