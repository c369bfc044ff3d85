#pragma once

#include <boost/container/small_vector.hpp>

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stringlab/scalar.hpp"

namespace stringlab {

/// Label of the creation oscillator alpha_{-n}^mu.
struct ModeLabel {
  int mu = 0;
  int n = 1;
  friend auto operator<=>(const ModeLabel&, const ModeLabel&) = default;
};

/// Finite occupation numbers N_{mu,n}. Entries are kept sorted by (n, mu),
/// which is also the canonical PBW factor order.
class Occupation {
 public:
  static constexpr int kMaxMu = 255;
  static constexpr int kMaxMode = 255;
  static constexpr unsigned kMaxCount = 0xffff;

  struct Entry {
    int mu;
    int n;
    unsigned count;
  };

  Occupation() = default;
  static Occupation from_entries(const std::vector<Entry>& entries);
  static Occupation single(int mu, int n, unsigned count = 1) { return from_entries({{mu, n, count}}); }

  unsigned count(int mu, int n) const noexcept;
  /// Sum of n * N_{mu,n}.
  int level() const noexcept;
  /// Sum of N_{mu,n}.
  unsigned quanta() const noexcept;
  /// Total occupation carried by index mu.
  unsigned quanta_of(int mu) const noexcept;
  bool empty() const noexcept { return packed_.empty(); }
  std::size_t distinct() const noexcept { return packed_.size(); }
  Entry entry(std::size_t i) const noexcept { return unpack(packed_[i]); }
  std::vector<Entry> entries() const;

  /// Copy with N_{mu,n} shifted by delta; nullopt if the count would go negative.
  std::optional<Occupation> shifted(int mu, int n, int delta) const;
  /// Same as `shifted`, writing into `out` (whose storage is reused). Returns false if negative.
  bool shift_into(int mu, int n, int delta, Occupation& out) const;

  std::size_t hash() const noexcept;
  /// Human-readable monomial, e.g. "a[-1,0]^2 a[-2,3]" or "1" for the vacuum.
  std::string label() const;

  friend bool operator==(const Occupation& a, const Occupation& b) noexcept { return a.packed_ == b.packed_; }
  friend std::strong_ordering operator<=>(const Occupation& a, const Occupation& b) noexcept;

 private:
  static std::uint32_t pack(int mu, int n, unsigned count) noexcept {
    return (static_cast<std::uint32_t>(n) << 24) | (static_cast<std::uint32_t>(mu) << 16) | count;
  }
  static Entry unpack(std::uint32_t v) noexcept {
    return {static_cast<int>((v >> 16) & 0xff), static_cast<int>(v >> 24), v & 0xffff};
  }
  static std::uint32_t key(int mu, int n) noexcept { return pack(mu, n, 0); }

  boost::container::small_vector<std::uint32_t, 6> packed_;
};

/// Metric component eta^{mu mu} = eta_{mu mu} in signature (-,+,...,+).
inline int eta(int mu) noexcept { return mu == 0 ? -1 : 1; }

/// Action of alpha_n^mu (n != 0) on a single PBW monomial: the integer
/// coefficient and resulting monomial, or nullopt when the result is zero.
std::optional<std::pair<long long, Occupation>> alpha_on_monomial(int mu, int n, const Occupation& occ);
/// Allocation-free form: writes the monomial into `out` and returns the coefficient (0 when annihilated).
long long alpha_on_monomial(int mu, int n, const Occupation& occ, Occupation& out);

/// Sparse linear combination of PBW monomials alpha_{-n}^mu ... Omega_0.
template <class T>
class FockVector {
 public:
  using Term = std::pair<Occupation, T>;

  explicit FockVector(int d = 26) : d_(d) {
    if (d < 1 || d > Occupation::kMaxMu + 1) throw std::invalid_argument("FockVector: dimension out of range");
  }

  static FockVector vacuum(int d, const T& c = ScalarTraits<T>::from_int(1)) { return monomial(d, Occupation{}, c); }
  static FockVector monomial(int d, const Occupation& occ, const T& c = ScalarTraits<T>::from_int(1)) {
    FockVector v(d);
    for (const auto& e : occ.entries())
      if (e.mu >= d) throw std::invalid_argument("FockVector: occupation index exceeds dimension");
    if (!ScalarTraits<T>::is_zero(c)) v.terms_.emplace_back(occ, c);
    return v;
  }
  /// Sorts and merges an arbitrary list of terms, dropping zeros.
  static FockVector from_terms(int d, std::vector<Term> terms);

  int d() const noexcept { return d_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }
  T coefficient(const Occupation& occ) const;
  /// Highest level among the terms (-1 for the zero vector).
  int max_level() const noexcept;
  /// Level of every term if homogeneous, else nullopt.
  std::optional<int> homogeneous_level() const noexcept;

  FockVector operator-() const;
  FockVector& operator+=(const FockVector& o);
  FockVector& operator-=(const FockVector& o);
  FockVector& operator*=(const T& s);
  friend FockVector operator+(FockVector a, const FockVector& b) { return a += b; }
  friend FockVector operator-(FockVector a, const FockVector& b) { return a -= b; }
  friend FockVector operator*(const T& s, FockVector a) { return a *= s; }
  friend FockVector operator*(FockVector a, const T& s) { return a *= s; }
  friend bool operator==(const FockVector& a, const FockVector& b) { return a.d_ == b.d_ && a.terms_ == b.terms_; }

 private:
  int d_;
  std::vector<Term> terms_;
};

/// Accumulates unsorted terms; `finish` sorts and merges them.
template <class T>
class FockBuilder {
 public:
  explicit FockBuilder(int d) : d_(d) {}
  void add(const Occupation& occ, const T& c) {
    if (!ScalarTraits<T>::is_zero(c)) terms_.emplace_back(occ, c);
  }
  void add(Occupation&& occ, const T& c) {
    if (!ScalarTraits<T>::is_zero(c)) terms_.emplace_back(std::move(occ), c);
  }
  void add(const FockVector<T>& v, const T& s) {
    for (const auto& [o, c] : v.terms()) add(o, c * s);
  }
  void reserve(std::size_t n) { terms_.reserve(n); }
  FockVector<T> finish() { return FockVector<T>::from_terms(d_, std::move(terms_)); }

 private:
  int d_;
  std::vector<typename FockVector<T>::Term> terms_;
};

template <class T>
FockVector<T> apply_alpha(int mu, int n, const FockVector<T>& v);

/// <v, w> = (v, J w); antilinear in the first slot.
template <class T>
T inner_indefinite(const FockVector<T>& v, const FockVector<T>& w);

/// (v, w) with every eta replaced by +1.
template <class T>
T inner_definite(const FockVector<T>& v, const FockVector<T>& w);

/// Norm of a monomial: prod n^N N! eta^N (indefinite) or without eta (definite).
Rational monomial_norm(const Occupation& occ, bool indefinite);

template <class T>
FockVector<T> number_op(const FockVector<T>& v);

template <class T>
FockVector<T> mass_squared(const FockVector<T>& v);

/// The grading operator J on the Fock space: sign (-1)^{number of mu=0 quanta}.
template <class T>
FockVector<T> metric_J(const FockVector<T>& v);

/// All occupations of the given level in d dimensions, sorted canonically.
std::vector<Occupation> level_basis(int d, int level);

/// Coefficient of q^level in prod_{n>=1} (1 - q^n)^{-colors}.
std::uint64_t colored_partition_count(int colors, int level);

FockVector<Complex> to_complex(const FockVector<Rational>& v);

struct CcrReport {
  int d = 0;
  int max_level = 0;
  int max_mode = 0;
  std::size_t monomials = 0;
  std::uint64_t checks = 0;
  std::uint64_t failures = 0;
  std::string first_failure;
};

/// [alpha_m^mu, alpha_n^nu] v = m delta_{m+n} eta^{mu nu} v on every monomial of level <= max_level,
/// 0 < |m|, |n| <= max_mode. Unordered pairs only: the relation is antisymmetric under the swap.
CcrReport oscillator_ccr_check(int d, int max_level, int max_mode, int jobs = 1);

/// Mode-truncated worldsheet commutator smeared against f and g on [0, pi].
/// The eta^{mu nu} factor is left out.
double worldsheet_ccr_partial(int cutoff, const std::function<double(double)>& f, const std::function<double(double)>& g,
                              int nodes = 256);

}  // namespace stringlab

template <>
struct std::hash<stringlab::Occupation> {
  std::size_t operator()(const stringlab::Occupation& o) const noexcept { return o.hash(); }
};
