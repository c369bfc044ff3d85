#include "stringlab/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "stringlab/quadrature.hpp"

namespace stringlab {

// ---------------------------------------------------------------- Occupation

Occupation Occupation::from_entries(const std::vector<Entry>& entries) {
  Occupation o;
  for (const auto& e : entries) {
    if (e.n < 1 || e.n > kMaxMode) throw std::invalid_argument("Occupation: mode number out of range");
    if (e.mu < 0 || e.mu > kMaxMu) throw std::invalid_argument("Occupation: index out of range");
    if (e.count == 0) continue;
    unsigned total = o.count(e.mu, e.n) + e.count;
    if (total > kMaxCount) throw std::overflow_error("Occupation: count overflow");
    auto sh = o.shifted(e.mu, e.n, static_cast<int>(e.count));
    o = std::move(*sh);
  }
  return o;
}

unsigned Occupation::count(int mu, int n) const noexcept {
  const std::uint32_t k = key(mu, n);
  for (std::uint32_t v : packed_) {
    const std::uint32_t vk = v & 0xffff0000u;
    if (vk == k) return v & 0xffff;
    if (vk > k) break;
  }
  return 0;
}

int Occupation::level() const noexcept {
  int s = 0;
  for (std::uint32_t v : packed_) s += static_cast<int>(v >> 24) * static_cast<int>(v & 0xffff);
  return s;
}

unsigned Occupation::quanta() const noexcept {
  unsigned s = 0;
  for (std::uint32_t v : packed_) s += v & 0xffff;
  return s;
}

unsigned Occupation::quanta_of(int mu) const noexcept {
  unsigned s = 0;
  for (std::uint32_t v : packed_)
    if (static_cast<int>((v >> 16) & 0xff) == mu) s += v & 0xffff;
  return s;
}

std::vector<Occupation::Entry> Occupation::entries() const {
  std::vector<Entry> out;
  out.reserve(packed_.size());
  for (std::uint32_t v : packed_) out.push_back(unpack(v));
  return out;
}

bool Occupation::shift_into(int mu, int n, int delta, Occupation& out) const {
  if (n < 1 || n > kMaxMode || mu < 0 || mu > kMaxMu) throw std::invalid_argument("Occupation: label out of range");
  const std::uint32_t k = key(mu, n);
  const std::uint32_t* first = packed_.data();
  const std::uint32_t* last = first + packed_.size();
  const std::uint32_t* pos = first;
  while (pos != last && (*pos & 0xffff0000u) < k) ++pos;
  const bool present = pos != last && (*pos & 0xffff0000u) == k;
  const long long c = (present ? static_cast<long long>(*pos & 0xffff) : 0) + delta;
  if (c < 0) return false;
  if (c > kMaxCount) throw std::overflow_error("Occupation: count overflow");
  const std::uint32_t* rest = present ? pos + 1 : pos;
  const std::size_t head = static_cast<std::size_t>(pos - first);
  const std::size_t tail = static_cast<std::size_t>(last - rest);
  const std::size_t total = head + (c > 0 ? 1 : 0) + tail;
  out.packed_.resize(total);
  std::uint32_t* dst = out.packed_.data();
  std::copy(first, pos, dst);
  dst += head;
  if (c > 0) *dst++ = k | static_cast<std::uint32_t>(c);
  std::copy(rest, last, dst);
  return true;
}

std::optional<Occupation> Occupation::shifted(int mu, int n, int delta) const {
  Occupation out;
  if (!shift_into(mu, n, delta, out)) return std::nullopt;
  return out;
}

std::size_t Occupation::hash() const noexcept {
  std::uint64_t h = 1469598103934665603ull;
  for (std::uint32_t v : packed_) {
    h ^= v;
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

std::string Occupation::label() const {
  if (packed_.empty()) return "1";
  std::string s;
  for (std::uint32_t v : packed_) {
    const Entry e = unpack(v);
    if (!s.empty()) s += ' ';
    s += "a[-" + std::to_string(e.n) + "," + std::to_string(e.mu) + "]";
    if (e.count > 1) s += "^" + std::to_string(e.count);
  }
  return s;
}

std::strong_ordering operator<=>(const Occupation& a, const Occupation& b) noexcept {
  return std::lexicographical_compare_three_way(a.packed_.begin(), a.packed_.end(), b.packed_.begin(), b.packed_.end());
}

// ------------------------------------------------------------- oscillators

long long alpha_on_monomial(int mu, int n, const Occupation& occ, Occupation& out) {
  if (n == 0) throw std::invalid_argument("apply_alpha: n = 0 is the momentum, not an oscillator");
  if (n < 0) {
    occ.shift_into(mu, -n, +1, out);
    return 1;
  }
  const unsigned c = occ.count(mu, n);
  if (c == 0) return 0;
  occ.shift_into(mu, n, -1, out);
  return static_cast<long long>(n) * eta(mu) * static_cast<long long>(c);
}

std::optional<std::pair<long long, Occupation>> alpha_on_monomial(int mu, int n, const Occupation& occ) {
  Occupation out;
  const long long c = alpha_on_monomial(mu, n, occ, out);
  if (c == 0) return std::nullopt;
  return std::make_pair(c, std::move(out));
}

template <class T>
FockVector<T> FockVector<T>::from_terms(int d, std::vector<Term> terms) {
  FockVector v(d);
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
  v.terms_.reserve(terms.size());
  for (auto& t : terms) {
    if (!v.terms_.empty() && v.terms_.back().first == t.first) {
      v.terms_.back().second += t.second;
    } else {
      if (!v.terms_.empty() && ScalarTraits<T>::is_zero(v.terms_.back().second)) v.terms_.pop_back();
      v.terms_.push_back(std::move(t));
    }
  }
  if (!v.terms_.empty() && ScalarTraits<T>::is_zero(v.terms_.back().second)) v.terms_.pop_back();
  return v;
}

template <class T>
T FockVector<T>::coefficient(const Occupation& occ) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), occ, [](const Term& t, const Occupation& o) { return t.first < o; });
  if (it != terms_.end() && it->first == occ) return it->second;
  return T{};
}

template <class T>
int FockVector<T>::max_level() const noexcept {
  int m = -1;
  for (const auto& t : terms_) m = std::max(m, t.first.level());
  return m;
}

template <class T>
std::optional<int> FockVector<T>::homogeneous_level() const noexcept {
  if (terms_.empty()) return 0;
  const int l = terms_.front().first.level();
  for (const auto& t : terms_)
    if (t.first.level() != l) return std::nullopt;
  return l;
}

template <class T>
FockVector<T> FockVector<T>::operator-() const {
  FockVector v = *this;
  for (auto& t : v.terms_) t.second = -t.second;
  return v;
}

template <class T>
FockVector<T>& FockVector<T>::operator+=(const FockVector& o) {
  if (o.d_ != d_) throw std::invalid_argument("FockVector: dimension mismatch");
  std::vector<Term> merged;
  merged.reserve(terms_.size() + o.terms_.size());
  auto a = terms_.begin(), ae = terms_.end();
  auto b = o.terms_.begin(), be = o.terms_.end();
  while (a != ae || b != be) {
    if (b == be || (a != ae && a->first < b->first)) {
      merged.push_back(std::move(*a++));
    } else if (a == ae || b->first < a->first) {
      merged.push_back(*b++);
    } else {
      T s = a->second + b->second;
      if (!ScalarTraits<T>::is_zero(s)) merged.emplace_back(std::move(a->first), std::move(s));
      ++a;
      ++b;
    }
  }
  terms_ = std::move(merged);
  return *this;
}

template <class T>
FockVector<T>& FockVector<T>::operator-=(const FockVector& o) {
  return *this += -o;
}

template <class T>
FockVector<T>& FockVector<T>::operator*=(const T& s) {
  if (ScalarTraits<T>::is_zero(s)) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.second *= s;
  return *this;
}

template <class T>
FockVector<T> apply_alpha(int mu, int n, const FockVector<T>& v) {
  if (mu < 0 || mu >= v.d()) throw std::invalid_argument("apply_alpha: index out of range");
  FockBuilder<T> b(v.d());
  b.reserve(v.size());
  Occupation out;
  for (const auto& [occ, c] : v.terms()) {
    const long long k = alpha_on_monomial(mu, n, occ, out);
    if (k != 0) b.add(out, c * ScalarTraits<T>::from_int(k));
  }
  return b.finish();
}

Rational monomial_norm(const Occupation& occ, bool indefinite) {
  mpz_class acc = 1;
  int sign = 1;
  for (std::size_t i = 0; i < occ.distinct(); ++i) {
    const auto e = occ.entry(i);
    mpz_class t;
    mpz_ui_pow_ui(t.get_mpz_t(), static_cast<unsigned long>(e.n), e.count);
    acc *= t;
    mpz_fac_ui(t.get_mpz_t(), e.count);
    acc *= t;
    if (indefinite && eta(e.mu) < 0 && (e.count % 2 == 1)) sign = -sign;
  }
  if (sign < 0) acc = -acc;
  return Rational(mpq_class(acc));
}

namespace {

template <class T>
T pairing(const FockVector<T>& v, const FockVector<T>& w, bool indefinite) {
  if (v.d() != w.d()) throw std::invalid_argument("inner product: dimension mismatch");
  T s{};
  auto a = v.terms().begin(), ae = v.terms().end();
  auto b = w.terms().begin(), be = w.terms().end();
  while (a != ae && b != be) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      s += ScalarTraits<T>::conj(a->second) * b->second *
           ScalarTraits<T>::from_rational(monomial_norm(a->first, indefinite));
      ++a;
      ++b;
    }
  }
  return s;
}

}  // namespace

template <class T>
T inner_indefinite(const FockVector<T>& v, const FockVector<T>& w) {
  return pairing(v, w, true);
}

template <class T>
T inner_definite(const FockVector<T>& v, const FockVector<T>& w) {
  return pairing(v, w, false);
}

template <class T>
FockVector<T> number_op(const FockVector<T>& v) {
  FockBuilder<T> b(v.d());
  for (const auto& [occ, c] : v.terms()) b.add(occ, c * ScalarTraits<T>::from_int(occ.level()));
  return b.finish();
}

template <class T>
FockVector<T> mass_squared(const FockVector<T>& v) {
  FockBuilder<T> b(v.d());
  for (const auto& [occ, c] : v.terms()) b.add(occ, c * ScalarTraits<T>::from_int(2LL * (occ.level() - 1)));
  return b.finish();
}

template <class T>
FockVector<T> metric_J(const FockVector<T>& v) {
  FockBuilder<T> b(v.d());
  for (const auto& [occ, c] : v.terms()) b.add(occ, occ.quanta_of(0) % 2 ? -c : c);
  return b.finish();
}

namespace {

void enumerate(int d, int remaining, int mode, int mu, std::vector<Occupation::Entry>& cur, std::vector<Occupation>& out) {
  if (remaining == 0) {
    out.push_back(Occupation::from_entries(cur));
    return;
  }
  for (int n = mode; n <= remaining; ++n) {
    for (int m = (n == mode ? mu : 0); m < d; ++m) {
      for (int c = 1; c * n <= remaining; ++c) {
        cur.push_back({m, n, static_cast<unsigned>(c)});
        // Next factor must come strictly after (n, m) in canonical order.
        if (m + 1 < d)
          enumerate(d, remaining - c * n, n, m + 1, cur, out);
        else
          enumerate(d, remaining - c * n, n + 1, 0, cur, out);
        cur.pop_back();
      }
    }
  }
}

}  // namespace

std::vector<Occupation> level_basis(int d, int level) {
  if (level < 0) throw std::invalid_argument("level_basis: level must be >= 0");
  if (d < 1 || d > Occupation::kMaxMu + 1) throw std::invalid_argument("level_basis: dimension out of range");
  std::vector<Occupation> out;
  std::vector<Occupation::Entry> cur;
  enumerate(d, level, 1, 0, cur, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t colored_partition_count(int colors, int level) {
  if (level < 0 || colors < 0) throw std::invalid_argument("colored_partition_count: negative argument");
  // Multiply by (1 - q^n)^{-1} once per color and mode.
  std::vector<std::uint64_t> c(level + 1, 0);
  c[0] = 1;
  for (int n = 1; n <= level; ++n)
    for (int k = 0; k < colors; ++k)
      for (int j = n; j <= level; ++j)
        if (__builtin_add_overflow(c[j], c[j - n], &c[j])) throw std::overflow_error("colored_partition_count: overflow");
  return c[level];
}

FockVector<Complex> to_complex(const FockVector<Rational>& v) {
  FockBuilder<Complex> b(v.d());
  for (const auto& [occ, c] : v.terms()) b.add(occ, Complex(c.to_double(), 0.0));
  return b.finish();
}

namespace {

struct Applied {
  long long c = 0;
  Occupation occ;
};

void ccr_on_monomial(int d, const std::vector<int>& modes, const Occupation& v, std::vector<Applied>& once,
                     CcrReport& rep) {
  const std::size_t k = modes.size() * static_cast<std::size_t>(d);
  once.resize(k);
  for (std::size_t a = 0; a < modes.size(); ++a)
    for (int mu = 0; mu < d; ++mu) {
      Applied& x = once[a * d + mu];
      x.c = alpha_on_monomial(mu, modes[a], v, x.occ);
    }
  Occupation o1, o2;
  for (std::size_t i = 0; i < k; ++i) {
    const int m = modes[i / d], mu = static_cast<int>(i % d);
    for (std::size_t j = i; j < k; ++j) {
      const int n = modes[j / d], nu = static_cast<int>(j % d);
      ++rep.checks;
      long long c1 = once[j].c ? alpha_on_monomial(mu, m, once[j].occ, o1) * once[j].c : 0;
      long long c2 = once[i].c ? alpha_on_monomial(nu, n, once[i].occ, o2) * once[i].c : 0;
      const long long expect = (m + n == 0 && mu == nu) ? m * eta(mu) : 0;
      if (c1 && c2 && o1 == o2) {
        c1 -= c2;
        c2 = 0;
      }
      // c1 o1 - c2 o2 must equal expect v.
      bool ok;
      if (c1 && c2) ok = false;
      else if (c1) ok = o1 == v && c1 == expect;
      else if (c2) ok = o2 == v && -c2 == expect;
      else ok = expect == 0;
      if (!ok) {
        if (rep.failures++ == 0)
          rep.first_failure = "[alpha_" + std::to_string(m) + "^" + std::to_string(mu) + ", alpha_" + std::to_string(n) +
                              "^" + std::to_string(nu) + "] on " + v.label();
      }
    }
  }
}

}  // namespace

CcrReport oscillator_ccr_check(int d, int max_level, int max_mode, int jobs) {
  if (d < 1 || max_level < 0 || max_mode < 1) throw std::invalid_argument("oscillator_ccr_check: bad arguments");
  CcrReport rep;
  rep.d = d;
  rep.max_level = max_level;
  rep.max_mode = max_mode;
  std::vector<Occupation> basis;
  for (int l = 0; l <= max_level; ++l) {
    auto b = level_basis(d, l);
    basis.insert(basis.end(), b.begin(), b.end());
  }
  rep.monomials = basis.size();
  std::vector<int> modes;
  for (int m = -max_mode; m <= max_mode; ++m)
    if (m != 0) modes.push_back(m);
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(basis.size())));
  std::vector<CcrReport> parts(static_cast<std::size_t>(jobs));
  auto work = [&](int t) {
    std::vector<Applied> once;
    for (std::size_t i = static_cast<std::size_t>(t); i < basis.size(); i += static_cast<std::size_t>(jobs))
      ccr_on_monomial(d, modes, basis[i], once, parts[t]);
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  for (const auto& p : parts) {
    rep.checks += p.checks;
    if (p.failures && rep.failures == 0) rep.first_failure = p.first_failure;
    rep.failures += p.failures;
  }
  return rep;
}

double worldsheet_ccr_partial(int cutoff, const std::function<double(double)>& f, const std::function<double(double)>& g,
                              int nodes) {
  if (cutoff < 0) throw std::invalid_argument("worldsheet_ccr_partial: cutoff must be >= 0");
  // The kernel 1 + 2 sum cos(n s) cos(n s') is separable.
  const Rule rule = gauss_legendre(nodes, 0.0, std::numbers::pi);
  std::vector<double> fv(rule.size()), gv(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    fv[i] = f(rule.x[i]) * rule.w[i];
    gv[i] = g(rule.x[i]) * rule.w[i];
  }
  double total = 0.0;
  for (int n = 0; n <= cutoff; ++n) {
    double fn = 0.0, gn = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double c = std::cos(n * rule.x[i]);
      fn += fv[i] * c;
      gn += gv[i] * c;
    }
    total += (n == 0 ? 1.0 : 2.0) * fn * gn;
  }
  return total;
}

template class FockVector<Rational>;
template class FockVector<Complex>;

#define STRINGLAB_INSTANTIATE(T)                                                \
  template FockVector<T> apply_alpha<T>(int, int, const FockVector<T>&);        \
  template T inner_indefinite<T>(const FockVector<T>&, const FockVector<T>&);   \
  template T inner_definite<T>(const FockVector<T>&, const FockVector<T>&);     \
  template FockVector<T> number_op<T>(const FockVector<T>&);                    \
  template FockVector<T> mass_squared<T>(const FockVector<T>&);                 \
  template FockVector<T> metric_J<T>(const FockVector<T>&);

STRINGLAB_INSTANTIATE(Rational)
STRINGLAB_INSTANTIATE(Complex)

#undef STRINGLAB_INSTANTIATE

}  // namespace stringlab
