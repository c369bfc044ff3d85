#include "stringlab/string_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

#include "stringlab/lorentz.hpp"
#include "stringlab/mass_shell.hpp"
#include "stringlab/physical_spectrum.hpp"

namespace stringlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double minkowski_dot(std::span<const double> p, std::span<const double> a) {
  double s = -p[0] * a[0];
  for (std::size_t i = 1; i < p.size(); ++i) s += p[i] * a[i];
  return s;
}

std::vector<double> mat_vec(const Matrix<double>& L, std::span<const double> p) {
  std::vector<double> out(L.rows(), 0.0);
  for (std::size_t i = 0; i < L.rows(); ++i)
    for (std::size_t j = 0; j < L.cols(); ++j) out[i] += L(i, j) * p[j];
  return out;
}

FockVector<Complex> level_part(const FockVector<Complex>& v, int level) {
  FockBuilder<Complex> b(v.d());
  for (const auto& [occ, c] : v.terms())
    if (occ.level() == level) b.add(occ, c);
  return b.finish();
}

std::optional<int> level_of_mass(double r) {
  const double l = r / 2.0 + 1.0;
  const double n = std::round(l);
  if (n < 1.0 || std::abs(l - n) > 1e-9) return std::nullopt;
  return static_cast<int>(n);
}

// Solves A x = b in place by Gaussian elimination with partial pivoting.
std::vector<Complex> solve(Matrix<Complex> A, std::vector<Complex> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(A(i, k)) > std::abs(A(piv, k))) piv = i;
    if (std::abs(A(piv, k)) == 0.0) throw std::invalid_argument("basis mismatch: node elements are linearly dependent");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = A(i, k) / A(k, k);
      if (f == Complex{}) continue;
      for (std::size_t j = k; j < n; ++j) A(i, j) -= f * A(k, j);
      b[i] -= f * b[k];
    }
  }
  std::vector<Complex> x(n);
  for (std::size_t k = n; k-- > 0;) {
    Complex s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= A(k, j) * x[j];
    x[k] = s / A(k, k);
  }
  return x;
}

MultiStringState::Key inserted(const MultiStringState::Key& k, std::uint16_t a) {
  MultiStringState::Key out;
  out.reserve(k.size() + 1);
  auto it = std::upper_bound(k.begin(), k.end(), a);
  out.insert(out.end(), k.begin(), it);
  out.push_back(a);
  out.insert(out.end(), it, k.end());
  return out;
}

}  // namespace

const char* to_string(ElementKind k) {
  switch (k) {
    case ElementKind::physical: return "physical";
    case ElementKind::null: return "null";
    case ElementKind::complement: return "complement";
    default: return "generic";
  }
}

DiscretizedSingleString::DiscretizedSingleString(int fock_d, std::vector<ShellNode> nodes,
                                                 std::vector<StringElement> elements, std::size_t max_elements)
    : fock_d_(fock_d), nodes_(std::move(nodes)), elements_(std::move(elements)) {
  if (elements_.size() > max_elements)
    throw std::invalid_argument("single-string basis has " + std::to_string(elements_.size()) + " elements, cap is " +
                                std::to_string(max_elements));
  if (elements_.size() > 65535) throw std::invalid_argument("single-string basis too large");
  for (const auto& n : nodes_) {
    if (n.r < 0) throw std::invalid_argument("node with r < 0: tachyonic shells are excluded");
    if (!(n.weight > 0)) throw std::invalid_argument("node weights must be positive");
    if (n.p.empty() || n.p[0] <= 0) throw std::invalid_argument("nodes must lie on forward sheets");
    double p2 = -n.p[0] * n.p[0];
    for (std::size_t i = 1; i < n.p.size(); ++i) p2 += n.p[i] * n.p[i];
    if (std::abs(p2 + n.r) > 1e-9 * (1.0 + n.p[0] * n.p[0])) throw std::invalid_argument("node is off its shell");
  }
  by_node_.assign(nodes_.size(), {});
  for (std::size_t a = 0; a < elements_.size(); ++a) {
    const auto& e = elements_[a];
    if (e.node >= nodes_.size()) throw std::invalid_argument("element refers to a missing node");
    if (e.v.d() != fock_d_) throw std::invalid_argument("element has the wrong Fock dimension");
    const auto lvl = e.v.homogeneous_level();
    const auto want = level_of_mass(nodes_[e.node].r);
    if (!lvl || !want || *lvl != *want)
      throw std::invalid_argument("element level does not match the mass of its node");
    by_node_[e.node].push_back(a);
  }
  const std::size_t n = elements_.size();
  gram_ = Matrix<Complex>(n, n);
  definite_ = Matrix<Complex>(n, n);
  for (const auto& idx : by_node_)
    for (std::size_t a : idx)
      for (std::size_t b : idx) {
        const double w = nodes_[elements_[a].node].weight;
        gram_(a, b) = w * inner_indefinite(elements_[a].v, elements_[b].v);
        definite_(a, b) = w * inner_definite(elements_[a].v, elements_[b].v);
      }
}

std::optional<std::size_t> DiscretizedSingleString::find_node(std::span<const double> p, double tol) const {
  double scale = 1.0;
  for (double x : p) scale = std::max(scale, std::abs(x));
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    if (nodes_[k].p.size() != p.size()) continue;
    double dist = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) dist = std::max(dist, std::abs(nodes_[k].p[i] - p[i]));
    if (dist <= tol * scale) return k;
  }
  return std::nullopt;
}

std::vector<Complex> DiscretizedSingleString::node_coordinates(std::size_t node, const FockVector<Complex>& value) const {
  const auto& idx = by_node_.at(node);
  std::vector<Complex> c(idx.size());
  if (value.is_zero()) return c;
  if (idx.empty()) throw std::invalid_argument("basis mismatch: node " + std::to_string(node) + " carries no elements");
  Matrix<Complex> H(idx.size(), idx.size());
  std::vector<Complex> rhs(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) H(i, j) = inner_definite(elements_[idx[i]].v, elements_[idx[j]].v);
    rhs[i] = inner_definite(elements_[idx[i]].v, value);
  }
  c = solve(H, rhs);
  FockVector<Complex> rest = value;
  for (std::size_t i = 0; i < idx.size(); ++i) rest -= c[i] * elements_[idx[i]].v;
  const double r2 = inner_definite(rest, rest).real();
  const double v2 = inner_definite(value, value).real();
  if (r2 > 1e-20 * v2) throw std::invalid_argument("basis mismatch: value at node " + std::to_string(node) + " is outside the span");
  return c;
}

std::vector<Complex> DiscretizedSingleString::coordinates(const std::vector<FockVector<Complex>>& values) const {
  if (values.size() != nodes_.size()) throw std::invalid_argument("basis mismatch: one value per node expected");
  std::vector<Complex> out(elements_.size());
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const auto c = node_coordinates(k, values[k]);
    for (std::size_t i = 0; i < c.size(); ++i) out[by_node_[k][i]] = c[i];
  }
  return out;
}

Complex DiscretizedSingleString::pairing(const std::vector<Complex>& u, const std::vector<Complex>& v) const {
  if (u.size() != size() || v.size() != size()) throw std::invalid_argument("basis mismatch: coordinate length");
  Complex s{};
  for (const auto& idx : by_node_)
    for (std::size_t a : idx)
      for (std::size_t b : idx) s += std::conj(u[a]) * gram_(a, b) * v[b];
  return s;
}

std::vector<Complex> DiscretizedSingleString::pairings_with(const std::vector<FockVector<Complex>>& values) const {
  if (values.size() != nodes_.size()) throw std::invalid_argument("basis mismatch: one value per node expected");
  std::vector<Complex> out(elements_.size());
  for (std::size_t a = 0; a < elements_.size(); ++a) {
    const auto& e = elements_[a];
    out[a] = nodes_[e.node].weight * inner_indefinite(values[e.node], e.v);
  }
  return out;
}

double DiscretizedSingleString::definite_norm2(const std::vector<FockVector<Complex>>& values) const {
  double s = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) s += nodes_[k].weight * inner_definite(values[k], values[k]).real();
  return s;
}

MomentumTestFunction MomentumTestFunction::from_spec(const TestFunctionSpec& f) {
  validate(f);
  if (!f.polarization) throw std::invalid_argument("from_spec: the test function needs a polarization");
  const TestFunctionSpec spec = f;
  return MomentumTestFunction(f.polarization->d(), [spec](std::span<const double> p) {
    return fourier_scalar(spec, p) * *spec.polarization;
  });
}

MomentumTestFunction MomentumTestFunction::transformed(std::span<const double> a, const Matrix<double>& L) const {
  if (!is_lorentz(L, 1e-12)) throw std::invalid_argument("transformed: not a Lorentz matrix");
  const Matrix<double> Linv = lorentz_inverse(L);
  const std::vector<double> shift(a.begin(), a.end());
  const Eval inner = eval_;
  return MomentumTestFunction(fock_d_, [inner, Linv, L, shift](std::span<const double> p) {
    const auto q = mat_vec(Linv, p);
    return std::polar(1.0, -minkowski_dot(p, shift)) * gamma_lift(L, inner(q));
  });
}

MomentumTestFunction MomentumTestFunction::with_L(int m) const {
  const Eval inner = eval_;
  return MomentumTestFunction(fock_d_, [inner, m](std::span<const double> p) {
    MomentumT<Complex> pc(p.begin(), p.end());
    return apply_L<Complex>(m, pc, inner(p));
  });
}

std::vector<FockVector<Complex>> pi_values(const MomentumTestFunction& f, const DiscretizedSingleString& s) {
  std::vector<FockVector<Complex>> out;
  out.reserve(s.nodes().size());
  const double root = std::sqrt(kTwoPi);
  for (const auto& n : s.nodes()) {
    const auto level = level_of_mass(n.r);
    if (!level) {
      out.emplace_back(s.fock_d());
      continue;
    }
    out.push_back(Complex(root, 0.0) * level_part(f(n.p), *level));
  }
  return out;
}

std::vector<Complex> discretize(const MomentumTestFunction& f, const DiscretizedSingleString& s) {
  return s.coordinates(pi_values(f, s));
}

MomentumTestFunction constrained_test_function(int fock_d, double r,
                                               const std::function<FockVector<Complex>(std::span<const double>)>& psi0,
                                               const std::function<double(double)>& chi,
                                               const std::vector<std::vector<double>>& check_nodes) {
  const auto level = level_of_mass(r);
  if (!level) throw std::invalid_argument("constrained_test_function: r must be 2(level-1) for a level >= 1");
  if (std::abs(chi(0.0) - 1.0) > 1e-15) throw std::invalid_argument("constrained_test_function: chi(0) must be 1");
  auto h = [psi0, r, fock_d](std::span<const double> p) {
    std::vector<double> spatial(p.begin() + 1, p.end());
    std::vector<double> on(p.size()), refl(p.size());
    const double w = omega(spatial, r);
    on[0] = refl[0] = w;
    for (std::size_t i = 1; i < p.size(); ++i) {
      on[i] = p[i];
      refl[i] = -p[i];
    }
    FockVector<Complex> v = psi0(on);
    v += conjugation(ConjugationKind::C1, psi0(refl));
    if (v.d() != fock_d) throw std::invalid_argument("constrained_test_function: psi0 has the wrong Fock dimension");
    return v;
  };
  for (const auto& p : check_nodes) {
    double p2 = -p[0] * p[0];
    for (std::size_t i = 1; i < p.size(); ++i) p2 += p[i] * p[i];
    if (p[0] <= 0 || std::abs(p2 + r) > 1e-9 * (1.0 + p[0] * p[0]))
      throw std::invalid_argument("constrained_test_function: check node is not on V_r^+");
    const FockVector<Complex> v = h(p);
    for (const auto& [occ, c] : v.terms())
      if (occ.level() != *level) throw std::invalid_argument("constrained_test_function: psi0 is not at the level of mass r");
    const double vn = std::sqrt(inner_definite(v, v).real());
    MomentumT<Complex> pc(p.begin(), p.end());
    double scale = 1.0;
    for (double x : p) scale = std::max(scale, std::abs(x));
    for (int m = 1; m <= *level; ++m) {
      const FockVector<Complex> lv = apply_L<Complex>(m, pc, v);
      if (std::sqrt(inner_definite(lv, lv).real()) > 1e-10 * vn * std::pow(scale, m))
        throw std::invalid_argument("constrained_test_function: psi0 violates the L_" + std::to_string(m) +
                                    " constraint at a node");
    }
  }
  const double norm = 1.0 / std::sqrt(kTwoPi);
  return MomentumTestFunction(fock_d, [h, chi, r, norm](std::span<const double> p) {
    double p2 = -p[0] * p[0];
    for (std::size_t i = 1; i < p.size(); ++i) p2 += p[i] * p[i];
    const double c = chi(p2 + r);
    if (c == 0.0) return FockVector<Complex>(static_cast<int>(0) + h(p).d());
    return Complex(norm * c, 0.0) * h(p);
  });
}

MultiStringState MultiStringState::vacuum() { return one({}); }

MultiStringState MultiStringState::one(std::vector<std::uint16_t> elements, Complex c) {
  MultiStringState s;
  std::sort(elements.begin(), elements.end());
  s.add(std::move(elements), c);
  return s;
}

void MultiStringState::add(Key key, Complex c) {
  if (c == Complex{}) return;
  auto [it, fresh] = terms.try_emplace(std::move(key), c);
  if (!fresh) {
    it->second += c;
    if (it->second == Complex{}) terms.erase(it);
  }
}

MultiStringState& MultiStringState::operator+=(const MultiStringState& o) {
  for (const auto& [k, c] : o.terms) add(k, c);
  return *this;
}

MultiStringState& MultiStringState::operator-=(const MultiStringState& o) {
  for (const auto& [k, c] : o.terms) add(k, -c);
  return *this;
}

MultiStringState& MultiStringState::operator*=(Complex s) {
  if (s == Complex{}) {
    terms.clear();
    return *this;
  }
  for (auto& [k, c] : terms) c *= s;
  return *this;
}

std::size_t MultiStringState::max_quanta() const {
  std::size_t m = 0;
  for (const auto& [k, c] : terms) m = std::max(m, k.size());
  return m;
}

void MultiStringState::prune(double tol) {
  std::erase_if(terms, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

MultiStringState operator+(MultiStringState a, const MultiStringState& b) { return a += b; }
MultiStringState operator-(MultiStringState a, const MultiStringState& b) { return a -= b; }
MultiStringState operator*(Complex s, MultiStringState a) { return a *= s; }

MultiStringState create(const std::vector<Complex>& f, const MultiStringState& psi) {
  MultiStringState out;
  for (const auto& [k, c] : psi.terms)
    for (std::size_t a = 0; a < f.size(); ++a)
      if (f[a] != Complex{}) out.add(inserted(k, static_cast<std::uint16_t>(a)), c * f[a]);
  return out;
}

MultiStringState annihilate(const std::vector<Complex>& pairings, const MultiStringState& psi) {
  MultiStringState out;
  for (const auto& [k, c] : psi.terms)
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (k[i] >= pairings.size()) throw std::invalid_argument("basis mismatch: state refers to a missing element");
      const Complex pi = pairings[k[i]];
      if (pi == Complex{}) continue;
      MultiStringState::Key rest = k;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
      out.add(std::move(rest), c * pi);
    }
  return out;
}

MultiStringState field_apply(const DiscretizedSingleString& s, const std::vector<Complex>& f, const MultiStringState& psi) {
  if (f.size() != s.size()) throw std::invalid_argument("basis mismatch: test function coordinates");
  std::vector<Complex> pairings(s.size());
  for (std::size_t b = 0; b < s.size(); ++b)
    for (std::size_t a : s.at_node(s.elements()[b].node)) pairings[b] += std::conj(f[a]) * s.gram()(a, b);
  return create(f, psi) + annihilate(pairings, psi);
}

namespace {

Complex permanent(const Matrix<Complex>& g, const MultiStringState::Key& m, const MultiStringState::Key& n) {
  const std::size_t k = m.size();
  if (k == 0) return {1.0, 0.0};
  std::vector<std::size_t> perm(k);
  for (std::size_t i = 0; i < k; ++i) perm[i] = i;
  Complex s{};
  do {
    Complex t{1.0, 0.0};
    for (std::size_t i = 0; i < k && t != Complex{}; ++i) t *= g(m[i], n[perm[i]]);
    s += t;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return s;
}

// sum conj(a_M) b_N perm(g[M][N]) using the sparsity of g.
Complex multi_pairing(const Matrix<Complex>& g, const MultiStringState& a, const MultiStringState& b,
                      const std::vector<std::vector<std::uint16_t>>& neighbours) {
  Complex total{};
  std::set<MultiStringState::Key> seen;
  for (const auto& [m, cm] : a.terms) {
    seen.clear();
    std::vector<MultiStringState::Key> cur{{}};
    for (std::uint16_t x : m) {
      std::vector<MultiStringState::Key> next;
      for (const auto& partial : cur)
        for (std::uint16_t y : neighbours[x]) next.push_back(inserted(partial, y));
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      cur = std::move(next);
    }
    for (const auto& n : cur) {
      auto it = b.terms.find(n);
      if (it == b.terms.end()) continue;
      total += std::conj(cm) * it->second * permanent(g, m, n);
    }
  }
  return total;
}

std::vector<std::vector<std::uint16_t>> neighbours_of(const Matrix<Complex>& g) {
  std::vector<std::vector<std::uint16_t>> out(g.rows());
  for (std::size_t a = 0; a < g.rows(); ++a)
    for (std::size_t b = 0; b < g.cols(); ++b)
      if (g(a, b) != Complex{}) out[a].push_back(static_cast<std::uint16_t>(b));
  return out;
}

}  // namespace

Complex inner(const DiscretizedSingleString& s, const MultiStringState& a, const MultiStringState& b) {
  return multi_pairing(s.gram(), a, b, neighbours_of(s.gram()));
}

double definite_norm(const DiscretizedSingleString& s, const MultiStringState& a) {
  return std::sqrt(std::max(0.0, multi_pairing(s.definite_gram(), a, a, neighbours_of(s.definite_gram())).real()));
}

double field_commutator_residual(const DiscretizedSingleString& s, const std::vector<Complex>& f,
                                 const std::vector<Complex>& g, const MultiStringState& psi) {
  const MultiStringState fg = field_apply(s, f, field_apply(s, g, psi));
  const MultiStringState gf = field_apply(s, g, field_apply(s, f, psi));
  const Complex c(0.0, 2.0 * s.pairing(f, g).imag());
  const MultiStringState res = fg - gf - c * psi;
  const double scale = definite_norm(s, fg) + definite_norm(s, gf) + std::abs(c) * definite_norm(s, psi);
  return scale == 0.0 ? 0.0 : definite_norm(s, res) / scale;
}

Matrix<Complex> single_string_action(const DiscretizedSingleString& s, std::span<const double> a,
                                     const Matrix<double>& L, bool allow_loss) {
  if (static_cast<int>(L.rows()) != s.fock_d() || a.size() != L.rows())
    throw std::invalid_argument("poincare_act: transform dimension differs from the discretization");
  const std::size_t n = s.size();
  Matrix<Complex> U(n, n);
  for (std::size_t a_idx = 0; a_idx < n; ++a_idx) {
    const auto& e = s.elements()[a_idx];
    const auto q = mat_vec(L, s.nodes()[e.node].p);
    const auto k = s.find_node(q);
    if (!k) {
      if (allow_loss) continue;
      throw std::invalid_argument("poincare_act: node set is not closed under the transform (element " +
                                  std::to_string(a_idx) + ")");
    }
    const Complex phase = std::polar(1.0, -minkowski_dot(s.nodes()[*k].p, a));
    const auto c = s.node_coordinates(*k, gamma_lift(L, e.v));
    const auto& idx = s.at_node(*k);
    for (std::size_t i = 0; i < idx.size(); ++i) U(idx[i], a_idx) = phase * c[i];
  }
  return U;
}

namespace {

MultiStringState second_quantize(const Matrix<Complex>& U, const MultiStringState& psi) {
  MultiStringState out;
  for (const auto& [m, c] : psi.terms) {
    std::map<MultiStringState::Key, Complex> cur{{{}, c}};
    for (std::uint16_t x : m) {
      std::map<MultiStringState::Key, Complex> next;
      for (const auto& [partial, v] : cur)
        for (std::size_t b = 0; b < U.rows(); ++b) {
          const Complex u = U(b, x);
          if (u == Complex{}) continue;
          next[inserted(partial, static_cast<std::uint16_t>(b))] += v * u;
        }
      cur = std::move(next);
    }
    for (auto& [k, v] : cur) out.add(k, v);
  }
  return out;
}

}  // namespace

MultiStringState poincare_act(const DiscretizedSingleString& s, std::span<const double> a, const Matrix<double>& L,
                              const MultiStringState& psi) {
  // Only elements present in psi must map inside the node set.
  std::set<std::uint16_t> used;
  for (const auto& [m, c] : psi.terms) used.insert(m.begin(), m.end());
  const Matrix<Complex> U = single_string_action(s, a, L, true);
  for (std::uint16_t x : used) {
    bool any = false;
    for (std::size_t b = 0; b < U.rows() && !any; ++b) any = U(b, x) != Complex{};
    if (!any && !s.elements()[x].v.is_zero())
      throw std::invalid_argument("poincare_act: node set is not closed under the transform for element " +
                                  std::to_string(x));
  }
  return second_quantize(U, psi);
}

double covariance_residual(const DiscretizedSingleString& s, const MomentumTestFunction& f, std::span<const double> a,
                           const Matrix<double>& L, const MultiStringState& psi) {
  const Matrix<double> Linv = lorentz_inverse(L);
  std::vector<double> ainv = mat_vec(Linv, a);
  for (double& x : ainv) x = -x;
  const std::vector<Complex> fc = discretize(f, s);
  const MultiStringState lhs = poincare_act(s, a, L, field_apply(s, fc, poincare_act(s, ainv, Linv, psi)));
  const MultiStringState rhs = field_apply(s, discretize(f.transformed(a, L), s), psi);
  const double scale = definite_norm(s, rhs);
  const double diff = definite_norm(s, lhs - rhs);
  return scale == 0.0 ? diff : diff / scale;
}

ObservableReport observable_lift_check(const DiscretizedSingleString& s, const MomentumTestFunction& f,
                                       const std::vector<MultiStringState>& prime_probes,
                                       const std::vector<MultiStringState>& null_probes, int m_max, double tolerance) {
  ObservableReport rep;
  rep.tolerance = tolerance;
  std::vector<bool> prime(s.size(), false);
  for (std::size_t a = 0; a < s.size(); ++a) {
    const auto k = s.elements()[a].kind;
    prime[a] = k == ElementKind::physical || k == ElementKind::null;
  }
  const std::vector<Complex> fc = discretize(f, s);

  // (i) Phi(F) K'_f inside K'_f.
  auto check_i = [&](const MultiStringState& psi) {
    const MultiStringState out = field_apply(s, fc, psi);
    MultiStringState outside;
    for (const auto& [k, c] : out.terms)
      if (std::any_of(k.begin(), k.end(), [&](std::uint16_t x) { return !prime[x]; })) outside.add(k, c);
    const double total = definite_norm(s, out);
    if (total > 0) rep.outside_component = std::max(rep.outside_component, definite_norm(s, outside) / total);
  };
  for (const auto& p : prime_probes) check_i(p);
  for (const auto& p : null_probes) check_i(p);

  // (ii) Phi(F) K''_f orthogonal to all of K'_f, tested against every multiset of prime elements.
  std::vector<std::vector<std::uint16_t>> prime_nb(s.size());
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = 0; b < s.size(); ++b)
      if (prime[b] && s.gram()(b, a) != Complex{}) prime_nb[a].push_back(static_cast<std::uint16_t>(b));
  for (const auto& psi : null_probes) {
    const MultiStringState out = field_apply(s, fc, psi);
    const double out_norm = definite_norm(s, out);
    if (out_norm == 0.0) continue;
    std::set<MultiStringState::Key> candidates;
    for (const auto& [m, c] : out.terms) {
      std::vector<MultiStringState::Key> cur{{}};
      for (std::uint16_t x : m) {
        std::vector<MultiStringState::Key> next;
        for (const auto& partial : cur)
          for (std::uint16_t y : prime_nb[x]) next.push_back(inserted(partial, y));
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        cur = std::move(next);
      }
      candidates.insert(cur.begin(), cur.end());
    }
    for (const auto& key : candidates) {
      const MultiStringState xi = MultiStringState::one(key);
      const double xn = definite_norm(s, xi);
      rep.null_pairing = std::max(rep.null_pairing, std::abs(inner(s, xi, out)) / (xn * out_norm));
    }
  }

  // (iii) a(Pi L^_{-m} F) kills K'_f.
  for (int m = 1; m <= m_max; ++m) {
    const auto g = pi_values(f.with_L(-m), s);
    const double gn = std::sqrt(s.definite_norm2(g));
    rep.annihilator_scale = std::max(rep.annihilator_scale, gn);
    if (gn == 0.0) continue;
    const auto pairings = s.pairings_with(g);
    for (const auto& psi : prime_probes) {
      const double pn = definite_norm(s, psi);
      if (pn == 0.0) continue;
      rep.annihilator = std::max(rep.annihilator, definite_norm(s, annihilate(pairings, psi)) / (gn * pn));
    }
  }
  rep.pass_i = rep.outside_component <= tolerance;
  rep.pass_ii = rep.null_pairing <= tolerance;
  rep.pass_iii = rep.annihilator <= tolerance;
  return rep;
}

std::vector<StringElement> node_elements(int d, int level, const Momentum& p, const std::vector<Occupation>& sub_basis,
                                         bool with_complement, std::size_t node) {
  require_on_shell(d, level, p);
  auto to_vec = [&](const SparseRow& row) {
    FockBuilder<Rational> b(d);
    for (const auto& [j, c] : row) b.add(sub_basis[j], c);
    return b.finish();
  };
  const auto kernel = sparse_kernel_basis(constraint_rows(d, level, p, sub_basis), sub_basis.size());
  std::vector<FockVector<Rational>> constrained;
  for (const auto& k : kernel) constrained.push_back(to_vec(k));
  std::vector<StringElement> out;
  if (!constrained.empty()) {
    const GramMatrix<Rational> g = gram_of(constrained);
    const auto radical = radical_basis(g);
    std::vector<std::size_t> kept;
    quotient_gram(g, radical, {}, &kept);
    for (std::size_t i : kept) out.push_back({node, to_complex(constrained[i]), ElementKind::physical});
    for (const auto& c : radical) {
      FockBuilder<Rational> b(d);
      for (std::size_t i = 0; i < constrained.size(); ++i)
        if (!c[i].is_zero()) b.add(constrained[i], c[i]);
      out.push_back({node, to_complex(b.finish()), ElementKind::null});
    }
  }
  if (with_complement) {
    // (e, v)_definite = 0 for all v in H'.
    std::vector<SparseRow> rows;
    for (const auto& k : kernel) {
      SparseRow row;
      for (const auto& [j, c] : k) row[j] = c * monomial_norm(sub_basis[j], false);
      rows.push_back(std::move(row));
    }
    for (const auto& c : sparse_kernel_basis(rows, sub_basis.size()))
      out.push_back({node, to_complex(to_vec(c)), ElementKind::complement});
  }
  return out;
}

std::vector<ShellNode> orbit_nodes(const Momentum& p0, const Matrix<Rational>& L, int jmin, int jmax, double weight) {
  if (jmin > jmax) throw std::invalid_argument("orbit_nodes: empty range");
  if (!is_lorentz(L)) throw std::invalid_argument("orbit_nodes: not a Lorentz matrix");
  const Matrix<Rational> Linv = lorentz_inverse(L);
  std::vector<ShellNode> out;
  for (int j = jmin; j <= jmax; ++j) {
    Momentum p = p0;
    for (int k = 0; k < std::abs(j); ++k) p = stringlab::apply(j > 0 ? L : Linv, p);
    ShellNode n;
    for (const auto& x : p) n.p.push_back(x.to_double());
    n.r = (-minkowski_square(p)).to_double();
    n.weight = weight;
    n.exact = p;
    out.push_back(std::move(n));
  }
  return out;
}

namespace {

Momentum lightlike(int d, int sign) {
  Momentum p(static_cast<std::size_t>(d), Rational(0));
  p[0] = 1;
  p[1] = sign;
  return p;
}

double log2_bump(double p1, double center, double width) {
  if (p1 <= 0) return 0.0;
  return bump1((std::log2(p1) - center) / width);
}

double chi_profile(double s) { return bump1(s / 4.0) / bump1(0.0); }

}  // namespace

Matrix<Rational> orbit_boost(int d) { return rational_boost(Rational(5, 4), Rational(3, 4), 1, d); }

DiscretizedSingleString lightlike_orbit_string(int d, int jmax) {
  if (d < 2 || jmax < 0) throw std::invalid_argument("lightlike_orbit_string: need d >= 2 and jmax >= 0");
  const Matrix<Rational> L = orbit_boost(d);
  const double w = std::log(2.0) / 2.0;
  std::vector<ShellNode> nodes = orbit_nodes(lightlike(d, 1), L, -jmax, jmax, w);
  for (auto& n : orbit_nodes(lightlike(d, -1), L, -jmax, jmax, w)) nodes.push_back(std::move(n));
  std::vector<StringElement> elements;
  for (std::size_t k = 0; k < nodes.size(); ++k)
    for (int mu = 0; mu < d; ++mu)
      elements.push_back({k, FockVector<Complex>::monomial(d, Occupation::single(mu, 1), Complex(1.0, 0.0)),
                          ElementKind::generic});
  return DiscretizedSingleString(d, std::move(nodes), std::move(elements));
}

MomentumTestFunction orbit_bump_test_function(FockVector<Complex> polarization, double center, double width) {
  if (!(width > 0)) throw std::invalid_argument("orbit_bump_test_function: width must be positive");
  const int d = polarization.d();
  return MomentumTestFunction(d, [pol = std::move(polarization), center, width](std::span<const double> p) {
    double p2 = -p[0] * p[0];
    for (std::size_t i = 1; i < p.size(); ++i) p2 += p[i] * p[i];
    const double a = log2_bump(std::abs(p[1]), center, width) * chi_profile(p2);
    return Complex(a, 0.0) * pol;
  });
}

DiscretizedSingleString observable_string_d26(int jmax, std::size_t level2_physical, std::size_t level2_null) {
  const int d = 26;
  const Matrix<Rational> L = orbit_boost(d);
  const double w = std::log(2.0) / 2.0;
  std::vector<ShellNode> nodes;
  for (auto& n : orbit_nodes(lightlike(d, 1), L, 0, jmax, w)) nodes.push_back(std::move(n));
  for (auto& n : orbit_nodes(lightlike(d, -1), L, -jmax, 0, w)) nodes.push_back(std::move(n));
  const std::size_t massless = nodes.size();
  Momentum p2(static_cast<std::size_t>(d), Rational(0));
  p2[0] = Rational(3, 2);
  p2[1] = Rational(1, 2);
  for (auto& n : orbit_nodes(p2, L, 0, jmax, w)) nodes.push_back(std::move(n));

  std::vector<Occupation> sub;
  for (int mu = 0; mu < 4; ++mu) sub.push_back(Occupation::single(mu, 1));
  std::vector<StringElement> elements;
  for (std::size_t k = 0; k < massless; ++k)
    for (auto& e : node_elements(d, 1, *nodes[k].exact, sub, true, k)) elements.push_back(std::move(e));

  const PhysicalDecomposition pd = physical_decomposition(d, 2, p2);
  if (pd.physical.size() < level2_physical || pd.null.size() < level2_null)
    throw std::logic_error("observable_string_d26: not enough level-2 vectors");
  for (std::size_t k = massless; k < nodes.size(); ++k) {
    const int j = static_cast<int>(k - massless);
    Matrix<Rational> Lj = Matrix<Rational>::identity(d, Rational(1));
    for (int i = 0; i < j; ++i) Lj = L * Lj;
    for (std::size_t i = 0; i < level2_physical; ++i)
      elements.push_back({k, to_complex(gamma_lift(Lj, pd.physical[i])), ElementKind::physical});
    for (std::size_t i = 0; i < level2_null; ++i)
      elements.push_back({k, to_complex(gamma_lift(Lj, pd.null[i])), ElementKind::null});
  }
  return DiscretizedSingleString(d, std::move(nodes), std::move(elements));
}

MomentumTestFunction observable_test_function(const DiscretizedSingleString& s) {
  const int d = s.fock_d();
  auto psi0 = [d](std::span<const double> p) {
    double perp = 0.0;
    for (std::size_t i = 2; i < p.size(); ++i) perp += p[i] * p[i];
    const double amp = log2_bump(p[1], 1.0, 2.5) * bump1(std::sqrt(perp));
    FockBuilder<Complex> b(d);
    if (amp != 0.0) {
      // sum_mu c_mu p^mu = 0 for every p
      b.add(Occupation::single(2, 1), Complex(amp * p[0], 0.0));
      b.add(Occupation::single(0, 1), Complex(amp * (0.5 * p[1] - p[2]), 0.0));
      b.add(Occupation::single(1, 1), Complex(-amp * 0.5 * p[0], 0.0));
    }
    return b.finish();
  };
  std::vector<std::vector<double>> checks;
  for (const auto& n : s.nodes())
    if (n.r == 0.0) checks.push_back(n.p);
  return constrained_test_function(d, 0.0, psi0, chi_profile, checks);
}

MomentumTestFunction unconstrained_test_function(const DiscretizedSingleString& s) {
  const int d = s.fock_d();
  return MomentumTestFunction(d, [d](std::span<const double> p) {
    double p2 = -p[0] * p[0];
    for (std::size_t i = 1; i < p.size(); ++i) p2 += p[i] * p[i];
    const double amp = chi_profile(p2) * log2_bump(std::abs(p[1]), 1.0, 2.5) / std::sqrt(kTwoPi);
    return FockVector<Complex>::monomial(d, Occupation::single(0, 1), Complex(amp, 0.0));
  });
}

namespace {

std::vector<MultiStringState> random_probes(const DiscretizedSingleString& s, const std::vector<std::uint16_t>& pool,
                                            const std::vector<std::uint16_t>& must, std::size_t max_quanta,
                                            std::size_t count, std::uint64_t seed, bool with_vacuum) {
  std::vector<MultiStringState> out;
  if (with_vacuum && count > 0) out.push_back(MultiStringState::vacuum());
  if (pool.empty()) return out;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::uniform_int_distribution<std::size_t> quanta(1, std::max<std::size_t>(1, max_quanta));
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  while (out.size() < count) {
    MultiStringState psi;
    const int nterms = 1 + static_cast<int>(rng() % 3);
    for (int t = 0; t < nterms; ++t) {
      std::vector<std::uint16_t> key;
      const std::size_t q = quanta(rng);
      if (!must.empty()) {
        std::uniform_int_distribution<std::size_t> pm(0, must.size() - 1);
        key.push_back(must[pm(rng)]);
      }
      while (key.size() < q) key.push_back(pool[pick(rng)]);
      std::sort(key.begin(), key.end());
      psi.add(key, Complex(amp(rng), amp(rng)));
    }
    if (!psi.terms.empty() && definite_norm(s, psi) > 0) out.push_back(std::move(psi));
  }
  return out;
}

std::vector<std::uint16_t> indices_of(const DiscretizedSingleString& s, std::initializer_list<ElementKind> kinds) {
  std::vector<std::uint16_t> out;
  for (std::size_t a = 0; a < s.size(); ++a)
    if (std::find(kinds.begin(), kinds.end(), s.elements()[a].kind) != kinds.end())
      out.push_back(static_cast<std::uint16_t>(a));
  return out;
}

}  // namespace

std::vector<MultiStringState> prime_probes(const DiscretizedSingleString& s, std::size_t max_quanta, std::size_t count,
                                           std::uint64_t seed) {
  return random_probes(s, indices_of(s, {ElementKind::physical, ElementKind::null}), {}, max_quanta, count, seed, true);
}

std::vector<MultiStringState> null_probes(const DiscretizedSingleString& s, std::size_t max_quanta, std::size_t count,
                                          std::uint64_t seed) {
  return random_probes(s, indices_of(s, {ElementKind::physical, ElementKind::null}), indices_of(s, {ElementKind::null}),
                       max_quanta, count, seed, false);
}

std::vector<MultiStringState> covariance_probes(const DiscretizedSingleString& s, const Matrix<double>& L,
                                                std::size_t max_quanta, std::size_t count, std::uint64_t seed) {
  const Matrix<double> Linv = lorentz_inverse(L);
  std::vector<std::uint16_t> pool;
  for (std::size_t a = 0; a < s.size(); ++a)
    if (s.find_node(mat_vec(Linv, s.nodes()[s.elements()[a].node].p))) pool.push_back(static_cast<std::uint16_t>(a));
  return random_probes(s, pool, {}, max_quanta, count, seed, true);
}

std::vector<MultiStringState> probe_battery(const DiscretizedSingleString& s, std::size_t max_quanta, std::size_t count,
                                            std::uint64_t seed) {
  std::vector<std::uint16_t> all(s.size());
  for (std::size_t a = 0; a < s.size(); ++a) all[a] = static_cast<std::uint16_t>(a);
  return random_probes(s, all, {}, max_quanta, count, seed, true);
}

}  // namespace stringlab
