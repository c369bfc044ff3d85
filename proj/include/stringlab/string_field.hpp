#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stringlab/fock.hpp"
#include "stringlab/matrix.hpp"
#include "stringlab/propagator_locality.hpp"
#include "stringlab/virasoro.hpp"

namespace stringlab {

/// A momentum on some V_r^+ with its quadrature weight. `exact` keeps the rational point when known.
struct ShellNode {
  std::vector<double> p;
  double r = 0.0;
  double weight = 0.0;
  std::optional<Momentum> exact;
};

enum class ElementKind { generic, physical, null, complement };

const char* to_string(ElementKind k);

/// One single-string basis vector: a Fock vector sitting at one node.
struct StringElement {
  std::size_t node = 0;
  FockVector<Complex> v;
  ElementKind kind = ElementKind::generic;
};

/// Finite stand-in for H_+: basis vectors b_a = (node, v_a) with pairing
/// <b_a, b_b> = delta_{node} w_node <v_a, v_b>.
class DiscretizedSingleString {
 public:
  DiscretizedSingleString(int fock_d, std::vector<ShellNode> nodes, std::vector<StringElement> elements,
                          std::size_t max_elements = 64);

  int fock_d() const { return fock_d_; }
  std::size_t size() const { return elements_.size(); }
  const std::vector<ShellNode>& nodes() const { return nodes_; }
  const std::vector<StringElement>& elements() const { return elements_; }
  const Matrix<Complex>& gram() const { return gram_; }
  const Matrix<Complex>& definite_gram() const { return definite_; }
  /// Indices of elements at a node.
  const std::vector<std::size_t>& at_node(std::size_t node) const { return by_node_[node]; }

  /// Node whose momentum equals p within tol * (1 + |p|).
  std::optional<std::size_t> find_node(std::span<const double> p, double tol = 1e-9) const;

  /// Coordinates of value in the span of the elements at `node`; throws std::invalid_argument
  /// ("basis mismatch") when value is not in that span.
  std::vector<Complex> node_coordinates(std::size_t node, const FockVector<Complex>& value) const;

  /// Coordinates of a node function (one Fock vector per node).
  std::vector<Complex> coordinates(const std::vector<FockVector<Complex>>& values) const;

  /// conj(u)^T G v.
  Complex pairing(const std::vector<Complex>& u, const std::vector<Complex>& v) const;

  /// <f, b_a> for every element, for a node function f that need not lie in the span.
  std::vector<Complex> pairings_with(const std::vector<FockVector<Complex>>& values) const;

  /// sum_nodes w (f(p), f(p)) in the definite product.
  double definite_norm2(const std::vector<FockVector<Complex>>& values) const;

 private:
  int fock_d_;
  std::vector<ShellNode> nodes_;
  std::vector<StringElement> elements_;
  std::vector<std::vector<std::size_t>> by_node_;
  Matrix<Complex> gram_;
  Matrix<Complex> definite_;
};

/// Momentum-space test function p -> F~(p) with values in the Fock space.
class MomentumTestFunction {
 public:
  using Eval = std::function<FockVector<Complex>(std::span<const double>)>;

  MomentumTestFunction(int fock_d, Eval eval) : fock_d_(fock_d), eval_(std::move(eval)) {}

  /// F~(p) of a separable position-space profile times its polarization.
  static MomentumTestFunction from_spec(const TestFunctionSpec& f);

  int fock_d() const { return fock_d_; }
  FockVector<Complex> operator()(std::span<const double> p) const { return eval_(p); }

  /// F_{a, Lambda}: p -> exp(-i p.a) Gamma(Lambda) F~(Lambda^{-1} p).
  MomentumTestFunction transformed(std::span<const double> a, const Matrix<double>& L) const;

  /// Fourier transform of L^_m F: p -> L_m(p) F~(p).
  MomentumTestFunction with_L(int m) const;

 private:
  int fock_d_;
  Eval eval_;
};

/// (Pi F)(p) = sqrt(2 pi) P_r F~(p) at every node.
std::vector<FockVector<Complex>> pi_values(const MomentumTestFunction& f, const DiscretizedSingleString& s);

/// Coordinates of Pi F in the single-string basis.
std::vector<Complex> discretize(const MomentumTestFunction& f, const DiscretizedSingleString& s);

/// F~(p) = (2 pi)^{-1/2} chi(p^2 + r) h(p) with h(p) = psi0(omega, p) + C1 psi0(omega, -p).
/// psi0 must take values at level 2(level-1) = r; constraints L_m h = 0 (m = 1..level) are verified at
/// every check node and a violation throws std::invalid_argument. chi(0) must equal 1.
MomentumTestFunction constrained_test_function(int fock_d, double r,
                                               const std::function<FockVector<Complex>(std::span<const double>)>& psi0,
                                               const std::function<double(double)>& chi,
                                               const std::vector<std::vector<double>>& check_nodes);

/// Symmetric multi-string state: multiset of element indices -> amplitude of a^+_{b1} ... a^+_{bk} Omega.
struct MultiStringState {
  using Key = std::vector<std::uint16_t>;
  std::map<Key, Complex> terms;

  static MultiStringState vacuum();
  static MultiStringState one(std::vector<std::uint16_t> elements, Complex c = {1.0, 0.0});

  void add(Key key, Complex c);
  MultiStringState& operator+=(const MultiStringState& o);
  MultiStringState& operator-=(const MultiStringState& o);
  MultiStringState& operator*=(Complex s);
  std::size_t max_quanta() const;
  /// Drops terms with |c| <= tol.
  void prune(double tol = 0.0);
};

MultiStringState operator+(MultiStringState a, const MultiStringState& b);
MultiStringState operator-(MultiStringState a, const MultiStringState& b);
MultiStringState operator*(Complex s, MultiStringState a);

/// a^+(f) with f given by coordinates.
MultiStringState create(const std::vector<Complex>& f, const MultiStringState& psi);

/// a(f) given the pairings <f, b_a>.
MultiStringState annihilate(const std::vector<Complex>& pairings, const MultiStringState& psi);

/// Phi(F) = a^+(Pi F) + a(Pi F).
MultiStringState field_apply(const DiscretizedSingleString& s, const std::vector<Complex>& f, const MultiStringState& psi);

/// Indefinite pairing on the multi-string space.
Complex inner(const DiscretizedSingleString& s, const MultiStringState& a, const MultiStringState& b);

/// Definite norm.
double definite_norm(const DiscretizedSingleString& s, const MultiStringState& a);

/// ||([Phi(F), Phi(G)] - 2i Im <Pi F, Pi G>) psi|| relative to the size of the terms.
double field_commutator_residual(const DiscretizedSingleString& s, const std::vector<Complex>& f,
                                 const std::vector<Complex>& g, const MultiStringState& psi);

/// Single-string U(a, Lambda) as a matrix on coordinates. Elements whose image leaves the node set
/// throw std::invalid_argument unless `allow_loss`, in which case they map to zero.
Matrix<Complex> single_string_action(const DiscretizedSingleString& s, std::span<const double> a,
                                     const Matrix<double>& L, bool allow_loss = false);

/// Second-quantized Gamma(U(a, Lambda)) on a multi-string state.
MultiStringState poincare_act(const DiscretizedSingleString& s, std::span<const double> a, const Matrix<double>& L,
                              const MultiStringState& psi);

/// ||U Phi(F) U^{-1} psi - Phi(F_{a, Lambda}) psi|| / ||Phi(F_{a, Lambda}) psi||.
double covariance_residual(const DiscretizedSingleString& s, const MomentumTestFunction& f, std::span<const double> a,
                           const Matrix<double>& L, const MultiStringState& psi);

struct ObservableReport {
  double outside_component = 0.0;   // (i)
  double null_pairing = 0.0;         // (ii)
  double annihilator = 0.0;          // (iii)
  double annihilator_scale = 0.0;    // size of the <Pi L^_{-m} F, b> pairings against physical quanta
  double tolerance = 1e-8;
  bool pass_i = false;
  bool pass_ii = false;
  bool pass_iii = false;
  bool passed() const { return pass_i && pass_ii && pass_iii; }
};

/// Checks that Phi(F) preserves K'_f, maps K''_f probes into (K'_f)^perp and that
/// a(Pi L^_{-m} F) kills the K'_f probes, m = 1..m_max. K'_f is spanned by multisets of
/// physical and null elements.
ObservableReport observable_lift_check(const DiscretizedSingleString& s, const MomentumTestFunction& f,
                                       const std::vector<MultiStringState>& prime_probes,
                                       const std::vector<MultiStringState>& null_probes, int m_max = 2,
                                       double tolerance = 1e-8);

/// Exact node elements at level `level` for an on-shell rational momentum: H'(p) intersected with the
/// span of `sub_basis` (physical representatives and null vectors), plus the definite-orthogonal
/// complement of H'(p) inside that span when `with_complement`.
std::vector<StringElement> node_elements(int d, int level, const Momentum& p, const std::vector<Occupation>& sub_basis,
                                         bool with_complement, std::size_t node);

/// Nodes Lambda^j p0 for j in [jmin, jmax] with a common weight.
std::vector<ShellNode> orbit_nodes(const Momentum& p0, const Matrix<Rational>& L, int jmin, int jmax, double weight);

/// Boost along x^1 with cosh = 5/4, sinh = 3/4; maps (1, 1, 0, ...) to 2 (1, 1, 0, ...).
Matrix<Rational> orbit_boost(int d);

/// Lightlike nodes 2^j (1, +-1, 0, ...), |j| <= jmax, weight ln 2 / 2, each carrying the full level-1 space.
DiscretizedSingleString lightlike_orbit_string(int d, int jmax);

/// F~(p) = bump((log2 |p^1| - center) / width) chi(p^2) polarization, compactly supported inside the orbit.
MomentumTestFunction orbit_bump_test_function(FockVector<Complex> polarization, double center = 0.0, double width = 1.5);

/// Desk-scale d = 26 setup: lightlike nodes 2^j (1, +-1, 0, ...) carrying level-1 vectors in the span of
/// alpha^0..alpha^3, and r = 2 nodes on the orbit of (3/2, 1/2, 0, ...) carrying level-2 H' vectors.
DiscretizedSingleString observable_string_d26(int jmax = 2, std::size_t level2_physical = 2, std::size_t level2_null = 1);

/// The real constrained level-1 test function used with observable_string_d26.
MomentumTestFunction observable_test_function(const DiscretizedSingleString& s);

/// Level-1 test function with polarization alpha^0_{-1}, which violates L_1.
MomentumTestFunction unconstrained_test_function(const DiscretizedSingleString& s);

/// Probes in K'_f (multisets of physical and null elements) and in K''_f (at least one null element).
std::vector<MultiStringState> prime_probes(const DiscretizedSingleString& s, std::size_t max_quanta, std::size_t count,
                                           std::uint64_t seed);
std::vector<MultiStringState> null_probes(const DiscretizedSingleString& s, std::size_t max_quanta, std::size_t count,
                                          std::uint64_t seed);

/// Probes built from elements whose node stays in the node set under Lambda^{-1}, so that
/// U(a, Lambda) Phi(F) U(a, Lambda)^{-1} can be applied to them. The first probe is the vacuum.
std::vector<MultiStringState> covariance_probes(const DiscretizedSingleString& s, const Matrix<double>& L,
                                                std::size_t max_quanta, std::size_t count, std::uint64_t seed);

/// Random probes over all elements with up to max_quanta quanta; the first probe is the vacuum.
std::vector<MultiStringState> probe_battery(const DiscretizedSingleString& s, std::size_t max_quanta, std::size_t count,
                                            std::uint64_t seed);

}  // namespace stringlab
