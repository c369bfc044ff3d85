#include "stringlab/physical_spectrum.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <stdexcept>

namespace stringlab {

Rational level_mass(int level) { return Rational(2LL * (level - 1)); }

void require_on_shell(int d, int level, const Momentum& p) {
  if (static_cast<int>(p.size()) != d) throw std::invalid_argument("momentum has the wrong number of components");
  if (level < 0) throw std::invalid_argument("level must be >= 0");
  const Rational p2 = minkowski_square(p);
  if (!(p2 == -level_mass(level)))
    throw std::invalid_argument("momentum is off-shell for level " + std::to_string(level) + ": p^2 = " + p2.to_string() +
                                ", expected " + (-level_mass(level)).to_string());
  if (level >= 1 && p[0].sign() <= 0)
    throw std::invalid_argument("momentum must lie on the forward sheet (p^0 > 0) for r >= 0");
}

namespace {

std::size_t index_of(const std::vector<Occupation>& basis, const Occupation& occ) {
  auto it = std::lower_bound(basis.begin(), basis.end(), occ);
  if (it == basis.end() || !(*it == occ)) throw std::logic_error("monomial outside the enumerated level basis");
  return static_cast<std::size_t>(it - basis.begin());
}

FockVector<Rational> to_vector(int d, const std::vector<Occupation>& basis, const SparseRow& coeffs) {
  FockBuilder<Rational> b(d);
  for (const auto& [j, c] : coeffs) b.add(basis[j], c);
  return b.finish();
}

}  // namespace

std::vector<SparseRow> constraint_rows(int d, int level, const Momentum& p, const std::vector<Occupation>& basis) {
  std::vector<SparseRow> rows;
  for (int m = 1; m <= level; ++m) {
    const std::vector<Occupation> targets = level_basis(d, level - m);
    std::vector<SparseRow> block(targets.size());
    for (std::size_t j = 0; j < basis.size(); ++j) {
      FockBuilder<Rational> b(d);
      apply_L_monomial(m, p, basis[j], Rational(1), b);
      const FockVector<Rational> image = b.finish();
      for (const auto& [occ, c] : image.terms()) block[index_of(targets, occ)][j] = c;
    }
    for (auto& r : block) rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<FockVector<Rational>> constrained_space(int d, int level, const Momentum& p) {
  require_on_shell(d, level, p);
  const std::vector<Occupation> basis = level_basis(d, level);
  const auto kernel = sparse_kernel_basis(constraint_rows(d, level, p, basis), basis.size());
  std::vector<FockVector<Rational>> out;
  out.reserve(kernel.size());
  for (const auto& k : kernel) out.push_back(to_vector(d, basis, k));
  return out;
}

GramMatrix<Rational> gram_of(const std::vector<FockVector<Rational>>& vs) {
  GramMatrix<Rational> g;
  g.entries = Matrix<Rational>(vs.size(), vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i; j < vs.size(); ++j) {
      const Rational x = inner_indefinite(vs[i], vs[j]);
      g.entries(i, j) = x;
      g.entries(j, i) = x;
    }
  for (std::size_t i = 0; i < vs.size(); ++i) g.basis_labels.push_back("v" + std::to_string(i));
  return g;
}

namespace {

FockVector<Rational> combine(const std::vector<FockVector<Rational>>& vs, const CoeffVector<Rational>& c, int d) {
  FockBuilder<Rational> b(d);
  for (std::size_t i = 0; i < vs.size(); ++i)
    if (!c[i].is_zero()) b.add(vs[i], c[i]);
  return b.finish();
}

}  // namespace

std::vector<FockVector<Rational>> null_subspace(const std::vector<FockVector<Rational>>& constrained, const Momentum& p) {
  const int d = static_cast<int>(p.size());
  const GramMatrix<Rational> g = gram_of(constrained);
  std::vector<FockVector<Rational>> out;
  for (const auto& c : radical_basis(g)) out.push_back(combine(constrained, c, d));
  return out;
}

PhysicalDecomposition physical_decomposition(int d, int level, const Momentum& p) {
  PhysicalDecomposition out;
  out.constrained = constrained_space(d, level, p);
  const GramMatrix<Rational> g = gram_of(out.constrained);
  const auto radical = radical_basis(g);
  for (const auto& c : radical) out.null.push_back(combine(out.constrained, c, d));
  std::vector<std::size_t> kept;
  out.physical_gram = quotient_gram(g, radical, {}, &kept);
  for (std::size_t i : kept) out.physical.push_back(out.constrained[i]);
  return out;
}

namespace {

struct Bordered {
  std::vector<Occupation> basis;
  std::vector<SparseRow> rows;
  std::vector<Rational> diag;  // monomial norms
  std::size_t rank = 0;
  Matrix<Rational> schur;      // C D^{-1} C^T
};

Bordered bordered_setup(int d, int level, const Momentum& p) {
  Bordered b;
  b.basis = level_basis(d, level);
  b.rows = constraint_rows(d, level, p, b.basis);
  b.diag.reserve(b.basis.size());
  for (const auto& o : b.basis) b.diag.push_back(monomial_norm(o, true));
  b.rank = sparse_row_echelon(b.rows).pivots.size();
  const std::size_t k = b.rows.size();
  // Column view of C scaled by D^{-1}.
  std::vector<std::vector<std::pair<std::size_t, Rational>>> cols(b.basis.size());
  for (std::size_t a = 0; a < k; ++a)
    for (const auto& [j, v] : b.rows[a]) cols[j].emplace_back(a, v);
  b.schur = Matrix<Rational>(k, k);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const Rational inv = b.diag[j].reciprocal();
    for (const auto& [a, va] : cols[j]) {
      const Rational s = va * inv;
      for (const auto& [c, vc] : cols[j])
        if (c >= a) b.schur(a, c) += s * vc;
    }
  }
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t c = 0; c < a; ++c) b.schur(a, c) = b.schur(c, a);
  return b;
}

Inertia diag_inertia(const std::vector<Rational>& diag) {
  Inertia in;
  for (const auto& x : diag) (x.sign() > 0 ? in.n_plus : x.sign() < 0 ? in.n_minus : in.n_zero) += 1;
  return in;
}

PhysicalLevelReport bordered_report(int d, int level, const Momentum& p) {
  const Bordered b = bordered_setup(d, level, p);
  const std::size_t k = b.rows.size();
  const Inertia s = inertia(b.schur);
  // In(Z^T D Z) = In(D) + In(-S) - (rank, k - rank, rank) for the bordered matrix [[D, C^T], [C, 0]].
  Inertia total = diag_inertia(b.diag);
  total.n_plus += s.n_minus;
  total.n_zero += s.n_zero;
  total.n_minus += s.n_plus;
  if (total.n_plus < b.rank || total.n_minus < b.rank || total.n_zero < k - b.rank)
    throw std::logic_error("bordered inertia bookkeeping failed");
  total.n_plus -= b.rank;
  total.n_minus -= b.rank;
  total.n_zero -= k - b.rank;

  PhysicalLevelReport rep;
  rep.d = d;
  rep.level = level;
  rep.r = level_mass(level);
  rep.p = p;
  rep.dim_total = b.basis.size();
  rep.dim_constrained = b.basis.size() - b.rank;
  rep.constrained_inertia = total;
  rep.dim_null = total.n_zero;
  rep.dim_physical = rep.dim_constrained - rep.dim_null;
  rep.inertia = Inertia{total.n_plus, 0, total.n_minus};
  rep.route = "bordered";
  return rep;
}

PhysicalLevelReport explicit_report(int d, int level, const Momentum& p) {
  const PhysicalDecomposition pd = physical_decomposition(d, level, p);
  PhysicalLevelReport rep;
  rep.d = d;
  rep.level = level;
  rep.r = level_mass(level);
  rep.p = p;
  rep.dim_total = level_basis(d, level).size();
  rep.dim_constrained = pd.constrained.size();
  rep.dim_null = pd.null.size();
  rep.dim_physical = pd.physical.size();
  rep.inertia = inertia(pd.physical_gram);
  Inertia ci = rep.inertia;
  ci.n_zero += rep.dim_null;
  rep.constrained_inertia = ci;
  rep.route = "explicit";
  return rep;
}

}  // namespace

std::vector<FockVector<Rational>> null_subspace_bordered(int d, int level, const Momentum& p) {
  require_on_shell(d, level, p);
  const Bordered b = bordered_setup(d, level, p);
  std::vector<SparseRow> vecs;
  for (const auto& y : kernel_basis(b.schur)) {
    // z = D^{-1} C^T y
    SparseRow z;
    for (std::size_t a = 0; a < y.size(); ++a) {
      if (y[a].is_zero()) continue;
      for (const auto& [j, v] : b.rows[a]) z[j] += y[a] * v;
    }
    for (auto it = z.begin(); it != z.end();) {
      if (it->second.is_zero()) {
        it = z.erase(it);
        continue;
      }
      it->second /= b.diag[it->first];
      ++it;
    }
    if (!z.empty()) vecs.push_back(std::move(z));
  }
  // Drop dependent vectors coming from ker C^T.
  const SparseEchelon e = sparse_row_echelon(vecs);
  std::vector<FockVector<Rational>> out;
  for (const auto& r : e.rows) out.push_back(to_vector(d, b.basis, r));
  return out;
}

PhysicalLevelReport physical_gram(int d, int level, const Momentum& p, SpectrumRoute route) {
  require_on_shell(d, level, p);
  if (route == SpectrumRoute::automatic) route = level <= 2 ? SpectrumRoute::explicit_gram : SpectrumRoute::bordered;
  return route == SpectrumRoute::explicit_gram ? explicit_report(d, level, p) : bordered_report(d, level, p);
}

std::uint64_t transverse_count(int d, int level) {
  if (d < 3) throw std::invalid_argument("transverse_count: need d >= 3");
  return colored_partition_count(d - 2, level);
}

std::vector<PhysicalLevelReport> spectrum_table(int d, int max_level, const std::vector<Momentum>& momenta,
                                                SpectrumRoute route, int jobs) {
  if (max_level < 0) throw std::invalid_argument("spectrum_table: max_level must be >= 0");
  for (const auto& q : momenta) {
    if (static_cast<int>(q.size()) != d) throw std::invalid_argument("spectrum_table: momentum has the wrong dimension");
    bool fits = false;
    for (int level = 0; level <= max_level && !fits; ++level) fits = minkowski_square(q) == -level_mass(level);
    if (!fits) throw std::invalid_argument("spectrum_table: momentum " + momentum_to_string(q) + " is not on any requested shell");
  }
  std::vector<Momentum> points;
  for (int level = 0; level <= max_level; ++level) {
    const Rational r = level_mass(level);
    Momentum p = rational_shell_point(r, d, Sheet::plus);
    for (const auto& q : momenta)
      if (minkowski_square(q) == -r) {
        p = q;
        break;
      }
    points.push_back(std::move(p));
  }
  std::vector<PhysicalLevelReport> out(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  // Highest levels first: they dominate the runtime.
  std::atomic<int> next{max_level};
  auto work = [&] {
    for (int level; (level = next--) >= 0;) {
      try {
        out[level] = physical_gram(d, level, points[level], route);
      } catch (...) {
        errors[level] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < std::min(jobs, max_level + 1); ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace stringlab
