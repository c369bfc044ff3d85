#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stringlab/fock.hpp"
#include "stringlab/metric_linalg.hpp"
#include "stringlab/virasoro.hpp"

namespace stringlab {

struct PhysicalLevelReport {
  int d = 0;
  int level = 0;
  Rational r;
  Momentum p;
  std::size_t dim_total = 0;
  std::size_t dim_constrained = 0;
  std::size_t dim_null = 0;
  std::size_t dim_physical = 0;
  /// Inertia of the quotient Gram on H'(p)/H''(p).
  Inertia inertia;
  /// Inertia of the Gram restricted to H'(p), before the quotient.
  Inertia constrained_inertia;
  std::string route;
};

enum class SpectrumRoute { automatic, explicit_gram, bordered };

/// Mass value r = 2(level - 1) for which p^2 = -r is required.
Rational level_mass(int level);

/// Throws std::invalid_argument unless p^2 = -2(level - 1) and p has d components.
void require_on_shell(int d, int level, const Momentum& p);

/// Rows of the stacked constraint matrix (L_1, ..., L_level) on the level basis.
std::vector<SparseRow> constraint_rows(int d, int level, const Momentum& p, const std::vector<Occupation>& basis);

/// Basis of the joint kernel of L_1 .. L_level on the level-homogeneous subspace.
std::vector<FockVector<Rational>> constrained_space(int d, int level, const Momentum& p);

/// Exact Gram matrix <v_i, v_j> of a family of vectors.
GramMatrix<Rational> gram_of(const std::vector<FockVector<Rational>>& vs);

/// Radical of the indefinite Gram on span(constrained).
std::vector<FockVector<Rational>> null_subspace(const std::vector<FockVector<Rational>>& constrained, const Momentum& p);

/// H'(p), H''(p) and representatives of H'(p)/H''(p) together with their Gram.
struct PhysicalDecomposition {
  std::vector<FockVector<Rational>> constrained;
  std::vector<FockVector<Rational>> null;
  std::vector<FockVector<Rational>> physical;
  GramMatrix<Rational> physical_gram;
};

PhysicalDecomposition physical_decomposition(int d, int level, const Momentum& p);

PhysicalLevelReport physical_gram(int d, int level, const Momentum& p, SpectrumRoute route = SpectrumRoute::automatic);

/// Radical of the Gram on H'(p) via the bordered route (no explicit H' basis).
std::vector<FockVector<Rational>> null_subspace_bordered(int d, int level, const Momentum& p);

/// Coefficient of q^level in prod_n (1 - q^n)^{-(d-2)}.
std::uint64_t transverse_count(int d, int level);

/// One report per level 0..max_level. The momentum for a level is the first entry of
/// `momenta` lying on its shell, otherwise rational_shell_point(2(level-1), d). Levels run on `jobs` threads.
std::vector<PhysicalLevelReport> spectrum_table(int d, int max_level, const std::vector<Momentum>& momenta = {},
                                                SpectrumRoute route = SpectrumRoute::automatic, int jobs = 1);

}  // namespace stringlab
