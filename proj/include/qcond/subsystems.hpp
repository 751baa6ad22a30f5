#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "qcond/complex_matrix.hpp"
#include "qcond/conditional.hpp"
#include "qcond/errors.hpp"
#include "qcond/linalg.hpp"
#include "qcond/measures.hpp"
#include "qcond/states.hpp"

namespace qcond {

// Structural conditional analysis of a bipartite state: the partial trace
// plays the role of the evolution map, linking parent eigenstates (index m)
// to eigenstates of the kept subsystem (index a).
struct ParentChild {
  DensityMatrix rho_parent;
  DensityMatrix rho_child;   // marginal of the kept factor
  std::size_t dim_child = 0;
  std::size_t dim_other = 0;
  Subsystem kept = Subsystem::A;
  ConditionalTable table;                  // p(a|m)
  std::vector<DensityMatrix> evolved;      // rho_m = Tr_other[P_m]
  std::vector<DensityMatrix> conditional;  // rho_{child|m} = sum_a p(a|m) P_a
};

// p(a|m) = Tr[P_a Tr_other{P_m}] over the complete eigenbases of the parent
// and the kept marginal. `kept` selects the child; the mirrored case is
// handled by transposing the tensor factors.
inline ParentChild subsystem_conditional(const DensityMatrix& rho_AB, std::size_t dA,
                                         std::size_t dB, Subsystem kept = Subsystem::A,
                                         const StateOptions& opt = {}) {
  if (rho_AB.dim() != dA * dB)
    throw DimensionMismatch("state dimension is not dA*dB");
  if (kept == Subsystem::B) {
    ParentChild pc = subsystem_conditional(
        density_from_matrix(swap_factors(rho_AB.matrix(), dA, dB), opt), dB, dA,
        Subsystem::A, opt);
    pc.kept = Subsystem::B;
    pc.rho_parent = rho_AB;
    return pc;
  }

  DensityMatrix rho_child =
      density_from_matrix(partial_trace(rho_AB.matrix(), dA, dB, Subsystem::B), opt);
  const SpectralDecomposition& dec_m = rho_AB.spectral();
  const SpectralDecomposition& dec_a = rho_child.spectral();

  ConditionalTable table;
  table.n_from = dec_m.dimension();
  table.n_to = dec_a.dimension();
  table.probs = RealMatrix(table.n_to, table.n_from);
  std::vector<DensityMatrix> evolved;
  evolved.reserve(table.n_from);
  for (std::size_t m = 0; m < table.n_from; ++m) {
    const ComplexMatrix traced = partial_trace(dec_m.projector(m), dA, dB, Subsystem::B);
    for (std::size_t a = 0; a < table.n_to; ++a)
      table.probs(a, m) =
          detail::clamp_probability(expectation(traced, dec_a.vector(a)));
    evolved.push_back(density_from_matrix(traced, opt));
  }
  table.p_from = ProbVector(dec_m.probabilities);
  table.p_to = ProbVector(dec_a.probabilities);
  table.degeneracy_from = dec_m.degeneracy_groups;
  table.degeneracy_to = dec_a.degeneracy_groups;

  std::vector<DensityMatrix> cond = conditional_states(table, dec_a).states;
  return ParentChild{rho_AB,          std::move(rho_child), dA, dB, Subsystem::A,
                     std::move(table), std::move(evolved),  std::move(cond)};
}

struct ParentConditionalEntropy {
  std::vector<double> per_m;  // J(child|m)
  double total = 0.0;         // J(child|parent) = sum_m p_m J(child|m)
};

inline ParentConditionalEntropy j_given_parent(const ParentChild& pc,
                                               LogBase base = LogBase::two) {
  ParentConditionalEntropy out;
  out.per_m.reserve(pc.table.n_from);
  for (std::size_t m = 0; m < pc.table.n_from; ++m)
    out.per_m.push_back(j_given(pc.table, m, base));
  for (std::size_t m = 0; m < pc.table.n_from; ++m)
    out.total += pc.table.p_from[m] * out.per_m[m];
  return out;
}

struct EntanglementBound {
  double lhs = 0.0;    // -S(other|child) = S(rho_child) - S(rho_parent)
  double rhs = 0.0;    // J(child|parent)
  double slack = 0.0;  // rhs - lhs, nonnegative up to tolerance
};

// Conditional entropy of the discarded factor given the kept one bounds the
// parent-conditional entropy from below: -S(B|A) <= J(A|AB). The left side
// turns positive exactly when the factors are entangled enough that
// S(parent) < S(child).
inline EntanglementBound entanglement_bound_check(const ParentChild& pc,
                                                  LogBase base = LogBase::two) {
  EntanglementBound out;
  out.lhs = von_neumann_entropy(pc.rho_child, base) -
            von_neumann_entropy(pc.rho_parent, base);
  out.rhs = j_given_parent(pc, base).total;
  out.slack = out.rhs - out.lhs;
  return out;
}

}  // namespace qcond
