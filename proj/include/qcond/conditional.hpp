#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "qcond/channels.hpp"
#include "qcond/complex_matrix.hpp"
#include "qcond/errors.hpp"
#include "qcond/states.hpp"

namespace qcond {

// Conditional probability table p(r|q) linking the eigenbases of an initial
// and a final state. Stored column-per-q (column-stochastic), together with
// the marginals it connects and the degeneracy structure of both bases so
// callers can detect basis-dependent entries.
struct ConditionalTable {
  std::size_t n_from = 0;  // index q
  std::size_t n_to = 0;    // index r
  RealMatrix probs;        // probs(r, q) = p(r|q)
  ProbVector p_from;       // p_q
  ProbVector p_to;         // p_r
  std::vector<std::vector<std::size_t>> degeneracy_from;
  std::vector<std::vector<std::size_t>> degeneracy_to;

  double p(std::size_t r, std::size_t q) const { return probs(r, q); }
};

struct TableResiduals {
  double range = 0.0;       // distance of the worst entry from [0, 1]
  double column_sum = 0.0;  // max_q |sum_r p(r|q) - 1|
  double total_prob = 0.0;  // max_r |p_r - sum_q p(r|q) p_q|
};

inline TableResiduals table_residuals(const ConditionalTable& t) {
  TableResiduals res;
  for (std::size_t r = 0; r < t.n_to; ++r)
    for (std::size_t q = 0; q < t.n_from; ++q) {
      const double x = t.p(r, q);
      res.range = std::max(res.range, std::max(-x, x - 1.0));
    }
  res.range = std::max(res.range, 0.0);
  for (std::size_t q = 0; q < t.n_from; ++q)
    res.column_sum = std::max(res.column_sum, std::abs(t.probs.col_sum(q) - 1.0));
  for (std::size_t r = 0; r < t.n_to; ++r) {
    double mixed = 0.0;
    for (std::size_t q = 0; q < t.n_from; ++q) mixed += t.p(r, q) * t.p_from[q];
    res.total_prob = std::max(res.total_prob, std::abs(t.p_to[r] - mixed));
  }
  return res;
}

// Per-q evolved eigenprojectors rho_q = E{P_q}, each a full density matrix
// with its own spectral decomposition.
struct EvolvedProjectorFamily {
  std::vector<DensityMatrix> states;
};

// Per-q conditional states rho_{R|q} = sum_r p(r|q) P_r, all diagonal in the
// final eigenbasis.
struct ConditionalStateFamily {
  std::vector<DensityMatrix> states;
};

// Per-q Born overlap matrices beta(r|r_q) = |<Psi_r|Psi_{r_q}>|^2 between the
// final eigenbasis and the eigenbasis of the evolved projector E{P_q}.
struct BornOverlapTable {
  std::vector<RealMatrix> beta;  // beta[q](r, r_q)
};

struct ConditionalResult {
  DensityMatrix rho_R;
  ConditionalTable table;
};

namespace detail {

inline double clamp_probability(double x) {
  return std::min(1.0, std::max(0.0, x));
}

}  // namespace detail

// Table p(r|q) = Tr[P_r E{P_q}] for explicitly chosen eigenbases on both
// sides. Multi-stage constructions must reuse one decomposition per state, so
// the basis choice is a parameter here.
inline ConditionalTable make_table(const QuantumChannel& e,
                                   const SpectralDecomposition& dec_from,
                                   const SpectralDecomposition& dec_to) {
  if (dec_from.dimension() != e.dim_in() || dec_to.dimension() != e.dim_out())
    throw DimensionMismatch("decomposition dimensions do not match the channel");
  ConditionalTable t;
  t.n_from = dec_from.dimension();
  t.n_to = dec_to.dimension();
  t.probs = RealMatrix(t.n_to, t.n_from);
  for (std::size_t q = 0; q < t.n_from; ++q) {
    const ComplexMatrix evolved = apply_to_operator(e, dec_from.projector(q));
    for (std::size_t r = 0; r < t.n_to; ++r)
      t.probs(r, q) = detail::clamp_probability(expectation(evolved, dec_to.vector(r)));
  }
  t.p_from = ProbVector(dec_from.probabilities);
  t.p_to = ProbVector(dec_to.probabilities);
  t.degeneracy_from = dec_from.degeneracy_groups;
  t.degeneracy_to = dec_to.degeneracy_groups;
  return t;
}

// The conditional probability table p(r|q) = Tr[P_r E{P_q}] over the complete
// eigenbases of rho_Q and rho_R = E{rho_Q} (zero-probability eigenvectors
// included on both sides).
inline ConditionalResult conditional_probs(const QuantumChannel& e,
                                           const DensityMatrix& rho_Q,
                                           const StateOptions& opt = {}) {
  if (rho_Q.dim() != e.dim_in())
    throw DimensionMismatch("state dimension does not match channel input");
  DensityMatrix rho_R = apply(e, rho_Q, opt);
  ConditionalTable t = make_table(e, rho_Q.spectral(), rho_R.spectral());
  return {std::move(rho_R), std::move(t)};
}

inline EvolvedProjectorFamily evolved_projector_family(const QuantumChannel& e,
                                                       const DensityMatrix& rho_Q,
                                                       const StateOptions& opt = {}) {
  if (rho_Q.dim() != e.dim_in())
    throw DimensionMismatch("state dimension does not match channel input");
  const SpectralDecomposition& dq = rho_Q.spectral();
  EvolvedProjectorFamily family;
  family.states.reserve(dq.dimension());
  for (std::size_t q = 0; q < dq.dimension(); ++q)
    family.states.push_back(
        density_from_matrix(apply_to_operator(e, dq.projector(q)), opt));
  return family;
}

// max_q |sum_q p_q rho_q - rho_R| over matrix entries.
inline double mixture_residual(const EvolvedProjectorFamily& family,
                               const ProbVector& p_q, const DensityMatrix& rho_R) {
  ComplexMatrix mix(rho_R.dim(), rho_R.dim());
  for (std::size_t q = 0; q < family.states.size(); ++q)
    mix += p_q[q] * family.states[q].matrix();
  return max_abs_diff(mix, rho_R.matrix());
}

// rho_{R|q} = sum_r p(r|q) P_r for the given final eigenbasis; equals the
// pinching of E{P_q} in that basis.
inline ConditionalStateFamily conditional_states(const ConditionalTable& table,
                                                 const SpectralDecomposition& basis_R) {
  ConditionalStateFamily family;
  family.states.reserve(table.n_from);
  for (std::size_t q = 0; q < table.n_from; ++q) {
    ComplexMatrix m(table.n_to, table.n_to);
    for (std::size_t r = 0; r < table.n_to; ++r) {
      if (table.p(r, q) == 0.0) continue;
      m += table.p(r, q) * basis_R.projector(r);
    }
    family.states.push_back(density_from_matrix(m));
  }
  return family;
}

inline BornOverlapTable born_overlap(const SpectralDecomposition& basis_R,
                                     const EvolvedProjectorFamily& family) {
  BornOverlapTable out;
  out.beta.reserve(family.states.size());
  for (const auto& state : family.states) {
    const SpectralDecomposition& dq = state.spectral();
    RealMatrix beta(basis_R.dimension(), dq.dimension());
    for (std::size_t r = 0; r < basis_R.dimension(); ++r) {
      const CVec vr = basis_R.vector(r);
      for (std::size_t rq = 0; rq < dq.dimension(); ++rq)
        beta(r, rq) = std::norm(inner(vr, dq.vector(rq)));
    }
    out.beta.push_back(std::move(beta));
  }
  return out;
}

// max over q, r of |p(r|q) - sum_{r_q} beta(r|r_q) p(r_q|q)|.
inline double born_decomposition_residual(const ConditionalTable& table,
                                          const BornOverlapTable& born,
                                          const EvolvedProjectorFamily& family) {
  double worst = 0.0;
  for (std::size_t q = 0; q < table.n_from; ++q) {
    const auto& beta = born.beta[q];
    const auto& probs = family.states[q].spectral().probabilities;
    for (std::size_t r = 0; r < table.n_to; ++r) {
      double mixed = 0.0;
      for (std::size_t rq = 0; rq < probs.size(); ++rq)
        mixed += beta(r, rq) * probs[rq];
      worst = std::max(worst, std::abs(table.p(r, q) - mixed));
    }
  }
  return worst;
}

// Diagnostic for the asymmetry of the would-be joint distribution:
// max_{q,r} |p(r|q) p_q - p(q|r) p_r|, reading p(q|r) as the transposed
// entry of the same table. Zero when the table is a permutation (unitary
// evolution) or symmetric with uniform marginals.
inline double joint_asymmetry(const ConditionalTable& t) {
  if (t.n_from != t.n_to)
    throw ShapeMismatch("joint_asymmetry needs a square table");
  double worst = 0.0;
  for (std::size_t q = 0; q < t.n_from; ++q)
    for (std::size_t r = 0; r < t.n_to; ++r)
      worst = std::max(worst,
                       std::abs(t.p(r, q) * t.p_from[q] - t.p(q, r) * t.p_to[r]));
  return worst;
}

// For each q, the output index with the largest conditional probability
// (ties resolved to the lowest index). Under unitary evolution with a
// nondegenerate spectrum this is the eigenstate pairing.
inline std::vector<std::size_t> max_overlap_pairing(const ConditionalTable& t) {
  std::vector<std::size_t> perm(t.n_from, 0);
  for (std::size_t q = 0; q < t.n_from; ++q) {
    double best = -1.0;
    for (std::size_t r = 0; r < t.n_to; ++r) {
      if (t.p(r, q) > best) {
        best = t.p(r, q);
        perm[q] = r;
      }
    }
  }
  return perm;
}

// max |p(r|q) - delta_{r, perm[q]}| for a candidate pairing.
inline double pairing_delta_residual(const ConditionalTable& t,
                                     const std::vector<std::size_t>& perm) {
  double worst = 0.0;
  for (std::size_t q = 0; q < t.n_from; ++q)
    for (std::size_t r = 0; r < t.n_to; ++r) {
      const double target = (perm[q] == r) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(t.p(r, q) - target));
    }
  return worst;
}

}  // namespace qcond
