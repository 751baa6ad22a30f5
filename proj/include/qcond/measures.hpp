#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "qcond/complex_matrix.hpp"
#include "qcond/conditional.hpp"
#include "qcond/errors.hpp"
#include "qcond/linalg.hpp"
#include "qcond/states.hpp"

namespace qcond {

// Entropy of the outcome distribution given initial eigenstate q:
// J(R|q) = -sum_r p(r|q) log p(r|q) = S(rho_{R|q}).
inline double j_given(const ConditionalTable& t, std::size_t q,
                      LogBase base = LogBase::two) {
  if (q >= t.n_from) throw IndexOutOfRange("column index " + std::to_string(q));
  double h = 0.0;
  for (std::size_t r = 0; r < t.n_to; ++r) h += entropy_term(t.p(r, q), base);
  return h;
}

// J(R|Q) = sum_q p_q J(R|q): the entropy added by the evolution, averaged
// over the initial eigenstates.
inline double j_conditional(const ConditionalTable& t, LogBase base = LogBase::two) {
  double j = 0.0;
  for (std::size_t q = 0; q < t.n_from; ++q) {
    if (t.p_from[q] == 0.0) continue;
    j += t.p_from[q] * j_given(t, q, base);
  }
  return j;
}

// I(R:Q) = sum_{q,r} p(r|q) p_q log[p(r|q)/p_r], evaluated from its
// definition (the identity I = S(rho_R) - J is left to the caller as an
// independent cross-check).
inline double mutual_information(const ConditionalTable& t,
                                 LogBase base = LogBase::two) {
  double info = 0.0;
  for (std::size_t q = 0; q < t.n_from; ++q) {
    const double pq = t.p_from[q];
    if (pq == 0.0) continue;
    for (std::size_t r = 0; r < t.n_to; ++r) {
      const double w = t.p(r, q) * pq;
      if (w == 0.0) continue;
      const double pr = t.p_to[r];
      if (pr <= 0.0) {
        if (w > 1e-12)
          throw InconsistentTable("p_r = 0 but p(r|q) p_q = " + std::to_string(w));
        continue;
      }
      info += w * log_base(t.p(r, q) / pr, base);
    }
  }
  return info;
}

// All scalar measures of one (channel, state) instance.
struct InfoSummary {
  double S_initial = 0.0;
  double S_final = 0.0;
  double J = 0.0;
  double I = 0.0;
  std::vector<double> per_q_J;
  LogBase base = LogBase::two;
};

inline InfoSummary summarize(const ConditionalTable& t, LogBase base = LogBase::two) {
  InfoSummary s;
  s.base = base;
  s.S_initial = entropy_of(t.p_from.entries(), base);
  s.S_final = entropy_of(t.p_to.entries(), base);
  s.per_q_J.reserve(t.n_from);
  for (std::size_t q = 0; q < t.n_from; ++q) s.per_q_J.push_back(j_given(t, q, base));
  for (std::size_t q = 0; q < t.n_from; ++q) s.J += t.p_from[q] * s.per_q_J[q];
  s.I = mutual_information(t, base);
  return s;
}

// H(Y|X) = -sum_{x,y} p(y|x) p(x) log p(y|x); rows of `cond` index y,
// columns index x.
inline double classical_conditional_entropy(const RealMatrix& cond,
                                            const ProbVector& p_x,
                                            LogBase base = LogBase::two) {
  if (cond.cols != p_x.size())
    throw ShapeMismatch("conditional matrix columns must match marginal length");
  double h = 0.0;
  for (std::size_t x = 0; x < cond.cols; ++x) {
    if (p_x[x] == 0.0) continue;
    for (std::size_t y = 0; y < cond.rows; ++y)
      h += p_x[x] * entropy_term(cond(y, x), base);
  }
  return h;
}

// Same quantity via H(Y,X) - H(X) from a joint matrix (rows y, columns x).
inline double classical_conditional_entropy_from_joint(const RealMatrix& joint,
                                                       LogBase base = LogBase::two) {
  double h_joint = 0.0;
  for (double w : joint.data) h_joint += entropy_term(w, base);
  double h_x = 0.0;
  for (std::size_t x = 0; x < joint.cols; ++x)
    h_x += entropy_term(joint.col_sum(x), base);
  return h_joint - h_x;
}

// Conditional von Neumann entropy S(A|B) = S(rho_AB) - S(rho_B); can be
// negative when A and B are entangled.
inline double conditional_vn_entropy(const DensityMatrix& rho_AB, std::size_t dA,
                                     std::size_t dB, LogBase base = LogBase::two) {
  if (rho_AB.dim() != dA * dB)
    throw DimensionMismatch("state dimension is not dA*dB");
  const DensityMatrix rho_B =
      density_from_matrix(partial_trace(rho_AB.matrix(), dA, dB, Subsystem::A));
  return von_neumann_entropy(rho_AB, base) - von_neumann_entropy(rho_B, base);
}

// Weighted collection of states on a common Hilbert space.
struct Ensemble {
  ProbVector weights;
  std::vector<DensityMatrix> states;
};

inline Ensemble make_ensemble(ProbVector weights, std::vector<DensityMatrix> states) {
  if (weights.size() != states.size())
    throw ShapeMismatch("ensemble weight and state counts differ");
  if (states.empty()) throw ShapeMismatch("ensemble must not be empty");
  const std::size_t d = states.front().dim();
  for (const auto& s : states)
    if (s.dim() != d) throw DimensionMismatch("ensemble states have mixed dimensions");
  return {std::move(weights), std::move(states)};
}

inline DensityMatrix ensemble_average(const Ensemble& ens) {
  const std::size_t d = ens.states.front().dim();
  ComplexMatrix avg(d, d);
  for (std::size_t x = 0; x < ens.states.size(); ++x)
    avg += ens.weights[x] * ens.states[x].matrix();
  return density_from_matrix(avg);
}

// chi = S(sum_x p_x rho_x) - sum_x p_x S(rho_x); nonnegative by concavity and
// bounded by log d.
inline double holevo_chi(const Ensemble& ens, LogBase base = LogBase::two) {
  double chi = von_neumann_entropy(ensemble_average(ens), base);
  for (std::size_t x = 0; x < ens.states.size(); ++x)
    chi -= ens.weights[x] * von_neumann_entropy(ens.states[x], base);
  return chi;
}

}  // namespace qcond
