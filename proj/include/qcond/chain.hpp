#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qcond/channels.hpp"
#include "qcond/conditional.hpp"
#include "qcond/errors.hpp"
#include "qcond/measures.hpp"
#include "qcond/rng.hpp"
#include "qcond/states.hpp"

namespace qcond {

// Pre-compose a pinching in the given basis, E' = E_raw o Pinch, so the
// adjusted channel acts only on the diagonal part in that basis. This is the
// constructive form of the two-step consistency requirement: the second
// stage incorporates a projective measurement along the intermediate
// eigenbasis.
inline QuantumChannel make_consistent(const QuantumChannel& e_raw,
                                      const SpectralDecomposition& basis_R,
                                      double tol = 1e-10) {
  if (e_raw.dim_in() != basis_R.dimension())
    throw DimensionMismatch("channel input does not match basis dimension");
  return compose(e_raw, pinching(basis_R.basis(), tol), tol);
}

// A consistency-adjusted two-step process Q -> R -> S with all three
// conditional tables and the residuals of the identities linking them.
struct TwoStepProcess {
  DensityMatrix rho_Q;
  DensityMatrix rho_R;
  DensityMatrix rho_S;
  QuantumChannel stage1;  // E_{R<-Q}
  QuantumChannel stage2;  // consistency-adjusted E_{S<-R}
  ConditionalTable table_rq;
  ConditionalTable table_sr;
  ConditionalTable table_sq;
  double chain_residual = 0.0;      // max |p(s|q) - sum_r p(s|r) p(r|q)|
  double raw_chain_residual = 0.0;  // same, for the unadjusted second stage
  double total_prob_sr = 0.0;       // max_s |p_s - sum_r p(s|r) p_r|
  double total_prob_sq = 0.0;       // max_s |p_s - sum_q sum_{r_q} p(s|r_q) p(r_q|q) p_q|
};

struct ChainOptions {
  double chain_tol = 1e-9;
  double channel_tol = 1e-10;
  StateOptions state;
};

namespace detail {

inline double chain_residual_of(const ConditionalTable& sq, const ConditionalTable& sr,
                                const ConditionalTable& rq) {
  double worst = 0.0;
  for (std::size_t s = 0; s < sq.n_to; ++s)
    for (std::size_t q = 0; q < sq.n_from; ++q) {
      double mixed = 0.0;
      for (std::size_t r = 0; r < sr.n_from; ++r)
        mixed += sr.p(s, r) * rq.p(r, q);
      worst = std::max(worst, std::abs(sq.p(s, q) - mixed));
    }
  return worst;
}

}  // namespace detail

// Build the two-step process: the second stage is adjusted with a pinching
// in the eigenbasis of rho_R, after which p(s|q) = sum_r p(s|r) p(r|q) holds.
// The residual of the unadjusted stage is kept for comparison.
inline TwoStepProcess build_two_step(const DensityMatrix& rho_Q,
                                     const QuantumChannel& e_rq,
                                     const QuantumChannel& e_raw_sr,
                                     const ChainOptions& opt = {}) {
  if (e_raw_sr.dim_in() != e_rq.dim_out())
    throw DimensionMismatch("stage dimensions do not chain");
  ConditionalResult first = conditional_probs(e_rq, rho_Q, opt.state);
  const SpectralDecomposition& dec_R = first.rho_R.spectral();

  QuantumChannel e_sr = make_consistent(e_raw_sr, dec_R, opt.channel_tol);
  DensityMatrix rho_S = apply(e_sr, first.rho_R, opt.state);
  // One decomposition of rho_S serves both the p(s|r) and p(s|q) tables;
  // separate diagonalizations would disagree inside degenerate subspaces.
  ConditionalTable table_sr = make_table(e_sr, dec_R, rho_S.spectral());
  ConditionalTable table_sq = make_table(compose(e_sr, e_rq, opt.channel_tol),
                                         rho_Q.spectral(), rho_S.spectral());

  TwoStepProcess proc{rho_Q,
                      first.rho_R,
                      std::move(rho_S),
                      e_rq,
                      e_sr,
                      std::move(first.table),
                      std::move(table_sr),
                      std::move(table_sq)};

  proc.chain_residual =
      detail::chain_residual_of(proc.table_sq, proc.table_sr, proc.table_rq);
  {
    DensityMatrix raw_rho_s = apply(e_raw_sr, first.rho_R, opt.state);
    const ConditionalTable raw_sr =
        make_table(e_raw_sr, dec_R, raw_rho_s.spectral());
    const ConditionalTable raw_sq =
        make_table(compose(e_raw_sr, e_rq, opt.channel_tol), rho_Q.spectral(),
                   raw_rho_s.spectral());
    proc.raw_chain_residual =
        detail::chain_residual_of(raw_sq, raw_sr, proc.table_rq);
  }

  // Total-probability routes: via the intermediate marginal, and via the
  // per-q eigenbases of the evolved projectors E{P_q}.
  for (std::size_t s = 0; s < proc.table_sr.n_to; ++s) {
    double mixed = 0.0;
    for (std::size_t r = 0; r < proc.table_sr.n_from; ++r)
      mixed += proc.table_sr.p(s, r) * proc.table_sr.p_from[r];
    proc.total_prob_sr =
        std::max(proc.total_prob_sr, std::abs(proc.table_sq.p_to[s] - mixed));
  }
  {
    const SpectralDecomposition& dec_S = proc.rho_S.spectral();
    EvolvedProjectorFamily family = evolved_projector_family(e_rq, rho_Q, opt.state);
    std::vector<double> p_s(dec_S.dimension(), 0.0);
    for (std::size_t q = 0; q < family.states.size(); ++q) {
      const double pq = proc.table_rq.p_from[q];
      if (pq == 0.0) continue;
      const SpectralDecomposition& dq = family.states[q].spectral();
      for (std::size_t rq = 0; rq < dq.dimension(); ++rq) {
        const double w = dq.probabilities[rq] * pq;
        if (w == 0.0) continue;
        const ComplexMatrix evolved = apply_to_operator(e_sr, dq.projector(rq));
        for (std::size_t s = 0; s < p_s.size(); ++s)
          p_s[s] += w * expectation(evolved, dec_S.vector(s));
      }
    }
    for (std::size_t s = 0; s < p_s.size(); ++s)
      proc.total_prob_sq =
          std::max(proc.total_prob_sq, std::abs(proc.table_sq.p_to[s] - p_s[s]));
  }

  if (proc.chain_residual > opt.chain_tol)
    throw ConsistencyResidual("chain property residual " +
                              std::to_string(proc.chain_residual) +
                              " exceeds tolerance");
  return proc;
}

struct DpiResult {
  double i_rq = 0.0;
  double i_sq = 0.0;
  double slack = 0.0;  // i_rq - i_sq, nonnegative up to tolerance
};

inline DpiResult dpi_check(const TwoStepProcess& proc, LogBase base = LogBase::two) {
  DpiResult res;
  res.i_rq = mutual_information(proc.table_rq, base);
  res.i_sq = mutual_information(proc.table_sq, base);
  res.slack = res.i_rq - res.i_sq;
  return res;
}

struct HolevoResult {
  double i_rq = 0.0;
  double i_sq = 0.0;
  double chi = 0.0;                // from the ensemble {p_q, rho_{R|q}}
  double equality_residual = 0.0;  // |I(R:Q) - chi|
  double bound_slack = 0.0;        // chi - I(S:Q)
};

// chi of the conditional-state ensemble, computed by diagonalizing the
// actual matrices; independently, I(R:Q) comes from the probability table.
inline HolevoResult holevo_bound_check(const TwoStepProcess& proc,
                                       LogBase base = LogBase::two) {
  HolevoResult res;
  res.i_rq = mutual_information(proc.table_rq, base);
  res.i_sq = mutual_information(proc.table_sq, base);
  ConditionalStateFamily family =
      conditional_states(proc.table_rq, proc.rho_R.spectral());
  Ensemble ens = make_ensemble(proc.table_rq.p_from, std::move(family.states));
  res.chi = holevo_chi(ens, base);
  res.equality_residual = std::abs(res.i_rq - res.chi);
  res.bound_slack = res.chi - res.i_sq;
  return res;
}

// Sampled trajectories across one or two steps. counts is row-major over
// (q, r) or (q, r, s).
struct TrajectoryBatch {
  std::size_t n_samples = 0;
  std::vector<std::size_t> dims;
  std::vector<std::uint64_t> counts;
  std::uint64_t seed = 0;

  std::uint64_t at(std::size_t q, std::size_t r) const {
    return counts[q * dims[1] + r];
  }
  std::uint64_t at(std::size_t q, std::size_t r, std::size_t s) const {
    return counts[(q * dims[1] + r) * dims[2] + s];
  }
};

namespace detail {

// Inverse-CDF draw over a fixed-order cumulative sum.
inline std::size_t draw_index(const std::vector<double>& cumulative, double u) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  const std::size_t k = static_cast<std::size_t>(it - cumulative.begin());
  return std::min(k, cumulative.size() - 1);
}

inline std::vector<double> cumulative_of(const std::vector<double>& p) {
  std::vector<double> c(p.size());
  double run = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    run += p[i];
    c[i] = run;
  }
  return c;
}

inline std::vector<double> column_of(const ConditionalTable& t, std::size_t q) {
  std::vector<double> col(t.n_to);
  for (std::size_t r = 0; r < t.n_to; ++r) col[r] = t.p(r, q);
  return col;
}

}  // namespace detail

inline TrajectoryBatch sample_trajectories(const ConditionalTable& table,
                                           std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ParameterOutOfRange("need at least one sample");
  TrajectoryBatch batch;
  batch.n_samples = n;
  batch.dims = {table.n_from, table.n_to};
  batch.counts.assign(table.n_from * table.n_to, 0);
  batch.seed = seed;

  const std::vector<double> cum_q = detail::cumulative_of(table.p_from.entries());
  std::vector<std::vector<double>> cum_r(table.n_from);
  for (std::size_t q = 0; q < table.n_from; ++q)
    cum_r[q] = detail::cumulative_of(detail::column_of(table, q));

  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t q = detail::draw_index(cum_q, rng.uniform());
    const std::size_t r = detail::draw_index(cum_r[q], rng.uniform());
    ++batch.counts[q * table.n_to + r];
  }
  return batch;
}

inline TrajectoryBatch sample_trajectories(const TwoStepProcess& proc, std::size_t n,
                                           std::uint64_t seed) {
  if (n < 1) throw ParameterOutOfRange("need at least one sample");
  const ConditionalTable& rq = proc.table_rq;
  const ConditionalTable& sr = proc.table_sr;
  TrajectoryBatch batch;
  batch.n_samples = n;
  batch.dims = {rq.n_from, rq.n_to, sr.n_to};
  batch.counts.assign(rq.n_from * rq.n_to * sr.n_to, 0);
  batch.seed = seed;

  const std::vector<double> cum_q = detail::cumulative_of(rq.p_from.entries());
  std::vector<std::vector<double>> cum_r(rq.n_from), cum_s(sr.n_from);
  for (std::size_t q = 0; q < rq.n_from; ++q)
    cum_r[q] = detail::cumulative_of(detail::column_of(rq, q));
  for (std::size_t r = 0; r < sr.n_from; ++r)
    cum_s[r] = detail::cumulative_of(detail::column_of(sr, r));

  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t q = detail::draw_index(cum_q, rng.uniform());
    const std::size_t r = detail::draw_index(cum_r[q], rng.uniform());
    const std::size_t s = detail::draw_index(cum_s[r], rng.uniform());
    ++batch.counts[(q * rq.n_to + r) * sr.n_to + s];
  }
  return batch;
}

// Frequency estimate of p(r|q) from a batch (three-step batches are
// marginalized over the last index). Columns with fewer samples than
// min_column_samples are listed in low_sample_columns; empty columns fall
// back to a uniform distribution so the table stays column-stochastic.
struct EmpiricalTable {
  ConditionalTable table;
  std::vector<std::uint64_t> from_counts;
  std::vector<std::size_t> low_sample_columns;
};

inline EmpiricalTable empirical_table(const TrajectoryBatch& batch,
                                      std::uint64_t min_column_samples = 100) {
  if (batch.n_samples == 0 || batch.counts.empty())
    throw EmptyBatch("no samples in batch");
  const std::size_t nq = batch.dims[0];
  const std::size_t nr = batch.dims[1];
  const std::size_t tail =
      batch.dims.size() > 2 ? batch.dims[2] : static_cast<std::size_t>(1);

  RealMatrix joint_counts(nr, nq);
  for (std::size_t q = 0; q < nq; ++q)
    for (std::size_t r = 0; r < nr; ++r) {
      double c = 0.0;
      for (std::size_t s = 0; s < tail; ++s)
        c += static_cast<double>(batch.counts[(q * nr + r) * tail + s]);
      joint_counts(r, q) = c;
    }

  EmpiricalTable out;
  out.from_counts.assign(nq, 0);
  std::vector<double> p_q(nq, 0.0), p_r(nr, 0.0);
  RealMatrix probs(nr, nq);
  const double total = static_cast<double>(batch.n_samples);
  for (std::size_t q = 0; q < nq; ++q) {
    double nq_count = 0.0;
    for (std::size_t r = 0; r < nr; ++r) nq_count += joint_counts(r, q);
    out.from_counts[q] = static_cast<std::uint64_t>(nq_count);
    if (out.from_counts[q] < min_column_samples) out.low_sample_columns.push_back(q);
    p_q[q] = nq_count / total;
    for (std::size_t r = 0; r < nr; ++r) {
      probs(r, q) = nq_count > 0.0 ? joint_counts(r, q) / nq_count
                                   : 1.0 / static_cast<double>(nr);
      p_r[r] += joint_counts(r, q) / total;
    }
  }
  out.table.n_from = nq;
  out.table.n_to = nr;
  out.table.probs = std::move(probs);
  out.table.p_from = ProbVector(std::move(p_q));
  out.table.p_to = ProbVector(std::move(p_r));
  return out;
}

// Worst cell deviation |p_hat(r|q) - p(r|q)| measured in units of the
// binomial standard error sqrt(p(1-p)/n_q); cells whose column has fewer
// than min_column_samples draws are skipped, as are deterministic cells.
inline double max_binomial_sigma_deviation(const EmpiricalTable& emp,
                                           const ConditionalTable& truth,
                                           std::uint64_t min_column_samples = 100) {
  double worst = 0.0;
  for (std::size_t q = 0; q < truth.n_from; ++q) {
    const double n_q = static_cast<double>(emp.from_counts[q]);
    if (emp.from_counts[q] < min_column_samples) continue;
    for (std::size_t r = 0; r < truth.n_to; ++r) {
      const double p = truth.p(r, q);
      const double sigma = std::sqrt(p * (1.0 - p) / n_q);
      if (sigma == 0.0) continue;
      worst = std::max(worst, std::abs(emp.table.p(r, q) - p) / sigma);
    }
  }
  return worst;
}

}  // namespace qcond
