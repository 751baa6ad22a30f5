#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "qcond/chain.hpp"
#include "qcond/channels.hpp"
#include "qcond/complex_matrix.hpp"
#include "qcond/conditional.hpp"
#include "qcond/errors.hpp"
#include "qcond/generalized.hpp"
#include "qcond/measures.hpp"
#include "qcond/rng.hpp"
#include "qcond/states.hpp"
#include "qcond/subsystems.hpp"

namespace qcond {

enum class ChannelKind {
  random_cptp,
  unital_mixture,
  pinch,
  unitary,
  depolarize,
  trace_out,
};

inline const char* channel_kind_name(ChannelKind k) {
  switch (k) {
    case ChannelKind::random_cptp: return "random_cptp";
    case ChannelKind::unital_mixture: return "unital_mixture";
    case ChannelKind::pinch: return "pinching";
    case ChannelKind::unitary: return "unitary";
    case ChannelKind::depolarize: return "depolarizing";
    case ChannelKind::trace_out: return "partial_trace";
  }
  return "unknown";
}

// Sampling weights over the channel kinds drawn per trial.
struct ChannelMix {
  double random_cptp = 3.0;
  double unital_mixture = 1.0;
  double pinch = 1.0;
  double unitary = 1.0;
  double depolarize = 1.0;
  double trace_out = 1.0;

  std::array<double, 6> as_array() const {
    return {random_cptp, unital_mixture, pinch, unitary, depolarize, trace_out};
  }
};

struct TrialConfig {
  std::uint64_t master_seed = 42;
  std::size_t n_trials = 1000;
  std::vector<std::size_t> dims = {2, 3, 4, 5, 6};
  std::size_t max_env_dim = 4;
  ChannelMix channel_mix;
  // Fixed strength for depolarizing instances; negative means seeded random.
  double depolarize_lambda = -1.0;
};

enum class CheckKind { identity, inequality };

// One verified relation. For identities `worst` is the largest residual seen
// (fails above tolerance); for inequalities it is the smallest slack seen
// (fails below -tolerance).
struct CheckResult {
  std::string name;
  std::string statement;
  CheckKind kind = CheckKind::identity;
  double tolerance = 0.0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double worst = 0.0;
  std::uint64_t worst_seed = 0;

  bool passed() const { return failures == 0; }
};

struct VerificationReport {
  TrialConfig config;
  std::vector<CheckResult> checks;
  bool pass = false;
};

enum class Check : std::size_t {
  total_probability,
  column_stochastic,
  mutual_identity,
  j_nonnegative,
  i_nonnegative,
  i_vs_initial_entropy,
  j_vs_final_entropy,
  evolved_mixture,
  pinching_entropy,
  born_doubly_stochastic,
  born_decomposition,
  unital_doubly_stochastic,
  unital_entropy_growth,
  concavity_ensemble,
  concavity_channel_route,
  chain_property,
  data_processing,
  holevo_identity,
  holevo_bound,
  subsystem_bound,
  subsystem_conditional_entropy,
  subsystem_mixture,
  generalized_reduction,
  generalized_total_overlap,
  generalized_range,
  generalized_row_sums,
  lieb_nonnegative,
  lieb_concavity,
  stochastic_entropy_lemma,
  count,
};

inline std::vector<CheckResult> make_check_registry() {
  auto id = [](const char* name, const char* statement, double tol) {
    CheckResult c;
    c.name = name;
    c.statement = statement;
    c.kind = CheckKind::identity;
    c.tolerance = tol;
    return c;
  };
  auto ineq = [](const char* name, const char* statement, double tol) {
    CheckResult c;
    c.name = name;
    c.statement = statement;
    c.kind = CheckKind::inequality;
    c.tolerance = tol;
    c.worst = std::numeric_limits<double>::infinity();
    return c;
  };
  std::vector<CheckResult> r(static_cast<std::size_t>(Check::count));
  auto put = [&](Check c, CheckResult v) { r[static_cast<std::size_t>(c)] = std::move(v); };
  put(Check::total_probability,
      id("total_probability", "p_r = sum_q p(r|q) p_q", 1e-9));
  put(Check::column_stochastic,
      id("column_stochastic", "sum_r p(r|q) = 1 for every q", 1e-9));
  put(Check::mutual_identity,
      id("mutual_identity", "I(R:Q) = S(rho_R) - J(R|Q)", 1e-10));
  put(Check::j_nonnegative, ineq("j_nonnegative", "J(R|Q) >= 0", 1e-12));
  put(Check::i_nonnegative, ineq("i_nonnegative", "I(R:Q) >= 0", 1e-9));
  put(Check::i_vs_initial_entropy,
      ineq("i_vs_initial_entropy", "I(R:Q) <= S(rho_Q)", 1e-8));
  put(Check::j_vs_final_entropy,
      ineq("j_vs_final_entropy", "J(R|Q) <= S(rho_R)", 1e-8));
  put(Check::evolved_mixture,
      id("evolved_mixture", "sum_q p_q E{P_q} = rho_R", 1e-10));
  put(Check::pinching_entropy,
      ineq("pinching_entropy", "S(rho_{R|q}) >= S(E{P_q}) for every q", 1e-9));
  put(Check::born_doubly_stochastic,
      id("born_doubly_stochastic",
         "rows and columns of beta(r|r_q) each sum to 1", 1e-9));
  put(Check::born_decomposition,
      id("born_decomposition", "p(r|q) = sum_{r_q} beta(r|r_q) p(r_q|q)", 1e-9));
  put(Check::unital_doubly_stochastic,
      id("unital_doubly_stochastic",
         "sum_q p(r|q) = 1 for every r when the channel is unital", 1e-9));
  put(Check::unital_entropy_growth,
      ineq("unital_entropy_growth",
           "S(rho_R) >= S(rho_Q) when the channel is unital", 1e-8));
  put(Check::concavity_ensemble,
      ineq("concavity_ensemble", "S(sum_x p_x rho_x) >= sum_x p_x S(rho_x)", 1e-9));
  put(Check::concavity_channel_route,
      ineq("concavity_channel_route",
           "sum_q p_q S(E{P_q}) <= J(R|Q) <= S(rho_R)", 1e-9));
  put(Check::chain_property,
      id("chain_property", "p(s|q) = sum_r p(s|r) p(r|q)", 1e-9));
  put(Check::data_processing, ineq("data_processing", "I(S:Q) <= I(R:Q)", 1e-8));
  put(Check::holevo_identity,
      id("holevo_identity", "I(R:Q) = chi({p_q, rho_{R|q}})", 1e-9));
  put(Check::holevo_bound, ineq("holevo_bound", "I(S:Q) <= chi", 1e-8));
  put(Check::subsystem_bound,
      ineq("subsystem_bound", "-S(B|A) <= J(A|AB)", 1e-8));
  put(Check::subsystem_conditional_entropy,
      ineq("subsystem_conditional_entropy",
           "S(Tr_B[P_m]) <= J(A|m) for every m", 1e-9));
  put(Check::subsystem_mixture,
      id("subsystem_mixture", "sum_m p_m Tr_B[P_m] = rho_A", 1e-10));
  put(Check::generalized_reduction,
      id("generalized_reduction",
         "generalized table on spectral decompositions equals p(r|q)", 1e-10));
  put(Check::generalized_total_overlap,
      id("generalized_total_overlap",
         "Lambda_rho = sum_kappa P(rho|kappa) lambda_kappa", 1e-9));
  put(Check::generalized_range,
      id("generalized_range", "P(rho|kappa) lies in [0, 1]", 1e-12));
  put(Check::generalized_row_sums,
      id("generalized_row_sums",
         "sum_rho P(rho|kappa) = 1 when the output family resolves the identity",
         1e-9));
  put(Check::lieb_nonnegative,
      ineq("lieb_nonnegative", "Tr[A^p K B^(1-p) K^dag] >= 0", 1e-10));
  put(Check::lieb_concavity,
      ineq("lieb_concavity", "F_p(A, B; K) is jointly concave in (A, B)", 1e-8));
  put(Check::stochastic_entropy_lemma,
      ineq("stochastic_entropy_lemma", "H(T p) >= H(p) for doubly stochastic T",
           1e-10));
  return r;
}

struct EntropyGrowth {
  double h_in = 0.0;
  double h_out = 0.0;
  double slack = 0.0;
};

// The doubly-stochastic entropy lemma: applying a doubly stochastic matrix
// to a distribution cannot decrease its Shannon entropy.
inline EntropyGrowth check_doubly_stochastic_entropy(const ProbVector& p,
                                                     const RealMatrix& t,
                                                     double ds_tol = 1e-9,
                                                     LogBase base = LogBase::two) {
  if (t.rows != t.cols || t.cols != p.size())
    throw ShapeMismatch("matrix must be square and match the distribution");
  for (double x : t.data)
    if (x < -ds_tol) throw NotDoublyStochastic("negative matrix entry");
  for (std::size_t i = 0; i < t.rows; ++i)
    if (std::abs(t.row_sum(i) - 1.0) > ds_tol || std::abs(t.col_sum(i) - 1.0) > ds_tol)
      throw NotDoublyStochastic("row or column sum deviates from 1");
  std::vector<double> q(t.rows, 0.0);
  for (std::size_t i = 0; i < t.rows; ++i)
    for (std::size_t j = 0; j < t.cols; ++j) q[i] += t(i, j) * p[j];
  EntropyGrowth out;
  out.h_in = shannon_entropy(p, base);
  out.h_out = entropy_of(q, base);
  out.slack = out.h_out - out.h_in;
  return out;
}

// Concavity gap of an ensemble: S(avg) - sum p S(rho), i.e. the Holevo chi.
inline double check_concavity(const Ensemble& ens, LogBase base = LogBase::two) {
  return holevo_chi(ens, base);
}

namespace detail {

struct Recorder {
  std::vector<CheckResult>* checks;
  std::uint64_t seed;

  CheckResult& at(Check c) { return (*checks)[static_cast<std::size_t>(c)]; }

  void identity(Check c, double residual) {
    CheckResult& r = at(c);
    ++r.trials;
    if (residual > r.tolerance) ++r.failures;
    if (r.trials == 1 || residual > r.worst) {
      r.worst = residual;
      r.worst_seed = seed;
    }
  }

  void inequality(Check c, double slack) {
    CheckResult& r = at(c);
    ++r.trials;
    if (slack < -r.tolerance) ++r.failures;
    if (r.trials == 1 || slack < r.worst) {
      r.worst = slack;
      r.worst_seed = seed;
    }
  }
};

inline ComplexMatrix random_psd(std::size_t d, Rng& rng) {
  ComplexMatrix g(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) g(i, j) = rng.complex_gaussian();
  return g * g.adjoint();
}

inline std::vector<CVec> random_orthonormal_basis(std::size_t d, std::uint64_t seed) {
  const ComplexMatrix u = random_unitary(d, seed);
  std::vector<CVec> basis(d, CVec(d));
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < d; ++i) basis[k][i] = u(i, k);
  return basis;
}

inline RealMatrix random_birkhoff(std::size_t n, std::size_t n_perms, Rng& rng) {
  RealMatrix t(n, n);
  const std::vector<double> w = rng.simplex(n_perms);
  for (std::size_t k = 0; k < n_perms; ++k) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n; i > 1; --i)
      std::swap(perm[i - 1], perm[rng.below(i)]);
    for (std::size_t j = 0; j < n; ++j) t(perm[j], j) += w[k];
  }
  return t;
}

// Everything a single trial generates, derivable from (config, trial seed).
struct TrialInstance {
  std::uint64_t seed = 0;
  std::size_t dim = 0;
  std::size_t rank = 0;
  ChannelKind kind = ChannelKind::random_cptp;
  DensityMatrix rho_Q;
  QuantumChannel channel;
};

inline constexpr std::uint64_t kTrialSalt = 0x7472696c;
inline constexpr std::uint64_t kStateSalt = 1;
inline constexpr std::uint64_t kChannelSalt = 2;
inline constexpr std::uint64_t kEnsembleSalt = 3;
inline constexpr std::uint64_t kChainSalt = 4;
inline constexpr std::uint64_t kSubsysSalt = 5;
inline constexpr std::uint64_t kGeneralizedSalt = 6;
inline constexpr std::uint64_t kLiebSalt = 7;
inline constexpr std::uint64_t kLemmaSalt = 8;

inline ChannelKind pick_kind(const ChannelMix& mix, double u) {
  const auto w = mix.as_array();
  double total = 0.0;
  for (double x : w) total += x;
  if (total <= 0.0) throw ParameterOutOfRange("channel mix has no positive weight");
  double run = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    run += w[k] / total;
    if (u < run) return static_cast<ChannelKind>(k);
  }
  return ChannelKind::trace_out;
}

inline TrialInstance generate_instance(const TrialConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  std::size_t dim = cfg.dims[rng.below(cfg.dims.size())];
  const ChannelKind kind = pick_kind(cfg.channel_mix, rng.uniform());
  const std::uint64_t channel_seed = Rng::derive(seed, kChannelSalt);

  std::size_t state_dim = dim;
  QuantumChannel channel = [&]() -> QuantumChannel {
    switch (kind) {
      case ChannelKind::random_cptp: {
        const std::size_t env = 1 + rng.below(cfg.max_env_dim);
        return random_channel(dim, dim, env, channel_seed);
      }
      case ChannelKind::unital_mixture:
        return random_unital_channel(dim, 2 + rng.below(3), channel_seed);
      case ChannelKind::pinch:
        return pinching(random_orthonormal_basis(dim, channel_seed));
      case ChannelKind::unitary:
        return unitary_channel(random_unitary(dim, channel_seed));
      case ChannelKind::depolarize:
        return depolarizing(dim, cfg.depolarize_lambda >= 0.0 ? cfg.depolarize_lambda
                                                              : rng.uniform());
      case ChannelKind::trace_out: {
        constexpr std::size_t other = 2;
        state_dim = dim * other;
        return partial_trace_channel(dim, other, Subsystem::B);
      }
    }
    throw ParameterOutOfRange("unhandled channel kind");
  }();

  const std::size_t rank = 1 + rng.below(state_dim);
  DensityMatrix rho_Q =
      random_density(state_dim, rank, Rng::derive(seed, kStateSalt));
  return TrialInstance{seed, dim, rank, kind, std::move(rho_Q), std::move(channel)};
}

inline void evaluate_trial(const TrialConfig& cfg, std::uint64_t seed,
                           std::vector<CheckResult>& checks) {
  Recorder rec{&checks, seed};
  const TrialInstance inst = generate_instance(cfg, seed);
  const LogBase base = LogBase::two;

  // Core conditional-probability checks.
  const ConditionalResult analysis = conditional_probs(inst.channel, inst.rho_Q);
  const ConditionalTable& table = analysis.table;
  const TableResiduals res = table_residuals(table);
  rec.identity(Check::total_probability, res.total_prob);
  rec.identity(Check::column_stochastic, res.column_sum);

  const InfoSummary sum = summarize(table, base);
  rec.identity(Check::mutual_identity, std::abs(sum.I - (sum.S_final - sum.J)));
  rec.inequality(Check::j_nonnegative, sum.J);
  rec.inequality(Check::i_nonnegative, sum.I);
  rec.inequality(Check::i_vs_initial_entropy, sum.S_initial - sum.I);
  rec.inequality(Check::j_vs_final_entropy, sum.S_final - sum.J);

  const EvolvedProjectorFamily family =
      evolved_projector_family(inst.channel, inst.rho_Q);
  rec.identity(Check::evolved_mixture,
               mixture_residual(family, table.p_from, analysis.rho_R));

  double pinch_slack = std::numeric_limits<double>::infinity();
  double avg_family_entropy = 0.0;
  for (std::size_t q = 0; q < table.n_from; ++q) {
    const double s_family =
        entropy_of(family.states[q].spectral().probabilities, base);
    pinch_slack = std::min(pinch_slack, sum.per_q_J[q] - s_family);
    avg_family_entropy += table.p_from[q] * s_family;
  }
  rec.inequality(Check::pinching_entropy, pinch_slack);
  rec.inequality(Check::concavity_channel_route,
                 std::min(sum.J - avg_family_entropy, sum.S_final - sum.J));

  const BornOverlapTable born = born_overlap(analysis.rho_R.spectral(), family);
  double born_res = 0.0;
  for (const auto& beta : born.beta)
    for (std::size_t i = 0; i < beta.rows; ++i) {
      born_res = std::max(born_res, std::abs(beta.row_sum(i) - 1.0));
      born_res = std::max(born_res, std::abs(beta.col_sum(i) - 1.0));
    }
  rec.identity(Check::born_doubly_stochastic, born_res);
  rec.identity(Check::born_decomposition,
               born_decomposition_residual(table, born, family));

  if (is_unital(inst.channel)) {
    double row_res = 0.0;
    for (std::size_t r = 0; r < table.n_to; ++r)
      row_res = std::max(row_res, std::abs(table.probs.row_sum(r) - 1.0));
    rec.identity(Check::unital_doubly_stochastic, row_res);
    rec.inequality(Check::unital_entropy_growth, sum.S_final - sum.S_initial);
  }

  // Concavity over a random ensemble (member count may exceed the dimension).
  {
    Rng erng(Rng::derive(seed, kEnsembleSalt));
    const std::size_t d = inst.dim;
    const std::size_t count = 1 + erng.below(2 * d * d);
    std::vector<DensityMatrix> members;
    members.reserve(count);
    for (std::size_t x = 0; x < count; ++x)
      members.push_back(
          random_density(d, 1 + erng.below(d), Rng::derive(seed, kEnsembleSalt, x + 1)));
    Ensemble ens = make_ensemble(ProbVector(erng.simplex(count)), std::move(members));
    rec.inequality(Check::concavity_ensemble, check_concavity(ens, base));
  }

  // Two-step process built on the same first stage.
  {
    Rng crng(Rng::derive(seed, kChainSalt));
    const std::size_t mid = inst.channel.dim_out();
    const std::uint64_t s2 = Rng::derive(seed, kChainSalt, 1);
    QuantumChannel second = [&]() -> QuantumChannel {
      switch (crng.below(4)) {
        case 0: return random_channel(mid, mid, 1 + crng.below(cfg.max_env_dim), s2);
        case 1: return unitary_channel(random_unitary(mid, s2));
        case 2: return depolarizing(mid, crng.uniform());
        default: return random_unital_channel(mid, 2 + crng.below(3), s2);
      }
    }();
    ChainOptions copt;
    copt.chain_tol = std::numeric_limits<double>::infinity();
    const TwoStepProcess proc = build_two_step(inst.rho_Q, inst.channel, second, copt);
    rec.identity(Check::chain_property, proc.chain_residual);
    const HolevoResult hol = holevo_bound_check(proc, base);
    rec.inequality(Check::data_processing, hol.i_rq - hol.i_sq);
    rec.identity(Check::holevo_identity, hol.equality_residual);
    rec.inequality(Check::holevo_bound, hol.bound_slack);
  }

  // Bipartite structural checks.
  {
    Rng srng(Rng::derive(seed, kSubsysSalt));
    constexpr std::array<std::pair<std::size_t, std::size_t>, 5> shapes{
        {{2, 2}, {2, 3}, {3, 2}, {2, 4}, {4, 2}}};
    const auto [dA, dB] = shapes[srng.below(shapes.size())];
    const std::size_t rank = 1 + srng.below(dA * dB);
    const DensityMatrix rho_AB =
        random_density(dA * dB, rank, Rng::derive(seed, kSubsysSalt, 1));
    const ParentChild pc = subsystem_conditional(rho_AB, dA, dB, Subsystem::A);
    const EntanglementBound bound = entanglement_bound_check(pc, base);
    rec.inequality(Check::subsystem_bound, bound.slack);
    const ParentConditionalEntropy jm = j_given_parent(pc, base);
    double worst_slack = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < jm.per_m.size(); ++m)
      worst_slack = std::min(
          worst_slack,
          jm.per_m[m] - entropy_of(pc.evolved[m].spectral().probabilities, base));
    rec.inequality(Check::subsystem_conditional_entropy, worst_slack);
    ComplexMatrix mix(dA, dA);
    for (std::size_t m = 0; m < pc.evolved.size(); ++m)
      mix += pc.table.p_from[m] * pc.evolved[m].matrix();
    rec.identity(Check::subsystem_mixture, max_abs_diff(mix, pc.rho_child.matrix()));
  }

  // Generalized tables over non-orthogonal decompositions.
  {
    Rng grng(Rng::derive(seed, kGeneralizedSalt));
    const GeneralizedTable reduction =
        generalized_qcp(inst.channel, spectral_as_decomposition(inst.rho_Q),
                        analysis.rho_R.spectral().basis());
    double red = 0.0;
    for (std::size_t r = 0; r < table.n_to; ++r)
      for (std::size_t q = 0; q < table.n_from; ++q)
        red = std::max(red, std::abs(reduction.entries(r, q) - table.p(r, q)));
    rec.identity(Check::generalized_reduction, red);

    const std::size_t members = inst.rho_Q.dim() + grng.below(3);
    const ConvexDecomposition dec = random_decomposition(
        inst.rho_Q, members, Rng::derive(seed, kGeneralizedSalt, 1));
    const GeneralizedTable gen =
        generalized_qcp(inst.channel, dec, analysis.rho_R.spectral().basis());
    rec.identity(Check::generalized_total_overlap, gen.overlap_residual);
    double range = 0.0;
    double row_sums = 0.0;
    for (std::size_t k = 0; k < gen.entries.cols; ++k) {
      double col = 0.0;
      for (std::size_t r = 0; r < gen.entries.rows; ++r) {
        const double x = gen.entries(r, k);
        range = std::max(range, std::max(-x, x - 1.0));
        col += x;
      }
      row_sums = std::max(row_sums, std::abs(col - 1.0));
    }
    rec.identity(Check::generalized_range, std::max(range, 0.0));
    rec.identity(Check::generalized_row_sums, row_sums);
  }

  // Lieb trace quantity: nonnegativity and joint concavity along a segment.
  {
    Rng lrng(Rng::derive(seed, kLiebSalt));
    const std::size_t d = inst.dim;
    const ComplexMatrix a0 = random_psd(d, lrng);
    const ComplexMatrix a1 = random_psd(d, lrng);
    const ComplexMatrix b0 = random_psd(d, lrng);
    const ComplexMatrix b1 = random_psd(d, lrng);
    ComplexMatrix k(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) k(i, j) = lrng.complex_gaussian();
    const double p = lrng.uniform();
    rec.inequality(Check::lieb_nonnegative, lieb_quantity(a0, b0, k, p).value);
    rec.inequality(Check::lieb_concavity,
                   concavity_probe(a0, a1, b0, b1, k, p, 11).min_slack);
  }

  // Appendix lemma on doubly stochastic matrices.
  {
    Rng mrng(Rng::derive(seed, kLemmaSalt));
    const std::size_t n = inst.dim;
    const RealMatrix t = random_birkhoff(n, 1 + mrng.below(4), mrng);
    const ProbVector p(mrng.simplex(n));
    rec.inequality(Check::stochastic_entropy_lemma,
                   check_doubly_stochastic_entropy(p, t, 1e-9, base).slack);
  }
}

}  // namespace detail

// Run every check over cfg.n_trials randomized instances. Failures never
// throw; they are counted in the report with a reproducing seed.
inline VerificationReport run_suite(const TrialConfig& cfg) {
  if (cfg.n_trials < 1) throw ParameterOutOfRange("need at least one trial");
  if (cfg.dims.empty()) throw ParameterOutOfRange("dims must not be empty");
  for (std::size_t d : cfg.dims)
    if (d < 2 || d > 8)
      throw ParameterOutOfRange("dims must lie in [2, 8], got " + std::to_string(d));

  VerificationReport report;
  report.config = cfg;
  report.checks = make_check_registry();
  for (std::size_t i = 0; i < cfg.n_trials; ++i) {
    const std::uint64_t seed = Rng::derive(cfg.master_seed, i, detail::kTrialSalt);
    detail::evaluate_trial(cfg, seed, report.checks);
  }
  report.pass = true;
  for (auto& c : report.checks) {
    if (c.trials == 0) c.worst = 0.0;
    if (!c.passed()) report.pass = false;
  }
  return report;
}

// Re-run a single trial and expose its objects for debugging.
struct TrialTrace {
  std::uint64_t seed = 0;
  std::size_t dim = 0;
  std::size_t rank = 0;
  std::string channel_kind;
  DensityMatrix rho_Q;
  QuantumChannel channel;
  ConditionalTable table;
  InfoSummary summary;
  CheckResult check;  // the named check, restricted to this trial
};

inline TrialTrace reproduce(const TrialConfig& cfg, std::uint64_t trial_seed,
                            const std::string& check_name) {
  std::vector<CheckResult> checks = make_check_registry();
  bool known = false;
  for (const auto& c : checks) known = known || (c.name == check_name);
  if (!known) throw UnknownCheck("no check named '" + check_name + "'");

  detail::evaluate_trial(cfg, trial_seed, checks);
  detail::TrialInstance inst = detail::generate_instance(cfg, trial_seed);
  ConditionalResult analysis = conditional_probs(inst.channel, inst.rho_Q);
  InfoSummary sum = summarize(analysis.table, LogBase::two);

  CheckResult named;
  for (auto& c : checks)
    if (c.name == check_name) named = c;
  if (named.trials == 0) named.worst = 0.0;
  return TrialTrace{trial_seed,
                    inst.dim,
                    inst.rank,
                    channel_kind_name(inst.kind),
                    std::move(inst.rho_Q),
                    std::move(inst.channel),
                    std::move(analysis.table),
                    std::move(sum),
                    std::move(named)};
}

}  // namespace qcond
