#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "qcond/chain.hpp"

using namespace qcond;

TEST_CASE("make_consistent leaves an already-pinched channel unchanged") {
  const DensityMatrix rho = random_density(3, 3, 5);
  const QuantumChannel e = random_channel(3, 3, 2, 6);
  const ConditionalResult res = conditional_probs(e, rho);
  const SpectralDecomposition& dec_R = res.rho_R.spectral();

  const QuantumChannel raw = random_channel(3, 3, 2, 7);
  const QuantumChannel adjusted = make_consistent(raw, dec_R);
  const QuantumChannel twice = make_consistent(adjusted, dec_R);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      ComplexMatrix unit(3, 3);
      unit(i, j) = 1.0;
      CHECK(max_abs_diff(apply_to_operator(adjusted, unit),
                         apply_to_operator(twice, unit)) < 1e-12);
    }
}

TEST_CASE("make_consistent sees only the pinched part of its input") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DensityMatrix rho = random_density(3, 2, 100 + seed);
    const SpectralDecomposition& basis = rho.spectral();
    const QuantumChannel adjusted =
        make_consistent(random_channel(3, 3, 3, 200 + seed), basis);

    const DensityMatrix probe = random_density(3, 1, 300 + seed);
    ComplexMatrix pinched(3, 3);
    for (std::size_t r = 0; r < 3; ++r) {
      const ComplexMatrix p = basis.projector(r);
      pinched += p * probe.matrix() * p;
    }
    CHECK(max_abs_diff(apply_to_operator(adjusted, probe.matrix()),
                       apply_to_operator(adjusted, pinched)) < 1e-10);
  }
}

TEST_CASE("two unitary stages give a permutation table end to end") {
  const DensityMatrix rho = random_density(3, 3, 11);
  const QuantumChannel u1 = unitary_channel(random_unitary(3, 12));
  const QuantumChannel u2 = unitary_channel(random_unitary(3, 13));
  const TwoStepProcess proc = build_two_step(rho, u1, u2);
  CHECK(pairing_delta_residual(proc.table_sq, max_overlap_pairing(proc.table_sq)) <
        1e-9);
  CHECK(proc.chain_residual < 1e-9);
}

TEST_CASE("unitary then depolarizing reduces to the depolarizing table") {
  const double lambda = 0.4;
  const DensityMatrix rho = random_density(3, 3, 21);
  const TwoStepProcess proc = build_two_step(
      rho, unitary_channel(random_unitary(3, 22)), depolarizing(3, lambda));
  // Each p(s|q) column holds one (1-lambda)+lambda/3 entry and two lambda/3.
  for (std::size_t q = 0; q < 3; ++q) {
    std::vector<double> col;
    for (std::size_t s = 0; s < 3; ++s) col.push_back(proc.table_sq.p(s, q));
    std::sort(col.begin(), col.end());
    CHECK(col[0] == Catch::Approx(lambda / 3.0).margin(1e-9));
    CHECK(col[1] == Catch::Approx(lambda / 3.0).margin(1e-9));
    CHECK(col[2] == Catch::Approx(1.0 - lambda + lambda / 3.0).margin(1e-9));
  }
}

TEST_CASE("random processes satisfy the chain identities") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t d = 2 + seed % 4;
    const DensityMatrix rho = random_density(d, 1 + seed % d, 400 + seed);
    const QuantumChannel e1 = random_channel(d, d, 1 + seed % 3, 500 + seed);
    const QuantumChannel e2 = random_channel(d, d, 1 + seed % 4, 600 + seed);
    const TwoStepProcess proc = build_two_step(rho, e1, e2);
    CHECK(proc.chain_residual < 1e-9);
    CHECK(proc.total_prob_sr < 1e-9);
    CHECK(proc.total_prob_sq < 1e-9);
    CHECK(table_residuals(proc.table_sq).total_prob < 1e-9);
  }
}

TEST_CASE("the unadjusted second stage generically breaks the chain property") {
  std::size_t broken = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DensityMatrix rho = random_density(3, 3, 700 + seed);
    const QuantumChannel e1 = random_channel(3, 3, 2, 800 + seed);
    const QuantumChannel e2 = random_channel(3, 3, 3, 900 + seed);
    const TwoStepProcess proc = build_two_step(rho, e1, e2);
    CHECK(proc.chain_residual < 1e-9);
    if (proc.raw_chain_residual > 1e-3) ++broken;
  }
  CHECK(broken >= 8);
}

TEST_CASE("build_two_step honours its tolerance") {
  const DensityMatrix rho = random_density(2, 2, 31);
  const QuantumChannel e1 = random_channel(2, 2, 2, 32);
  const QuantumChannel e2 = random_channel(2, 2, 2, 33);
  ChainOptions strict;
  strict.chain_tol = 1e-30;
  CHECK_THROWS_AS(build_two_step(rho, e1, e2, strict), ConsistencyResidual);
  CHECK_THROWS_AS(
      build_two_step(rho, e1, random_channel(3, 3, 2, 34)), DimensionMismatch);
}

TEST_CASE("data processing holds with equality for a unitary second stage") {
  const DensityMatrix rho = random_density(3, 2, 41);
  const QuantumChannel e1 = random_channel(3, 3, 2, 42);
  const TwoStepProcess proc =
      build_two_step(rho, e1, unitary_channel(random_unitary(3, 43)));
  const DpiResult dpi = dpi_check(proc);
  CHECK(std::abs(dpi.i_rq - dpi.i_sq) < 1e-9);
}

TEST_CASE("full depolarizing erases all mutual information") {
  const DensityMatrix rho = random_density(3, 3, 51);
  const QuantumChannel e1 = random_channel(3, 3, 2, 52);
  const TwoStepProcess proc = build_two_step(rho, e1, depolarizing(3, 1.0));
  const DpiResult dpi = dpi_check(proc);
  CHECK(std::abs(dpi.i_sq) < 1e-9);
  CHECK(dpi.slack == Catch::Approx(dpi.i_rq).margin(1e-9));
}

TEST_CASE("data processing holds on random instances") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t d = 2 + seed % 4;
    const DensityMatrix rho = random_density(d, 1 + seed % d, 1000 + seed);
    const QuantumChannel e1 = random_channel(d, d, 1 + seed % 3, 1100 + seed);
    const QuantumChannel e2 = random_channel(d, d, 1 + seed % 4, 1200 + seed);
    CHECK(dpi_check(build_two_step(rho, e1, e2)).slack >= -1e-8);
  }
}

TEST_CASE("the chi of the conditional ensemble equals the mutual information") {
  // Pure initial state: the one-member ensemble gives chi = 0 = I(R:Q).
  const DensityMatrix psi = random_density(3, 1, 61);
  const TwoStepProcess pure_proc = build_two_step(
      psi, random_channel(3, 3, 2, 62), random_channel(3, 3, 2, 63));
  const HolevoResult pure_res = holevo_bound_check(pure_proc);
  CHECK(std::abs(pure_res.chi) < 1e-9);
  CHECK(std::abs(pure_res.i_rq) < 1e-9);

  // Unitary first stage: chi equals the initial entropy.
  const DensityMatrix rho = random_density(3, 3, 64);
  const TwoStepProcess unitary_proc = build_two_step(
      rho, unitary_channel(random_unitary(3, 65)), random_channel(3, 3, 2, 66));
  CHECK(holevo_bound_check(unitary_proc).chi ==
        Catch::Approx(von_neumann_entropy(rho)).margin(1e-9));

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t d = 2 + seed % 4;
    const TwoStepProcess proc = build_two_step(
        random_density(d, 1 + seed % d, 1300 + seed),
        random_channel(d, d, 1 + seed % 3, 1400 + seed),
        random_channel(d, d, 1 + seed % 4, 1500 + seed));
    const HolevoResult res = holevo_bound_check(proc);
    CHECK(res.equality_residual < 1e-9);
    CHECK(res.bound_slack >= -1e-8);
  }
}

TEST_CASE("trajectory sampling follows a deterministic table exactly") {
  const DensityMatrix rho = random_density(3, 3, 71);
  const ConditionalTable table =
      conditional_probs(unitary_channel(random_unitary(3, 72)), rho).table;
  const auto perm = max_overlap_pairing(table);
  const TrajectoryBatch batch = sample_trajectories(table, 20000, 73);
  std::uint64_t total = 0;
  for (std::size_t q = 0; q < 3; ++q)
    for (std::size_t r = 0; r < 3; ++r) {
      if (r != perm[q]) CHECK(batch.at(q, r) == 0);
      total += batch.at(q, r);
    }
  CHECK(total == batch.n_samples);
}

TEST_CASE("trajectory sampling is deterministic per seed") {
  const DensityMatrix rho = random_density(2, 2, 81);
  const ConditionalTable table =
      conditional_probs(random_channel(2, 2, 2, 82), rho).table;
  const TrajectoryBatch a = sample_trajectories(table, 5000, 83);
  const TrajectoryBatch b = sample_trajectories(table, 5000, 83);
  CHECK(a.counts == b.counts);
  const TrajectoryBatch c = sample_trajectories(table, 5000, 84);
  CHECK(a.counts != c.counts);
}

TEST_CASE("empirical frequencies satisfy the binomial four-sigma bound") {
  const DensityMatrix rho = random_density(3, 3, 91);
  const ConditionalTable table =
      conditional_probs(random_channel(3, 3, 2, 92), rho).table;
  const TrajectoryBatch batch = sample_trajectories(table, 100000, 93);
  const EmpiricalTable emp = empirical_table(batch);
  CHECK(max_binomial_sigma_deviation(emp, table) <= 4.0);
  CHECK(table_residuals(emp.table).column_sum < 1e-12);
  CHECK(table_residuals(emp.table).total_prob < 1e-12);
}

TEST_CASE("two-step batches marginalize into the one-step table") {
  const DensityMatrix rho = random_density(2, 2, 101);
  const TwoStepProcess proc = build_two_step(rho, random_channel(2, 2, 2, 102),
                                             random_channel(2, 2, 2, 103));
  const TrajectoryBatch batch = sample_trajectories(proc, 50000, 104);
  REQUIRE(batch.dims.size() == 3);
  std::uint64_t total = 0;
  for (std::uint64_t c : batch.counts) total += c;
  CHECK(total == batch.n_samples);
  const EmpiricalTable emp = empirical_table(batch);
  CHECK(max_binomial_sigma_deviation(emp, proc.table_rq) <= 4.0);
}

TEST_CASE("empirical estimates converge in total variation") {
  const DensityMatrix rho = random_density(3, 2, 111);
  const ConditionalTable table =
      conditional_probs(random_channel(3, 3, 3, 112), rho).table;
  auto tv_at = [&](std::size_t n) {
    const EmpiricalTable emp = empirical_table(sample_trajectories(table, n, 113), 1);
    double tv = 0.0;
    for (std::size_t q = 0; q < 3; ++q)
      for (std::size_t r = 0; r < 3; ++r)
        tv += std::abs(emp.table.p(r, q) * emp.table.p_from[q] -
                       table.p(r, q) * table.p_from[q]);
    return 0.5 * tv;
  };
  const double tv3 = tv_at(1000);
  const double tv5 = tv_at(100000);
  CHECK(tv5 < tv3);
  CHECK(tv5 < 0.01);
}

TEST_CASE("empirical_table flags starved columns and rejects empty batches") {
  TrajectoryBatch empty;
  empty.dims = {2, 2};
  CHECK_THROWS_AS(empirical_table(empty), EmptyBatch);

  const DensityMatrix psi = random_density(2, 1, 121);
  const ConditionalTable table =
      conditional_probs(random_channel(2, 2, 2, 122), psi).table;
  // The zero-probability initial eigenstate is never drawn.
  const EmpiricalTable emp = empirical_table(sample_trajectories(table, 1000, 123));
  REQUIRE(emp.low_sample_columns.size() == 1);
  CHECK(emp.low_sample_columns[0] == 0);
  CHECK(emp.from_counts[0] == 0);
}
