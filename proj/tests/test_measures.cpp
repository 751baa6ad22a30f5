#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qcond/measures.hpp"

using namespace qcond;

namespace {

constexpr double kH34 = 0.8112781244591328;   // H(3/4, 1/4) in bits
constexpr double kChi0Plus = 0.6008760366928562;  // binary entropy of (1 +- 1/sqrt2)/2

DensityMatrix bell_state() {
  ComplexMatrix m(4, 4);
  m(0, 0) = m(0, 3) = m(3, 0) = m(3, 3) = 0.5;
  return density_from_matrix(m);
}

}  // namespace

TEST_CASE("j_given matches hand values") {
  const DensityMatrix rho = density_from_matrix(ComplexMatrix{{0.75, 0.0}, {0.0, 0.25}});

  const ConditionalTable unitary_table =
      conditional_probs(unitary_channel(random_unitary(2, 3)), rho).table;
  CHECK(j_given(unitary_table, 0) < 1e-9);
  CHECK(j_given(unitary_table, 1) < 1e-9);

  const ConditionalTable uniform_table =
      conditional_probs(depolarizing(2, 1.0), rho).table;
  CHECK(j_given(uniform_table, 0) == Catch::Approx(1.0).margin(1e-12));

  const ConditionalTable half_table = conditional_probs(depolarizing(2, 0.5), rho).table;
  CHECK(j_given(half_table, 0) == Catch::Approx(kH34).margin(1e-12));
  CHECK_THROWS_AS(j_given(half_table, 2), IndexOutOfRange);
}

TEST_CASE("j_conditional covers the special evolutions") {
  // Pure initial state: all added entropy comes from the map, J = S(rho_R).
  const DensityMatrix psi = random_density(3, 1, 21);
  const QuantumChannel e = random_channel(3, 3, 3, 22);
  const ConditionalResult res = conditional_probs(e, psi);
  CHECK(j_conditional(res.table) ==
        Catch::Approx(von_neumann_entropy(res.rho_R)).margin(1e-9));

  // Unitary evolution adds nothing.
  const DensityMatrix rho = random_density(3, 3, 23);
  const ConditionalTable ut =
      conditional_probs(unitary_channel(random_unitary(3, 24)), rho).table;
  CHECK(j_conditional(ut) < 1e-9);

  // Half-depolarized qubit: both columns carry H(3/4, 1/4).
  const DensityMatrix diag = density_from_matrix(ComplexMatrix{{0.75, 0.0}, {0.0, 0.25}});
  const ConditionalTable ht = conditional_probs(depolarizing(2, 0.5), diag).table;
  CHECK(j_conditional(ht) == Catch::Approx(kH34).margin(1e-12));
}

TEST_CASE("mutual information agrees with the entropy-difference route") {
  const DensityMatrix diag = density_from_matrix(ComplexMatrix{{0.75, 0.0}, {0.0, 0.25}});
  const ConditionalResult res = conditional_probs(depolarizing(2, 0.5), diag);
  const InfoSummary sum = summarize(res.table);
  CHECK(sum.I == Catch::Approx(0.14315587846583222).margin(1e-9));
  CHECK(std::abs(sum.I - (sum.S_final - sum.J)) < 1e-10);

  // Pure initial state carries no information forward.
  const DensityMatrix psi = random_density(3, 1, 31);
  const QuantumChannel e = random_channel(3, 3, 2, 32);
  CHECK(std::abs(mutual_information(conditional_probs(e, psi).table)) < 1e-9);

  // Unitary evolution carries all of it.
  const DensityMatrix rho = random_density(4, 4, 33);
  const ConditionalTable ut =
      conditional_probs(unitary_channel(random_unitary(4, 34)), rho).table;
  CHECK(mutual_information(ut) ==
        Catch::Approx(von_neumann_entropy(rho)).margin(1e-9));
}

TEST_CASE("mutual information rejects impossible marginals") {
  ConditionalTable t;
  t.n_from = 2;
  t.n_to = 2;
  t.probs = RealMatrix(2, 2, {0.0, 0.0, 1.0, 1.0});
  t.p_from = ProbVector({0.5, 0.5});
  t.p_to = ProbVector({1.0, 0.0});  // everything lands on r=1, yet p_1 = 0
  CHECK_THROWS_AS(mutual_information(t), InconsistentTable);
}

TEST_CASE("summaries satisfy the information inequalities on random instances") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t d = 2 + seed % 5;
    const DensityMatrix rho = random_density(d, 1 + seed % d, 100 + seed);
    const QuantumChannel e = random_channel(d, d, 1 + seed % 4, 200 + seed);
    const InfoSummary s = summarize(conditional_probs(e, rho).table);
    CHECK(s.J >= 0.0);
    CHECK(s.I >= -1e-9);
    CHECK(std::abs(s.I - (s.S_final - s.J)) < 1e-10);
    CHECK(s.I <= s.S_initial + 1e-8);
    CHECK(s.J <= s.S_final + 1e-8);
    for (double j : s.per_q_J) CHECK(j >= 0.0);
  }
}

TEST_CASE("classical conditional entropy behaves classically") {
  // Independent variables: H(Y|X) = H(Y).
  const RealMatrix independent(2, 3, {0.3, 0.3, 0.3, 0.7, 0.7, 0.7});
  const ProbVector p_x({0.2, 0.5, 0.3});
  CHECK(classical_conditional_entropy(independent, p_x) ==
        Catch::Approx(entropy_of({0.3, 0.7}, LogBase::two)).margin(1e-12));

  // Deterministic function of X: H(Y|X) = 0.
  const RealMatrix deterministic(2, 2, {1.0, 0.0, 0.0, 1.0});
  CHECK(classical_conditional_entropy(deterministic, ProbVector({0.4, 0.6})) == 0.0);

  // Random joint distribution: both computation routes agree.
  Rng rng(55);
  RealMatrix joint(3, 3);
  double total = 0.0;
  for (auto& x : joint.data) {
    x = rng.uniform();
    total += x;
  }
  for (auto& x : joint.data) x /= total;
  std::vector<double> px(3, 0.0);
  RealMatrix cond(3, 3);
  for (std::size_t x = 0; x < 3; ++x) {
    px[x] = joint.col_sum(x);
    for (std::size_t y = 0; y < 3; ++y) cond(y, x) = joint(y, x) / px[x];
  }
  CHECK(classical_conditional_entropy(cond, ProbVector(px)) ==
        Catch::Approx(classical_conditional_entropy_from_joint(joint)).margin(1e-12));
}

TEST_CASE("conditional von Neumann entropy on known bipartite states") {
  const DensityMatrix a = random_density(2, 2, 61);
  const DensityMatrix b = random_density(3, 3, 62);
  const DensityMatrix product = density_from_matrix(kron(a.matrix(), b.matrix()));
  CHECK(conditional_vn_entropy(product, 2, 3) ==
        Catch::Approx(von_neumann_entropy(a)).margin(1e-9));

  CHECK(conditional_vn_entropy(bell_state(), 2, 2) ==
        Catch::Approx(-1.0).margin(1e-9));

  const DensityMatrix mixed = density_from_matrix(0.25 * ComplexMatrix::identity(4));
  CHECK(conditional_vn_entropy(mixed, 2, 2) == Catch::Approx(1.0).margin(1e-12));

  CHECK_THROWS_AS(conditional_vn_entropy(mixed, 3, 2), DimensionMismatch);
}

TEST_CASE("holevo_chi on canonical ensembles") {
  const DensityMatrix rho = random_density(3, 2, 71);
  const Ensemble same = make_ensemble(ProbVector({0.3, 0.7}), {rho, rho});
  CHECK(holevo_chi(same) == Catch::Approx(0.0).margin(1e-10));

  ComplexMatrix e0(2, 2), e1(2, 2);
  e0(0, 0) = 1.0;
  e1(1, 1) = 1.0;
  const Ensemble orthogonal = make_ensemble(
      ProbVector({0.5, 0.5}), {density_from_matrix(e0), density_from_matrix(e1)});
  CHECK(holevo_chi(orthogonal) == Catch::Approx(1.0).margin(1e-12));

  // {|0>, |+>} with equal weights.
  ComplexMatrix plus{{0.5, 0.5}, {0.5, 0.5}};
  const Ensemble tilted = make_ensemble(
      ProbVector({0.5, 0.5}), {density_from_matrix(e0), density_from_matrix(plus)});
  CHECK(holevo_chi(tilted) == Catch::Approx(kChi0Plus).margin(1e-10));

  CHECK_THROWS_AS(make_ensemble(ProbVector({1.0}), {}), ShapeMismatch);
  CHECK_THROWS_AS(
      make_ensemble(ProbVector({0.5, 0.5}), {rho, random_density(2, 2, 72)}),
      DimensionMismatch);
}

TEST_CASE("holevo_chi stays within its bounds on random ensembles") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const std::size_t d = 2 + seed % 3;
    const std::size_t count = 1 + rng.below(2 * d * d);
    std::vector<DensityMatrix> members;
    for (std::size_t x = 0; x < count; ++x)
      members.push_back(random_density(d, 1 + rng.below(d), 1000 + 17 * seed + x));
    const Ensemble ens = make_ensemble(ProbVector(rng.simplex(count)), std::move(members));
    const double chi = holevo_chi(ens);
    CHECK(chi >= -1e-10);
    CHECK(chi <= std::log2(static_cast<double>(d)) + 1e-10);
  }
}
