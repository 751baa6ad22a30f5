#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "qcond/states.hpp"

using namespace qcond;

TEST_CASE("density_from_matrix accepts valid states") {
  const DensityMatrix mixed = density_from_matrix(0.5 * ComplexMatrix::identity(2));
  CHECK(mixed.dim() == 2);
  CHECK(std::abs(mixed.matrix().trace() - Complex(1.0)) < 1e-14);

  const DensityMatrix diag = density_from_matrix(ComplexMatrix{{0.75, 0.0}, {0.0, 0.25}});
  CHECK(diag.spectral().probabilities[0] == Catch::Approx(0.25).margin(1e-14));
  CHECK(diag.spectral().probabilities[1] == Catch::Approx(0.75).margin(1e-14));
}

TEST_CASE("density_from_matrix rejects invalid states") {
  CHECK_THROWS_AS(density_from_matrix(ComplexMatrix{{1.0, 0.0}, {0.0, -0.2}}), NotPositive);
  CHECK_THROWS_AS(density_from_matrix(ComplexMatrix{{0.5, 0.5}, {0.0, 0.5}}), NotHermitian);
  CHECK_THROWS_AS(density_from_matrix(ComplexMatrix(2, 2)), ZeroTrace);
  CHECK_THROWS_AS(density_from_matrix(ComplexMatrix(2, 3)), DimensionMismatch);
}

TEST_CASE("density_from_matrix renormalizes and reports corrections") {
  StateCorrections fix;
  const DensityMatrix rho =
      density_from_matrix(ComplexMatrix{{1.5, 0.0}, {0.0, 0.5}}, {}, &fix);
  CHECK(fix.trace_defect == Catch::Approx(1.0).margin(1e-14));
  CHECK(std::abs(rho.matrix().trace() - Complex(1.0)) < 1e-14);
  CHECK(rho.spectral().probabilities[1] == Catch::Approx(0.75).margin(1e-14));
}

TEST_CASE("spectral decomposition is complete, including zero eigenvalues") {
  ComplexMatrix pure(2, 2);
  pure(0, 0) = 1.0;
  const DensityMatrix rho = density_from_matrix(pure);
  const SpectralDecomposition& dec = rho.spectral();
  REQUIRE(dec.dimension() == 2);
  CHECK(dec.probabilities[0] == 0.0);
  CHECK(dec.probabilities[1] == 1.0);
  ComplexMatrix sum(2, 2);
  for (std::size_t k = 0; k < 2; ++k) sum += dec.projector(k);
  CHECK(max_abs_diff(sum, ComplexMatrix::identity(2)) < 1e-14);
}

TEST_CASE("spectral decomposition of the maximally mixed state") {
  const DensityMatrix rho = density_from_matrix(0.25 * ComplexMatrix::identity(4));
  for (double p : rho.spectral().probabilities)
    CHECK(p == Catch::Approx(0.25).margin(1e-14));
  CHECK(max_abs_diff(rho.spectral().reconstruct(), rho.matrix()) < 1e-13);
}

TEST_CASE("spectral decomposition reconstructs a random rank-2 state") {
  const DensityMatrix rho = random_density(3, 2, 1234);
  const SpectralDecomposition& dec = rho.spectral();
  CHECK(max_abs_diff(dec.reconstruct(), rho.matrix()) < 1e-10);
  // Rank 2 in dimension 3: exactly one zero eigenvalue, still carried.
  REQUIRE(dec.dimension() == 3);
  CHECK(dec.probabilities[0] < 1e-12);
  CHECK(dec.probabilities[1] > 1e-6);
}

TEST_CASE("shannon_entropy matches hand values") {
  CHECK(shannon_entropy(ProbVector({1.0, 0.0})) == 0.0);
  CHECK(shannon_entropy(ProbVector({0.5, 0.5})) == Catch::Approx(1.0).margin(1e-14));
  CHECK(shannon_entropy(ProbVector({0.75, 0.25})) ==
        Catch::Approx(0.8112781244591328).margin(1e-12));
  // Natural-log variant scales by ln 2.
  CHECK(shannon_entropy(ProbVector({0.75, 0.25}), LogBase::e) ==
        Catch::Approx(0.8112781244591328 * std::log(2.0)).margin(1e-12));
}

TEST_CASE("shannon_entropy is permutation invariant and bounded") {
  const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
  std::vector<double> q = p;
  std::reverse(q.begin(), q.end());
  CHECK(shannon_entropy(ProbVector(p)) == Catch::Approx(shannon_entropy(ProbVector(q))));
  CHECK(shannon_entropy(ProbVector(p)) <= std::log2(4.0));
  CHECK(shannon_entropy(ProbVector(p)) >= 0.0);
}

TEST_CASE("ProbVector validates its entries") {
  CHECK_THROWS_AS(ProbVector({0.5, 0.4}), InvalidDistribution);
  CHECK_THROWS_AS(ProbVector({1.2, -0.2}), InvalidDistribution);
  // Tiny negatives within tolerance are clipped.
  const ProbVector p({1.0, -1e-12});
  CHECK(p[1] == 0.0);
}

TEST_CASE("von_neumann_entropy on known states") {
  ComplexMatrix pure(3, 3);
  pure(1, 1) = 1.0;
  CHECK(von_neumann_entropy(density_from_matrix(pure)) == Catch::Approx(0.0).margin(1e-10));
  CHECK(von_neumann_entropy(density_from_matrix(0.5 * ComplexMatrix::identity(2))) ==
        Catch::Approx(1.0).margin(1e-12));

  const double lp = (1.0 + 1.0 / std::sqrt(2.0)) / 2.0;
  const DensityMatrix rho =
      density_from_matrix(ComplexMatrix{{lp, 0.0}, {0.0, 1.0 - lp}});
  CHECK(von_neumann_entropy(rho) == Catch::Approx(0.6008760366928562).margin(1e-12));
}

TEST_CASE("random_density satisfies the state invariants across seeds") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t d = 2 + seed % 5;
    const DensityMatrix rho = random_density(d, d, seed);
    CHECK(std::abs(rho.matrix().trace() - Complex(1.0)) < 1e-12);
    CHECK(hermiticity_defect(rho.matrix()) < 1e-12);
    for (double p : rho.spectral().probabilities) CHECK(p >= 0.0);
    const double s = von_neumann_entropy(rho);
    CHECK(s >= 0.0);
    CHECK(s <= std::log2(static_cast<double>(d)) + 1e-12);
  }
}

TEST_CASE("random_density with rank 1 is pure") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DensityMatrix rho = random_density(4, 1, 900 + seed);
    CHECK(von_neumann_entropy(rho) < 1e-10);
  }
}

TEST_CASE("random_density is deterministic per seed") {
  const DensityMatrix a = random_density(5, 3, 42);
  const DensityMatrix b = random_density(5, 3, 42);
  REQUIRE(a.matrix().data() == b.matrix().data());
  const DensityMatrix c = random_density(5, 3, 43);
  CHECK(a.matrix().data() != c.matrix().data());
}

TEST_CASE("random_density validates the rank") {
  CHECK_THROWS_AS(random_density(3, 0, 1), ParameterOutOfRange);
  CHECK_THROWS_AS(random_density(3, 4, 1), ParameterOutOfRange);
}
