#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qcond/linalg.hpp"
#include "qcond/rng.hpp"

using namespace qcond;

namespace {

ComplexMatrix random_hermitian(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  ComplexMatrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = rng.complex_gaussian();
  ComplexMatrix h = g + g.adjoint();
  return 0.5 * h;
}

ComplexMatrix random_complex(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  ComplexMatrix g(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) g(i, j) = rng.complex_gaussian();
  return g;
}

double orthonormality_defect(const ComplexMatrix& q) {
  return max_abs_diff(q.adjoint() * q, ComplexMatrix::identity(q.cols()));
}

}  // namespace

TEST_CASE("eig_hermitian handles the identity") {
  const auto es = eig_hermitian(ComplexMatrix::identity(3));
  REQUIRE(es.dimension() == 3);
  for (double lambda : es.eigenvalues) CHECK(lambda == Catch::Approx(1.0).margin(1e-14));
  CHECK(max_abs_diff(es.reconstruct(), ComplexMatrix::identity(3)) < 1e-13);
  CHECK(es.degeneracy_groups.size() == 1);
  CHECK(es.degeneracy_groups[0].size() == 3);
}

TEST_CASE("eig_hermitian keeps a diagonal matrix diagonal") {
  const ComplexMatrix m{{0.25, 0.0}, {0.0, 0.75}};
  const auto es = eig_hermitian(m);
  CHECK(es.eigenvalues[0] == Catch::Approx(0.25).margin(1e-14));
  CHECK(es.eigenvalues[1] == Catch::Approx(0.75).margin(1e-14));
  CHECK(std::abs(es.vectors(0, 0)) == Catch::Approx(1.0).margin(1e-14));
  CHECK(std::abs(es.vectors(1, 1)) == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("eig_hermitian diagonalizes the flip matrix") {
  const ComplexMatrix m{{0.0, 1.0}, {1.0, 0.0}};
  const auto es = eig_hermitian(m);
  REQUIRE(es.eigenvalues[0] == Catch::Approx(-1.0).margin(1e-13));
  REQUIRE(es.eigenvalues[1] == Catch::Approx(1.0).margin(1e-13));
  // Direct substitution M v = lambda v for both eigenpairs.
  for (std::size_t k = 0; k < 2; ++k) {
    const CVec v = es.vector(k);
    const CVec mv = matvec(m, v);
    for (std::size_t i = 0; i < 2; ++i)
      CHECK(std::abs(mv[i] - es.eigenvalues[k] * v[i]) < 1e-13);
  }
}

TEST_CASE("eig_hermitian satisfies the reconstruction bound on random input") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 2 + seed % 7;
    const ComplexMatrix m = random_hermitian(n, 1000 + seed);
    const auto es = eig_hermitian(m);
    const double bound = 10.0 * 1e-13 * std::max(1.0, m.max_abs());
    CHECK(max_abs_diff(es.reconstruct(), m) <= bound);
    CHECK(orthonormality_defect(es.vectors) < 1e-12);
    for (std::size_t k = 1; k < n; ++k)
      CHECK(es.eigenvalues[k] >= es.eigenvalues[k - 1]);
  }
}

TEST_CASE("eig_hermitian is deterministic") {
  const ComplexMatrix m = random_hermitian(5, 77);
  const auto a = eig_hermitian(m);
  const auto b = eig_hermitian(m);
  REQUIRE(a.eigenvalues == b.eigenvalues);
  REQUIRE(a.vectors.data() == b.vectors.data());
}

TEST_CASE("eig_hermitian rejects non-Hermitian input") {
  const ComplexMatrix m{{0.0, 1.0}, {0.0, 0.0}};
  CHECK_THROWS_AS(eig_hermitian(m), NotHermitian);
}

TEST_CASE("kron matches its defining formula") {
  const ComplexMatrix i2 = ComplexMatrix::identity(2);
  CHECK(max_abs_diff(kron(i2, i2), ComplexMatrix::identity(4)) == 0.0);

  const ComplexMatrix a{{1.0, 0.0}, {0.0, 0.0}};
  const ComplexMatrix b{{0.0, 0.0}, {0.0, 1.0}};
  ComplexMatrix expected(4, 4);
  expected(1, 1) = 1.0;
  CHECK(max_abs_diff(kron(a, b), expected) == 0.0);

  // Quadruple-loop oracle on random input.
  const ComplexMatrix x = random_complex(2, 3, 5);
  const ComplexMatrix y = random_complex(3, 2, 6);
  const ComplexMatrix k = kron(x, y);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t p = 0; p < 3; ++p)
        for (std::size_t q = 0; q < 2; ++q)
          CHECK(k(i * 3 + p, j * 2 + q) == x(i, j) * y(p, q));
}

TEST_CASE("kron multiplies traces") {
  const ComplexMatrix a = random_hermitian(3, 8);
  const ComplexMatrix b = random_hermitian(2, 9);
  CHECK(std::abs(kron(a, b).trace() - a.trace() * b.trace()) < 1e-12);
}

TEST_CASE("partial trace of a product is the unit-trace factor") {
  ComplexMatrix rho_a = random_hermitian(2, 11);
  rho_a = rho_a * rho_a.adjoint();
  rho_a = (1.0 / rho_a.trace()) * rho_a;
  ComplexMatrix rho_b = random_hermitian(3, 12);
  rho_b = rho_b * rho_b.adjoint();
  rho_b = (1.0 / rho_b.trace()) * rho_b;

  const ComplexMatrix joint = kron(rho_a, rho_b);
  CHECK(max_abs_diff(partial_trace(joint, 2, 3, Subsystem::B), rho_a) < 1e-13);
  CHECK(max_abs_diff(partial_trace(joint, 2, 3, Subsystem::A), rho_b) < 1e-13);
}

TEST_CASE("partial trace of the Bell projector is maximally mixed") {
  // |00> + |11> over sqrt(2): the 4x4 projector has 1/2 at the four corners
  // of the {0, 3} block.
  ComplexMatrix bell(4, 4);
  bell(0, 0) = bell(0, 3) = bell(3, 0) = bell(3, 3) = 0.5;
  const ComplexMatrix half = 0.5 * ComplexMatrix::identity(2);
  CHECK(max_abs_diff(partial_trace(bell, 2, 2, Subsystem::A), half) == 0.0);
  CHECK(max_abs_diff(partial_trace(bell, 2, 2, Subsystem::B), half) == 0.0);
}

TEST_CASE("partial trace preserves the trace and is linear") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ComplexMatrix m = random_complex(6, 6, 100 + seed);
    CHECK(std::abs(partial_trace(m, 2, 3, Subsystem::B).trace() - m.trace()) < 1e-12);
    CHECK(std::abs(partial_trace(m, 2, 3, Subsystem::A).trace() - m.trace()) < 1e-12);
  }
  const ComplexMatrix m = random_complex(4, 4, 200);
  const ComplexMatrix n = random_complex(4, 4, 201);
  const Complex alpha(0.3, -1.1);
  const Complex beta(-2.0, 0.4);
  const ComplexMatrix lhs = partial_trace(alpha * m + beta * n, 2, 2, Subsystem::B);
  const ComplexMatrix rhs = alpha * partial_trace(m, 2, 2, Subsystem::B) +
                            beta * partial_trace(n, 2, 2, Subsystem::B);
  CHECK(max_abs_diff(lhs, rhs) < 1e-13);
}

TEST_CASE("swap_factors exchanges the roles of the partial traces") {
  const ComplexMatrix m = random_complex(6, 6, 300);
  const ComplexMatrix swapped = swap_factors(m, 2, 3);
  CHECK(max_abs_diff(partial_trace(m, 2, 3, Subsystem::A),
                     partial_trace(swapped, 3, 2, Subsystem::B)) < 1e-13);
  CHECK(max_abs_diff(partial_trace(m, 2, 3, Subsystem::B),
                     partial_trace(swapped, 3, 2, Subsystem::A)) < 1e-13);
}

TEST_CASE("qr_orthonormalize produces orthonormal columns") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ComplexMatrix m = random_complex(5, 3, 400 + seed);
    const ComplexMatrix q = qr_orthonormalize(m);
    CHECK(orthonormality_defect(q) < 1e-12);
  }
}

TEST_CASE("qr_orthonormalize fixes an orthonormal input") {
  const ComplexMatrix u = qr_orthonormalize(random_complex(4, 4, 500));
  CHECK(max_abs_diff(qr_orthonormalize(u), u) < 1e-14);
}

TEST_CASE("qr_orthonormalize normalizes a single column") {
  ComplexMatrix v(3, 1);
  v(0, 0) = Complex(3.0, 0.0);
  v(1, 0) = Complex(0.0, 4.0);
  const ComplexMatrix q = qr_orthonormalize(v);
  CHECK(std::abs(q(0, 0) - Complex(0.6, 0.0)) < 1e-15);
  CHECK(std::abs(q(1, 0) - Complex(0.0, 0.8)) < 1e-15);
}

TEST_CASE("qr_orthonormalize detects rank deficiency") {
  ComplexMatrix m(3, 2);
  m(0, 0) = 1.0;
  m(0, 1) = 2.0;  // second column is parallel to the first
  CHECK_THROWS_AS(qr_orthonormalize(m), RankDeficient);
  CHECK_THROWS_AS(qr_orthonormalize(random_complex(2, 3, 1)), DimensionMismatch);
}
