#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qcond/complex_matrix.hpp"
#include "qcond/errors.hpp"

namespace qcond {

struct EigOptions {
  double hermiticity_tol = 1e-10;
  double convergence_tol = 1e-13;
  double degeneracy_tol = 1e-10;
  int max_sweeps = 64;
};

// Complete orthonormal eigensystem of a Hermitian matrix. Eigenvalues are
// ascending; eigenvectors are the columns of `vectors`, one per eigenvalue
// (zero eigenvalues included). degeneracy_groups partitions the indices into
// runs of equal eigenvalues (within EigOptions::degeneracy_tol).
struct HermitianEigensystem {
  std::vector<double> eigenvalues;
  ComplexMatrix vectors;
  std::vector<std::vector<std::size_t>> degeneracy_groups;

  std::size_t dimension() const { return eigenvalues.size(); }

  CVec vector(std::size_t k) const {
    CVec v(vectors.rows());
    for (std::size_t i = 0; i < vectors.rows(); ++i) v[i] = vectors(i, k);
    return v;
  }

  ComplexMatrix projector(std::size_t k) const {
    const CVec v = vector(k);
    return outer(v, v);
  }

  ComplexMatrix reconstruct() const {
    const std::size_t n = dimension();
    ComplexMatrix m(n, n);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          m(i, j) += eigenvalues[k] * vectors(i, k) * std::conj(vectors(j, k));
    }
    return m;
  }
};

namespace detail {

// Rotate the canonical phase of each column so its largest entry is real
// positive; rank-1 projectors are unchanged but the output is reproducible.
inline void canonicalize_column_phases(ComplexMatrix& v) {
  for (std::size_t k = 0; k < v.cols(); ++k) {
    std::size_t pivot = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < v.rows(); ++i) {
      const double a = std::abs(v(i, k));
      if (a > best + 1e-14) {
        best = a;
        pivot = i;
      }
    }
    if (best <= 0.0) continue;
    const Complex phase = std::conj(v(pivot, k)) / best;
    for (std::size_t i = 0; i < v.rows(); ++i) v(i, k) *= phase;
  }
}

inline void orthonormalize_columns_in_place(ComplexMatrix& v, std::size_t first,
                                            std::size_t last) {
  for (std::size_t j = first; j < last; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = first; k < j; ++k) {
        Complex proj = 0.0;
        for (std::size_t i = 0; i < v.rows(); ++i) proj += std::conj(v(i, k)) * v(i, j);
        for (std::size_t i = 0; i < v.rows(); ++i) v(i, j) -= proj * v(i, k);
      }
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < v.rows(); ++i) nrm += std::norm(v(i, j));
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < v.rows(); ++i) v(i, j) /= nrm;
  }
}

}  // namespace detail

// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
// The sweep order is fixed, so the basis chosen inside degenerate subspaces
// is reproducible for identical inputs.
inline HermitianEigensystem eig_hermitian(const ComplexMatrix& m,
                                          const EigOptions& opt = {}) {
  if (!m.square()) throw DimensionMismatch("eig_hermitian needs a square matrix");
  if (!m.all_finite()) throw NotHermitian("eig_hermitian: non-finite entries");
  const std::size_t n = m.rows();
  const double defect = hermiticity_defect(m);
  if (defect > opt.hermiticity_tol)
    throw NotHermitian("matrix is not Hermitian: max |M - M^dag| = " +
                       std::to_string(defect));

  // Work on the symmetrized matrix so the iteration sees exact Hermiticity.
  ComplexMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double scale = std::max(1.0, a.max_abs());
  const double stop = opt.convergence_tol * scale;

  auto max_offdiag = [&]() {
    double worst = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q)
        worst = std::max(worst, std::abs(a(p, q)));
    return worst;
  };

  bool converged = (n < 2);
  for (int sweep = 0; sweep < opt.max_sweeps && !converged; ++sweep) {
    if (max_offdiag() <= stop) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double r = std::abs(apq);
        if (r <= stop * 0.1) continue;
        const Complex phase = apq / r;  // e^{i phi}
        const double theta = (a(p, p).real() - a(q, q).real()) / (2.0 * r);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        // A <- J^dag A with the rotation in the (p, q) plane.
        for (std::size_t l = 0; l < n; ++l) {
          const Complex ap = a(p, l);
          const Complex aq = a(q, l);
          a(p, l) = c * ap + s * phase * aq;
          a(q, l) = -s * std::conj(phase) * ap + c * aq;
        }
        // A <- A J, and accumulate V <- V J.
        for (std::size_t k = 0; k < n; ++k) {
          const Complex ap = a(k, p);
          const Complex aq = a(k, q);
          a(k, p) = c * ap + s * std::conj(phase) * aq;
          a(k, q) = -s * phase * ap + c * aq;
          const Complex vp = v(k, p);
          const Complex vq = v(k, q);
          v(k, p) = c * vp + s * std::conj(phase) * vq;
          v(k, q) = -s * phase * vp + c * vq;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = Complex(a(p, p).real(), 0.0);
        a(q, q) = Complex(a(q, q).real(), 0.0);
      }
    }
  }
  if (!converged && max_offdiag() > stop)
    throw NoConvergence("Jacobi sweeps exhausted before off-diagonal norm fell below tolerance");

  // Sort ascending; ties keep the sweep order for reproducibility.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() < a(y, y).real();
  });

  HermitianEigensystem es;
  es.eigenvalues.resize(n);
  es.vectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    es.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) es.vectors(i, k) = v(i, order[k]);
  }

  // Group (near-)equal eigenvalues and re-orthonormalize each group in index
  // order so degenerate subspaces carry a deterministic basis.
  std::size_t start = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    if (k == n || es.eigenvalues[k] - es.eigenvalues[k - 1] > opt.degeneracy_tol) {
      std::vector<std::size_t> group(k - start);
      std::iota(group.begin(), group.end(), start);
      if (group.size() > 1)
        detail::orthonormalize_columns_in_place(es.vectors, start, k);
      es.degeneracy_groups.push_back(std::move(group));
      start = k;
    }
  }
  detail::canonicalize_column_phases(es.vectors);
  return es;
}

// Kronecker product: (A (x) B)[(i*rB+k), (j*cB+l)] = A[i,j] * B[k,l].
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

enum class Subsystem { A, B };

// Partial trace of a (dA*dB)x(dA*dB) matrix over the named factor.
// Composite index convention: (i, k) -> i*dB + k with i on A and k on B.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t dA,
                                   std::size_t dB, Subsystem traced) {
  if (!m.square() || m.rows() != dA * dB)
    throw DimensionMismatch("partial_trace: matrix is not (dA*dB) square");
  if (traced == Subsystem::B) {
    ComplexMatrix out(dA, dA);
    for (std::size_t i = 0; i < dA; ++i)
      for (std::size_t j = 0; j < dA; ++j)
        for (std::size_t k = 0; k < dB; ++k)
          out(i, j) += m(i * dB + k, j * dB + k);
    return out;
  }
  ComplexMatrix out(dB, dB);
  for (std::size_t k = 0; k < dB; ++k)
    for (std::size_t l = 0; l < dB; ++l)
      for (std::size_t i = 0; i < dA; ++i)
        out(k, l) += m(i * dB + k, i * dB + l);
  return out;
}

// Reorder tensor factors of a bipartite operator: out[(k,i),(l,j)] = m[(i,k),(j,l)].
inline ComplexMatrix swap_factors(const ComplexMatrix& m, std::size_t dA, std::size_t dB) {
  if (!m.square() || m.rows() != dA * dB)
    throw DimensionMismatch("swap_factors: matrix is not (dA*dB) square");
  ComplexMatrix out(dA * dB, dA * dB);
  for (std::size_t i = 0; i < dA; ++i)
    for (std::size_t k = 0; k < dB; ++k)
      for (std::size_t j = 0; j < dA; ++j)
        for (std::size_t l = 0; l < dB; ++l)
          out(k * dA + i, l * dA + j) = m(i * dB + k, j * dB + l);
  return out;
}

// Orthonormalize the columns of M (modified Gram-Schmidt with a second
// correction pass). Column span is preserved; requires cols <= rows.
inline ComplexMatrix qr_orthonormalize(const ComplexMatrix& m, double rank_tol = 1e-10) {
  if (m.cols() > m.rows())
    throw DimensionMismatch("qr_orthonormalize needs cols <= rows");
  ComplexMatrix q = m;
  for (std::size_t j = 0; j < q.cols(); ++j) {
    double norm0 = 0.0;
    for (std::size_t i = 0; i < q.rows(); ++i) norm0 += std::norm(q(i, j));
    norm0 = std::sqrt(norm0);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        Complex proj = 0.0;
        for (std::size_t i = 0; i < q.rows(); ++i) proj += std::conj(q(i, k)) * q(i, j);
        for (std::size_t i = 0; i < q.rows(); ++i) q(i, j) -= proj * q(i, k);
      }
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < q.rows(); ++i) nrm += std::norm(q(i, j));
    nrm = std::sqrt(nrm);
    if (nrm <= rank_tol * std::max(1.0, norm0))
      throw RankDeficient("column " + std::to_string(j) + " is linearly dependent");
    for (std::size_t i = 0; i < q.rows(); ++i) q(i, j) /= nrm;
  }
  return q;
}

}  // namespace qcond
