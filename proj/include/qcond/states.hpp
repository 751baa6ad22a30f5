#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qcond/complex_matrix.hpp"
#include "qcond/errors.hpp"
#include "qcond/linalg.hpp"
#include "qcond/rng.hpp"

namespace qcond {

enum class LogBase { two, e };

inline double log_base(double x, LogBase base) {
  return base == LogBase::two ? std::log2(x) : std::log(x);
}

// -p log p with the 0 log 0 = 0 convention.
inline double entropy_term(double p, LogBase base) {
  return p > 0.0 ? -p * log_base(p, base) : 0.0;
}

inline double entropy_of(const std::vector<double>& p, LogBase base) {
  double h = 0.0;
  for (double x : p) h += entropy_term(x, base);
  return h;
}

// Probability distribution: entries >= 0 summing to 1 within tolerance.
class ProbVector {
 public:
  ProbVector() = default;
  explicit ProbVector(std::vector<double> entries, double tol = 1e-9)
      : p_(std::move(entries)) {
    double sum = 0.0;
    for (auto& x : p_) {
      if (x < 0.0) {
        if (x < -tol) throw InvalidDistribution("negative probability " + std::to_string(x));
        x = 0.0;
      }
      sum += x;
    }
    if (std::abs(sum - 1.0) > tol)
      throw InvalidDistribution("probabilities sum to " + std::to_string(sum));
  }

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& entries() const { return p_; }

 private:
  std::vector<double> p_;
};

inline double shannon_entropy(const ProbVector& p, LogBase base = LogBase::two) {
  return entropy_of(p.entries(), base);
}

// Complete spectral decomposition of a density matrix: probabilities p_i
// (ascending, zeros retained) and the matching orthonormal eigenvectors, so
// that sum_i |v_i><v_i| = I and sum_i p_i |v_i><v_i| reconstructs the state.
struct SpectralDecomposition {
  std::vector<double> probabilities;
  ComplexMatrix vectors;  // column k is the eigenvector for probabilities[k]
  std::vector<std::vector<std::size_t>> degeneracy_groups;

  std::size_t dimension() const { return probabilities.size(); }
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
      if (probabilities[k] == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          m(i, j) += probabilities[k] * vectors(i, k) * std::conj(vectors(j, k));
    }
    return m;
  }
  std::vector<CVec> basis() const {
    std::vector<CVec> b;
    b.reserve(dimension());
    for (std::size_t k = 0; k < dimension(); ++k) b.push_back(vector(k));
    return b;
  }
};

struct StateOptions {
  double hermiticity_tol = 1e-10;
  double eigclip = 1e-12;  // eigenvalues in [-eigclip, 0) are clipped to 0
};

// Corrections applied while validating a raw matrix into a state.
struct StateCorrections {
  double hermiticity_defect = 0.0;
  double clipped_mass = 0.0;  // total negative eigenvalue mass set to zero
  double trace_defect = 0.0;  // |Tr - 1| before renormalization
};

// Validated Hermitian PSD unit-trace matrix. The complete spectral
// decomposition is computed at construction and shared with the stored
// matrix, which is rebuilt from the clipped, renormalized spectrum.
class DensityMatrix {
 public:
  std::size_t dim() const { return dim_; }
  const ComplexMatrix& matrix() const { return matrix_; }
  const SpectralDecomposition& spectral() const { return spectral_; }

  friend DensityMatrix density_from_matrix(const ComplexMatrix&, const StateOptions&,
                                           StateCorrections*);

 private:
  DensityMatrix(std::size_t dim, ComplexMatrix m, SpectralDecomposition s)
      : dim_(dim), matrix_(std::move(m)), spectral_(std::move(s)) {}

  std::size_t dim_ = 0;
  ComplexMatrix matrix_;
  SpectralDecomposition spectral_;
};

inline DensityMatrix density_from_matrix(const ComplexMatrix& m,
                                         const StateOptions& opt = {},
                                         StateCorrections* corrections = nullptr) {
  if (!m.square()) throw DimensionMismatch("density matrix must be square");
  if (!m.all_finite()) throw NotHermitian("density matrix has non-finite entries");
  const std::size_t n = m.rows();

  const double defect = hermiticity_defect(m);
  if (defect > opt.hermiticity_tol)
    throw NotHermitian("state is not Hermitian: max |M - M^dag| = " + std::to_string(defect));

  EigOptions eopt;
  eopt.hermiticity_tol = opt.hermiticity_tol;
  HermitianEigensystem es = eig_hermitian(m, eopt);

  double trace = 0.0;
  for (double lambda : es.eigenvalues) trace += lambda;
  if (trace <= 1e-12)
    throw ZeroTrace("state trace must be positive, got " + std::to_string(trace));

  double clipped = 0.0;
  std::vector<double> p(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = es.eigenvalues[k] / trace;
    if (lambda < -opt.eigclip)
      throw NotPositive("negative eigenvalue " + std::to_string(lambda));
    if (lambda < 0.0) {
      clipped += -lambda;
      p[k] = 0.0;
    } else {
      p[k] = lambda;
    }
  }
  double mass = 0.0;
  for (double x : p) mass += x;
  for (auto& x : p) x /= mass;

  SpectralDecomposition dec;
  dec.probabilities = std::move(p);
  dec.vectors = std::move(es.vectors);
  dec.degeneracy_groups = std::move(es.degeneracy_groups);

  // Material clipping changes the operator, so rebuild it from the spectrum.
  // Roundoff-level negatives (well under eigclip) stay in the input matrix,
  // which is kept trace-scaled so decode/encode round-trips are exact.
  ComplexMatrix stored(n, n);
  if (clipped > 1e-14) {
    stored = dec.reconstruct();
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        stored(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i))) / trace;
  }

  if (corrections) {
    corrections->hermiticity_defect = defect;
    corrections->clipped_mass = clipped;
    corrections->trace_defect = std::abs(trace - 1.0);
  }
  return DensityMatrix(n, std::move(stored), std::move(dec));
}

inline const SpectralDecomposition& spectral(const DensityMatrix& rho) {
  return rho.spectral();
}

inline double von_neumann_entropy(const DensityMatrix& rho, LogBase base = LogBase::two) {
  return entropy_of(rho.spectral().probabilities, base);
}

// Hilbert-Schmidt style sample: G G^dag / Tr(G G^dag) with G a d x rank
// matrix of independent standard complex Gaussians.
inline DensityMatrix random_density(std::size_t d, std::size_t rank, std::uint64_t seed) {
  if (rank < 1 || rank > d)
    throw ParameterOutOfRange("random_density needs 1 <= rank <= dim");
  Rng rng(seed);
  ComplexMatrix g(d, rank);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < rank; ++j) g(i, j) = rng.complex_gaussian();
  return density_from_matrix(g * g.adjoint());
}

}  // namespace qcond
