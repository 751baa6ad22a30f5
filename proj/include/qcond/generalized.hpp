#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "qcond/channels.hpp"
#include "qcond/complex_matrix.hpp"
#include "qcond/conditional.hpp"
#include "qcond/errors.hpp"
#include "qcond/linalg.hpp"
#include "qcond/rng.hpp"
#include "qcond/states.hpp"

namespace qcond {

// Convex rank-1 decomposition rho = sum_k lambda_k |phi_k><phi_k|. The
// vectors are unit but need not be orthogonal, and the member count may
// exceed the dimension.
struct ConvexDecomposition {
  std::vector<double> weights;
  std::vector<CVec> vectors;

  std::size_t size() const { return weights.size(); }
  std::size_t dimension() const { return vectors.empty() ? 0 : vectors.front().size(); }
  ComplexMatrix projector(std::size_t k) const { return outer(vectors[k], vectors[k]); }
  ComplexMatrix reconstruct() const {
    ComplexMatrix m(dimension(), dimension());
    for (std::size_t k = 0; k < size(); ++k) m += weights[k] * projector(k);
    return m;
  }
};

inline ConvexDecomposition spectral_as_decomposition(const DensityMatrix& rho) {
  const SpectralDecomposition& dec = rho.spectral();
  ConvexDecomposition out;
  out.weights = dec.probabilities;
  out.vectors = dec.basis();
  return out;
}

// Random convex decomposition with `members` elements, by mixing the
// spectral decomposition through a seeded random isometry: the columns of an
// orthonormalized Gaussian matrix recombine sqrt(p_i)|Psi_i> into
// unnormalized |phi_k> whose norms become the weights. Zero-weight members
// are dropped.
inline ConvexDecomposition random_decomposition(const DensityMatrix& rho,
                                                std::size_t members,
                                                std::uint64_t seed) {
  const SpectralDecomposition& dec = rho.spectral();
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < dec.dimension(); ++i)
    if (dec.probabilities[i] > 1e-12) support.push_back(i);
  const std::size_t rank = support.size();
  if (members < rank)
    throw RankTooSmall("need at least rank(rho) = " + std::to_string(rank) +
                       " members");

  Rng rng(seed);
  ComplexMatrix g(members, rank);
  for (std::size_t i = 0; i < members; ++i)
    for (std::size_t j = 0; j < rank; ++j) g(i, j) = rng.complex_gaussian();
  const ComplexMatrix mix = qr_orthonormalize(g);

  ConvexDecomposition out;
  double total = 0.0;
  for (std::size_t k = 0; k < members; ++k) {
    CVec phi(rho.dim(), Complex{});
    for (std::size_t j = 0; j < rank; ++j) {
      const double amp = std::sqrt(dec.probabilities[support[j]]);
      const CVec basis_vec = dec.vector(support[j]);
      for (std::size_t i = 0; i < rho.dim(); ++i)
        phi[i] += mix(k, j) * amp * basis_vec[i];
    }
    const double w = inner(phi, phi).real();
    if (w <= 1e-14) continue;  // zero-weight member
    const double nrm = std::sqrt(w);
    for (auto& z : phi) z /= nrm;
    out.weights.push_back(w);
    out.vectors.push_back(std::move(phi));
    total += w;
  }
  for (auto& w : out.weights) w /= total;
  return out;
}

// Generalized conditional table P(rho|kappa) = Tr[Pi_rho E{Pi_kappa}] over a
// convex decomposition of the input and a projector family on the output.
// When the output family resolves the identity the columns are normalized
// probability distributions; either way the total-overlap relation
// Lambda_rho = sum_kappa P(rho|kappa) lambda_kappa holds by linearity.
struct GeneralizedTable {
  RealMatrix entries;                   // entries(rho, kappa)
  std::vector<double> lambda_in;        // input weights lambda_kappa
  std::vector<double> overlap_out;      // Lambda_rho = Tr[Pi_rho rho_R]
  std::vector<double> overlap_via_sum;  // sum_kappa P(rho|kappa) lambda_kappa
  std::vector<double> lambda_out;       // output weights, when given
  bool resolves_identity = false;
  double overlap_residual = 0.0;  // max |Lambda - sum P lambda|
  double lambda_gap = 0.0;        // max |Lambda - lambda_out|, 0 if no weights
};

struct GeneralizedOptions {
  double resolution_tol = 1e-9;
  bool require_resolution = false;
  StateOptions state;
};

namespace detail {

inline GeneralizedTable generalized_table_impl(const QuantumChannel& e,
                                               const ConvexDecomposition& dec_in,
                                               const std::vector<CVec>& out_vectors,
                                               const std::vector<double>& out_weights,
                                               const GeneralizedOptions& opt) {
  if (dec_in.dimension() != e.dim_in())
    throw DimensionMismatch("input decomposition does not match channel input");
  if (out_vectors.empty())
    throw OutputNotResolutionOfIdentity("empty output projector family");
  for (const auto& v : out_vectors)
    if (v.size() != e.dim_out())
      throw DimensionMismatch("output projectors do not match channel output");

  ComplexMatrix projector_sum(e.dim_out(), e.dim_out());
  for (const auto& v : out_vectors) projector_sum += outer(v, v);
  const bool resolves =
      max_abs_diff(projector_sum, ComplexMatrix::identity(e.dim_out())) <=
      opt.resolution_tol;
  if (opt.require_resolution && !resolves)
    throw OutputNotResolutionOfIdentity(
        "output projectors do not resolve the identity");

  GeneralizedTable t;
  t.resolves_identity = resolves;
  t.lambda_in = dec_in.weights;
  t.lambda_out = out_weights;
  t.entries = RealMatrix(out_vectors.size(), dec_in.size());
  for (std::size_t k = 0; k < dec_in.size(); ++k) {
    const ComplexMatrix evolved = apply_to_operator(e, dec_in.projector(k));
    for (std::size_t r = 0; r < out_vectors.size(); ++r)
      t.entries(r, k) = expectation(evolved, out_vectors[r]);
  }

  const DensityMatrix rho_R =
      apply(e, density_from_matrix(dec_in.reconstruct(), opt.state), opt.state);
  t.overlap_out.resize(out_vectors.size());
  t.overlap_via_sum.resize(out_vectors.size());
  for (std::size_t r = 0; r < out_vectors.size(); ++r) {
    t.overlap_out[r] = expectation(rho_R.matrix(), out_vectors[r]);
    double mixed = 0.0;
    for (std::size_t k = 0; k < dec_in.size(); ++k)
      mixed += t.entries(r, k) * t.lambda_in[k];
    t.overlap_via_sum[r] = mixed;
    t.overlap_residual =
        std::max(t.overlap_residual, std::abs(t.overlap_out[r] - mixed));
    if (!t.lambda_out.empty())
      t.lambda_gap =
          std::max(t.lambda_gap, std::abs(t.overlap_out[r] - t.lambda_out[r]));
  }
  return t;
}

}  // namespace detail

// Output family given as an orthonormal basis (resolution of the identity is
// demanded up front).
inline GeneralizedTable generalized_qcp(const QuantumChannel& e,
                                        const ConvexDecomposition& dec_in,
                                        const std::vector<CVec>& out_basis,
                                        GeneralizedOptions opt = {}) {
  opt.require_resolution = true;
  return detail::generalized_table_impl(e, dec_in, out_basis, {}, opt);
}

// Output family given as a convex decomposition of the final state; its
// weights feed the Lambda-vs-lambda gap diagnostic. Non-resolving families
// are allowed unless opt.require_resolution is set.
inline GeneralizedTable generalized_qcp(const QuantumChannel& e,
                                        const ConvexDecomposition& dec_in,
                                        const ConvexDecomposition& dec_out,
                                        const GeneralizedOptions& opt = {}) {
  return detail::generalized_table_impl(e, dec_in, dec_out.vectors, dec_out.weights,
                                        opt);
}

// Matrix power of a PSD matrix by spectral calculus; eigenvalues below zero
// are clipped (rejected if below -psd_tol).
inline ComplexMatrix psd_power(const ComplexMatrix& m, double p,
                               double psd_tol = 1e-10) {
  HermitianEigensystem es = eig_hermitian(m);
  for (auto& lambda : es.eigenvalues) {
    if (lambda < -psd_tol)
      throw NotPSD("eigenvalue " + std::to_string(lambda) + " is negative");
    lambda = lambda < 0.0 ? 0.0 : std::pow(lambda, p);
  }
  return es.reconstruct();
}

struct LiebValue {
  double value = 0.0;
  double imag_residual = 0.0;
};

// F_p(A, B; K) = Tr[A^p K B^(1-p) K^dag] for PSD A, B and 0 <= p <= 1;
// jointly concave in (A, B) and nonnegative.
inline LiebValue lieb_quantity(const ComplexMatrix& a, const ComplexMatrix& b,
                               const ComplexMatrix& k, double p,
                               double psd_tol = 1e-10) {
  if (p < 0.0 || p > 1.0) throw PowerOutOfRange("exponent must lie in [0, 1]");
  if (!a.square() || !b.square())
    throw DimensionMismatch("A and B must be square");
  if (k.rows() != a.rows() || k.cols() != b.rows())
    throw DimensionMismatch("K must map the space of B to the space of A");
  const ComplexMatrix ap = psd_power(a, p, psd_tol);
  const ComplexMatrix bp = psd_power(b, 1.0 - p, psd_tol);
  const Complex tr = (ap * k * bp * k.adjoint()).trace();
  return {tr.real(), std::abs(tr.imag())};
}

struct ConcavityReport {
  double min_slack = 0.0;  // worst F(mix) - linear interpolation over the grid
  double worst_t = 0.0;
  std::size_t grid_points = 0;
};

// Probe joint concavity of F_p along the segment between (A0, B0) and
// (A1, B1) on a uniform t-grid.
inline ConcavityReport concavity_probe(const ComplexMatrix& a0, const ComplexMatrix& a1,
                                       const ComplexMatrix& b0, const ComplexMatrix& b1,
                                       const ComplexMatrix& k, double p,
                                       std::size_t n_points = 11,
                                       double psd_tol = 1e-10) {
  if (n_points < 2) throw ParameterOutOfRange("need at least two grid points");
  const double f0 = lieb_quantity(a0, b0, k, p, psd_tol).value;
  const double f1 = lieb_quantity(a1, b1, k, p, psd_tol).value;
  ConcavityReport report;
  report.grid_points = n_points;
  report.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n_points - 1);
    const ComplexMatrix at = t * a0 + (1.0 - t) * a1;
    const ComplexMatrix bt = t * b0 + (1.0 - t) * b1;
    const double ft = lieb_quantity(at, bt, k, p, psd_tol).value;
    const double slack = ft - (t * f0 + (1.0 - t) * f1);
    if (slack < report.min_slack) {
      report.min_slack = slack;
      report.worst_t = t;
    }
  }
  return report;
}

}  // namespace qcond
