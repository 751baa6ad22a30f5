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
#include "qcond/states.hpp"

namespace qcond {

// Linear CPTP map in Kraus form: rho -> sum_k K_k rho K_k^dag. Complete
// positivity is structural; trace preservation (sum_k K_k^dag K_k = I) is
// checked at construction.
class QuantumChannel {
 public:
  std::size_t dim_in() const { return dim_in_; }
  std::size_t dim_out() const { return dim_out_; }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }
  bool unital() const { return unital_; }

  friend QuantumChannel validate_channel(std::vector<ComplexMatrix>, double);

 private:
  QuantumChannel(std::size_t din, std::size_t dout, std::vector<ComplexMatrix> ks, bool unital)
      : dim_in_(din), dim_out_(dout), kraus_(std::move(ks)), unital_(unital) {}

  std::size_t dim_in_ = 0;
  std::size_t dim_out_ = 0;
  std::vector<ComplexMatrix> kraus_;
  bool unital_ = false;
};

inline QuantumChannel validate_channel(std::vector<ComplexMatrix> kraus,
                                       double tol = 1e-10) {
  if (kraus.empty()) throw ShapeMismatch("channel needs at least one Kraus operator");
  const std::size_t dout = kraus.front().rows();
  const std::size_t din = kraus.front().cols();
  for (const auto& k : kraus) {
    if (k.rows() != dout || k.cols() != din)
      throw ShapeMismatch("Kraus operators have inconsistent shapes");
    if (!k.all_finite()) throw ShapeMismatch("Kraus operator has non-finite entries");
  }
  ComplexMatrix sum(din, din);
  for (const auto& k : kraus) sum += k.adjoint() * k;
  const double defect = max_abs_diff(sum, ComplexMatrix::identity(din));
  if (defect > tol)
    throw NotTracePreserving("sum K^dag K deviates from identity by " +
                             std::to_string(defect));
  bool unital = false;
  if (din == dout) {
    ComplexMatrix out_sum(dout, dout);
    for (const auto& k : kraus) out_sum += k * k.adjoint();
    unital = max_abs_diff(out_sum, ComplexMatrix::identity(dout)) <= tol;
  }
  return QuantumChannel(din, dout, std::move(kraus), unital);
}

// Channel action on an arbitrary operator (no state validation).
inline ComplexMatrix apply_to_operator(const QuantumChannel& e, const ComplexMatrix& m) {
  if (m.rows() != e.dim_in() || m.cols() != e.dim_in())
    throw DimensionMismatch("operator dimension does not match channel input");
  ComplexMatrix out(e.dim_out(), e.dim_out());
  for (const auto& k : e.kraus()) out += k * m * k.adjoint();
  return out;
}

inline DensityMatrix apply(const QuantumChannel& e, const DensityMatrix& rho,
                           const StateOptions& opt = {}) {
  if (rho.dim() != e.dim_in())
    throw DimensionMismatch("state dimension does not match channel input");
  return density_from_matrix(apply_to_operator(e, rho.matrix()), opt);
}

// Composition e2 after e1, as the product Kraus set {K2_j K1_i}.
inline QuantumChannel compose(const QuantumChannel& e2, const QuantumChannel& e1,
                              double tol = 1e-10) {
  if (e1.dim_out() != e2.dim_in())
    throw DimensionMismatch("compose: inner dimensions do not match");
  std::vector<ComplexMatrix> ks;
  ks.reserve(e1.kraus().size() * e2.kraus().size());
  for (const auto& k2 : e2.kraus())
    for (const auto& k1 : e1.kraus()) ks.push_back(k2 * k1);
  return validate_channel(std::move(ks), tol);
}

inline bool is_unital(const QuantumChannel& e, double tol = 1e-10) {
  if (e.dim_in() != e.dim_out()) return false;
  ComplexMatrix sum(e.dim_out(), e.dim_out());
  for (const auto& k : e.kraus()) sum += k * k.adjoint();
  return max_abs_diff(sum, ComplexMatrix::identity(e.dim_out())) <= tol;
}

// Projective-measurement channel rho -> sum_m P_m rho P_m for a complete
// orthonormal family of rank-1 projectors given by unit vectors.
inline QuantumChannel pinching(const std::vector<CVec>& basis, double tol = 1e-10) {
  if (basis.empty()) throw NotAResolutionOfIdentity("empty projector family");
  const std::size_t d = basis.front().size();
  ComplexMatrix sum(d, d);
  std::vector<ComplexMatrix> ks;
  ks.reserve(basis.size());
  for (const auto& v : basis) {
    if (v.size() != d) throw NotAResolutionOfIdentity("projector dimensions differ");
    ComplexMatrix p = outer(v, v);
    sum += p;
    ks.push_back(std::move(p));
  }
  if (max_abs_diff(sum, ComplexMatrix::identity(d)) > tol)
    throw NotAResolutionOfIdentity("projectors do not resolve the identity");
  return validate_channel(std::move(ks), tol);
}

inline QuantumChannel unitary_channel(const ComplexMatrix& u, double tol = 1e-10) {
  if (!u.square()) throw NotUnitary("unitary must be square");
  const double defect = max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(u.cols()));
  if (defect > tol)
    throw NotUnitary("U^dag U deviates from identity by " + std::to_string(defect));
  return validate_channel({u}, tol);
}

namespace detail {

// Generalized Pauli (shift/clock) unitaries for dimension d.
inline ComplexMatrix shift_operator(std::size_t d) {
  ComplexMatrix x(d, d);
  for (std::size_t j = 0; j < d; ++j) x((j + 1) % d, j) = 1.0;
  return x;
}

inline ComplexMatrix clock_operator(std::size_t d) {
  ComplexMatrix z(d, d);
  const double step = 2.0 * 3.14159265358979323846 / static_cast<double>(d);
  for (std::size_t j = 0; j < d; ++j)
    z(j, j) = Complex(std::cos(step * j), std::sin(step * j));
  return z;
}

}  // namespace detail

// rho -> (1 - lambda) rho + lambda I/d, with Kraus operators built from the
// d^2 shift/clock unitaries.
inline QuantumChannel depolarizing(std::size_t d, double lambda) {
  if (lambda < 0.0 || lambda > 1.0)
    throw ParameterOutOfRange("depolarizing strength must lie in [0, 1]");
  std::vector<ComplexMatrix> ks;
  if (lambda < 1.0)
    ks.push_back(std::sqrt(1.0 - lambda) * ComplexMatrix::identity(d));
  if (lambda > 0.0) {
    const ComplexMatrix x = detail::shift_operator(d);
    const ComplexMatrix z = detail::clock_operator(d);
    const double w = std::sqrt(lambda) / static_cast<double>(d);
    ComplexMatrix xa = ComplexMatrix::identity(d);
    for (std::size_t a = 0; a < d; ++a) {
      ComplexMatrix wab = xa;
      for (std::size_t b = 0; b < d; ++b) {
        ks.push_back(w * wab);
        wab = wab * z;
      }
      xa = x * xa;
    }
  }
  return validate_channel(std::move(ks));
}

// rho -> (1 - lambda) rho + lambda sum_i P_i rho P_i in the computational basis.
inline QuantumChannel dephasing(std::size_t d, double lambda) {
  if (lambda < 0.0 || lambda > 1.0)
    throw ParameterOutOfRange("dephasing strength must lie in [0, 1]");
  std::vector<ComplexMatrix> ks;
  if (lambda < 1.0)
    ks.push_back(std::sqrt(1.0 - lambda) * ComplexMatrix::identity(d));
  if (lambda > 0.0) {
    for (std::size_t i = 0; i < d; ++i) {
      ComplexMatrix p(d, d);
      p(i, i) = std::sqrt(lambda);
      ks.push_back(std::move(p));
    }
  }
  return validate_channel(std::move(ks));
}

// The partial trace as a channel; `traced` names the discarded factor.
inline QuantumChannel partial_trace_channel(std::size_t dA, std::size_t dB,
                                            Subsystem traced) {
  if (dA < 1 || dB < 1) throw ParameterOutOfRange("factor dimensions must be >= 1");
  std::vector<ComplexMatrix> ks;
  if (traced == Subsystem::B) {
    for (std::size_t k = 0; k < dB; ++k) {
      ComplexMatrix m(dA, dA * dB);  // I_A (x) <k|_B
      for (std::size_t i = 0; i < dA; ++i) m(i, i * dB + k) = 1.0;
      ks.push_back(std::move(m));
    }
  } else {
    for (std::size_t i = 0; i < dA; ++i) {
      ComplexMatrix m(dB, dA * dB);  // <i|_A (x) I_B
      for (std::size_t k = 0; k < dB; ++k) m(k, i * dB + k) = 1.0;
      ks.push_back(std::move(m));
    }
  }
  return validate_channel(std::move(ks));
}

// Random CPTP map by Stinespring construction: a seeded Gaussian matrix is
// orthonormalized into an isometry V of shape (dim_out*env_dim) x dim_in and
// sliced into Kraus operators K_k = (I (x) <k|_env) V.
inline QuantumChannel random_channel(std::size_t dim_in, std::size_t dim_out,
                                     std::size_t env_dim, std::uint64_t seed) {
  if (env_dim < 1) throw ParameterOutOfRange("environment dimension must be >= 1");
  if (dim_out * env_dim < dim_in)
    throw DimensionMismatch("no isometry exists: dim_out*env_dim < dim_in");
  Rng rng(seed);
  ComplexMatrix g(dim_out * env_dim, dim_in);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) = rng.complex_gaussian();
  const ComplexMatrix v = qr_orthonormalize(g);
  std::vector<ComplexMatrix> ks;
  ks.reserve(env_dim);
  for (std::size_t k = 0; k < env_dim; ++k) {
    ComplexMatrix m(dim_out, dim_in);
    for (std::size_t o = 0; o < dim_out; ++o)
      for (std::size_t j = 0; j < dim_in; ++j) m(o, j) = v(o * env_dim + k, j);
    ks.push_back(std::move(m));
  }
  return validate_channel(std::move(ks));
}

inline ComplexMatrix random_unitary(std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  ComplexMatrix g(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) g(i, j) = rng.complex_gaussian();
  return qr_orthonormalize(g);
}

// Random mixture of unitaries sum_j w_j U_j rho U_j^dag; always unital.
inline QuantumChannel random_unital_channel(std::size_t d, std::size_t n_unitaries,
                                            std::uint64_t seed) {
  if (n_unitaries < 1) throw ParameterOutOfRange("need at least one unitary");
  Rng rng(seed);
  const std::vector<double> w = rng.simplex(n_unitaries);
  std::vector<ComplexMatrix> ks;
  ks.reserve(n_unitaries);
  for (std::size_t j = 0; j < n_unitaries; ++j) {
    ComplexMatrix g(d, d);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) g(r, c) = rng.complex_gaussian();
    ks.push_back(std::sqrt(w[j]) * qr_orthonormalize(g));
  }
  return validate_channel(std::move(ks));
}

}  // namespace qcond
