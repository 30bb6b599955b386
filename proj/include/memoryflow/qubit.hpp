#pragma once

// Qubit states (Bloch vector and 2x2 density), the biased beam-splitter control
// C_eta, the pure dephasing map and the per-frequency Bloch transfer matrix.
//
// Basis convention: |L> = (1,0), |R> = (0,1), sigma_z |L> = +|L>.

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "memoryflow/errors.hpp"
#include "memoryflow/spectra.hpp"

namespace memoryflow {

using BlochVector = Eigen::Vector3d;
using TransferMatrix3 = Eigen::Matrix3d;
using Matrix2c = Eigen::Matrix2cd;

inline const Matrix2c& pauli_x() {
  static const Matrix2c m = (Matrix2c() << 0, 1, 1, 0).finished();
  return m;
}
inline const Matrix2c& pauli_y() {
  static const Matrix2c m = (Matrix2c() << 0, complex(0, -1), complex(0, 1), 0).finished();
  return m;
}
inline const Matrix2c& pauli_z() {
  static const Matrix2c m = (Matrix2c() << 1, 0, 0, -1).finished();
  return m;
}

/// Validated 2x2 qubit density matrix.
class QubitDensity {
 public:
  /// Throws DomainError unless the matrix is Hermitian, unit trace and positive (1e-12).
  explicit QubitDensity(const Matrix2c& m) : m_(m) {
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tolerances::kState)
      throw DomainError("QubitDensity: matrix is not Hermitian");
    if (std::abs(m.trace() - complex(1.0, 0.0)) > tolerances::kState)
      throw DomainError("QubitDensity: trace differs from one");
    // Smallest eigenvalue of a 2x2 Hermitian matrix.
    const double a = m(0, 0).real(), c = m(1, 1).real();
    const double lmin = 0.5 * ((a + c) - std::sqrt((a - c) * (a - c) + 4.0 * std::norm(m(0, 1))));
    if (lmin < -tolerances::kState) throw DomainError("QubitDensity: matrix is not positive");
  }

  static QubitDensity from_bloch(const BlochVector& r) {
    if (r.squaredNorm() > 1.0 + tolerances::kState)
      throw DomainError("QubitDensity: Bloch vector outside the unit ball");
    Matrix2c m = 0.5 * (Matrix2c::Identity() + r(0) * pauli_x() + r(1) * pauli_y() +
                        r(2) * pauli_z());
    return QubitDensity(m);
  }

  [[nodiscard]] BlochVector bloch() const {
    return {(m_ * pauli_x()).trace().real(), (m_ * pauli_y()).trace().real(),
            (m_ * pauli_z()).trace().real()};
  }
  [[nodiscard]] const Matrix2c& matrix() const { return m_; }
  [[nodiscard]] complex operator()(int i, int j) const { return m_(i, j); }

 private:
  Matrix2c m_;
};

/// C_eta parameters; alpha = 2 sqrt((1-eta) eta), beta = 2 eta - 1.
struct ControlParams {
  double eta;

  explicit ControlParams(double e) : eta(e) {
    if (!(e >= 0.0 && e <= 1.0)) throw DomainError("eta must lie in [0,1]");
  }
  [[nodiscard]] double alpha() const { return 2.0 * std::sqrt((1.0 - eta) * eta); }
  [[nodiscard]] double beta() const { return 2.0 * eta - 1.0; }
};

/// sqrt(eta)(|L><L| - |R><R|) + sqrt(1-eta)(|L><R| + |R><L|).
inline Matrix2c coin_operator(double eta) {
  const ControlParams p(eta);
  const double d = std::sqrt(p.eta);
  const double o = std::sqrt(1.0 - p.eta);
  return (Matrix2c() << d, o, o, -d).finished();
}

/// Multiplies <L|rho|R> by kappa and <R|rho|L> by conj(kappa).
inline QubitDensity pure_dephasing_map(complex kappa, const QubitDensity& rho) {
  if (std::abs(kappa) > 1.0 + tolerances::kState)
    throw DomainError("pure_dephasing_map: |kappa| > 1 would break positivity");
  Matrix2c m = rho.matrix();
  m(0, 1) *= kappa;
  m(1, 0) *= std::conj(kappa);
  return QubitDensity(m);
}

/// Bloch transfer matrix of one control-then-dephase step at dephasing phase theta.
///
/// Equal to R_z(-theta) * (2 n n^T - I) with n = (sqrt(1-eta), 0, sqrt(eta)); the
/// factor 2 n n^T - I is C_eta acting by conjugation.
inline TransferMatrix3 bloch_transfer_matrix(double eta, double theta) {
  const ControlParams p(eta);
  const double a = p.alpha(), b = p.beta();
  const double c = std::cos(theta), s = std::sin(theta);
  TransferMatrix3 m;
  m << -b * c, -s, a * c,  //
      b * s, -c, -a * s,   //
      a, 0.0, b;
  return m;
}

/// Half the Euclidean distance between Bloch vectors, exact for qubits.
inline double trace_distance_qubit(const QubitDensity& a, const QubitDensity& b) {
  return 0.5 * (a.bloch() - b.bloch()).norm();
}

inline double trace_distance_bloch(const BlochVector& a, const BlochVector& b) {
  if (a.squaredNorm() > 1.0 + tolerances::kState || b.squaredNorm() > 1.0 + tolerances::kState)
    throw DomainError("trace_distance_bloch: Bloch vector outside the unit ball");
  return 0.5 * (a - b).norm();
}

}  // namespace memoryflow
