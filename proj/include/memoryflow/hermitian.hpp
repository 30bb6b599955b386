#pragma once

// Eigenvalues of complex Hermitian matrices by cyclic Jacobi rotations.
//
// Each rotation first removes the phase of H(p,q) with a diagonal unitary, then
// applies the real symmetric Jacobi rotation. Sweeps visit pairs in a fixed order,
// so results are bit-reproducible.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "memoryflow/errors.hpp"

namespace memoryflow {

using MatrixXc = Eigen::MatrixXcd;

inline constexpr int kMaxHermitianDimension = 256;
inline constexpr double kHermitianInputTolerance = 1e-10;
inline constexpr double kJacobiOffDiagonalTolerance = 1e-13;

namespace detail {
inline double off_diagonal_norm(const MatrixXc& a) {
  double s = 0.0;
  const auto n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}
}  // namespace detail

/// Sorted (ascending) eigenvalues of a Hermitian matrix of dimension <= 256.
inline std::vector<double> hermitian_eigenvalues(const MatrixXc& h) {
  const Eigen::Index n = h.rows();
  if (h.cols() != n) throw DomainError("hermitian_eigenvalues: matrix is not square");
  if (n > kMaxHermitianDimension)
    throw ResourceError("hermitian_eigenvalues: dimension " + std::to_string(n) +
                        " exceeds " + std::to_string(kMaxHermitianDimension));
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > kHermitianInputTolerance * scale)
    throw DomainError("hermitian_eigenvalues: matrix is not Hermitian");

  MatrixXc a = 0.5 * (h + h.adjoint());
  const double frob = a.norm();
  const double target = kJacobiOffDiagonalTolerance * std::max(frob, 1e-300);

  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (detail::off_diagonal_norm(a) <= target) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const std::complex<double> b = a(p, q);
        const double mag = std::abs(b);
        if (mag == 0.0) continue;
        const std::complex<double> phase = b / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // J = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane.
        const std::complex<double> j_pp = c, j_pq = s;
        const std::complex<double> j_qp = -s * std::conj(phase), j_qq = c * std::conj(phase);
        for (Eigen::Index k = 0; k < n; ++k) {  // a <- a J
          const auto akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * j_pp + akq * j_qp;
          a(k, q) = akp * j_pq + akq * j_qq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {  // a <- J^H a
          const auto apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(j_pp) * apk + std::conj(j_qp) * aqk;
          a(q, k) = std::conj(j_pq) * apk + std::conj(j_qq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }
  if (sweep == kMaxSweeps && detail::off_diagonal_norm(a) > target)
    throw NumericError("hermitian_eigenvalues: Jacobi sweeps did not converge");

  std::vector<double> ev(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i).real();
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// Closed form for [[a, b], [conj(b), c]]: 0.5 ((a + c) +- sqrt((a - c)^2 + 4 |b|^2)).
inline std::pair<double, double> hermitian_eigenvalues_2x2(double a, std::complex<double> b,
                                                           double c) {
  const double root = std::sqrt((a - c) * (a - c) + 4.0 * std::norm(b));
  return {0.5 * ((a + c) - root), 0.5 * ((a + c) + root)};
}

/// Trace norm sum |lambda_i| of a Hermitian matrix.
inline double trace_norm(const MatrixXc& h) {
  double s = 0.0;
  for (double v : hermitian_eigenvalues(h)) s += std::abs(v);
  return s;
}

}  // namespace memoryflow
