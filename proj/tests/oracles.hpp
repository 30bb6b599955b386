#pragma once

// Reference computations used only by the tests. Each one reaches its answer by a
// different route than the library: adaptive Gauss-Kronrod instead of the closed form,
// direct density-matrix conjugation instead of Bloch matrices, exact rationals instead
// of floating sums, Kronecker-product dilations instead of the column-packed one.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <vector>

#include "memoryflow/open_walk.hpp"
#include "memoryflow/spectra.hpp"

namespace oracle {

using memoryflow::complex;
using Matrix2c = Eigen::Matrix2cd;
using Matrix3d = Eigen::Matrix3d;
using MatrixXc = Eigen::MatrixXcd;

/// kappa(tau) from adaptive Gauss-Kronrod on sub-intervals of one width.
inline complex kappa_quadrature(const memoryflow::SpectrumParams& p, double dn, double tau) {
  using boost::math::quadrature::gauss_kronrod;
  const double lo = p.center_1 - 14.0 * p.width;
  const double hi = p.center_2() + 14.0 * p.width;
  const double cell = std::min(0.5 * p.width, std::numbers::pi / std::max(std::abs(dn * tau), 1e-300));
  const int cells = static_cast<int>(std::ceil((hi - lo) / cell));
  double re = 0.0, im = 0.0;
  for (int i = 0; i < cells; ++i) {
    const double a = lo + (hi - lo) * i / cells, b = lo + (hi - lo) * (i + 1) / cells;
    auto rho = [&](double w) {
      const double z1 = (w - p.center_1) / p.width, z2 = (w - p.center_2()) / p.width;
      const double norm = 1.0 / (p.width * std::sqrt(2.0 * std::numbers::pi) * (1.0 + p.amplitude_ratio));
      return norm * (std::exp(-0.5 * z1 * z1) + p.amplitude_ratio * std::exp(-0.5 * z2 * z2));
    };
    re += gauss_kronrod<double, 61>::integrate([&](double w) { return rho(w) * std::cos(dn * w * tau); }, a, b, 0);
    im += gauss_kronrod<double, 61>::integrate([&](double w) { return rho(w) * std::sin(dn * w * tau); }, a, b, 0);
  }
  return {re, im};
}

inline const Matrix2c& sigma(int k) {
  static const Matrix2c s[3] = {
      (Matrix2c() << 0, 1, 1, 0).finished(),
      (Matrix2c() << 0, complex(0, -1), complex(0, 1), 0).finished(),
      (Matrix2c() << 1, 0, 0, -1).finished()};
  return s[k];
}

/// One step on operators: coin conjugation, then the phase exp(i theta) on <L|X|R>.
inline Matrix2c step_operator(double eta, double theta, const Matrix2c& x) {
  const double d = std::sqrt(eta), o = std::sqrt(1.0 - eta);
  Matrix2c c;
  c << d, o, o, -d;
  Matrix2c y = c * x * c.adjoint();
  y(0, 1) *= std::polar(1.0, theta);
  y(1, 0) *= std::polar(1.0, -theta);
  return y;
}

/// T_ij = 1/2 tr(sigma_i Phi(sigma_j)) for m applications of the step at fixed theta.
inline Matrix3d transfer_by_conjugation(double eta, double theta, int m) {
  Matrix3d t;
  for (int j = 0; j < 3; ++j) {
    Matrix2c x = sigma(j);
    for (int s = 0; s < m; ++s) x = step_operator(eta, theta, x);
    for (int i = 0; i < 3; ++i) t(i, j) = 0.5 * (sigma(i) * x).trace().real();
  }
  return t;
}

/// Period average of the m-step map; the trapezoid rule is exact for trig degree < nodes.
inline Matrix3d period_average(double eta, int m) {
  const int nodes = 2 * m + 8;
  Matrix3d acc = Matrix3d::Zero();
  for (int k = 0; k < nodes; ++k)
    acc += transfer_by_conjugation(eta, 2.0 * std::numbers::pi * k / nodes, m);
  return acc / nodes;
}

/// Exact rational a_k, b_k.
struct RationalCoeffs {
  boost::multiprecision::cpp_rational a, b;
};

inline RationalCoeffs catalan_rational(int k) {
  using boost::multiprecision::cpp_int;
  using boost::multiprecision::cpp_rational;
  RationalCoeffs out{0, 0};
  cpp_int binom = 1;  // binom(2i, i)
  cpp_int pow4 = 1;
  for (int i = 0; i <= k; ++i) {
    if (i > 0) {
      binom = binom * (2 * i) * (2 * i - 1) / (i * i);
      pow4 *= 4;
    }
    const cpp_rational c(binom, cpp_int(i + 1));
    const cpp_rational term = (i % 2 == 0 ? c : cpp_rational(-c)) / cpp_rational(pow4);
    out.a += cpp_rational(2 * i + 1) * term / 2;
    out.b += term / 2;
  }
  return out;
}

/// Unitary Hadamard walk by direct bookkeeping on a site map.
inline std::map<int, Eigen::Vector2cd> walk_recursion(const Eigen::Vector2cd& coin, int m) {
  const double r = 1.0 / std::numbers::sqrt2;
  std::map<int, Eigen::Vector2cd> psi{{0, coin}};
  for (int s = 0; s < m; ++s) {
    std::map<int, Eigen::Vector2cd> next;
    for (const auto& [x, v] : psi) {
      const complex l = r * (v(0) + v(1)), rr = r * (v(0) - v(1));
      next.try_emplace(x - 1, Eigen::Vector2cd::Zero()).first->second(0) += l;
      next.try_emplace(x + 1, Eigen::Vector2cd::Zero()).first->second(1) += rr;
    }
    psi = std::move(next);
  }
  return psi;
}

/// Reduced walk state from a Kronecker-product dilation: walk (x) I_env then
/// diag(exp(i delta_n omega_j dt)) on the L coin, environment traced out.
inline MatrixXc dilation_kron(const Eigen::Vector2cd& coin, int n,
                              const memoryflow::DiscreteSpectrum& env, double dn, double dt) {
  const int sites = 2 * n + 1;
  const int ds = 2 * sites;
  const int k = static_cast<int>(env.size());
  const double r = 1.0 / std::numbers::sqrt2;
  MatrixXc walk = MatrixXc::Zero(ds, ds);
  for (int x = -n; x <= n; ++x)
    for (int c = 0; c < 2; ++c) {
      const int src = 2 * (x + n) + c;
      if (x - 1 >= -n) walk(2 * (x - 1 + n), src) = r;
      if (x + 1 <= n) walk(2 * (x + 1 + n) + 1, src) = (c == 0 ? r : -r);
    }
  const MatrixXc big_walk = Eigen::kroneckerProduct(walk, MatrixXc::Identity(k, k));
  Eigen::VectorXcd phase(ds * k);
  for (int s = 0; s < ds; ++s)
    for (int j = 0; j < k; ++j)
      phase(s * k + j) = (s % 2 == 0) ? std::polar(1.0, dn * env.omega[j] * dt) : complex(1.0);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(ds * k);
  for (int j = 0; j < k; ++j) {
    psi((2 * n) * k + j) = coin(0) * std::sqrt(env.weight[j]);
    psi((2 * n + 1) * k + j) = coin(1) * std::sqrt(env.weight[j]);
  }
  for (int s = 0; s < n; ++s) psi = phase.cwiseProduct(big_walk * psi);
  MatrixXc rho = MatrixXc::Zero(ds, ds);
  for (int a = 0; a < ds; ++a)
    for (int b = 0; b < ds; ++b)
      for (int j = 0; j < k; ++j) rho(a, b) += psi(a * k + j) * std::conj(psi(b * k + j));
  return rho;
}

}  // namespace oracle
