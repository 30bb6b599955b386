#pragma once

// Spectrum-averaged powers of the Bloch transfer matrix.
//
// M(theta) has entries of trigonometric degree one, so M(theta)^m is a matrix-valued
// Fourier series of degree m. Averaging against the spectrum replaces e^{i l theta}
// by kappa(l delta_t), which makes the series route exact up to the closed-form kappa.
// A composite Gauss-Legendre quadrature route is kept as an independent check.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "memoryflow/errors.hpp"
#include "memoryflow/hermitian.hpp"
#include "memoryflow/quadrature.hpp"
#include "memoryflow/qubit.hpp"
#include "memoryflow/spectra.hpp"

namespace memoryflow {

using Matrix3c = Eigen::Matrix3cd;

inline constexpr int kDefaultSeriesDegreeCap = 4096;

/// M(theta) = sum_{l=-d}^{d} c_l e^{i l theta}; coefficients stored from l = -d upward.
class TrigMatrixSeries {
 public:
  TrigMatrixSeries() : coeffs_(1, Matrix3c::Identity()) {}
  explicit TrigMatrixSeries(std::vector<Matrix3c> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() % 2 != 1)
      throw DomainError("TrigMatrixSeries: coefficient count must be odd");
  }

  [[nodiscard]] int degree() const { return static_cast<int>(coeffs_.size() / 2); }
  [[nodiscard]] const Matrix3c& coeff(int l) const {
    return coeffs_.at(static_cast<std::size_t>(l + degree()));
  }
  [[nodiscard]] const std::vector<Matrix3c>& coefficients() const { return coeffs_; }

  [[nodiscard]] Eigen::Matrix3d evaluate(double theta) const {
    Matrix3c acc = Matrix3c::Zero();
    const int d = degree();
    for (int l = -d; l <= d; ++l) acc += coeff(l) * std::polar(1.0, l * theta);
    return acc.real();
  }

  /// Largest |c_{-l} - conj(c_l)| entry; zero for a series representing a real matrix.
  [[nodiscard]] double reality_defect() const {
    double worst = 0.0;
    const int d = degree();
    for (int l = 0; l <= d; ++l)
      worst = std::max(worst, (coeff(-l) - coeff(l).conjugate()).cwiseAbs().maxCoeff());
    return worst;
  }

 private:
  std::vector<Matrix3c> coeffs_;
};

/// Degree-one expansion of bloch_transfer_matrix(eta, theta).
inline TrigMatrixSeries series_from_transfer(double eta) {
  const ControlParams p(eta);
  const double a = p.alpha(), b = p.beta();
  const complex i(0.0, 1.0);
  Matrix3c c0 = Matrix3c::Zero();
  c0(2, 0) = a;
  c0(2, 2) = b;
  // cos -> (e^{i} + e^{-i}) / 2, sin -> (e^{i} - e^{-i}) / (2i).
  Matrix3c c1 = Matrix3c::Zero();
  c1(0, 0) = -b / 2.0;
  c1(0, 1) = i / 2.0;
  c1(0, 2) = a / 2.0;
  c1(1, 0) = -i * b / 2.0;
  c1(1, 1) = -0.5;
  c1(1, 2) = i * a / 2.0;
  return TrigMatrixSeries({c1.conjugate(), c0, c1});
}

/// Product of two series (matrix-valued polynomial convolution, left factor first).
inline TrigMatrixSeries series_multiply(const TrigMatrixSeries& lhs, const TrigMatrixSeries& rhs,
                                        int degree_cap = kDefaultSeriesDegreeCap) {
  const int dl = lhs.degree(), dr = rhs.degree();
  const int d = dl + dr;
  if (d > degree_cap)
    throw ResourceError("series degree " + std::to_string(d) + " exceeds cap " +
                        std::to_string(degree_cap));
  std::vector<Matrix3c> out(static_cast<std::size_t>(2 * d + 1), Matrix3c::Zero());
  for (int i = -dl; i <= dl; ++i)
    for (int j = -dr; j <= dr; ++j)
      out[static_cast<std::size_t>(i + j + d)] += lhs.coeff(i) * rhs.coeff(j);
  return TrigMatrixSeries(std::move(out));
}

/// s^m by iterated convolution; s^0 is the identity series.
inline TrigMatrixSeries series_power(const TrigMatrixSeries& s, int m,
                                     int degree_cap = kDefaultSeriesDegreeCap) {
  if (m < 0) throw DomainError("series_power: negative exponent");
  if (static_cast<long long>(m) * s.degree() > degree_cap)
    throw ResourceError("series_power: degree " + std::to_string(m * s.degree()) +
                        " exceeds cap " + std::to_string(degree_cap));
  TrigMatrixSeries acc;
  for (int k = 0; k < m; ++k) acc = series_multiply(acc, s, degree_cap);
  return acc;
}

/// s^0 .. s^m, each obtained from the previous one by a single convolution.
inline std::vector<TrigMatrixSeries> series_powers(const TrigMatrixSeries& s, int m,
                                                   int degree_cap = kDefaultSeriesDegreeCap) {
  if (m < 0) throw DomainError("series_powers: negative exponent");
  std::vector<TrigMatrixSeries> out;
  out.reserve(static_cast<std::size_t>(m) + 1);
  out.emplace_back();
  for (int k = 1; k <= m; ++k) out.push_back(series_multiply(out.back(), s, degree_cap));
  return out;
}

/// Replaces e^{i l theta} by kappa_l and sums. Throws if the result is not real to 1e-10.
template <class Kappa>
TransferMatrix3 integrate_series(const TrigMatrixSeries& s, Kappa&& kappa_of_harmonic) {
  Matrix3c acc = Matrix3c::Zero();
  const int d = s.degree();
  for (int l = -d; l <= d; ++l) acc += s.coeff(l) * kappa_of_harmonic(l);
  const double residue = acc.imag().cwiseAbs().maxCoeff();
  if (residue > 1e-10)
    throw NumericError("integrate_series: imaginary residue " + std::to_string(residue));
  return acc.real();
}

inline TransferMatrix3 integrate_series_against_spectrum(const TrigMatrixSeries& s,
                                                         const SpectrumParams& spectrum,
                                                         const DephasingConfig& config) {
  return integrate_series(s, [&](int l) {
    return decoherence_function(spectrum, config.index_contrast, l * config.step_duration);
  });
}

/// Zeroth Fourier coefficient of M^m: the single-period average (1/Omega~) int_0^Omega~ M^m.
inline TransferMatrix3 strong_limit_map(double eta, int m) {
  return series_power(series_from_transfer(eta), m).coeff(0).real();
}

struct QuadratureOptions {
  double support_sigmas = 8.0;
  /// Cells between period boundaries are split further so none exceeds this many widths.
  double max_cell_sigmas = 2.0;
  std::int64_t node_budget = 4'000'000;
};

inline int quadrature_order(int m) { return std::max(16, 2 * m + 8); }

/// Composite Gauss-Legendre evaluation of int |chi(omega)|^2 M(omega)^m d omega.
///
/// The support [mu1 - 8 sigma, mu2 + 8 sigma] is cut at multiples of Omega~, and each
/// cell is further split into pieces of at most two widths.
inline TransferMatrix3 quadrature_map(double eta, int m, const SpectrumParams& spectrum,
                                      const DephasingConfig& config,
                                      const QuadratureOptions& opt = {}) {
  if (m < 0) throw DomainError("quadrature_map: negative step count");
  spectrum.validate();
  config.validate();
  const double lo = spectrum.center_1 - opt.support_sigmas * spectrum.width;
  const double hi = spectrum.center_2() + opt.support_sigmas * spectrum.width;
  const double period = config.period();

  std::vector<double> edges{lo};
  if (std::isfinite(period)) {
    const double first = std::floor(lo / period) + 1.0;
    const double last = std::ceil(hi / period) - 1.0;
    if (last - first > 1e7) throw ResourceError("quadrature_map: too many period cells");
    for (double k = first; k <= last; k += 1.0)
      if (k * period > lo && k * period < hi) edges.push_back(k * period);
  }
  edges.push_back(hi);

  std::vector<double> cells{lo};
  const double max_len = opt.max_cell_sigmas * spectrum.width;
  for (std::size_t i = 1; i < edges.size(); ++i) {
    const double a = edges[i - 1], b = edges[i];
    const auto pieces = static_cast<long>(std::ceil((b - a) / max_len));
    for (long j = 1; j <= pieces; ++j)
      cells.push_back(j == pieces ? b : a + (b - a) * static_cast<double>(j) / pieces);
  }

  const int order = quadrature_order(m);
  const auto cost = static_cast<std::int64_t>(cells.size() - 1) * order;
  if (cost > opt.node_budget)
    throw ResourceError("quadrature_map: " + std::to_string(cost) + " nodes exceed budget " +
                        std::to_string(opt.node_budget));

  const auto& rule = gauss_legendre(order);
  TransferMatrix3 acc = TransferMatrix3::Zero();
  for (std::size_t i = 1; i < cells.size(); ++i) {
    acc += rule.integrate(
        [&](double omega) -> TransferMatrix3 {
          const TransferMatrix3 step = bloch_transfer_matrix(eta, config.phase(omega));
          TransferMatrix3 p = TransferMatrix3::Identity();
          for (int k = 0; k < m; ++k) p = step * p;
          return spectral_density(spectrum, omega) * p;
        },
        cells[i - 1], cells[i]);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Closed forms for eta = 1/2 in the strong-dephasing limit.

/// C(k) = binom(2k, k) / (k + 1), exact for 0 <= k <= 35.
inline std::uint64_t catalan(int k) {
  if (k < 0) throw DomainError("catalan: negative index");
  if (k > 35) throw ResourceError("catalan: C(k) overflows 64 bits for k > 35");
  unsigned __int128 c = 1;
  for (int i = 0; i < k; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return static_cast<std::uint64_t>(c);
}

struct CatalanCoeffs {
  int k;
  double a;
  double b;
};

/// a_k = 1/2 sum_{i<=k} (2i+1) C(i) / (-4)^i,  b_k = 1/2 sum_{i<=k} C(i) / (-4)^i.
///
/// These are the entries of the single-period average of M^m at eta = 1/2; both
/// vanish for k < 0. The ratio C(i)/4^i is advanced recursively so no factorials
/// are formed.
inline CatalanCoeffs catalan_coeffs(int k) {
  CatalanCoeffs out{k, 0.0, 0.0};
  double ratio = 1.0;  // C(i) / 4^i
  double sign = 1.0;
  for (int i = 0; i <= k; ++i) {
    out.a += 0.5 * sign * (2.0 * i + 1.0) * ratio;
    out.b += 0.5 * sign * ratio;
    ratio *= (2.0 * i + 1.0) / (2.0 * (i + 2.0));
    sign = -sign;
  }
  return out;
}

/// The coefficient variant with base -8 and no prefactor. Kept only so tests can show
/// it disagrees with the single-period average.
inline CatalanCoeffs catalan_coeffs_base8(int k) {
  CatalanCoeffs out{k, 0.0, 0.0};
  double ratio = 1.0;  // C(i) / 8^i
  double sign = 1.0;
  for (int i = 0; i <= k; ++i) {
    out.a += sign * (2.0 * i + 1.0) * ratio;
    out.b += sign * ratio;
    ratio *= (2.0 * i + 1.0) / (4.0 * (i + 2.0));
    sign = -sign;
  }
  return out;
}

inline double catalan_limit_a() { return 1.0 - 1.0 / std::numbers::sqrt2; }
inline double catalan_limit_b() { return std::numbers::sqrt2 - 1.0; }

/// Lambda_m for eta = 1/2 assembled from catalan_coeffs.
inline TransferMatrix3 strong_limit_closed_form(int m) {
  if (m < 0) throw DomainError("strong_limit_closed_form: negative step count");
  TransferMatrix3 out = TransferMatrix3::Zero();
  if (m == 0) return TransferMatrix3::Identity();
  if (m == 1) {
    out(2, 0) = 1.0;
    return out;
  }
  auto a = [](int k) { return catalan_coeffs(k).a; };
  auto b = [](int k) { return catalan_coeffs(k).b; };
  if (m % 2 == 0) {
    const int j = m / 2;
    out << a(j - 2), 0, a(j - 1),  //
        0, b(j - 1), 0,            //
        a(j - 2), 0, a(j - 2);
  } else {
    const int j = (m + 1) / 2;
    out << a(j - 2), 0, a(j - 2),  //
        0, b(j - 2), 0,            //
        a(j - 3), 0, a(j - 2);
  }
  return out;
}

/// Lambda_infinity built from the limits of a_k and b_k.
inline TransferMatrix3 strong_limit_infinite() {
  const double a = catalan_limit_a(), b = catalan_limit_b();
  TransferMatrix3 out;
  out << a, 0, a,  //
      0, b, 0,     //
      a, 0, a;
  return out;
}

// ---------------------------------------------------------------------------
// Channel distance.

/// Normalized Choi matrix (1/2) sum_ij |i><j| (x) Phi(|i><j|) of the unital qubit
/// channel acting on Bloch vectors as r -> T r.
inline Eigen::Matrix4cd choi_matrix(const TransferMatrix3& t) {
  const std::array<const Matrix2c*, 3> paulis{&pauli_x(), &pauli_y(), &pauli_z()};
  Eigen::Matrix4cd j = Eigen::Matrix4cd::Zero();
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      Matrix2c e = Matrix2c::Zero();
      e(r, c) = 1.0;
      Eigen::Vector3cd x;
      for (int k = 0; k < 3; ++k) x(k) = (*paulis[k] * e).trace();
      const Eigen::Vector3cd y = t.cast<complex>() * x;
      Matrix2c out = e.trace() * Matrix2c::Identity();
      for (int k = 0; k < 3; ++k) out += y(k) * *paulis[k];
      j.block<2, 2>(2 * r, 2 * c) = 0.5 * out;
    }
  }
  return 0.5 * j;
}

/// Half the trace norm of the Choi-matrix difference; a metric on qubit channels in [0,1].
inline double channel_distance(const TransferMatrix3& a, const TransferMatrix3& b) {
  const Eigen::Matrix4cd d = choi_matrix(a) - choi_matrix(b);
  return 0.5 * trace_norm(MatrixXc(d));
}

/// Distance between the exact spectrum-averaged map and its single-period average.
inline double approximation_error(double eta, int m, const SpectrumParams& spectrum,
                                  const DephasingConfig& config) {
  const auto power = series_power(series_from_transfer(eta), m);
  return channel_distance(integrate_series_against_spectrum(power, spectrum, config),
                          power.coeff(0).real());
}

}  // namespace memoryflow
