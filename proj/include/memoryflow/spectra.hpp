#pragma once

// Environment spectral model: the two-Gaussian frequency population, its
// characteristic (decoherence) function, and the Jacobi theta flatness factor.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "memoryflow/errors.hpp"

namespace memoryflow {

using complex = std::complex<double>;

namespace tolerances {
/// Series truncation for theta3: stop once the next term falls below this.
inline constexpr double kTheta3Truncation = 1e-15;
/// Relative tolerance used for quadrature checks of the closed-form kappa.
inline constexpr double kQuadratureRelative = 1e-9;
/// Absolute tolerance on physical-state checks.
inline constexpr double kState = 1e-12;
}  // namespace tolerances

/// Two-peak Gaussian population |chi(omega)|^2 with weights 1/(1+A) and A/(1+A).
///
/// The second peak sits at center_1 + peak_separation. The density is integrated
/// over the whole real line; with center_1 >> width the negative-frequency mass is
/// negligible (below 1e-30 for the shipped presets).
struct SpectrumParams {
  double amplitude_ratio = 0.0;  // A in [0,1]
  double width = 1.0;            // sigma > 0
  double center_1 = 100.0;       // mu_1
  double peak_separation = 9.0;  // delta_omega >= 0

  [[nodiscard]] double center_2() const { return center_1 + peak_separation; }
  /// Omega = delta_omega / (2 pi).
  [[nodiscard]] double separation_frequency() const {
    return peak_separation / (2.0 * std::numbers::pi);
  }
  [[nodiscard]] double weight_1() const { return 1.0 / (1.0 + amplitude_ratio); }
  [[nodiscard]] double weight_2() const { return amplitude_ratio / (1.0 + amplitude_ratio); }

  void validate() const {
    if (!(amplitude_ratio >= 0.0 && amplitude_ratio <= 1.0))
      throw DomainError("A must lie in [0,1], got " + std::to_string(amplitude_ratio));
    if (!(width > 0.0) || !std::isfinite(width))
      throw DomainError("sigma must be positive and finite");
    if (!std::isfinite(center_1)) throw DomainError("mu1 must be finite");
    if (!(peak_separation >= 0.0) || !std::isfinite(peak_separation))
      throw DomainError("delta_omega must be non-negative and finite");
  }
};

/// Per-step dephasing interaction: refractive index contrast and plate duration.
struct DephasingConfig {
  double index_contrast = 0.009;  // delta_n
  double step_duration = 1.0;     // delta_t > 0

  /// Omega~ = 2 pi / (delta_t |delta_n|); infinite when delta_n = 0.
  [[nodiscard]] double period() const {
    if (index_contrast == 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 * std::numbers::pi / (step_duration * std::abs(index_contrast));
  }
  /// theta(omega) = delta_n * delta_t * omega.
  [[nodiscard]] double phase(double omega) const {
    return index_contrast * step_duration * omega;
  }

  void validate() const {
    if (!(step_duration > 0.0) || !std::isfinite(step_duration))
      throw DomainError("delta_t must be positive and finite");
    if (!std::isfinite(index_contrast)) throw DomainError("delta_n must be finite");
  }
};

/// delta_t expressed in units of 2 pi / (delta_omega delta_n), i.e. delta_t * Omega * delta_n.
inline double dimensionless_step(const SpectrumParams& s, const DephasingConfig& c) {
  return c.step_duration * s.separation_frequency() * c.index_contrast;
}

/// Builds the step duration from its dimensionless value delta_t * Omega * delta_n.
inline double step_from_dimensionless(const SpectrumParams& s, double index_contrast,
                                      double value) {
  if (s.peak_separation == 0.0 || index_contrast == 0.0)
    throw DomainError("dimensionless step needs delta_omega != 0 and delta_n != 0");
  return value * 2.0 * std::numbers::pi / (s.peak_separation * index_contrast);
}

inline double gaussian_density(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

inline double spectral_density(const SpectrumParams& p, double omega) {
  if (!std::isfinite(omega)) throw DomainError("spectral_density: non-finite omega");
  double v = p.weight_1() * gaussian_density(omega, p.center_1, p.width);
  if (p.amplitude_ratio != 0.0) v += p.weight_2() * gaussian_density(omega, p.center_2(), p.width);
  return v;
}

/// kappa(tau) = integral of exp(i delta_n omega tau) |chi(omega)|^2 over the real line.
inline complex decoherence_function(const SpectrumParams& p, double index_contrast, double tau) {
  if (!std::isfinite(tau) || !std::isfinite(index_contrast))
    throw DomainError("decoherence_function: non-finite input");
  const double x = index_contrast * tau;
  const double envelope = std::exp(-0.5 * p.width * p.width * x * x);
  complex v = std::polar(1.0, p.center_1 * x);
  if (p.amplitude_ratio != 0.0) v += p.amplitude_ratio * std::polar(1.0, p.center_2() * x);
  return envelope * p.weight_1() * v;
}

/// Jacobi theta_3(u, q) = 1 + 2 sum_{n>=1} q^{n^2} cos(2 n u).
inline double theta3(double u, double q) {
  if (!(q >= 0.0 && q < 1.0)) throw DomainError("theta3: nome q must lie in [0,1)");
  if (q == 0.0) return 1.0;
  double sum = 1.0;
  for (long n = 1;; ++n) {
    const double term = std::pow(q, static_cast<double>(n) * static_cast<double>(n));
    if (term < tolerances::kTheta3Truncation) break;
    sum += 2.0 * term * std::cos(2.0 * static_cast<double>(n) * u);
  }
  return sum;
}

/// Ratio between the midpoint-sampled spectrum mass and one; tends to 1 as sigma / Omega~ grows.
/// Only defined for the single-Gaussian spectrum.
inline double flatness_factor(const SpectrumParams& p, const DephasingConfig& c) {
  if (p.amplitude_ratio != 0.0)
    throw UnsupportedCase("flatness_factor is only defined for A = 0");
  const double period = c.period();
  if (!std::isfinite(period)) throw DomainError("flatness_factor: delta_n = 0 has no period");
  const double u = std::numbers::pi * (0.5 - p.center_1 / period);
  const double ratio = p.width / period;
  const double q = std::exp(-2.0 * std::numbers::pi * std::numbers::pi * ratio * ratio);
  return theta3(u, q);
}

}  // namespace memoryflow
