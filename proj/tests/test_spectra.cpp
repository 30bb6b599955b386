#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "memoryflow/spectra.hpp"
#include "oracles.hpp"

using namespace memoryflow;

namespace {

SpectrumParams two_peaks(double a) {
  SpectrumParams p;
  p.amplitude_ratio = a;
  return p;
}

}  // namespace

TEST(Spectrum, DensityIntegratesToOne) {
  for (double a : {0.0, 0.3, 1.0}) {
    const SpectrumParams p = two_peaks(a);
    double s = 0.0;
    const double h = 0.01;
    for (double w = p.center_1 - 15; w <= p.center_2() + 15; w += h) s += spectral_density(p, w) * h;
    EXPECT_NEAR(s, 1.0, 1e-9) << "A=" << a;
  }
}

TEST(Spectrum, ValidationRejectsOutOfDomain) {
  EXPECT_THROW(two_peaks(-0.1).validate(), DomainError);
  EXPECT_THROW(two_peaks(1.5).validate(), DomainError);
  SpectrumParams p;
  p.width = 0.0;
  EXPECT_THROW(p.validate(), DomainError);
  p = SpectrumParams{};
  p.peak_separation = -1.0;
  EXPECT_THROW(p.validate(), DomainError);
  EXPECT_THROW(spectral_density(SpectrumParams{}, std::numeric_limits<double>::infinity()),
               DomainError);
}

TEST(Kappa, ClosedFormMatchesQuadratureOracle) {
  for (double a : {0.0, 0.5, 1.0})
    for (double tau : {0.0, 3.7, 40.0, 77.57, 155.0, 400.0}) {
      const SpectrumParams p = two_peaks(a);
      const complex exact = decoherence_function(p, 0.009, tau);
      const complex ref = oracle::kappa_quadrature(p, 0.009, tau);
      EXPECT_LT(std::abs(exact - ref), 1e-9) << "A=" << a << " tau=" << tau;
    }
}

TEST(Kappa, ValueAtZeroIsOneAndModulusBounded) {
  for (double a : {0.0, 0.25, 1.0}) {
    const SpectrumParams p = two_peaks(a);
    EXPECT_NEAR(std::abs(decoherence_function(p, 0.009, 0.0) - complex(1.0)), 0.0, 1e-15);
    for (double t = 0; t < 500; t += 3.1) EXPECT_LE(std::abs(decoherence_function(p, 0.009, t)), 1.0 + 1e-15);
  }
}

TEST(Kappa, ConjugateSymmetry) {
  const SpectrumParams p = two_peaks(0.7);
  for (double t : {1.0, 12.5, 99.0})
    EXPECT_LT(std::abs(decoherence_function(p, 0.009, -t) - std::conj(decoherence_function(p, 0.009, t))), 1e-15);
}

TEST(Kappa, FirstRevivalAtEqualPeaks) {
  const SpectrumParams p = two_peaks(1.0);
  const double t1 = 2.0 * std::numbers::pi / (p.peak_separation * 0.009);
  const double expected = std::exp(-0.5 * std::pow(2.0 * std::numbers::pi / 9.0, 2));
  EXPECT_NEAR(std::abs(decoherence_function(p, 0.009, t1)), expected, 1e-12);
  EXPECT_NEAR(expected, 0.7837, 1e-4);
}

TEST(Kappa, SinglePeakIsMonotone) {
  const SpectrumParams p = two_peaks(0.0);
  double prev = 2.0;
  for (double t = 0; t < 400; t += 0.5) {
    const double v = std::abs(decoherence_function(p, 0.009, t));
    EXPECT_LE(v, prev);
    prev = v;
  }
}

TEST(Kappa, NonFiniteInputThrows) {
  EXPECT_THROW(decoherence_function(SpectrumParams{}, 0.009, std::nan("")), DomainError);
}

TEST(Dephasing, PeriodAndPhase) {
  const DephasingConfig c{0.009, 2.0};
  EXPECT_NEAR(c.period(), 2.0 * std::numbers::pi / 0.018, 1e-12);
  EXPECT_DOUBLE_EQ(c.phase(100.0), 1.8);
  EXPECT_TRUE(std::isinf(DephasingConfig{0.0, 1.0}.period()));
  EXPECT_THROW((DephasingConfig{0.009, 0.0}.validate()), DomainError);
  EXPECT_THROW((DephasingConfig{0.009, -1.0}.validate()), DomainError);
}

TEST(Dephasing, DimensionlessStepRoundTrip) {
  const SpectrumParams p;
  for (double f : {0.014, 0.5, 2.0}) {
    const DephasingConfig c{0.009, step_from_dimensionless(p, 0.009, f)};
    EXPECT_NEAR(dimensionless_step(p, c), f, 1e-14);
  }
  EXPECT_NEAR(DephasingConfig(0.009, step_from_dimensionless(p, 0.009, 0.014)).period(), 642.857142857, 1e-6);
  EXPECT_NEAR(DephasingConfig(0.009, step_from_dimensionless(p, 0.009, 2.0)).period(), 4.5, 1e-12);
  EXPECT_THROW(step_from_dimensionless(p, 0.0, 1.0), DomainError);
}

TEST(Theta3, KnownValuesAndErrors) {
  EXPECT_DOUBLE_EQ(theta3(0.3, 0.0), 1.0);
  // theta3(0, q) = sum q^{n^2} over all integers n.
  double direct = 0.0;
  for (int n = -60; n <= 60; ++n) direct += std::pow(0.5, n * n);
  EXPECT_NEAR(theta3(0.0, 0.5), direct, 1e-14);
  EXPECT_THROW(theta3(0.0, 1.0), DomainError);
  EXPECT_THROW(theta3(0.0, -0.1), DomainError);
}

TEST(Flatness, TendsToOneForWideSpectrum) {
  const SpectrumParams p;
  const DephasingConfig wide{0.009, 2.0 * std::numbers::pi / (0.009 * 0.5)};  // Omega~ = sigma / 2
  EXPECT_NEAR(flatness_factor(p, wide), 1.0, 1e-12);
  const DephasingConfig narrow{0.009, step_from_dimensionless(p, 0.009, 0.014)};
  EXPECT_GT(std::abs(flatness_factor(p, narrow) - 1.0), 0.1);
  EXPECT_THROW(flatness_factor(two_peaks(0.5), wide), UnsupportedCase);
  EXPECT_THROW(flatness_factor(p, DephasingConfig{0.0, 1.0}), DomainError);
}
