#pragma once

// Open Hadamard walk with the coin coupled to a dephasing environment.
//
// After n steps the reduced density matrix is the unitary walk's density matrix with
// each position block rho(x, y) multiplied by f(y - x) = kappa((y - x) dt / 2). A path
// ending at x makes (n - x)/2 left turns, so the accumulated phase difference between
// x and y is delta_n omega dt (y - x) / 2. The explicit system-environment dilation
// below is the reference for this factorization.

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "memoryflow/errors.hpp"
#include "memoryflow/hermitian.hpp"
#include "memoryflow/spectra.hpp"
#include "memoryflow/walk.hpp"

namespace memoryflow {

/// Density matrix of the walker on x in [-n, n]; index 2 (x + n) + coin.
class WalkDensity {
 public:
  WalkDensity(int steps, MatrixXc matrix) : steps_(steps), m_(std::move(matrix)) {
    if (steps < 0) throw DomainError("WalkDensity: negative step count");
    const Eigen::Index d = 2 * (2 * steps + 1);
    if (m_.rows() != d || m_.cols() != d)
      throw DomainError("WalkDensity: matrix dimension does not match step count");
  }

  static WalkDensity pure(const WalkState& s) {
    const Eigen::VectorXcd v = s.flatten();
    return WalkDensity(s.steps(), v * v.adjoint());
  }

  [[nodiscard]] int steps() const { return steps_; }
  [[nodiscard]] Eigen::Index dimension() const { return m_.rows(); }
  [[nodiscard]] const MatrixXc& matrix() const { return m_; }

  /// Coin block <x| rho |y>.
  [[nodiscard]] Matrix2c block(int x, int y) const {
    return m_.block<2, 2>(2 * (x + steps_), 2 * (y + steps_));
  }

  [[nodiscard]] std::map<int, double> position_distribution() const {
    std::map<int, double> p;
    for (int x = -steps_; x <= steps_; ++x) {
      const double v = block(x, x).trace().real();
      if (v != 0.0 || (steps_ + x) % 2 == 0) p[x] = v;
    }
    return p;
  }

  /// True when every block with x != y is exactly zero.
  [[nodiscard]] bool is_block_diagonal() const {
    for (int x = -steps_; x <= steps_; ++x)
      for (int y = -steps_; y <= steps_; ++y)
        if (x != y && !block(x, y).isZero(0.0)) return false;
    return true;
  }

  /// Same state on the larger support [-n, n].
  [[nodiscard]] WalkDensity padded(int n) const {
    if (n < steps_) throw DomainError("WalkDensity::padded: cannot shrink support");
    const Eigen::Index d = 2 * (2 * n + 1);
    MatrixXc out = MatrixXc::Zero(d, d);
    out.block(2 * (n - steps_), 2 * (n - steps_), m_.rows(), m_.cols()) = m_;
    return WalkDensity(n, std::move(out));
  }

  /// Deviations from Hermiticity, unit trace and positivity (the smallest eigenvalue).
  struct Diagnostics {
    double hermiticity;
    double trace_error;
    double min_eigenvalue;
  };
  [[nodiscard]] Diagnostics diagnostics() const {
    const double herm = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    const double tr = std::abs(m_.trace() - complex(1.0, 0.0));
    return {herm, tr, hermitian_eigenvalues(m_).front()};
  }

 private:
  int steps_;
  MatrixXc m_;
};

/// Discrete environment: frequencies omega_j with probabilities w_j.
struct DiscreteSpectrum {
  std::vector<double> omega;
  std::vector<double> weight;

  [[nodiscard]] std::size_t size() const { return omega.size(); }

  /// kappa_K(tau) = sum_j w_j exp(i omega_j delta_n tau).
  [[nodiscard]] complex kappa(double index_contrast, double tau) const {
    complex acc = 0.0;
    for (std::size_t j = 0; j < omega.size(); ++j)
      acc += weight[j] * std::polar(1.0, omega[j] * index_contrast * tau);
    return acc;
  }
};

/// K equal-probability nodes per Gaussian peak at the stratum midpoints of the inverse CDF.
/// Peaks with zero weight contribute no nodes.
inline DiscreteSpectrum discretize_spectrum(const SpectrumParams& p, int nodes_per_peak) {
  p.validate();
  if (nodes_per_peak < 1) throw DomainError("discretize_spectrum: need at least one node");
  DiscreteSpectrum out;
  auto add_peak = [&](double mean, double peak_weight) {
    if (peak_weight == 0.0) return;
    for (int j = 0; j < nodes_per_peak; ++j) {
      const double u = (j + 0.5) / nodes_per_peak;
      const double z = std::numbers::sqrt2 * boost::math::erf_inv(2.0 * u - 1.0);
      out.omega.push_back(mean + p.width * z);
      out.weight.push_back(peak_weight / nodes_per_peak);
    }
  };
  add_peak(p.center_1, p.weight_1());
  add_peak(p.center_2(), p.weight_2());
  return out;
}

/// Multiplier f(d) on position blocks separated by d = y - x.
class DephasingFilter {
 public:
  using Kappa = std::function<complex(double)>;

  DephasingFilter(Kappa kappa, double step_duration)
      : kappa_(std::move(kappa)), step_duration_(step_duration) {}

  static DephasingFilter from_spectrum(const SpectrumParams& s, const DephasingConfig& c) {
    s.validate();
    c.validate();
    return DephasingFilter(
        [s, dn = c.index_contrast](double tau) { return decoherence_function(s, dn, tau); },
        c.step_duration);
  }
  static DephasingFilter from_discrete(DiscreteSpectrum s, const DephasingConfig& c) {
    c.validate();
    return DephasingFilter(
        [s = std::move(s), dn = c.index_contrast](double tau) { return s.kappa(dn, tau); },
        c.step_duration);
  }
  /// f(0) = 1 and f(d != 0) = 0.
  static DephasingFilter complete() {
    return DephasingFilter([](double tau) { return tau == 0.0 ? complex(1.0) : complex(0.0); },
                           1.0);
  }

  [[nodiscard]] complex operator()(int separation) const {
    if (separation == 0) return 1.0;
    return kappa_(0.5 * separation * step_duration_);
  }

 private:
  Kappa kappa_;
  double step_duration_;
};

/// Unitary walk density with every block rho(x, y) multiplied by f(y - x).
inline WalkDensity open_walk_evolve(const CoinPair& coin, int n, const DephasingFilter& filter) {
  if (n < 0) throw DomainError("open_walk_evolve: negative step count");
  const WalkDensity pure = WalkDensity::pure(walk_evolve(coin, n));
  MatrixXc m = pure.matrix();
  const int sites = 2 * n + 1;
  std::vector<complex> f(static_cast<std::size_t>(2 * sites - 1));
  for (int d = -(sites - 1); d <= sites - 1; ++d)
    f[static_cast<std::size_t>(d + sites - 1)] = filter(d);
  for (int xi = 0; xi < sites; ++xi)
    for (int yi = 0; yi < sites; ++yi)
      if (xi != yi) m.block<2, 2>(2 * xi, 2 * yi) *= f[static_cast<std::size_t>(yi - xi + sites - 1)];
  return WalkDensity(n, std::move(m));
}

inline WalkDensity open_walk_evolve(const CoinPair& coin, int n, const SpectrumParams& s,
                                    const DephasingConfig& c) {
  return open_walk_evolve(coin, n, DephasingFilter::from_spectrum(s, c));
}

/// Only the diagonal blocks <x| W^m |psi0><psi0| W^m^dagger |x>.
inline WalkDensity strong_dephasing_blocks(const CoinPair& coin, int m) {
  return open_walk_evolve(coin, m, DephasingFilter::complete());
}

inline constexpr int kDilationMaxSteps = 6;
inline constexpr int kDilationMaxNodesPerPeak = 64;

/// Reduced state obtained from the explicit coin (x) position (x) environment evolution.
///
/// The environment starts in sum_j sqrt(w_j)|omega_j>. Each step applies the walk
/// unitary (identity on the environment) and then the coupling
/// exp(i n_coin omega_j dt) with n_L = delta_n, n_R = 0. The environment is traced out
/// at the end.
inline WalkDensity dilation_oracle(const CoinPair& coin, int n, const DiscreteSpectrum& env,
                                   const DephasingConfig& config) {
  if (n < 0) throw DomainError("dilation_oracle: negative step count");
  if (n > kDilationMaxSteps)
    throw ResourceError("dilation_oracle: n = " + std::to_string(n) + " exceeds " +
                        std::to_string(kDilationMaxSteps));
  if (env.size() == 0 || env.size() > 2 * kDilationMaxNodesPerPeak)
    throw ResourceError("dilation_oracle: environment size " + std::to_string(env.size()) +
                        " outside [1, " + std::to_string(2 * kDilationMaxNodesPerPeak) + "]");
  config.validate();

  const int sites = 2 * n + 1;
  const Eigen::Index dim = 2 * sites;
  const auto k = static_cast<Eigen::Index>(env.size());

  // Walk unitary on the window [-n, n]; transitions leaving the window never occur
  // within n steps from the origin.
  MatrixXc walk = MatrixXc::Zero(dim, dim);
  const Matrix2c& h = hadamard();
  for (int x = -n; x <= n; ++x) {
    const Eigen::Index src = 2 * (x + n);
    for (int c = 0; c < 2; ++c) {
      if (x - 1 >= -n) walk(2 * (x - 1 + n) + 0, src + c) = h(0, c);
      if (x + 1 <= n) walk(2 * (x + 1 + n) + 1, src + c) = h(1, c);
    }
  }

  // Joint state: column j holds the system amplitudes paired with |omega_j>.
  MatrixXc joint = MatrixXc::Zero(dim, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double amp = std::sqrt(env.weight[static_cast<std::size_t>(j)]);
    joint(2 * n + 0, j) = amp * coin(0);
    joint(2 * n + 1, j) = amp * coin(1);
  }

  std::vector<complex> left_phase(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j)
    left_phase[static_cast<std::size_t>(j)] = std::polar(
        1.0, config.index_contrast * env.omega[static_cast<std::size_t>(j)] * config.step_duration);

  for (int step = 0; step < n; ++step) {
    joint = walk * joint;
    for (Eigen::Index j = 0; j < k; ++j)
      for (Eigen::Index s = 0; s < dim; s += 2) joint(s, j) *= left_phase[static_cast<std::size_t>(j)];
  }
  return WalkDensity(n, joint * joint.adjoint());
}

/// 0.5 tr |a - b| via the full Hermitian eigen-solver (supports are zero-padded).
inline double trace_distance_walk_full(const WalkDensity& a, const WalkDensity& b) {
  const int n = std::max(a.steps(), b.steps());
  return 0.5 * trace_norm(a.padded(n).matrix() - b.padded(n).matrix());
}

/// 0.5 tr |a - b| for block-diagonal states, using the 2x2 closed form per site.
inline double trace_distance_walk_blocks(const WalkDensity& a, const WalkDensity& b) {
  const int n = std::max(a.steps(), b.steps());
  const WalkDensity pa = a.padded(n), pb = b.padded(n);
  double sum = 0.0;
  for (int x = -n; x <= n; ++x) {
    const Matrix2c d = pa.block(x, x) - pb.block(x, x);
    const auto [lo, hi] = hermitian_eigenvalues_2x2(d(0, 0).real(), d(0, 1), d(1, 1).real());
    sum += std::abs(lo) + std::abs(hi);
  }
  return 0.5 * sum;
}

inline double trace_distance_walk(const WalkDensity& a, const WalkDensity& b) {
  if (a.is_block_diagonal() && b.is_block_diagonal()) return trace_distance_walk_blocks(a, b);
  return trace_distance_walk_full(a, b);
}

}  // namespace memoryflow
