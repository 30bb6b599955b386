#pragma once

// Unitary Hadamard walk on the line.
//
// One step applies C_H to the coin and then shifts: the L component moves x -> x-1,
// the R component moves x -> x+1. Position-space evolution is the reference; the
// quasi-momentum integrals below are matched to it channel by channel.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "memoryflow/errors.hpp"
#include "memoryflow/quadrature.hpp"
#include "memoryflow/qubit.hpp"

namespace memoryflow {

/// Coin amplitudes (c_L, c_R) at one site.
using CoinPair = Eigen::Vector2cd;

/// Walker amplitudes after `steps()` steps, stored densely over x in [-steps, steps].
class WalkState {
 public:
  WalkState(int steps, std::vector<CoinPair> amplitudes)
      : steps_(steps), amplitudes_(std::move(amplitudes)) {
    if (steps < 0) throw DomainError("WalkState: negative step count");
    if (amplitudes_.size() != static_cast<std::size_t>(2 * steps + 1))
      throw DomainError("WalkState: amplitude vector does not cover [-m, m]");
  }

  /// Walker at the origin with the given coin state.
  static WalkState origin(const CoinPair& coin) { return WalkState(0, {coin}); }

  [[nodiscard]] int steps() const { return steps_; }
  [[nodiscard]] const CoinPair& at(int x) const {
    return amplitudes_.at(static_cast<std::size_t>(x + steps_));
  }
  [[nodiscard]] const std::vector<CoinPair>& amplitudes() const { return amplitudes_; }

  [[nodiscard]] double norm_squared() const {
    double s = 0.0;
    for (const auto& c : amplitudes_) s += c.squaredNorm();
    return s;
  }

  /// Full coin (x) position vector, index 2 (x + steps) + coin.
  [[nodiscard]] Eigen::VectorXcd flatten() const {
    Eigen::VectorXcd v(2 * static_cast<Eigen::Index>(amplitudes_.size()));
    for (std::size_t i = 0; i < amplitudes_.size(); ++i) v.segment<2>(2 * i) = amplitudes_[i];
    return v;
  }

 private:
  int steps_;
  std::vector<CoinPair> amplitudes_;
};

inline const Matrix2c& hadamard() {
  static const Matrix2c h = coin_operator(0.5);
  return h;
}

inline WalkState walk_step(const WalkState& s) {
  const int m = s.steps() + 1;
  std::vector<CoinPair> next(static_cast<std::size_t>(2 * m + 1), CoinPair::Zero());
  for (int x = -s.steps(); x <= s.steps(); ++x) {
    const CoinPair& c = s.at(x);
    if (c.isZero(0.0)) continue;
    const CoinPair mixed = hadamard() * c;
    next[static_cast<std::size_t>(x - 1 + m)](0) += mixed(0);
    next[static_cast<std::size_t>(x + 1 + m)](1) += mixed(1);
  }
  return WalkState(m, std::move(next));
}

inline WalkState walk_evolve(const CoinPair& coin, int m) {
  if (m < 0) throw DomainError("walk_evolve: negative step count");
  if (std::abs(coin.squaredNorm() - 1.0) > tolerances::kState)
    throw DomainError("walk_evolve: coin state is not normalized");
  WalkState s = WalkState::origin(coin);
  for (int i = 0; i < m; ++i) s = walk_step(s);
  return s;
}

/// p(x) = |c_L(x)|^2 + |c_R(x)|^2 over the sites of matching parity.
inline std::map<int, double> position_distribution(const WalkState& s) {
  std::map<int, double> p;
  for (int x = -s.steps(); x <= s.steps(); x += 2) p[x] = s.at(x).squaredNorm();
  return p;
}

/// nu_k = arcsin(sin k / sqrt 2), principal branch.
inline double dispersion_nu(double k) { return std::asin(std::sin(k) / std::numbers::sqrt2); }

/// Coefficient functions of psi_m(x) = (c_L A_L + c_R A_R)|L> + (c_L B_L + c_R B_R)|R>.
struct WalkAmplitudes {
  complex a_left;   // A_L
  complex a_right;  // A_R
  complex b_left;   // B_L
  complex b_right;  // B_R

  [[nodiscard]] CoinPair apply(const CoinPair& c) const {
    return CoinPair(c(0) * a_left + c(1) * a_right, c(0) * b_left + c(1) * b_right);
  }
};

/// The three quasi-momentum integrals
///   alpha = int dk/2pi e^{i(kx - m nu_k)},
///   beta  = int dk/2pi cos k / sqrt(1 + cos^2 k) e^{i(kx - m nu_k)},
///   gamma = int dk/2pi sin k / sqrt(1 + cos^2 k) e^{i(kx - m nu_k)}.
struct WalkIntegrals {
  complex alpha;
  complex beta;
  complex gamma;
};

inline constexpr int kWalkPanelOrder = 16;

namespace detail {
inline WalkIntegrals walk_integrals_with_panels(int m, int x, int panels) {
  const auto& rule = gauss_legendre(kWalkPanelOrder);
  WalkIntegrals acc{0.0, 0.0, 0.0};
  const double width = 2.0 * std::numbers::pi / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = -std::numbers::pi + p * width;
    const double half = 0.5 * width, mid = a + half;
    for (std::size_t i = 0; i < rule.order(); ++i) {
      const double k = mid + half * rule.nodes[i];
      const double w = rule.weights[i] * half / (2.0 * std::numbers::pi);
      const complex phase = std::polar(w, k * x - m * dispersion_nu(k));
      const double d = std::sqrt(1.0 + std::cos(k) * std::cos(k));
      acc.alpha += phase;
      acc.beta += phase * (std::cos(k) / d);
      acc.gamma += phase * (std::sin(k) / d);
    }
  }
  return acc;
}
}  // namespace detail

/// Composite Gauss-Legendre evaluation with 64 (m + |x| + 4) nodes over [-pi, pi].
/// Throws NumericError when halving the node count moves any integral by more than 1e-9.
inline WalkIntegrals walk_integrals(int m, int x) {
  if (m < 0) throw DomainError("walk_integrals: negative step count");
  const int panels = 4 * (m + std::abs(x) + 4);
  const WalkIntegrals fine = detail::walk_integrals_with_panels(m, x, panels);
  const WalkIntegrals coarse = detail::walk_integrals_with_panels(m, x, panels / 2);
  const double diff = std::max({std::abs(fine.alpha - coarse.alpha),
                                std::abs(fine.beta - coarse.beta),
                                std::abs(fine.gamma - coarse.gamma)});
  if (diff > 1e-9)
    throw NumericError("walk_integrals: no convergence at m=" + std::to_string(m) +
                       ", x=" + std::to_string(x) + " (change " + std::to_string(diff) + ")");
  return fine;
}

/// Amplitude functions from the quasi-momentum integrals.
///
/// With the L component shifted to x-1 the integrals have to be evaluated at -x, and
/// the brackets that reproduce position-space evolution are
///   A_L = alpha + beta,  A_R = beta - i gamma,  B_L = beta + i gamma,  B_R = alpha - beta,
/// all multiplied by the parity factor (1 + (-1)^{m+x}) / 2.
inline WalkAmplitudes walk_amplitudes_integral(int m, int x) {
  if (m < 0) throw DomainError("walk_amplitudes_integral: negative step count");
  if (((m + x) % 2 + 2) % 2 != 0) return {0.0, 0.0, 0.0, 0.0};
  const WalkIntegrals w = walk_integrals(m, -x);
  const complex i(0.0, 1.0);
  return {w.alpha + w.beta, w.beta - i * w.gamma, w.beta + i * w.gamma, w.alpha - w.beta};
}

}  // namespace memoryflow
