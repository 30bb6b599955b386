#pragma once

// Gauss-Legendre nodes on [-1,1] by Newton iteration on P_n.

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "memoryflow/errors.hpp"

namespace memoryflow {

struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  [[nodiscard]] std::size_t order() const { return nodes.size(); }

  /// Integrates f over [a, b].
  template <class F>
  auto integrate(F&& f, double a, double b) const -> decltype(f(a)) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    using R = decltype(f(mid));
    R acc = weights[0] * f(mid + half * nodes[0]);
    for (std::size_t i = 1; i < nodes.size(); ++i) acc += weights[i] * f(mid + half * nodes[i]);
    acc *= half;
    return acc;
  }
};

inline GaussLegendreRule make_gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss-Legendre order must be positive");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15) break;
    }
    // Recompute the derivative at the converged root.
    {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

/// Cached rule; rules are immutable once built so concurrent readers are safe.
inline const GaussLegendreRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

}  // namespace memoryflow
