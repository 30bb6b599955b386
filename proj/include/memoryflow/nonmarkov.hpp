#pragma once

// Trace-distance trajectories and the accumulated-backflow measure
// N = sum of the positive increments D(n) - D(n-1), evaluated for a fixed pair.

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "memoryflow/dynamics.hpp"
#include "memoryflow/errors.hpp"
#include "memoryflow/open_walk.hpp"

namespace memoryflow {

inline constexpr double kDefaultBackflowThreshold = 1e-12;

struct TraceDistanceSeries {
  std::vector<double> values;  // D(0) .. D(N)
  std::string label;
};

struct NMReport {
  std::vector<double> increments;  // Delta(0) = 0, Delta(n) = D(n) - D(n-1)
  std::vector<int> positive_steps;
  double value = 0.0;
  double threshold = kDefaultBackflowThreshold;
  /// "fixed-pair" or "orthogonal-scan".
  std::string pair_selection = "fixed-pair";

  /// Measure after each step (running sum of the positive increments so far).
  [[nodiscard]] std::vector<double> cumulative() const {
    std::vector<double> out(increments.size(), 0.0);
    double acc = 0.0;
    std::size_t next = 0;
    for (std::size_t n = 0; n < increments.size(); ++n) {
      if (next < positive_steps.size() && positive_steps[next] == static_cast<int>(n)) {
        acc += increments[n];
        ++next;
      }
      out[n] = acc;
    }
    return out;
  }
};

inline std::vector<double> increments(const TraceDistanceSeries& series) {
  if (series.values.empty()) throw DomainError("increments: empty trace-distance series");
  std::vector<double> out(series.values.size(), 0.0);
  for (std::size_t n = 1; n < series.values.size(); ++n)
    out[n] = series.values[n] - series.values[n - 1];
  return out;
}

/// Sums the increments strictly above `threshold`, left to right.
inline NMReport nm_measure(const TraceDistanceSeries& series,
                           double threshold = kDefaultBackflowThreshold) {
  NMReport r;
  r.threshold = threshold;
  r.increments = increments(series);
  for (std::size_t n = 1; n < r.increments.size(); ++n) {
    if (r.increments[n] > threshold) {
      r.positive_steps.push_back(static_cast<int>(n));
      r.value += r.increments[n];
    }
  }
  return r;
}

/// Default pair r1 = (1, 0, 1)/sqrt 2, r2 = -r1.
inline std::pair<BlochVector, BlochVector> default_qubit_pair() {
  const BlochVector r1 = BlochVector(1.0, 0.0, 1.0) / std::numbers::sqrt2;
  return {r1, -r1};
}

struct QubitNMResult {
  TraceDistanceSeries series;
  NMReport report;
  std::vector<BlochVector> first;
  std::vector<BlochVector> second;
};

inline QubitNMResult nm_qubit(double eta, const SpectrumParams& spectrum,
                              const DephasingConfig& config,
                              const std::pair<BlochVector, BlochVector>& pair, int steps,
                              Engine engine = Engine::series,
                              double threshold = kDefaultBackflowThreshold) {
  const auto maps = qubit_maps(engine, eta, steps, spectrum, config);
  QubitNMResult out;
  out.series.label = "qubit eta=" + std::to_string(eta);
  for (const auto& t : maps) {
    out.first.push_back(t * pair.first);
    out.second.push_back(t * pair.second);
    out.series.values.push_back(0.5 * (out.first.back() - out.second.back()).norm());
  }
  out.report = nm_measure(out.series, threshold);
  return out;
}

enum class WalkMode { filter, strong_limit };

/// D(n) for the walk pair |L,0>, |R,0> (or any two coin states) over n = 0 .. steps.
inline TraceDistanceSeries walk_trace_distances(const CoinPair& first, const CoinPair& second,
                                                int steps, WalkMode mode,
                                                const DephasingFilter& filter) {
  TraceDistanceSeries s;
  s.label = mode == WalkMode::filter ? "walk filter" : "walk strong-limit";
  for (int n = 0; n <= steps; ++n) {
    if (mode == WalkMode::strong_limit) {
      s.values.push_back(trace_distance_walk_blocks(strong_dephasing_blocks(first, n),
                                                    strong_dephasing_blocks(second, n)));
    } else {
      s.values.push_back(trace_distance_walk(open_walk_evolve(first, n, filter),
                                             open_walk_evolve(second, n, filter)));
    }
  }
  return s;
}

struct WalkNMResult {
  TraceDistanceSeries series;
  NMReport report;
};

inline WalkNMResult nm_walk(const SpectrumParams& spectrum, const DephasingConfig& config,
                            int steps = 10, WalkMode mode = WalkMode::filter,
                            double threshold = kDefaultBackflowThreshold) {
  const CoinPair left(1.0, 0.0), right(0.0, 1.0);
  const DephasingFilter filter = mode == WalkMode::filter
                                     ? DephasingFilter::from_spectrum(spectrum, config)
                                     : DephasingFilter::complete();
  WalkNMResult out;
  out.series = walk_trace_distances(left, right, steps, mode, filter);
  out.report = nm_measure(out.series, threshold);
  return out;
}

// ---------------------------------------------------------------------------
// Orthogonal-pair scans. These only give a lower bound on the supremum over pairs.

template <class Pair>
struct ScanResult {
  Pair best;
  NMReport report;
  TraceDistanceSeries series;
  int evaluated = 0;
};

/// Evaluates `runner(pair) -> TraceDistanceSeries` on every candidate and keeps the
/// first maximum in candidate order.
template <class Pair, class Runner>
ScanResult<Pair> scan_pairs(const std::vector<Pair>& candidates, Runner&& runner,
                            double threshold = kDefaultBackflowThreshold) {
  if (candidates.empty()) throw DomainError("scan_pairs: no candidates");
  ScanResult<Pair> best{candidates.front(), {}, {}, 0};
  bool have = false;
  for (const auto& c : candidates) {
    TraceDistanceSeries s = runner(c);
    NMReport r = nm_measure(s, threshold);
    ++best.evaluated;
    if (!have || r.value > best.report.value) {
      best.best = c;
      best.report = std::move(r);
      best.series = std::move(s);
      have = true;
    }
  }
  best.report.pair_selection = "orthogonal-scan";
  return best;
}

/// Antipodal Bloch directions on a (resolution + 1) x (2 resolution) polar grid.
/// Doubling the resolution yields a superset of directions.
inline std::vector<BlochVector> bloch_direction_grid(int resolution) {
  if (resolution < 1) throw DomainError("bloch_direction_grid: resolution must be >= 1");
  std::vector<BlochVector> out;
  for (int i = 0; i <= resolution; ++i) {
    const double polar = std::numbers::pi * i / resolution;
    const int az_count = (i == 0 || i == resolution) ? 1 : 2 * resolution;
    for (int j = 0; j < az_count; ++j) {
      const double az = std::numbers::pi * j / resolution;
      out.emplace_back(std::sin(polar) * std::cos(az), std::sin(polar) * std::sin(az),
                       std::cos(polar));
    }
  }
  return out;
}

inline ScanResult<BlochVector> orthogonal_pair_scan_qubit(double eta,
                                                          const SpectrumParams& spectrum,
                                                          const DephasingConfig& config,
                                                          int steps, int resolution,
                                                          Engine engine = Engine::series) {
  const auto maps = qubit_maps(engine, eta, steps, spectrum, config);
  return scan_pairs(bloch_direction_grid(resolution), [&](const BlochVector& r) {
    TraceDistanceSeries s;
    for (const auto& t : maps) s.values.push_back((t * r).norm());  // 0.5 |T r - T(-r)|
    return s;
  });
}

/// Coin states cos(a)|L> + e^{ib} sin(a)|R> paired with their orthogonal complement.
inline std::vector<std::pair<CoinPair, CoinPair>> coin_pair_grid(int resolution) {
  std::vector<std::pair<CoinPair, CoinPair>> out;
  for (const BlochVector& r : bloch_direction_grid(resolution)) {
    const double polar = std::acos(std::clamp(r(2), -1.0, 1.0));
    const double az = std::atan2(r(1), r(0));
    const CoinPair up(std::cos(polar / 2), std::polar(std::sin(polar / 2), az));
    const CoinPair down(-std::polar(std::sin(polar / 2), -az), std::cos(polar / 2));
    out.emplace_back(up, down);
  }
  return out;
}

inline ScanResult<std::pair<CoinPair, CoinPair>> orthogonal_pair_scan_walk(
    const DephasingFilter& filter, WalkMode mode, int steps, int resolution) {
  return scan_pairs(coin_pair_grid(resolution), [&](const std::pair<CoinPair, CoinPair>& p) {
    return walk_trace_distances(p.first, p.second, steps, mode, filter);
  });
}

}  // namespace memoryflow
