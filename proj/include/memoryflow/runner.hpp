#pragma once

// Reproducibility surface behind the memoryflow CLI: presets, JSON run configs and one
// function per subcommand. Every command returns its files as strings so that the
// output bytes depend only on the resolved configuration.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "memoryflow/csv.hpp"
#include "memoryflow/dynamics.hpp"
#include "memoryflow/harmonic.hpp"
#include "memoryflow/nonmarkov.hpp"
#include "memoryflow/open_walk.hpp"
#include "memoryflow/parallel.hpp"
#include "memoryflow/spectra.hpp"
#include "memoryflow/walk.hpp"

namespace memoryflow {

inline constexpr const char* kVersion = "0.1.0";

/// Bad or inconsistent run configuration (exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File-system failure (exit code 3).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace exit_code {
inline constexpr int kSuccess = 0;
inline constexpr int kUsage = 1;
inline constexpr int kNumeric = 2;
inline constexpr int kIo = 3;
}  // namespace exit_code

using nlohmann::json;

struct SweepAxis {
  std::string param = "dt_omega_dn";
  double min = 0.025;
  double max = 4.0;
  int count = 161;

  [[nodiscard]] std::vector<double> values() const {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
      v.push_back(count == 1 ? min : min + (max - min) * i / (count - 1));
    return v;
  }
};

struct OracleToggles {
  bool dilation = true;
  bool engines = true;
  bool catalan = true;
  bool walk_integrals = true;
  std::vector<int> nodes_per_peak{8, 16, 32};
  int dilation_steps = 4;
  int engine_max_steps = 20;
  int random_engine_points = 8;
  /// Test hook: added to the filter multiplier of every off-diagonal block.
  double perturb_filter = 0.0;
};

struct RunConfig {
  std::string model;
  SpectrumParams spectrum;
  double delta_n = 0.009;
  double delta_t = 1.0;
  std::optional<double> dt_factor;  // delta_t * Omega * delta_n, overrides delta_t
  std::vector<double> dt_factors{0.02, 1.03};
  std::vector<double> A_values{0.0, 0.5, 1.0};
  double eta = 0.5;
  std::vector<double> etas{0.0, 0.5, 1.0};
  int steps = 10;
  BlochVector r1 = default_qubit_pair().first;
  BlochVector r2 = default_qubit_pair().second;
  CoinPair coin = CoinPair(1.0, 0.0);
  SweepAxis sweep;
  Engine engine = Engine::series;
  OracleToggles oracle;
  int nodes_per_peak = 16;
  std::uint64_t seed = 0;
  int threads = 1;
  double epsilon = kDefaultBackflowThreshold;
  double t_max_factor = 4.0;
  int t_count = 401;
  int omega_count = 201;
  bool amplitudes = false;
  bool check_integrals = false;
  int scan_resolution = 0;

  [[nodiscard]] DephasingConfig dephasing() const {
    DephasingConfig c{delta_n, delta_t};
    if (dt_factor) c.step_duration = step_from_dimensionless(spectrum, delta_n, *dt_factor);
    return c;
  }
  [[nodiscard]] DephasingConfig dephasing_for_factor(double factor) const {
    return {delta_n, step_from_dimensionless(spectrum, delta_n, factor)};
  }

  void validate() const {
    try {
      spectrum.validate();
      dephasing().validate();
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    auto check_eta = [](double e, const char* field) {
      if (!(e >= 0.0 && e <= 1.0)) throw ConfigError(std::string(field) + ": eta outside [0,1]");
    };
    check_eta(eta, "eta");
    for (double e : etas) check_eta(e, "etas");
    for (double a : A_values)
      if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("A_values: A outside [0,1]");
    if (steps < 0) throw ConfigError("steps: must be >= 0");
    if (sweep.count < 1) throw ConfigError("sweep.count: must be >= 1");
    if (threads < 1) throw ConfigError("threads: must be >= 1");
    if (r1.squaredNorm() > 1.0 + 1e-12) throw ConfigError("r1: outside the Bloch ball");
    if (r2.squaredNorm() > 1.0 + 1e-12) throw ConfigError("r2: outside the Bloch ball");
    if (std::abs(coin.squaredNorm() - 1.0) > 1e-12) throw ConfigError("coin: not normalized");
    if (t_count < 2) throw ConfigError("t_count: must be >= 2");
    if (omega_count < 2) throw ConfigError("omega_count: must be >= 2");
    if (nodes_per_peak < 1) throw ConfigError("K: must be >= 1");
    if (!(epsilon >= 0.0)) throw ConfigError("epsilon: must be >= 0");
  }
};

// ---------------------------------------------------------------------------
// JSON <-> RunConfig

namespace detail {

inline double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field + ": expected a number");
  return v.get<double>();
}
inline int get_int(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ConfigError(field + ": expected an integer");
  return v.get<int>();
}
inline bool get_bool(const json& v, const std::string& field) {
  if (!v.is_boolean()) throw ConfigError(field + ": expected true or false");
  return v.get<bool>();
}
inline std::vector<double> get_numbers(const json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError(field + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(get_number(e, field));
  return out;
}
inline BlochVector get_bloch(const json& v, const std::string& field) {
  const auto xs = get_numbers(v, field);
  if (xs.size() != 3) throw ConfigError(field + ": expected three components");
  return {xs[0], xs[1], xs[2]};
}
inline complex get_complex(const json& v, const std::string& field) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  const auto xs = get_numbers(v, field);
  if (xs.size() != 2) throw ConfigError(field + ": expected [re, im]");
  return {xs[0], xs[1]};
}
inline json complex_json(complex c) { return json::array({c.real(), c.imag()}); }

}  // namespace detail

/// Resolved configuration as JSON. `threads` is an execution setting and is left out so
/// that manifests do not depend on it.
inline json to_json(const RunConfig& c) {
  json j;
  j["model"] = c.model;
  j["A"] = c.spectrum.amplitude_ratio;
  j["sigma"] = c.spectrum.width;
  j["mu1"] = c.spectrum.center_1;
  j["delta_omega"] = c.spectrum.peak_separation;
  j["delta_n"] = c.delta_n;
  j["delta_t"] = c.dephasing().step_duration;
  j["dt_factor"] = c.dt_factor ? json(*c.dt_factor) : json(nullptr);
  j["dt_factors"] = c.dt_factors;
  j["A_values"] = c.A_values;
  j["eta"] = c.eta;
  j["etas"] = c.etas;
  j["steps"] = c.steps;
  j["r1"] = {c.r1(0), c.r1(1), c.r1(2)};
  j["r2"] = {c.r2(0), c.r2(1), c.r2(2)};
  j["coin"] = {detail::complex_json(c.coin(0)), detail::complex_json(c.coin(1))};
  j["sweep"] = {{"param", c.sweep.param}, {"min", c.sweep.min}, {"max", c.sweep.max},
                {"count", c.sweep.count}};
  j["engine"] = std::string(to_string(c.engine));
  j["oracle"] = {{"dilation", c.oracle.dilation},
                 {"engines", c.oracle.engines},
                 {"catalan", c.oracle.catalan},
                 {"walk_integrals", c.oracle.walk_integrals},
                 {"K", c.oracle.nodes_per_peak},
                 {"steps", c.oracle.dilation_steps},
                 {"engine_max_steps", c.oracle.engine_max_steps},
                 {"random_engine_points", c.oracle.random_engine_points},
                 {"perturb_filter", c.oracle.perturb_filter}};
  j["K"] = c.nodes_per_peak;
  j["seed"] = c.seed;
  j["epsilon"] = c.epsilon;
  j["t_max_factor"] = c.t_max_factor;
  j["t_count"] = c.t_count;
  j["omega_count"] = c.omega_count;
  j["amplitudes"] = c.amplitudes;
  j["check_integrals"] = c.check_integrals;
  j["scan_resolution"] = c.scan_resolution;
  return j;
}

/// Applies the fields present in `j` on top of `c`. Unknown fields are rejected.
inline void apply_json(const json& j, RunConfig& c) {
  using namespace detail;
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "model") {
      if (!v.is_string()) throw ConfigError("model: expected a string");
      c.model = v.get<std::string>();
    } else if (key == "A") {
      c.spectrum.amplitude_ratio = get_number(v, key);
    } else if (key == "sigma") {
      c.spectrum.width = get_number(v, key);
    } else if (key == "mu1") {
      c.spectrum.center_1 = get_number(v, key);
    } else if (key == "delta_omega") {
      c.spectrum.peak_separation = get_number(v, key);
    } else if (key == "delta_n") {
      c.delta_n = get_number(v, key);
    } else if (key == "delta_t") {
      c.delta_t = get_number(v, key);
      c.dt_factor.reset();
    } else if (key == "dt_factor") {
      if (v.is_null()) c.dt_factor.reset();
      else c.dt_factor = get_number(v, key);
    } else if (key == "dt_factors") {
      c.dt_factors = get_numbers(v, key);
    } else if (key == "A_values") {
      c.A_values = get_numbers(v, key);
    } else if (key == "eta") {
      c.eta = get_number(v, key);
    } else if (key == "etas") {
      c.etas = get_numbers(v, key);
    } else if (key == "steps") {
      c.steps = get_int(v, key);
    } else if (key == "r1") {
      c.r1 = get_bloch(v, key);
    } else if (key == "r2") {
      c.r2 = get_bloch(v, key);
    } else if (key == "coin") {
      if (!v.is_array() || v.size() != 2) throw ConfigError("coin: expected [c_L, c_R]");
      c.coin = CoinPair(get_complex(v[0], "coin"), get_complex(v[1], "coin"));
    } else if (key == "sweep") {
      if (!v.is_object()) throw ConfigError("sweep: expected an object");
      for (const auto& [sk, sv] : v.items()) {
        if (sk == "param") {
          if (!sv.is_string()) throw ConfigError("sweep.param: expected a string");
          c.sweep.param = sv.get<std::string>();
          if (c.sweep.param != "dt_omega_dn")
            throw ConfigError("sweep.param: only dt_omega_dn is supported");
        } else if (sk == "min") {
          c.sweep.min = get_number(sv, "sweep.min");
        } else if (sk == "max") {
          c.sweep.max = get_number(sv, "sweep.max");
        } else if (sk == "count") {
          c.sweep.count = get_int(sv, "sweep.count");
        } else {
          throw ConfigError("sweep." + sk + ": unknown field");
        }
      }
    } else if (key == "engine") {
      if (!v.is_string()) throw ConfigError("engine: expected a string");
      try {
        c.engine = parse_engine(v.get<std::string>());
      } catch (const DomainError& e) {
        throw ConfigError(std::string("engine: ") + e.what());
      }
    } else if (key == "oracle") {
      if (!v.is_object()) throw ConfigError("oracle: expected an object");
      for (const auto& [ok, ov] : v.items()) {
        const std::string f = "oracle." + ok;
        if (ok == "dilation") c.oracle.dilation = get_bool(ov, f);
        else if (ok == "engines") c.oracle.engines = get_bool(ov, f);
        else if (ok == "catalan") c.oracle.catalan = get_bool(ov, f);
        else if (ok == "walk_integrals") c.oracle.walk_integrals = get_bool(ov, f);
        else if (ok == "steps") c.oracle.dilation_steps = get_int(ov, f);
        else if (ok == "engine_max_steps") c.oracle.engine_max_steps = get_int(ov, f);
        else if (ok == "random_engine_points") c.oracle.random_engine_points = get_int(ov, f);
        else if (ok == "perturb_filter") c.oracle.perturb_filter = get_number(ov, f);
        else if (ok == "K") {
          c.oracle.nodes_per_peak.clear();
          if (!ov.is_array()) throw ConfigError(f + ": expected an array of integers");
          for (const auto& e : ov) c.oracle.nodes_per_peak.push_back(get_int(e, f));
        } else {
          throw ConfigError(f + ": unknown field");
        }
      }
    } else if (key == "K") {
      c.nodes_per_peak = get_int(v, key);
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
      c.seed = v.get<std::uint64_t>();
    } else if (key == "threads") {
      c.threads = get_int(v, key);
    } else if (key == "epsilon") {
      c.epsilon = get_number(v, key);
    } else if (key == "t_max_factor") {
      c.t_max_factor = get_number(v, key);
    } else if (key == "t_count") {
      c.t_count = get_int(v, key);
    } else if (key == "omega_count") {
      c.omega_count = get_int(v, key);
    } else if (key == "amplitudes") {
      c.amplitudes = get_bool(v, key);
    } else if (key == "check_integrals") {
      c.check_integrals = get_bool(v, key);
    } else if (key == "scan_resolution") {
      c.scan_resolution = get_int(v, key);
    } else {
      throw ConfigError(key + ": unknown field");
    }
  }
}

// ---------------------------------------------------------------------------
// Presets. All share sigma = 1, mu1 = 100 sigma, delta_omega = 9 sigma, delta_n = 0.009.

inline const std::map<std::string, json>& presets() {
  static const std::map<std::string, json> table = [] {
    const json base = {{"sigma", 1.0}, {"mu1", 100.0}, {"delta_omega", 9.0}, {"delta_n", 0.009}};
    auto with = [&](json extra) {
      json j = base;
      j.update(extra);
      return j;
    };
    std::map<std::string, json> t;
    t["fig1"] = with({{"model", "qubit"},
                      {"A_values", {0.0, 0.5, 1.0}},
                      {"t_max_factor", 4.0},
                      {"t_count", 401},
                      {"omega_count", 201}});
    t["fig2"] = with({{"model", "qubit"},
                      {"A", 0.0},
                      {"dt_factor", 0.014},
                      {"etas", {0.0, 0.5, 1.0}},
                      {"steps", 30}});
    t["fig3"] = with({{"model", "qubit"},
                      {"A", 0.0},
                      {"dt_factor", 2.0},
                      {"etas", {0.0, 0.5, 1.0}},
                      {"steps", 30}});
    t["fig4"] = with({{"model", "walk"},
                      {"A_values", {0.0, 0.5, 1.0}},
                      {"steps", 10},
                      {"sweep", {{"param", "dt_omega_dn"}, {"min", 0.025}, {"max", 4.0}, {"count", 161}}}});
    t["fig5"] = with({{"model", "qubit"},
                      {"A", 0.0},
                      {"etas", {0.0, 0.25, 0.5, 0.75, 1.0}},
                      {"dt_factors", {0.02, 1.03}},
                      {"steps", 15}});
    return t;
  }();
  return table;
}

/// Resolution order: defaults, then preset, then config file, then command-line overrides.
inline RunConfig resolve_config(const std::optional<std::string>& preset,
                                const std::optional<json>& file, const json& overrides) {
  RunConfig c;
  if (preset) {
    const auto it = presets().find(*preset);
    if (it == presets().end()) throw ConfigError("preset: unknown preset '" + *preset + "'");
    apply_json(it->second, c);
  }
  if (file) apply_json(*file, c);
  if (!overrides.is_null()) apply_json(overrides, c);
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Command results.

struct RunOutput {
  std::string command;
  std::map<std::string, std::string> files;  // file name -> contents
  json manifest;
  int exit_code = exit_code::kSuccess;
};

namespace detail {

inline json base_manifest(const std::string& command, const RunConfig& c) {
  json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["config"] = to_json(c);
  return m;
}

inline json dephasing_derived(const SpectrumParams& s, const DephasingConfig& d) {
  return {{"delta_t", d.step_duration},
          {"Omega_tilde", d.period()},
          {"Omega_tilde_over_sigma", d.period() / s.width},
          {"dt_omega_dn", dimensionless_step(s, d)}};
}

inline std::string format_label(double v) { return csv::format(v); }

}  // namespace detail

/// Spectrum samples and |kappa(t)| trajectories, one trajectory file per A.
inline RunOutput cmd_dephasing(const RunConfig& c) {
  RunOutput out{"dephasing", {}, detail::base_manifest("dephasing", c)};
  csv::Writer spectrum({"A", "omega", "density"});
  json revivals = json::array();
  const double revival_period =
      2.0 * std::numbers::pi / (c.spectrum.peak_separation * c.delta_n);
  for (double a : c.A_values) {
    SpectrumParams s = c.spectrum;
    s.amplitude_ratio = a;
    s.validate();
    const double lo = s.center_1 - 6.0 * s.width;
    const double hi = s.center_2() + 6.0 * s.width;
    for (int i = 0; i < c.omega_count; ++i) {
      const double w = lo + (hi - lo) * i / (c.omega_count - 1);
      spectrum.row(a, w, spectral_density(s, w));
    }
    csv::Writer traj({"t", "abs_kappa"});
    const double t_max = c.t_max_factor * revival_period;
    std::vector<double> ts, ks;
    for (int i = 0; i < c.t_count; ++i) {
      const double t = t_max * i / (c.t_count - 1);
      ts.push_back(t);
      ks.push_back(std::abs(decoherence_function(s, c.delta_n, t)));
      traj.row(t, ks.back());
    }
    json maxima = json::array();
    for (std::size_t i = 1; i + 1 < ks.size(); ++i)
      if (ks[i] > ks[i - 1] && ks[i] >= ks[i + 1]) maxima.push_back(ts[i]);
    revivals.push_back({{"A", a}, {"local_maxima_t", maxima}});
    out.files["kappa_A" + detail::format_label(a) + ".csv"] = traj.str();
  }
  out.files["spectrum.csv"] = spectrum.str();
  out.manifest["derived"] = {{"revival_period", revival_period}, {"revivals", revivals}};
  return out;
}

/// Bloch trajectories of the pair, D(n), Delta(n) and cumulative N per eta.
inline RunOutput cmd_controlled_qubit(const RunConfig& c) {
  RunOutput out{"controlled-qubit", {}, detail::base_manifest("controlled-qubit", c)};
  const DephasingConfig d = c.dephasing();
  std::vector<QubitNMResult> results(c.etas.size());
  parallel_for(c.etas.size(), c.threads, [&](std::size_t i) {
    results[i] = nm_qubit(c.etas[i], c.spectrum, d, {c.r1, c.r2}, c.steps, c.engine, c.epsilon);
  });
  csv::Writer w({"eta", "step", "r1_x", "r1_y", "r1_z", "r2_x", "r2_y", "r2_z", "D", "delta", "N"});
  json measures = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const auto cumulative = r.report.cumulative();
    for (int n = 0; n <= c.steps; ++n) {
      const auto k = static_cast<std::size_t>(n);
      w.row(c.etas[i], n, r.first[k](0), r.first[k](1), r.first[k](2), r.second[k](0),
            r.second[k](1), r.second[k](2), r.series.values[k], r.report.increments[k],
            cumulative[k]);
    }
    measures.push_back({{"eta", c.etas[i]},
                        {"N", r.report.value},
                        {"pair_selection", r.report.pair_selection}});
  }
  out.files["controlled_qubit.csv"] = w.str();
  json derived = detail::dephasing_derived(c.spectrum, d);
  derived["measures"] = measures;

  if (c.scan_resolution > 0) {
    csv::Writer scan({"eta", "r_x", "r_y", "r_z", "N", "pair_selection"});
    for (double eta : c.etas) {
      const auto best =
          orthogonal_pair_scan_qubit(eta, c.spectrum, d, c.steps, c.scan_resolution, c.engine);
      scan.row(eta, best.best(0), best.best(1), best.best(2), best.report.value,
               best.report.pair_selection);
    }
    out.files["controlled_qubit_scan.csv"] = scan.str();
  }
  out.manifest["derived"] = derived;
  return out;
}

inline std::string dephasing_regime(double omega_tilde_over_sigma) {
  if (omega_tilde_over_sigma >= 100.0) return "weak";
  if (omega_tilde_over_sigma >= 1.0) return "intermediate";
  return "strong";
}

/// Channel distance between the exact map and the single-period average per step.
inline RunOutput cmd_strong_limit_error(const RunConfig& c) {
  RunOutput out{"strong-limit-error", {}, detail::base_manifest("strong-limit-error", c)};
  struct Point {
    double eta;
    double factor;
  };
  std::vector<Point> points;
  for (double eta : c.etas)
    for (double f : c.dt_factors) points.push_back({eta, f});
  std::vector<std::vector<double>> errors(points.size());
  parallel_for(points.size(), c.threads, [&](std::size_t i) {
    const DephasingConfig d = c.dephasing_for_factor(points[i].factor);
    const auto powers = series_powers(series_from_transfer(points[i].eta), c.steps);
    for (const auto& p : powers)
      errors[i].push_back(channel_distance(integrate_series_against_spectrum(p, c.spectrum, d),
                                           p.coeff(0).real()));
  });
  csv::Writer w({"eta", "dt_factor", "regime", "step", "error"});
  json regimes = json::array();
  for (double f : c.dt_factors) {
    const DephasingConfig d = c.dephasing_for_factor(f);
    json r = detail::dephasing_derived(c.spectrum, d);
    r["regime"] = dephasing_regime(d.period() / c.spectrum.width);
    regimes.push_back(r);
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const DephasingConfig d = c.dephasing_for_factor(points[i].factor);
    const std::string regime = dephasing_regime(d.period() / c.spectrum.width);
    for (int n = 0; n <= c.steps; ++n)
      w.row(points[i].eta, points[i].factor, regime, n, errors[i][static_cast<std::size_t>(n)]);
  }
  out.files["strong_limit_error.csv"] = w.str();
  out.manifest["derived"] = {{"dt_factors", regimes}, {"metric", "half trace norm of Choi difference"}};
  return out;
}

/// Position distribution per step, optional amplitudes, optional integral cross-check.
inline RunOutput cmd_walk(const RunConfig& c) {
  RunOutput out{"walk", {}, detail::base_manifest("walk", c)};
  std::vector<std::string> header{"step", "x", "probability"};
  if (c.amplitudes) header.insert(header.end(), {"re_cL", "im_cL", "re_cR", "im_cR"});
  csv::Writer w(header);
  double worst_sum = 0.0, worst_integral = 0.0;
  WalkState s = WalkState::origin(c.coin);
  for (int n = 0; n <= c.steps; ++n) {
    if (n > 0) s = walk_step(s);
    double total = 0.0;
    for (int x = -n; x <= n; x += 2) {
      const CoinPair& a = s.at(x);
      const double p = a.squaredNorm();
      total += p;
      std::vector<std::string> cells{csv::format(n), csv::format(x), csv::format(p)};
      if (c.amplitudes)
        for (int k = 0; k < 2; ++k) {
          cells.push_back(csv::format(a(k).real()));
          cells.push_back(csv::format(a(k).imag()));
        }
      w.row(cells);
      if (c.check_integrals) {
        const CoinPair b = walk_amplitudes_integral(n, x).apply(c.coin);
        worst_integral = std::max(worst_integral, (a - b).cwiseAbs().maxCoeff());
      }
    }
    worst_sum = std::max(worst_sum, std::abs(total - 1.0));
  }
  out.files["walk.csv"] = w.str();
  json derived = {{"max_normalization_error", worst_sum}};
  if (c.check_integrals) {
    derived["integral_max_dev"] = worst_integral;
    derived["integral_tol"] = 1e-6;
    if (worst_integral > 1e-6) out.exit_code = exit_code::kNumeric;
  }
  out.manifest["derived"] = derived;
  return out;
}

/// N after `steps` steps for the pair |L,0>, |R,0> over the dt_omega_dn sweep, per A.
inline RunOutput cmd_open_walk_nm(const RunConfig& c) {
  RunOutput out{"open-walk-nm", {}, detail::base_manifest("open-walk-nm", c)};
  const auto xs = c.sweep.values();
  std::vector<double> as = c.A_values;
  std::sort(as.begin(), as.end());
  as.erase(std::unique(as.begin(), as.end()), as.end());

  struct Point {
    double a;
    double x;
  };
  std::vector<Point> points;
  for (double a : as)
    for (double x : xs) points.push_back({a, x});
  std::vector<double> values(points.size());
  parallel_for(points.size(), c.threads, [&](std::size_t i) {
    SpectrumParams s = c.spectrum;
    s.amplitude_ratio = points[i].a;
    DephasingConfig d{c.delta_n, 1.0};
    // delta_n = 0 leaves the walk unitary; any positive duration will do.
    if (c.delta_n != 0.0) d.step_duration = step_from_dimensionless(s, c.delta_n, points[i].x);
    values[i] = nm_walk(s, d, c.steps, WalkMode::filter, c.epsilon).report.value;
  });
  const double strong =
      nm_walk(c.spectrum, c.dephasing(), c.steps, WalkMode::strong_limit, c.epsilon).report.value;

  csv::Writer w({"A", "dt_omega_dn", "N10", "mode"});
  for (std::size_t i = 0; i < points.size(); ++i) {
    w.row(points[i].a, points[i].x, values[i], "filter");
    w.row(points[i].a, points[i].x, strong, "strong_limit");
  }
  out.files["open_walk_nm.csv"] = w.str();
  out.manifest["derived"] = {{"strong_limit_N", strong},
                             {"steps", c.steps},
                             {"pair", "|L,0>, |R,0>"},
                             {"pair_selection", "fixed-pair"}};
  return out;
}

// ---------------------------------------------------------------------------
// Oracle harness.

struct OracleCheck {
  std::string name;
  double max_dev = 0.0;
  double tol = 0.0;
  bool pass = true;
  bool skipped = false;
  std::string detail;
};

inline json to_json(const OracleCheck& c) {
  json j = {{"name", c.name}, {"max_dev", c.max_dev}, {"tol", c.tol}, {"pass", c.pass}};
  if (c.skipped) j["skipped"] = true;
  if (!c.detail.empty()) j[c.skipped ? "reason" : "location"] = c.detail;
  return j;
}

inline std::vector<OracleCheck> run_oracle_checks(const RunConfig& c) {
  std::vector<OracleCheck> checks;

  if (c.oracle.dilation) {
    const DephasingConfig d = c.dephasing();
    const CoinPair coins[] = {CoinPair(1.0, 0.0), CoinPair(0.0, 1.0), c.coin};
    for (int k : c.oracle.nodes_per_peak) {
      OracleCheck chk{"dilation_vs_filter_K" + std::to_string(k), 0.0, 1e-10, true, false, {}};
      if (k < 1 || k > kDilationMaxNodesPerPeak || c.oracle.dilation_steps > kDilationMaxSteps ||
          c.oracle.dilation_steps < 0) {
        chk.skipped = true;
        chk.detail = "resource cap: need 1 <= K <= " + std::to_string(kDilationMaxNodesPerPeak) +
                     " and 0 <= steps <= " + std::to_string(kDilationMaxSteps);
        checks.push_back(chk);
        continue;
      }
      const DiscreteSpectrum env = discretize_spectrum(c.spectrum, k);
      const double perturb = c.oracle.perturb_filter;
      const DephasingFilter base = DephasingFilter::from_discrete(env, d);
      const DephasingFilter filter(
          [&base, perturb, dt = d.step_duration](double tau) {
            return base(static_cast<int>(std::lround(2.0 * tau / dt))) + perturb;
          },
          d.step_duration);
      for (const auto& coin : coins) {
        for (int n = 0; n <= c.oracle.dilation_steps; ++n) {
          const MatrixXc diff =
              dilation_oracle(coin, n, env, d).matrix() - open_walk_evolve(coin, n, filter).matrix();
          Eigen::Index r = 0, col = 0;
          const double dev = diff.cwiseAbs().maxCoeff(&r, &col);
          if (dev > chk.max_dev) {
            chk.max_dev = dev;
            chk.detail = "n=" + std::to_string(n) + " x=" + std::to_string(r / 2 - n) +
                         " y=" + std::to_string(col / 2 - n) + " coin=(" +
                         std::to_string(r % 2) + "," + std::to_string(col % 2) + ")";
          }
        }
      }
      chk.pass = chk.max_dev <= chk.tol;
      if (chk.pass) chk.detail.clear();
      checks.push_back(chk);
    }
  }

  if (c.oracle.engines) {
    OracleCheck chk{"engine_series_vs_quadrature", 0.0, 1e-8, true, false, {}};
    const DephasingConfig d = c.dephasing();
    std::vector<std::pair<double, int>> cases;
    for (double eta : {0.0, 0.25, 0.5, 0.75, 1.0})
      for (int m = 0; m <= c.oracle.engine_max_steps; ++m) cases.emplace_back(eta, m);
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> eta_dist(0.0, 1.0);
    std::uniform_int_distribution<int> m_dist(0, std::max(0, c.oracle.engine_max_steps));
    for (int i = 0; i < c.oracle.random_engine_points; ++i) {
      const double eta = eta_dist(rng);
      const int m = m_dist(rng);
      cases.emplace_back(eta, m);
    }
    std::vector<double> devs(cases.size());
    parallel_for(cases.size(), c.threads, [&](std::size_t i) {
      const auto [eta, m] = cases[i];
      const TransferMatrix3 a = quadrature_map(eta, m, c.spectrum, d);
      const TransferMatrix3 b = integrate_series_against_spectrum(
          series_power(series_from_transfer(eta), m), c.spectrum, d);
      devs[i] = (a - b).cwiseAbs().maxCoeff();
    });
    for (std::size_t i = 0; i < cases.size(); ++i) {
      if (devs[i] > chk.max_dev) {
        chk.max_dev = devs[i];
        chk.detail = "eta=" + csv::format(cases[i].first) + " m=" + std::to_string(cases[i].second);
      }
    }
    chk.pass = chk.max_dev <= chk.tol;
    if (chk.pass) chk.detail.clear();
    checks.push_back(chk);
  }

  if (c.oracle.catalan) {
    OracleCheck chk{"catalan_closed_form", 0.0, 1e-12, true, false, {}};
    for (int m = 0; m <= 40; ++m) {
      const double dev = (strong_limit_closed_form(m) - strong_limit_map(0.5, m)).cwiseAbs().maxCoeff();
      if (dev > chk.max_dev) {
        chk.max_dev = dev;
        chk.detail = "m=" + std::to_string(m);
      }
    }
    chk.pass = chk.max_dev <= chk.tol;
    if (chk.pass) chk.detail.clear();
    checks.push_back(chk);
  }

  if (c.oracle.walk_integrals) {
    OracleCheck chk{"walk_integrals_vs_recursion", 0.0, 1e-6, true, false, {}};
    for (int m = 0; m <= 12; ++m) {
      const WalkState s = walk_evolve(c.coin, m);
      for (int x = -m; x <= m; ++x) {
        const double dev = (walk_amplitudes_integral(m, x).apply(c.coin) - s.at(x)).cwiseAbs().maxCoeff();
        if (dev > chk.max_dev) {
          chk.max_dev = dev;
          chk.detail = "m=" + std::to_string(m) + " x=" + std::to_string(x);
        }
      }
    }
    chk.pass = chk.max_dev <= chk.tol;
    if (chk.pass) chk.detail.clear();
    checks.push_back(chk);
  }
  return checks;
}

inline RunOutput cmd_oracle(const RunConfig& c) {
  RunOutput out{"oracle", {}, detail::base_manifest("oracle", c)};
  const auto checks = run_oracle_checks(c);
  json report;
  report["checks"] = json::array();
  bool all = true;
  for (const auto& chk : checks) {
    report["checks"].push_back(to_json(chk));
    all = all && (chk.pass || chk.skipped);
  }
  report["pass"] = all;
  out.files["oracle.json"] = report.dump(2) + "\n";
  out.manifest["derived"] = detail::dephasing_derived(c.spectrum, c.dephasing());
  if (!all) out.exit_code = exit_code::kNumeric;
  return out;
}

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"dephasing", "controlled-qubit",
                                              "strong-limit-error", "walk",
                                              "open-walk-nm", "oracle"};
  return names;
}

inline RunOutput run_command(const std::string& name, const RunConfig& c) {
  if (name == "dephasing") return cmd_dephasing(c);
  if (name == "controlled-qubit") return cmd_controlled_qubit(c);
  if (name == "strong-limit-error") return cmd_strong_limit_error(c);
  if (name == "walk") return cmd_walk(c);
  if (name == "open-walk-nm") return cmd_open_walk_nm(c);
  if (name == "oracle") return cmd_oracle(c);
  throw ConfigError("unknown subcommand '" + name + "'");
}

/// Manifest file name for a command's sidecar JSON.
inline std::string manifest_name(const RunOutput& r) { return r.command + ".manifest.json"; }

/// Manifest with the list of emitted files, serialized deterministically.
inline std::string render_manifest(const RunOutput& r) {
  json m = r.manifest;
  json files = json::array();
  for (const auto& [name, _] : r.files) files.push_back(name);
  m["files"] = files;
  m["exit_code"] = r.exit_code;
  return m.dump(2) + "\n";
}

}  // namespace memoryflow
