#pragma once

// Controlled-qubit dynamics: r(m) = int |chi|^2 M(omega)^m r0, plus the exact
// closed-form maps for eta = 1 (sigma_z control) and eta = 0 (sigma_x control).

#include <string>
#include <string_view>
#include <vector>

#include "memoryflow/errors.hpp"
#include "memoryflow/harmonic.hpp"
#include "memoryflow/qubit.hpp"
#include "memoryflow/spectra.hpp"

namespace memoryflow {

enum class Engine { series, quadrature, strong_limit };

inline std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::series: return "series";
    case Engine::quadrature: return "quadrature";
    case Engine::strong_limit: return "strong-limit";
  }
  return "series";
}

inline Engine parse_engine(std::string_view name) {
  if (name == "series") return Engine::series;
  if (name == "quadrature") return Engine::quadrature;
  if (name == "strong-limit") return Engine::strong_limit;
  throw DomainError("unknown engine '" + std::string(name) + "'");
}

/// Transfer matrices Phi_0 .. Phi_m of the controlled qubit for the selected engine.
inline std::vector<TransferMatrix3> qubit_maps(Engine engine, double eta, int m,
                                               const SpectrumParams& spectrum,
                                               const DephasingConfig& config) {
  if (m < 0) throw DomainError("qubit_maps: negative step count");
  spectrum.validate();
  config.validate();
  std::vector<TransferMatrix3> out;
  out.reserve(static_cast<std::size_t>(m) + 1);
  if (engine == Engine::quadrature) {
    for (int n = 0; n <= m; ++n) out.push_back(quadrature_map(eta, n, spectrum, config));
    return out;
  }
  const auto powers = series_powers(series_from_transfer(eta), m);
  for (const auto& p : powers) {
    out.push_back(engine == Engine::series ? integrate_series_against_spectrum(p, spectrum, config)
                                           : TransferMatrix3(p.coeff(0).real()));
  }
  return out;
}

/// Bloch vectors r(0) .. r(m); element 0 is r0.
inline std::vector<BlochVector> evolve_qubit(const SpectrumParams& spectrum,
                                             const DephasingConfig& config, double eta,
                                             const BlochVector& r0, int m,
                                             Engine engine = Engine::series) {
  if (r0.squaredNorm() > 1.0 + tolerances::kState)
    throw DomainError("evolve_qubit: initial Bloch vector outside the unit ball");
  std::vector<BlochVector> out;
  for (const auto& t : qubit_maps(engine, eta, m, spectrum, config)) out.push_back(t * r0);
  return out;
}

/// sigma_z control: populations fixed, <L|rho|R> -> (-1)^m kappa(m dt) <L|rho|R>.
inline QubitDensity special_map_eta1(int m, const SpectrumParams& spectrum,
                                     const DephasingConfig& config, const QubitDensity& rho) {
  if (m < 0) throw DomainError("special_map_eta1: negative step count");
  const complex k = decoherence_function(spectrum, config.index_contrast, m * config.step_duration);
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  Matrix2c out = rho.matrix();
  out(0, 1) *= sign * k;
  out(1, 0) *= sign * std::conj(k);
  return QubitDensity(out);
}

/// sigma_x control: identity after an even number of steps; after an odd number the
/// populations swap and <R|out|L> = conj(kappa(dt)) <L|rho|R>.
inline QubitDensity special_map_eta0(int m, const SpectrumParams& spectrum,
                                     const DephasingConfig& config, const QubitDensity& rho) {
  if (m < 0) throw DomainError("special_map_eta0: negative step count");
  if (m % 2 == 0) return rho;
  const complex k = decoherence_function(spectrum, config.index_contrast, config.step_duration);
  Matrix2c out;
  out(0, 0) = rho(1, 1);
  out(1, 1) = rho(0, 0);
  out(1, 0) = std::conj(k) * rho(0, 1);
  out(0, 1) = k * rho(1, 0);
  return QubitDensity(out);
}

/// Applies a Bloch transfer matrix to a density matrix (unital, no affine part).
inline QubitDensity apply_transfer(const TransferMatrix3& t, const QubitDensity& rho) {
  return QubitDensity::from_bloch(t * rho.bloch());
}

}  // namespace memoryflow
