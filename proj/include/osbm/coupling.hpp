#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "osbm/core.hpp"
#include "osbm/simulate.hpp"

namespace osbm {

/// The pair (X, X') on the output grid k * dt together with the difference
/// process transported through the time change.
struct CoupledPaths {
  double dt = 0.0;
  std::vector<double> x;
  std::vector<double> xp;
  std::vector<double> z;       ///< Z_{A_t} = X_t - X'_t
  std::vector<double> a;       ///< A_t
  std::vector<double> l_diff;  ///< local time of X - X' at 0
  std::vector<double> gamma_diff;  ///< occupation of [0, inf) by X - X'
  std::vector<std::uint8_t> coincide;  ///< X_t == X'_t

  std::size_t size() const noexcept { return x.size(); }
};

/// The difference process Z_t = sqrt(2) B_t + kappa L_t(Z) + mu(Z) t-drift
/// with kappa = (b1 - b2) / (2 theta) and drift (b1 - b2)/s+^2 on [0, inf),
/// (b1 - b2)/s-^2 below. |Z| is a reflected Brownian motion with drift,
/// stepped exactly through the law of the bridge minimum; its reflection
/// term is L(Z), and each excursion starts on the positive side with
/// probability (1 + kappa) / 2. Grid k * cfg.dt up to cfg.t_max, Z_0 = x1 - x2.
PathRecord simulate_Z(const CouplingParams& c, const SimConfig& cfg);

/// Builds (X, X') on the grid k * cfg.dt up to cfg.t_max from a stored Z
/// path: inverts alpha_t = t/s-^2 + (1/s+^2 - 1/s-^2) Gamma_t(Z) + L_t(Z)/(2 theta),
/// sets T_t = 2 s-^2 t - A_t, synthesizes B' on the clock T from stream
/// cfg.rng.stream_index + 1 and returns X = (Z'_T + Z_A)/2, X' = (Z'_T - Z_A)/2
/// with Z'_T = sqrt(2) B'_T + (b1 + b2) t + x1 + x2. Throws GridExhausted.
CoupledPaths build_pair(const PathRecord& z, const CouplingParams& c, const SimConfig& cfg);

/// simulate_Z on a horizon long enough for cfg.t_max and a grid at least four
/// times finer than the output grid, then build_pair.
CoupledPaths simulate_pair(const CouplingParams& c, const SimConfig& cfg);

/// Per-pair functionals used by the coupling tests.
struct PairDiagnostics {
  double x_standardized = 0.0;   ///< (X_t - x1 - b1 t) / (s- sqrt t)
  double xp_standardized = 0.0;  ///< (X'_t - x2 - b2 t) / (s- sqrt t)
  double realized_var_x = 0.0;   ///< sum of (dX - b1 dt)^2
  double realized_var_xp = 0.0;  ///< sum of (dX' - b2 dt)^2
  double realized_var_diff = 0.0;  ///< sum of (dZ_A)^2
  double a_terminal = 0.0;
  double diff_scaled = 0.0;      ///< (X_t - X'_t) / sqrt 2
  bool coincide_terminal = false;
  double local_time = 0.0;       ///< L_t(X - X')
  double coincidence_time = 0.0; ///< dt * #{k < n : X = X'}
  double min_clock_step = 0.0;   ///< min over k of T_{k+1} - T_k
};

PairDiagnostics coupling_diagnostics(const CoupledPaths& pair, const CouplingParams& c);

/// Runs n pairs on streams (2i, 2i + 1) offset by cfg.rng.stream_index.
std::vector<PairDiagnostics> simulate_pair_diagnostics(const CouplingParams& c, const SimConfig& cfg, std::size_t n);

/// CSV with header `t,x,xp,z,a,l_diff`.
void write_coupled_csv(std::ostream& os, const CoupledPaths& pair);

}  // namespace osbm
