#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "osbm/error.hpp"

namespace osbm {

/// Parameters of an oscillating sticky Brownian motion: diffusion scales on
/// each half-line and the stickiness rate at the origin.
///
/// Construct through `make_params` or `validate_params`; both populate `r`.
struct OsbmParams {
  double sigma_plus = 1.0;
  double sigma_minus = 1.0;
  double theta = 1.0;
  /// Mean inverse scale, 0.5 * (1/sigma_minus + 1/sigma_plus).
  double r = 1.0;

  friend bool operator==(const OsbmParams&, const OsbmParams&) = default;
};

/// Checks positivity and finiteness, then returns the parameters with `r`
/// recomputed from the stored fields. Throws ParameterError.
OsbmParams validate_params(OsbmParams p);

inline OsbmParams make_params(double sigma_plus, double sigma_minus, double theta) {
  return validate_params(OsbmParams{sigma_plus, sigma_minus, theta, 0.0});
}

/// The same diffusion with its two half-line scales exchanged, i.e. the law
/// of -X when X has parameters p.
inline OsbmParams mirrored(const OsbmParams& p) {
  return make_params(p.sigma_minus, p.sigma_plus, p.theta);
}

/// Local diffusion scale: sigma_minus on (-inf, 0), sigma_plus on [0, inf).
inline double sigma_at(const OsbmParams& p, double x) noexcept {
  return x < 0.0 ? p.sigma_minus : p.sigma_plus;
}

/// Speed measure m(dy) = density_left dy on y<0, density_right dy on y>=0,
/// plus an atom at the origin.
struct SpeedMeasureView {
  double density_left;
  double density_right;
  double atom_at_zero;
};

SpeedMeasureView speed_measure(const OsbmParams& p);

/// Drifts and starting points for the sticky-coupled pair, on top of a base
/// diffusion.
struct CouplingParams {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;
  OsbmParams base;
};

/// Requires sigma_plus < sqrt(2) sigma_minus and |beta1 - beta2| < 2 theta
/// (both strict). Returns the record unchanged on success.
CouplingParams validate_coupling(CouplingParams c);

/// A simulated trajectory sampled on the uniform grid k * dt, k = 0..n.
///
/// `l` is the symmetric local time at zero, `gamma` the occupation time of
/// [0, inf) including time spent at zero, and `sticky[k]` marks samples taken
/// while the process sits at the origin. `a` optionally carries the clock
/// A_t = int sigma(X_s)^2 1{X_s != 0} ds (empty for plain Brownian paths).
struct PathRecord {
  double dt = 0.0;
  /// Half-width of the zero band used by band-type estimators. Recorded for
  /// reproducibility even when the engine did not need it.
  double zero_band = 0.0;
  std::vector<double> x;
  std::vector<double> l;
  std::vector<double> gamma;
  std::vector<std::uint8_t> sticky;
  std::vector<double> a;

  std::size_t size() const noexcept { return x.size(); }
  double horizon() const noexcept {
    return x.empty() ? 0.0 : dt * static_cast<double>(x.size() - 1);
  }
  /// Time spent at the origin, counted on the grid (left-point rule).
  double sticky_time() const noexcept;
  void reserve(std::size_t n);
};

/// Returns an empty string when every PathRecord invariant holds, otherwise a
/// description of the first violation.
std::string path_invariant_violation(const PathRecord& path, double eps = 1e-12);

}  // namespace osbm
