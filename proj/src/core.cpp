#include "osbm/core.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace osbm {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::NonFiniteParameter: return "NonFiniteParameter";
    case ErrorCode::SigmaRatioViolation: return "SigmaRatioViolation";
    case ErrorCode::DriftGapViolation: return "DriftGapViolation";
    case ErrorCode::NonPositiveTime: return "NonPositiveTime";
    case ErrorCode::NegativeLevel: return "NegativeLevel";
    case ErrorCode::NonPositiveLambda: return "NonPositiveLambda";
    case ErrorCode::NonPositiveHorizon: return "NonPositiveHorizon";
    case ErrorCode::QuadratureNonConvergence: return "QuadratureNonConvergence";
    case ErrorCode::GridExhausted: return "GridExhausted";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::UnknownSuite: return "UnknownSuite";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

QuadratureError::QuadratureError(double best_estimate, double error_estimate)
    : Error(ErrorCode::QuadratureNonConvergence,
            [&] {
              std::ostringstream os;
              os.precision(17);
              os << "best estimate " << best_estimate << ", error estimate " << error_estimate;
              return os.str();
            }()),
      best_(best_estimate),
      err_(error_estimate) {}

namespace {

void check_positive(double v, const char* name) {
  if (!std::isfinite(v)) throw ParameterError(ErrorCode::NonFiniteParameter, name);
  if (!(v > 0.0)) throw ParameterError(ErrorCode::NonPositiveParameter, name);
}

}  // namespace

OsbmParams validate_params(OsbmParams p) {
  check_positive(p.sigma_plus, "sigma_plus");
  check_positive(p.sigma_minus, "sigma_minus");
  check_positive(p.theta, "theta");
  p.r = 0.5 * (1.0 / p.sigma_minus + 1.0 / p.sigma_plus);
  return p;
}

SpeedMeasureView speed_measure(const OsbmParams& p) {
  return {1.0 / (p.sigma_minus * p.sigma_minus), 1.0 / (p.sigma_plus * p.sigma_plus),
          1.0 / p.theta};
}

CouplingParams validate_coupling(CouplingParams c) {
  c.base = validate_params(c.base);
  if (!std::isfinite(c.beta1)) throw ParameterError(ErrorCode::NonFiniteParameter, "beta1");
  if (!std::isfinite(c.beta2)) throw ParameterError(ErrorCode::NonFiniteParameter, "beta2");
  if (!std::isfinite(c.x1)) throw ParameterError(ErrorCode::NonFiniteParameter, "x1");
  if (!std::isfinite(c.x2)) throw ParameterError(ErrorCode::NonFiniteParameter, "x2");
  // Compare squares so that sigma_plus == sqrt(2) sigma_minus is rejected exactly.
  if (!(c.base.sigma_plus * c.base.sigma_plus < 2.0 * c.base.sigma_minus * c.base.sigma_minus)) {
    throw ParameterError(ErrorCode::SigmaRatioViolation, "sigma_plus must be < sqrt(2) sigma_minus");
  }
  if (!(std::abs(c.beta1 - c.beta2) < 2.0 * c.base.theta)) {
    throw ParameterError(ErrorCode::DriftGapViolation, "|beta1 - beta2| must be < 2 theta");
  }
  return c;
}

double PathRecord::sticky_time() const noexcept {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < sticky.size(); ++k) {
    if (sticky[k]) total += dt;
  }
  return total;
}

void PathRecord::reserve(std::size_t n) {
  x.reserve(n);
  l.reserve(n);
  gamma.reserve(n);
  sticky.reserve(n);
}

std::string path_invariant_violation(const PathRecord& path, double eps) {
  const std::size_t n = path.x.size();
  if (path.l.size() != n || path.gamma.size() != n || path.sticky.size() != n) {
    return "value arrays have unequal lengths";
  }
  if (!path.a.empty() && path.a.size() != n) return "clock array has the wrong length";
  if (n == 0) return {};
  if (path.l[0] != 0.0) return "local time does not start at zero";
  if (path.gamma[0] != 0.0) return "occupation time does not start at zero";
  const double step_cap = path.dt * (1.0 + eps) + std::numeric_limits<double>::epsilon();
  for (std::size_t k = 1; k < n; ++k) {
    if (path.l[k] < path.l[k - 1]) return "local time decreases at index " + std::to_string(k);
    const double dg = path.gamma[k] - path.gamma[k - 1];
    if (dg < -eps) return "occupation time decreases at index " + std::to_string(k);
    if (dg > step_cap) return "occupation increment exceeds dt at index " + std::to_string(k);
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (path.sticky[k] && std::abs(path.x[k]) > path.zero_band) {
      return "sticky sample outside the zero band at index " + std::to_string(k);
    }
  }
  return {};
}

}  // namespace osbm
