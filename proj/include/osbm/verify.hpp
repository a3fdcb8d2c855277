#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "osbm/core.hpp"

namespace osbm {

using Json = nlohmann::ordered_json;

/// One verification outcome. `passed` is statistic <= threshold, and a
/// non-finite statistic always fails.
struct VerifyCase {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  bool passed = false;
  Json details = Json::object();
};

VerifyCase make_case(std::string name, double statistic, double threshold, Json details = Json::object());

struct VerifyReport {
  std::string suite;
  std::uint64_t seed = 0;
  Json params = Json::object();
  std::vector<VerifyCase> cases;
  /// Outcome per open question, in insertion order.
  std::vector<std::pair<std::string, std::string>> adjudications;

  bool all_passed() const noexcept;
  void adjudicate(const std::string& key, const std::string& outcome);
};

/// Serialized report: schema version, suite, seed, params, cases, adjudications,
/// in that key order. Numbers use the shortest round-trip representation.
std::string report_json(const VerifyReport& report, int indent = 2);

/// Inputs shared by the suites. The defaults are the desk-scale acceptance run.
struct VerifyConfig {
  OsbmParams params = make_params(1.0, 2.0, 0.5);
  double t = 1.0;
  double x = 0.0;
  double dt = 1e-3;
  std::size_t n_paths = 50'000;
  /// Paths for the martingale identities; the first n_paths of them also
  /// serve the kernel comparison.
  std::size_t martingale_paths = 100'000;
  CouplingParams coupling{0.5, -0.5, 0.0, 0.0, make_params(1.0, 1.0, 1.0)};
  std::size_t n_pairs = 20'000;
  std::uint64_t seed = 42;
  /// Discretization allowance a in the Monte Carlo thresholds max(c_1%, a sqrt(dt)).
  double allowance = 0.1;
};

/// Transition kernel: quadrature mass on a parameter lattice, closed-form CDF
/// against quadrature, Monte Carlo comparison for both simulators, atom
/// against the sticky fraction, Laplace bridge to the resolvent, resolvent
/// mass, the symmetric sticky reduction, the near-oscillating limit and the
/// martingale identities.
VerifyReport verify_kernel(const VerifyConfig& cfg);
VerifyReport verify_kernel(const OsbmParams& p, double t, double x, std::size_t n_paths, std::uint64_t seed);

/// Joint law of position, local time and occupation time from 0.
VerifyReport verify_trivariate(const VerifyConfig& cfg);
VerifyReport verify_trivariate(const OsbmParams& p, double t, std::size_t n_paths, std::uint64_t seed);

/// Sticky coupling: Gaussian marginals, realized variance, the reduction to
/// the diffusion for equal drifts and the local-time identity of the difference.
VerifyReport verify_coupling(const VerifyConfig& cfg);
VerifyReport verify_coupling(const CouplingParams& c, double t, std::size_t n_pairs, std::uint64_t seed);

/// Deterministic identities of the elementary densities.
VerifyReport verify_analytic(const VerifyConfig& cfg);

/// Dispatches kernel | trivariate | coupling | analytic | all. Throws
/// Error(UnknownSuite) for any other name.
VerifyReport run_suite(const std::string& name, const VerifyConfig& cfg);

}  // namespace osbm
