#pragma once

#include <functional>
#include <utility>

#include "osbm/core.hpp"
#include "osbm/quadrature.hpp"

namespace osbm {

/// One time slice (or one resolvent) of the diffusion: an absolutely
/// continuous part over y plus a point mass at the origin. The density
/// evaluator captures only immutable values, so copies may be shared across
/// threads.
class KernelValue {
 public:
  using Density = std::function<double(double)>;

  KernelValue(Density density, double atom_at_zero)
      : density_(std::move(density)), atom_(atom_at_zero) {}

  double density(double y) const { return density_(y); }
  double atom_at_zero() const noexcept { return atom_; }

 private:
  Density density_;
  double atom_;
};

/// Transition density of the continuous part of Q_t(x, dy):
///   x >= 0, y >= 0: g(t, (x + y)/s+) / s+^2 + p0(t, x, y)
///   x >= 0, y <  0: g(t, x/s+ - y/s-) / s-^2
///   x <  0, y <  0: g(t, -(x + y)/s-) / s-^2 + p0(t, x, y)
///   x <  0, y >= 0: g(t, -x/s- + y/s+) / s+^2
/// The density at y = 0 is the y >= 0 branch; the point mass is separate.
/// Throws NonPositiveTime.
double transition_density(double t, double x, double y, const OsbmParams& p);

/// Q_t(x, {0}) = g(t, |x| / sigma_side) / theta. Throws NonPositiveTime.
double transition_atom(double t, double x, const OsbmParams& p);

/// Right-continuous distribution function P^x(X_t <= y), atom included.
/// Closed form; used for Kolmogorov-Smirnov tests. Throws NonPositiveTime.
double transition_cdf(double t, double x, double y, const OsbmParams& p);

KernelValue transition_kernel(double t, double x, const OsbmParams& p);

/// Resolvent of the diffusion killed at its first visit to 0:
/// (gamma sigma)^{-1} [exp(-gamma |x - y| / sigma) - exp(-gamma (|x| + |y|) / sigma)]
/// for x and y strictly on the same side, with sigma the scale of that side.
double killed_resolvent_density(double lambda, double x, double y, const OsbmParams& p);
KernelValue killed_resolvent(double lambda, double x, const OsbmParams& p);

/// R_lambda(0, dy): density theta exp(-gamma |y| / sigma_side) / (sigma_side^2 rho),
/// atom 1 / rho.
double resolvent_at_zero_density(double lambda, double y, const OsbmParams& p);
KernelValue resolvent_at_zero(double lambda, const OsbmParams& p);

/// R_lambda(x, dy) = R0_lambda(x, dy) + E^x[exp(-lambda T_0)] R_lambda(0, dy).
double resolvent_density(double lambda, double x, double y, const OsbmParams& p);
double resolvent_atom(double lambda, double x, const OsbmParams& p);
KernelValue resolvent(double lambda, double x, const OsbmParams& p);

/// P(X_T = 0) for the diffusion started at 0 and an independent exponential
/// time T of rate lambda: lambda / rho.
double exit_prob_at_T(double lambda, const OsbmParams& p);

/// Integration windows: the continuous part is integrated over
/// [-(|x| + 12 sigma_minus sqrt t), 0) and [0, |x| + 12 sigma_plus sqrt t].
/// Beyond them every term is bounded by a Gaussian tail of at most
/// erfc(12 / sqrt 2) < 2e-32 per unit of prefactor.
struct MassBreakdown {
  double negative_side;
  double positive_side;
  double atom;
  double total() const noexcept { return negative_side + positive_side + atom; }
};

/// Quadrature of the transition kernel's mass, independent of the closed-form CDF.
MassBreakdown transition_mass(double t, double x, const OsbmParams& p, const QuadOptions& opt = {});

/// Quadrature of the resolvent's mass; the exact value is 1 / lambda.
MassBreakdown resolvent_mass(double lambda, double x, const OsbmParams& p, const QuadOptions& opt = {});

namespace detail {

/// The g-term of the continuous part at (x, y): density = coef * g(t, z) + p0.
struct StickyTerm {
  double coef;
  double z;
};
StickyTerm sticky_term(double x, double y, const OsbmParams& p) noexcept;

}  // namespace detail

namespace printed {

/// Rejected case rule in which the fourth case repeats "x, y < 0", so the
/// branch x < 0, y >= 0 carries no density and the x, y < 0 branch adds both
/// formulas.
double transition_density(double t, double x, double y, const OsbmParams& p);

/// Transition density assembled from printed::g_eval and printed::p0_eval.
double transition_density_printed_factors(double t, double x, double y, const OsbmParams& p);
double transition_atom_printed_factors(double t, double x, const OsbmParams& p);

}  // namespace printed

}  // namespace osbm
