#pragma once

#include "osbm/core.hpp"

namespace osbm {

/// Brownian transition density (2 pi s)^{-1/2} exp(-(y - x)^2 / (2 s)).
/// Throws NonPositiveTime unless s > 0.
double gauss_kernel(double s, double x, double y);

/// Complementary error function.
double erfc_eval(double z);

/// Scaled complementary error function exp(z^2) erfc(z), accurate for large
/// positive z where the unscaled product would underflow.
double erfcx(double z);

/// Standard normal distribution function.
double normal_cdf(double z);

/// Level-z first-passage density of standard Brownian motion,
/// z / (sqrt(2 pi) s^{3/2}) exp(-z^2 / (2 s)).
/// Throws NonPositiveTime or NegativeLevel.
double h_eval(double s, double z);

/// h_eval extended by zero for s <= 0; z >= 0 is assumed. Used inside the
/// densities, whose supports are expressed through the time arguments of h.
double first_passage_density(double s, double z) noexcept;

/// P(T_z <= s) = erfc(z / sqrt(2 s)) for the standard Brownian hitting time of z >= 0.
double first_passage_cdf(double s, double z) noexcept;

/// E^x exp(-lambda T_0): exp(-sqrt(2 lambda) |x| / sigma) with the scale of
/// the side x starts on. Throws NonPositiveLambda.
double h_laplace(double lambda, double x, const OsbmParams& p);

/// Transform variable and its derived constants.
struct LaplaceQuery {
  double lambda;
  double gamma;  ///< sqrt(2 lambda)
  double rho;    ///< lambda + gamma r theta

  static LaplaceQuery make(double lambda, const OsbmParams& p);
};

/// Sticky factor: the function whose Laplace transform in s is
/// theta exp(-sqrt(2 lambda) z) / (lambda + sqrt(2 lambda) r theta), i.e.
///   g(s, z) = theta exp(2 r theta z + 2 r^2 theta^2 s) erfc(z / sqrt(2 s) + r theta sqrt(2 s)).
/// Evaluated as theta exp(-z^2 / (2 s)) erfcx(u) to avoid overflow. Throws NonPositiveTime.
double g_eval(double s, double z, const OsbmParams& p);

/// int_z^inf g(s, w) dw in closed form:
/// (erfc(z / sqrt(2 s)) - g(s, z) / theta) / (2 r).
double g_tail(double s, double z, const OsbmParams& p);

/// Killed kernel: density of the diffusion absorbed at its first visit to the
/// origin, p(t sigma^2, x, y) - p(t sigma^2, x, -y) when x and y lie strictly
/// on the same side, 0 otherwise. Throws NonPositiveTime.
double p0_eval(double t, double x, double y, const OsbmParams& p);

/// int_{-inf}^{y} p0_eval(t, x, w) dw in closed form.
double p0_cdf(double t, double x, double y, const OsbmParams& p);

/// Rejected variants of the formulas. They are kept only so the verification
/// suite can show that they fail the identities the adopted versions satisfy;
/// nothing else in the library uses them.
namespace printed {

/// Exponent theta^2 r s instead of 2 r^2 theta^2 s.
double g_eval(double s, double z, const OsbmParams& p);
/// Sum instead of difference of the two Gaussian terms.
double p0_eval(double t, double x, double y, const OsbmParams& p);
/// exp(-sqrt(2 lambda) x / sigma_minus) for x < 0, which grows as x -> -inf.
double h_laplace(double lambda, double x, const OsbmParams& p);

}  // namespace printed

}  // namespace osbm
