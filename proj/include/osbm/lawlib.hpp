#pragma once

#include "osbm/core.hpp"
#include "osbm/quadrature.hpp"

namespace osbm {

/// A point of the joint law of (X_t, L_t, Gamma_t) started at x.
struct TriQuery {
  double t = 1.0;    ///< horizon
  double x = 0.0;    ///< start
  double y = 0.0;    ///< position at time t, y != 0
  double l = 0.0;    ///< local time at 0
  double tau = 0.0;  ///< occupation time of [0, inf)
};

/// Joint density of (X_t, L_t, Gamma_t) at (y, l, tau) on the event X_t != 0,
/// a product of two first-passage densities. With a = tau - l/theta and
/// b = t - tau:
///   x >= 0, y > 0: h(b, l/(2 s-)) h(a, (l/2 + y + x)/s+) / s+^2
///   x >= 0, y < 0: h(b, (l/2 - y)/s-) h(a, (l/2 + x)/s+) / s-^2
///   x <= 0, y > 0: h(b, (l/2 - x)/s-) h(a, (l/2 + y)/s+) / s+^2
///   x <= 0, y < 0: h(b, (l/2 - y - x)/s-) h(a, l/(2 s+)) / s-^2
/// Zero outside 0 < l/theta <= tau <= t and at y = 0. Throws NonPositiveHorizon.
double trivariate_density(const TriQuery& q, const OsbmParams& p);

/// Position and local time: for 0 < l < theta t the continuous density in
/// (y, l), and separately the density in y of the event {L_t = 0}, which is
/// the killed kernel and vanishes unless x and y lie strictly on the same side.
struct JointValue {
  double density = 0.0;
  double atom_at_l0 = 0.0;
};

/// With s = t - l/theta:
///   x >= 0, y > 0: h(s, l r + (x + y)/s+) / s+^2
///   x >= 0, y < 0: h(s, l r + x/s+ - y/s-) / s-^2
///   x <  0, y > 0: h(s, l r - x/s- + y/s+) / s+^2
///   x <  0, y < 0: h(s, l r - (x + y)/s-) / s-^2
/// Throws NonPositiveHorizon.
JointValue joint_position_localtime(double t, double x, double y, double l, const OsbmParams& p);

/// Joint density of (L_t, Gamma_t) on {X_t != 0} for a start at 0, obtained
/// by integrating the trivariate density over y in closed form:
///   h(t - tau, l/(2 s-)) p(tau - l/theta, l/(2 s+)) / s+
///   + p(t - tau, l/(2 s-)) h(tau - l/theta, l/(2 s+)) / s-
/// with p the centred Gaussian density. Throws NonPositiveHorizon.
double localtime_occupation_density(double t, double l, double tau, const OsbmParams& p);

/// Density of Gamma_t on {X_t != 0} for a start at 0:
///   theta^2 / (4 pi s+ s- (t - tau)^{3/2}) int_0^tau [1/sqrt(tau - u) + (t - tau)/(tau - u)^{3/2}]
///     u exp(-(theta u)^2/(8 s+^2 (tau - u)) - (theta u)^2/(8 s-^2 (t - tau))) du.
/// Its total mass is 1 - P(X_t = 0). Zero outside 0 < tau < t.
/// Throws NonPositiveHorizon or QuadratureError.
double occupation_density(double t, double tau, const OsbmParams& p, double abs_tol = 1e-8);

/// Density of L_t on {X_t != 0} for a start at 0:
/// 2 r / sqrt(2 pi (t - l/theta)) exp(-(l r)^2 / (2 (t - l/theta))) on 0 < l < theta t.
/// Its total mass is 1 - P(X_t = 0). Throws NonPositiveHorizon.
double localtime_density(double t, double l, const OsbmParams& p);

/// Statistics of one path at time t.
struct Triplet {
  double x = 0.0;
  double l = 0.0;
  double gamma = 0.0;
};

/// Maps (X_t, L_t, Gamma_t) of the diffusion with scales exchanged to a
/// triplet with the law of the diffusion with parameters p (both started at
/// 0): (y, l, g) -> (-y, l, t - g + l/theta). The map is an involution.
Triplet mirror_triplet(const Triplet& sample, double t, const OsbmParams& p);

/// int_0^t h(s, x1) h(t - s, x2) ds, which equals h(t, x1 + x2) for a
/// Brownian motion passing x1 on its way to x1 + x2. Throws QuadratureError.
double first_passage_convolution(double t, double x1, double x2, double abs_tol = 1e-12);

namespace printed {

/// Rejected variant of the start-below-zero cases with the -x/s- shift placed
/// in the factor for the positive-side time.
double trivariate_density(const TriQuery& q, const OsbmParams& p);

/// Rejected occupation density with the bracket [1/(s+ sqrt(tau - u)) + (t - tau)/(s- (tau - u)^{3/2})].
double occupation_density(double t, double tau, const OsbmParams& p, double abs_tol = 1e-8);

}  // namespace printed

}  // namespace osbm
