#include "osbm/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace osbm {

namespace {

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;
constexpr double kInvSqrtPi = 0.564189583547756286948079451560772586;

void require_positive_time(double s) {
  if (!(s > 0.0)) throw Error(ErrorCode::NonPositiveTime, "time argument must be positive");
}

}  // namespace

double gauss_kernel(double s, double x, double y) {
  require_positive_time(s);
  const double d = y - x;
  return kInvSqrt2Pi / std::sqrt(s) * std::exp(-d * d / (2.0 * s));
}

double erfc_eval(double z) { return std::erfc(z); }

double erfcx(double z) {
  if (z < 0.0) return 2.0 * std::exp(z * z) - erfcx(-z);
  if (z < 6.0) return std::exp(z * z) * std::erfc(z);
  // Continued fraction erfc(z) = e^{-z^2}/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))),
  // evaluated bottom-up; 60 levels are exact to rounding for z >= 6.
  double tail = z;
  for (int k = 60; k >= 1; --k) tail = z + 0.5 * k / tail;
  return kInvSqrtPi / tail;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double h_eval(double s, double z) {
  require_positive_time(s);
  if (z < 0.0) throw Error(ErrorCode::NegativeLevel, "first-passage level must be nonnegative");
  return first_passage_density(s, z);
}

double first_passage_density(double s, double z) noexcept {
  if (!(s > 0.0) || !(z > 0.0)) return 0.0;
  return z * kInvSqrt2Pi / (s * std::sqrt(s)) * std::exp(-z * z / (2.0 * s));
}

double first_passage_cdf(double s, double z) noexcept {
  if (!(s > 0.0)) return 0.0;
  return std::erfc(z / std::sqrt(2.0 * s));
}

double h_laplace(double lambda, double x, const OsbmParams& p) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::NonPositiveLambda, "Laplace variable must be positive");
  const double gamma = std::sqrt(2.0 * lambda);
  return x < 0.0 ? std::exp(gamma * x / p.sigma_minus) : std::exp(-gamma * x / p.sigma_plus);
}

LaplaceQuery LaplaceQuery::make(double lambda, const OsbmParams& p) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::NonPositiveLambda, "Laplace variable must be positive");
  const double gamma = std::sqrt(2.0 * lambda);
  return {lambda, gamma, lambda + gamma * p.r * p.theta};
}

double g_eval(double s, double z, const OsbmParams& p) {
  require_positive_time(s);
  const double rt = p.r * p.theta;
  const double root = std::sqrt(2.0 * s);
  const double u = z / root + rt * root;
  // exp(2 r theta z + 2 r^2 theta^2 s) = exp(u^2 - z^2 / (2 s)).
  if (u >= 0.0) return p.theta * std::exp(-z * z / (2.0 * s)) * erfcx(u);
  return p.theta * (2.0 * std::exp(2.0 * rt * z + 2.0 * rt * rt * s) -
                    std::exp(-z * z / (2.0 * s)) * erfcx(-u));
}

double g_tail(double s, double z, const OsbmParams& p) {
  require_positive_time(s);
  return (std::erfc(z / std::sqrt(2.0 * s)) - g_eval(s, z, p) / p.theta) / (2.0 * p.r);
}

double p0_eval(double t, double x, double y, const OsbmParams& p) {
  require_positive_time(t);
  if (x > 0.0 && y > 0.0) {
    const double v = t * p.sigma_plus * p.sigma_plus;
    return gauss_kernel(v, x, y) - gauss_kernel(v, x, -y);
  }
  if (x < 0.0 && y < 0.0) {
    const double v = t * p.sigma_minus * p.sigma_minus;
    return gauss_kernel(v, x, y) - gauss_kernel(v, x, -y);
  }
  return 0.0;
}

double p0_cdf(double t, double x, double y, const OsbmParams& p) {
  require_positive_time(t);
  if (x > 0.0) {
    if (y <= 0.0) return 0.0;
    const double sd = p.sigma_plus * std::sqrt(t);
    return normal_cdf((y - x) / sd) - 2.0 * normal_cdf(-x / sd) + normal_cdf((-y - x) / sd);
  }
  if (x < 0.0) {
    const double sd = p.sigma_minus * std::sqrt(t);
    const double cap = std::min(y, 0.0);
    return normal_cdf((cap - x) / sd) - normal_cdf((cap + x) / sd);
  }
  return 0.0;
}

namespace printed {

double g_eval(double s, double z, const OsbmParams& p) {
  require_positive_time(s);
  const double rt = p.r * p.theta;
  const double root = std::sqrt(2.0 * s);
  const double u = z / root + rt * root;
  // theta exp(2 r theta z + theta^2 r s) erfc(u), rewritten through erfcx.
  const double shift = p.theta * p.theta * p.r * s - 2.0 * rt * rt * s;
  if (u >= 0.0) return p.theta * std::exp(shift - z * z / (2.0 * s)) * erfcx(u);
  return p.theta * std::exp(2.0 * rt * z + p.theta * p.theta * p.r * s) * std::erfc(u);
}

double p0_eval(double t, double x, double y, const OsbmParams& p) {
  require_positive_time(t);
  if (x > 0.0 && y > 0.0) {
    const double v = t * p.sigma_plus * p.sigma_plus;
    return gauss_kernel(v, x, y) + gauss_kernel(v, x, -y);
  }
  if (x < 0.0 && y < 0.0) {
    const double v = t * p.sigma_minus * p.sigma_minus;
    return gauss_kernel(v, x, y) + gauss_kernel(v, x, -y);
  }
  return 0.0;
}

double h_laplace(double lambda, double x, const OsbmParams& p) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::NonPositiveLambda, "Laplace variable must be positive");
  const double gamma = std::sqrt(2.0 * lambda);
  return x < 0.0 ? std::exp(-gamma * x / p.sigma_minus) : std::exp(-gamma * x / p.sigma_plus);
}

}  // namespace printed

}  // namespace osbm
