#include "osbm/kernel.hpp"

#include <cmath>
#include <initializer_list>

#include "osbm/analytic.hpp"

namespace osbm {

namespace {

void require_positive_time(double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::NonPositiveTime, "time argument must be positive");
}

void require_positive_lambda(double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::NonPositiveLambda, "Laplace variable must be positive");
}

// Argument of g for the continuous part, shared by the regular and the
// rejected-factor assemblies. Returns the coefficient 1/sigma^2 through `coef`.
double sticky_argument(double x, double y, const OsbmParams& p, double& coef) {
  const double sp = p.sigma_plus, sm = p.sigma_minus;
  if (x >= 0.0) {
    if (y >= 0.0) {
      coef = 1.0 / (sp * sp);
      return (x + y) / sp;
    }
    coef = 1.0 / (sm * sm);
    return x / sp - y / sm;
  }
  if (y < 0.0) {
    coef = 1.0 / (sm * sm);
    return -(x + y) / sm;
  }
  coef = 1.0 / (sp * sp);
  return -x / sm + y / sp;
}

double scaled_distance(double x, const OsbmParams& p) {
  return x >= 0.0 ? x / p.sigma_plus : -x / p.sigma_minus;
}

}  // namespace

namespace detail {

StickyTerm sticky_term(double x, double y, const OsbmParams& p) noexcept {
  StickyTerm s{};
  s.z = sticky_argument(x, y, p, s.coef);
  return s;
}

}  // namespace detail

double transition_density(double t, double x, double y, const OsbmParams& p) {
  require_positive_time(t);
  double coef = 0.0;
  const double z = sticky_argument(x, y, p, coef);
  return coef * g_eval(t, z, p) + p0_eval(t, x, y, p);
}

double transition_atom(double t, double x, const OsbmParams& p) {
  require_positive_time(t);
  return g_eval(t, scaled_distance(x, p), p) / p.theta;
}

double transition_cdf(double t, double x, double y, const OsbmParams& p) {
  require_positive_time(t);
  const double sp = p.sigma_plus, sm = p.sigma_minus;
  // G(z) = int_z^inf g(t, w) dw; each branch of the density is g of an
  // affine function of y, so its integral is a difference of G values.
  auto G = [&](double z) { return g_tail(t, z, p); };
  const double d = scaled_distance(x, p);
  if (y < 0.0) {
    if (x >= 0.0) return G(x / sp - y / sm) / sm;
    return G(-(x + y) / sm) / sm + p0_cdf(t, x, y, p);
  }
  double below = G(d) / sm + transition_atom(t, x, p);
  if (x < 0.0) below += p0_cdf(t, x, 0.0, p);
  const double positive = (G(d) - G(d + y / sp)) / sp;
  return below + positive + (x > 0.0 ? p0_cdf(t, x, y, p) : 0.0);
}

KernelValue transition_kernel(double t, double x, const OsbmParams& p) {
  require_positive_time(t);
  return KernelValue([t, x, p](double y) { return transition_density(t, x, y, p); }, transition_atom(t, x, p));
}

double killed_resolvent_density(double lambda, double x, double y, const OsbmParams& p) {
  require_positive_lambda(lambda);
  const bool same_side = (x > 0.0 && y > 0.0) || (x < 0.0 && y < 0.0);
  if (!same_side) return 0.0;
  const double sigma = sigma_at(p, x);
  const double gamma = std::sqrt(2.0 * lambda);
  return (std::exp(-gamma * std::abs(x - y) / sigma) - std::exp(-gamma * (std::abs(x) + std::abs(y)) / sigma)) /
         (gamma * sigma);
}

KernelValue killed_resolvent(double lambda, double x, const OsbmParams& p) {
  require_positive_lambda(lambda);
  return KernelValue([lambda, x, p](double y) { return killed_resolvent_density(lambda, x, y, p); }, 0.0);
}

double resolvent_at_zero_density(double lambda, double y, const OsbmParams& p) {
  const LaplaceQuery q = LaplaceQuery::make(lambda, p);
  const double sigma = sigma_at(p, y);
  return p.theta / (sigma * sigma * q.rho) * std::exp(-q.gamma * std::abs(y) / sigma);
}

KernelValue resolvent_at_zero(double lambda, const OsbmParams& p) {
  const LaplaceQuery q = LaplaceQuery::make(lambda, p);
  return KernelValue([lambda, p](double y) { return resolvent_at_zero_density(lambda, y, p); }, 1.0 / q.rho);
}

double resolvent_density(double lambda, double x, double y, const OsbmParams& p) {
  return killed_resolvent_density(lambda, x, y, p) + h_laplace(lambda, x, p) * resolvent_at_zero_density(lambda, y, p);
}

double resolvent_atom(double lambda, double x, const OsbmParams& p) {
  const LaplaceQuery q = LaplaceQuery::make(lambda, p);
  return h_laplace(lambda, x, p) / q.rho;
}

KernelValue resolvent(double lambda, double x, const OsbmParams& p) {
  return KernelValue([lambda, x, p](double y) { return resolvent_density(lambda, x, y, p); },
                     resolvent_atom(lambda, x, p));
}

double exit_prob_at_T(double lambda, const OsbmParams& p) {
  const LaplaceQuery q = LaplaceQuery::make(lambda, p);
  return lambda / q.rho;
}

namespace {

// Integrates f over [lo, hi] with extra breakpoints, summing the pieces.
template <class F>
double integrate_pieces(F& f, std::initializer_list<double> points, const QuadOptions& opt) {
  double total = 0.0;
  const double* prev = nullptr;
  for (const double& pt : points) {
    if (prev && pt > *prev) total += integrate(f, *prev, pt, opt);
    prev = &pt;
  }
  return total;
}

}  // namespace

MassBreakdown transition_mass(double t, double x, const OsbmParams& p, const QuadOptions& opt) {
  require_positive_time(t);
  auto f = [&](double y) { return transition_density(t, x, y, p); };
  const double rt = std::sqrt(t);
  const double left = -(std::abs(x) + 12.0 * p.sigma_minus * rt);
  const double right = std::abs(x) + 12.0 * p.sigma_plus * rt;
  MassBreakdown m{};
  // The killed part peaks at y = x; a breakpoint there keeps the rule efficient.
  if (x < 0.0) {
    m.negative_side = integrate_pieces(f, {left, x, 0.0}, opt);
    m.positive_side = integrate(f, 0.0, right, opt);
  } else {
    m.negative_side = integrate(f, left, 0.0, opt);
    m.positive_side = integrate_pieces(f, {0.0, x, right}, opt);
  }
  m.atom = transition_atom(t, x, p);
  return m;
}

MassBreakdown resolvent_mass(double lambda, double x, const OsbmParams& p, const QuadOptions& opt) {
  const LaplaceQuery q = LaplaceQuery::make(lambda, p);
  auto f = [&](double y) { return resolvent_density(lambda, x, y, p); };
  const double left = -(std::abs(x) + 40.0 * p.sigma_minus / q.gamma);
  const double right = std::abs(x) + 40.0 * p.sigma_plus / q.gamma;
  MassBreakdown m{};
  if (x < 0.0) {
    m.negative_side = integrate_pieces(f, {left, x, 0.0}, opt);
    m.positive_side = integrate(f, 0.0, right, opt);
  } else {
    m.negative_side = integrate(f, left, 0.0, opt);
    m.positive_side = integrate_pieces(f, {0.0, x, right}, opt);
  }
  m.atom = resolvent_atom(lambda, x, p);
  return m;
}

namespace printed {

double transition_density(double t, double x, double y, const OsbmParams& p) {
  require_positive_time(t);
  const double sp = p.sigma_plus, sm = p.sigma_minus;
  if (x >= 0.0) return osbm::transition_density(t, x, y, p);
  if (y >= 0.0) return 0.0;
  return osbm::g_eval(t, -(x + y) / sm, p) / (sm * sm) + osbm::p0_eval(t, x, y, p) +
         osbm::g_eval(t, -x / sm + y / sp, p) / (sp * sp);
}

double transition_density_printed_factors(double t, double x, double y, const OsbmParams& p) {
  require_positive_time(t);
  double coef = 0.0;
  const double z = sticky_argument(x, y, p, coef);
  return coef * printed::g_eval(t, z, p) + printed::p0_eval(t, x, y, p);
}

double transition_atom_printed_factors(double t, double x, const OsbmParams& p) {
  require_positive_time(t);
  return printed::g_eval(t, scaled_distance(x, p), p) / p.theta;
}

}  // namespace printed

}  // namespace osbm
