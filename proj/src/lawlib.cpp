#include "osbm/lawlib.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "osbm/analytic.hpp"

namespace osbm {

namespace {

void require_positive_horizon(double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::NonPositiveHorizon, "horizon must be positive");
}

double centred_gauss(double s, double z) {
  if (!(s > 0.0)) return 0.0;
  return std::exp(-z * z / (2.0 * s)) / std::sqrt(2.0 * std::numbers::pi * s);
}

bool in_slab(double t, double l, double tau, double theta) {
  return l > 0.0 && l / theta <= tau && tau <= t;
}

// Sums adaptive integrals over consecutive breakpoints; the point list is
// sorted and deduplicated first.
template <class F>
double integrate_breakpoints(F& f, std::vector<double> pts, const QuadOptions& opt) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) total += integrate(f, pts[i - 1], pts[i], opt);
  return total;
}

enum class Bracket { consistent, printed };

double occupation_density_impl(double t, double tau, const OsbmParams& p, double abs_tol, Bracket form) {
  require_positive_horizon(t);
  if (!(tau > 0.0) || !(tau < t)) return 0.0;
  const double sp = p.sigma_plus, sm = p.sigma_minus, th = p.theta;
  const double rest = t - tau;
  const double prefactor = th * th / (4.0 * std::numbers::pi * sp * sm * rest * std::sqrt(rest));
  const double c_pos = th * th / (8.0 * sp * sp);
  const double c_neg = th * th / (8.0 * sm * sm * rest);
  const double w_pos = form == Bracket::consistent ? 1.0 : 1.0 / sp;
  const double w_neg = form == Bracket::consistent ? 1.0 : 1.0 / sm;
  auto integrand = [&](double u) {
    const double gap = tau - u;
    if (!(gap > 0.0) || !(u > 0.0)) return 0.0;
    const double e = std::exp(-c_pos * u * u / gap - c_neg * u * u);
    if (e == 0.0) return 0.0;
    return (w_pos / std::sqrt(gap) + w_neg * rest / (gap * std::sqrt(gap))) * u * e;
  };
  // The Gaussian factor in u has width of order sqrt(8 sm^2 (t - tau)) / theta;
  // breakpoints at multiples of it keep narrow peaks visible to the rule.
  const double width = std::sqrt(8.0 * sm * sm * rest) / th;
  std::vector<double> pts{0.0, tau};
  for (double k : {1.0, 4.0, 16.0}) pts.push_back(std::min(tau, k * width));
  pts.push_back(0.5 * tau);
  pts.push_back(0.9 * tau);
  QuadOptions opt{abs_tol / prefactor, 1e-12, 2'000'000};
  return prefactor * integrate_breakpoints(integrand, pts, opt);
}

}  // namespace

double trivariate_density(const TriQuery& q, const OsbmParams& p) {
  require_positive_horizon(q.t);
  if (q.y == 0.0 || !in_slab(q.t, q.l, q.tau, p.theta)) return 0.0;
  const double sp = p.sigma_plus, sm = p.sigma_minus;
  const double a = q.tau - q.l / p.theta;
  const double b = q.t - q.tau;
  const double hl = 0.5 * q.l;
  if (q.x >= 0.0) {
    if (q.y > 0.0) return first_passage_density(b, hl / sm) * first_passage_density(a, (hl + q.y + q.x) / sp) / (sp * sp);
    return first_passage_density(b, (hl - q.y) / sm) * first_passage_density(a, (hl + q.x) / sp) / (sm * sm);
  }
  if (q.y > 0.0) return first_passage_density(b, (hl - q.x) / sm) * first_passage_density(a, (hl + q.y) / sp) / (sp * sp);
  return first_passage_density(b, (hl - q.y - q.x) / sm) * first_passage_density(a, hl / sp) / (sm * sm);
}

JointValue joint_position_localtime(double t, double x, double y, double l, const OsbmParams& p) {
  require_positive_horizon(t);
  JointValue out;
  out.atom_at_l0 = p0_eval(t, x, y, p);
  if (!(l > 0.0) || !(l < p.theta * t) || y == 0.0) return out;
  const double sp = p.sigma_plus, sm = p.sigma_minus;
  const double s = t - l / p.theta;
  const double lr = l * p.r;
  if (x >= 0.0) {
    out.density = y > 0.0 ? first_passage_density(s, lr + (x + y) / sp) / (sp * sp)
                          : first_passage_density(s, lr + x / sp - y / sm) / (sm * sm);
  } else {
    out.density = y > 0.0 ? first_passage_density(s, lr - x / sm + y / sp) / (sp * sp)
                          : first_passage_density(s, lr - (x + y) / sm) / (sm * sm);
  }
  return out;
}

double localtime_occupation_density(double t, double l, double tau, const OsbmParams& p) {
  require_positive_horizon(t);
  if (!in_slab(t, l, tau, p.theta)) return 0.0;
  const double sp = p.sigma_plus, sm = p.sigma_minus;
  const double a = tau - l / p.theta;
  const double b = t - tau;
  const double zn = 0.5 * l / sm, zp = 0.5 * l / sp;
  return first_passage_density(b, zn) * centred_gauss(a, zp) / sp + centred_gauss(b, zn) * first_passage_density(a, zp) / sm;
}

double occupation_density(double t, double tau, const OsbmParams& p, double abs_tol) {
  return occupation_density_impl(t, tau, p, abs_tol, Bracket::consistent);
}

double localtime_density(double t, double l, const OsbmParams& p) {
  require_positive_horizon(t);
  if (!(l > 0.0) || !(l < p.theta * t)) return 0.0;
  const double s = t - l / p.theta;
  const double lr = l * p.r;
  return 2.0 * p.r / std::sqrt(2.0 * std::numbers::pi * s) * std::exp(-lr * lr / (2.0 * s));
}

Triplet mirror_triplet(const Triplet& sample, double t, const OsbmParams& p) {
  return {-sample.x, sample.l, t - sample.gamma + sample.l / p.theta};
}

double first_passage_convolution(double t, double x1, double x2, double abs_tol) {
  require_positive_horizon(t);
  auto f = [&](double s) { return first_passage_density(s, x1) * first_passage_density(t - s, x2); };
  return integrate_breakpoints(f, {0.0, 0.25 * t, 0.5 * t, 0.75 * t, t}, QuadOptions{abs_tol, 1e-13, 2'000'000});
}

namespace printed {

double trivariate_density(const TriQuery& q, const OsbmParams& p) {
  if (q.x >= 0.0) return osbm::trivariate_density(q, p);
  require_positive_horizon(q.t);
  if (q.y == 0.0 || !in_slab(q.t, q.l, q.tau, p.theta)) return 0.0;
  const double sp = p.sigma_plus, sm = p.sigma_minus;
  const double a = q.tau - q.l / p.theta;
  const double b = q.t - q.tau;
  const double hl = 0.5 * q.l;
  if (q.y > 0.0) return first_passage_density(b, hl / sm) * first_passage_density(a, (hl + q.y) / sp - q.x / sm) / (sp * sp);
  return first_passage_density(b, (hl - q.y) / sm) * first_passage_density(a, hl / sp - q.x / sm) / (sm * sm);
}

double occupation_density(double t, double tau, const OsbmParams& p, double abs_tol) {
  return occupation_density_impl(t, tau, p, abs_tol, Bracket::printed);
}

}  // namespace printed

}  // namespace osbm
