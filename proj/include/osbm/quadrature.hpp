#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <vector>

#include "osbm/error.hpp"

namespace osbm {

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  std::size_t max_evals = 1'000'000;
};

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

namespace detail {

/// 21-point Kronrod rule with its embedded 10-point Gauss rule. Abscissae
/// are the non-negative nodes in increasing order; odd indices are Gauss
/// nodes.
struct Kronrod21 {
  std::array<double, 11> nodes;
  std::array<double, 11> kronrod_weights;
  std::array<double, 5> gauss_weights;
};

const Kronrod21& kronrod21();

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const noexcept { return error < o.error; }
};

template <class F>
Segment gk21(F& f, double a, double b) {
  const auto& rule = kronrod21();
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f0 = f(centre);
  double kronrod = f0 * rule.kronrod_weights[0];
  double gauss = 0.0;
  double abs_sum = std::abs(kronrod);
  std::array<double, 10> fplus{}, fminus{};
  for (int i = 1; i <= 10; ++i) {
    const double dx = half * rule.nodes[i];
    const double lo = f(centre - dx);
    const double hi = f(centre + dx);
    fminus[i - 1] = lo;
    fplus[i - 1] = hi;
    kronrod += rule.kronrod_weights[i] * (lo + hi);
    abs_sum += rule.kronrod_weights[i] * (std::abs(lo) + std::abs(hi));
    if (i % 2 == 1) gauss += rule.gauss_weights[(i - 1) / 2] * (lo + hi);
  }
  const double mean = 0.5 * kronrod;
  double asc = rule.kronrod_weights[0] * std::abs(f0 - mean);
  for (int i = 1; i <= 10; ++i) {
    asc += rule.kronrod_weights[i] * (std::abs(fminus[i - 1] - mean) + std::abs(fplus[i - 1] - mean));
  }
  const double ah = std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  asc *= ah;
  abs_sum *= ah;
  // QUADPACK's empirical rescaling of the Kronrod-Gauss difference.
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * abs_sum, err);
  return {a, b, kronrod * half, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod quadrature on a finite interval: the
/// segment with the largest error estimate is bisected until the summed
/// estimate meets max(abs_tol, rel_tol * |value|) or the evaluation budget is
/// spent. Never throws; inspect `converged`.
template <class F>
  requires std::invocable<F&, double>
QuadResult integrate_adaptive(F&& f, double a, double b, const QuadOptions& opt = {}) {
  QuadResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::vector<detail::Segment> heap;
  heap.push_back(detail::gk21(f, a, b));
  out.evaluations = 21;
  double value = heap.front().value;
  double error = heap.front().error;
  std::size_t since_resum = 0;
  while (true) {
    if (error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) {
      out.converged = true;
      break;
    }
    if (out.evaluations + 42 > opt.max_evals) break;
    std::pop_heap(heap.begin(), heap.end());
    const detail::Segment worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) {
      // Interval exhausted at machine resolution; keep it and stop.
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end());
      break;
    }
    const detail::Segment left = detail::gk21(f, worst.a, mid);
    const detail::Segment right = detail::gk21(f, mid, worst.b);
    out.evaluations += 42;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end());
    if (++since_resum == 64) {
      since_resum = 0;
      value = 0.0;
      error = 0.0;
      for (const auto& s : heap) {
        value += s.value;
        error += s.error;
      }
    }
  }
  value = 0.0;
  error = 0.0;
  for (const auto& s : heap) {
    value += s.value;
    error += s.error;
  }
  out.value = value;
  out.abs_error = error;
  if (!out.converged) out.converged = error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value));
  return out;
}

/// Same as integrate_adaptive but throws QuadratureError on non-convergence.
template <class F>
  requires std::invocable<F&, double>
double integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
  const QuadResult r = integrate_adaptive(f, a, b, opt);
  if (!r.converged) throw QuadratureError(r.value, r.abs_error);
  return r.value;
}

/// Integral over [a, inf) through s = a + u / (1 - u).
template <class F>
  requires std::invocable<F&, double>
QuadResult integrate_to_infinity(F&& f, double a, const QuadOptions& opt = {}) {
  auto mapped = [&](double u) {
    const double w = 1.0 - u;
    const double s = a + u / w;
    if (!std::isfinite(s)) return 0.0;
    return f(s) / (w * w);
  };
  return integrate_adaptive(mapped, 0.0, 1.0, opt);
}

/// Integral over (-inf, b] through s = b - u / (1 - u).
template <class F>
  requires std::invocable<F&, double>
QuadResult integrate_from_minus_infinity(F&& f, double b, const QuadOptions& opt = {}) {
  auto mapped = [&](double u) {
    const double w = 1.0 - u;
    const double s = b - u / w;
    if (!std::isfinite(s)) return 0.0;
    return f(s) / (w * w);
  };
  return integrate_adaptive(mapped, 0.0, 1.0, opt);
}

/// Numeric Laplace transform int_0^inf e^{-lambda s} f(s) ds.
///
/// The substitution s = u^2 removes integrable s^{-1/2} endpoint
/// singularities before the half-line is mapped onto [0, 1). Throws
/// NonPositiveLambda or QuadratureError.
template <class F>
  requires std::invocable<F&, double>
double laplace_numeric(F&& f, double lambda, double tol = 1e-10, std::size_t max_evals = 1'000'000) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::NonPositiveLambda, "Laplace variable must be positive");
  }
  auto integrand = [&](double u) {
    const double s = u * u;
    const double weight = std::exp(-lambda * s);
    if (weight == 0.0) return 0.0;
    return 2.0 * u * weight * f(s);
  };
  const QuadResult r = integrate_to_infinity(integrand, 0.0, QuadOptions{tol, 0.0, max_evals});
  if (!r.converged) throw QuadratureError(r.value, r.abs_error);
  return r.value;
}

}  // namespace osbm
