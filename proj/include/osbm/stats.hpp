#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace osbm {

/// A point mass of a mixed distribution.
struct Atom {
  double location = 0.0;
  double mass = 0.0;
};

/// Sup distance between the empirical distribution of `sample` and a
/// right-continuous distribution function `cdf` whose jumps are listed in
/// `atoms` (needed for the left limits at those points). Ties in the sample
/// are handled exactly. When `total` exceeds the sample size the empirical
/// function is the sub-distribution #{x_i <= v} / total, so a density that
/// only carries part of the mass can be compared with the matching part of
/// a sample. Throws Error(EmptySample).
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf,
                   std::span<const Atom> atoms = {}, std::size_t total = 0);

/// Two-sample Kolmogorov-Smirnov statistic. Throws Error(EmptySample).
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Asymptotic 1% critical values of the one- and two-sample KS statistics.
double ks_critical_1pct(std::size_t n);
double ks_critical_1pct(std::size_t n, std::size_t m);

/// Upper quantile of the chi-square law with `df` degrees of freedom.
double chi_square_quantile(double probability, double df);

struct MeanStat {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t n = 0;
};

/// Sample mean and its standard error (unbiased variance over n).
MeanStat mean_stat(std::span<const double> values);

double median(std::vector<double> values);

/// Distribution function of a density on [lo, hi] tabulated by adaptive
/// quadrature between Chebyshev-clustered nodes and interpolated linearly.
/// The clustering resolves integrable endpoint singularities. The value
/// is the integral from lo; `mass()` is the integral over the whole interval.
class TabulatedCdf {
 public:
  TabulatedCdf(const std::function<double(double)>& density, double lo, double hi, std::size_t nodes = 400,
               double abs_tol = 1e-11);

  double operator()(double v) const;
  double mass() const noexcept { return values_.back(); }
  /// Smallest v with F(v) >= q (linear inverse on the table).
  double quantile(double q) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> values_;
};

}  // namespace osbm
