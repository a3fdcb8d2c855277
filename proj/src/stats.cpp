#include "osbm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>

#include "osbm/error.hpp"
#include "osbm/quadrature.hpp"

namespace osbm {

namespace {

constexpr double kKs1pct = 1.6276236115189356;  // sqrt(-log(0.005) / 2)

}  // namespace

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf, std::span<const Atom> atoms,
                   std::size_t total) {
  if (sample.empty()) throw Error(ErrorCode::EmptySample, "Kolmogorov-Smirnov distance of an empty sample");
  std::sort(sample.begin(), sample.end());
  const double denom = static_cast<double>(std::max(total, sample.size()));
  auto jump_at = [&](double v) {
    double j = 0.0;
    for (const Atom& a : atoms) {
      if (a.location == v) j += a.mass;
    }
    return j;
  };
  double d = 0.0;
  std::size_t i = 0;
  while (i < sample.size()) {
    std::size_t j = i;
    while (j < sample.size() && sample[j] == sample[i]) ++j;
    const double v = sample[i];
    const double f = cdf(v);
    const double f_left = f - jump_at(v);
    d = std::max(d, std::abs(static_cast<double>(j) / denom - f));
    d = std::max(d, std::abs(static_cast<double>(i) / denom - f_left));
    i = j;
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptySample, "two-sample test with an empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() || j < b.size()) {
    double v;
    if (j >= b.size() || (i < a.size() && a[i] <= b[j])) {
      v = a[i];
    } else {
      v = b[j];
    }
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical_1pct(std::size_t n) { return kKs1pct / std::sqrt(static_cast<double>(n)); }

double ks_critical_1pct(std::size_t n, std::size_t m) {
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return kKs1pct * std::sqrt((nn + mm) / (nn * mm));
}

double chi_square_quantile(double probability, double df) {
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(df), probability);
}

MeanStat mean_stat(std::span<const double> values) {
  MeanStat s;
  s.n = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.standard_error = std::sqrt(ss / static_cast<double>(s.n - 1) / static_cast<double>(s.n));
  }
  return s;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptySample, "median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

TabulatedCdf::TabulatedCdf(const std::function<double(double)>& density, double lo, double hi, std::size_t nodes,
                           double abs_tol) {
  nodes_.resize(nodes + 1);
  values_.resize(nodes + 1);
  for (std::size_t i = 0; i <= nodes; ++i) {
    const double c = 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(nodes)));
    nodes_[i] = lo + (hi - lo) * c;
  }
  nodes_.front() = lo;
  nodes_.back() = hi;
  values_[0] = 0.0;
  const QuadOptions opt{abs_tol / static_cast<double>(nodes), 1e-12, 200'000};
  for (std::size_t i = 1; i <= nodes; ++i) {
    const QuadResult r = integrate_adaptive(density, nodes_[i - 1], nodes_[i], opt);
    values_[i] = values_[i - 1] + r.value;
  }
}

double TabulatedCdf::operator()(double v) const {
  if (v <= nodes_.front()) return 0.0;
  if (v >= nodes_.back()) return values_.back();
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), v);
  const std::size_t k = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  const double frac = (v - nodes_[k]) / (nodes_[k + 1] - nodes_[k]);
  return values_[k] + frac * (values_[k + 1] - values_[k]);
}

double TabulatedCdf::quantile(double q) const {
  if (q <= 0.0) return nodes_.front();
  if (q >= values_.back()) return nodes_.back();
  const auto it = std::lower_bound(values_.begin(), values_.end(), q);
  const std::size_t k = static_cast<std::size_t>(it - values_.begin());
  if (k == 0) return nodes_.front();
  const double span = values_[k] - values_[k - 1];
  const double frac = span > 0.0 ? (q - values_[k - 1]) / span : 0.0;
  return nodes_[k - 1] + frac * (nodes_[k] - nodes_[k - 1]);
}

}  // namespace osbm
