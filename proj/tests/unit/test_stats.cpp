#include <cmath>
#include <numbers>

#include "doctest.h"
#include "osbm/analytic.hpp"
#include "osbm/rng.hpp"
#include "osbm/stats.hpp"

using namespace osbm;

TEST_CASE("KS distance on a hand-checked sample") {
  const std::vector<double> s{0.1, 0.4, 0.4, 0.9};
  auto uniform = [](double v) { return std::clamp(v, 0.0, 1.0); };
  // Steps at 0.1 (1/4), 0.4 (3/4) and 0.9 (1): the largest gap is 0.75 - 0.4.
  CHECK(ks_distance(s, uniform) == doctest::Approx(0.35));
  CHECK_THROWS_AS(ks_distance({}, uniform), Error);
}

TEST_CASE("KS distance with an atom uses the left limit") {
  // Half the mass at 0, the rest uniform on (0, 1].
  auto cdf = [](double v) { return v < 0.0 ? 0.0 : 0.5 + 0.5 * std::min(v, 1.0); };
  const std::vector<Atom> atoms{{0.0, 0.5}};
  std::vector<double> s(1000, 0.0);
  for (int i = 0; i < 500; ++i) s[500 + i] = (i + 0.5) / 500.0;
  CHECK(ks_distance(s, cdf, atoms) < 0.002);
  // Moving the atom mass away from zero is detected.
  std::vector<double> shifted(s);
  for (int i = 0; i < 500; ++i) shifted[i] = 0.3;
  CHECK(ks_distance(shifted, cdf, atoms) > 0.1);
}

TEST_CASE("sub-distribution KS") {
  // 40 of 100 draws carry a density of mass 0.4.
  std::vector<double> s;
  for (int i = 0; i < 40; ++i) s.push_back((i + 0.5) / 40.0);
  auto part = [](double v) { return 0.4 * std::clamp(v, 0.0, 1.0); };
  CHECK(ks_distance(s, part, {}, 100) < 0.01);
}

TEST_CASE("KS statistics reject and accept") {
  RandomStream rng(RngSpec{3, 0});
  std::vector<double> a(4000), b(4000), c(4000);
  for (auto& v : a) v = rng.normal();
  for (auto& v : b) v = rng.normal();
  for (auto& v : c) v = 0.2 + rng.normal();
  CHECK(ks_distance(a, normal_cdf) < ks_critical_1pct(a.size()));
  CHECK(ks_two_sample(a, b) < ks_critical_1pct(a.size(), b.size()));
  CHECK(ks_two_sample(a, c) > ks_critical_1pct(a.size(), c.size()));
  CHECK(ks_critical_1pct(10000) == doctest::Approx(0.016276).epsilon(1e-4));
}

TEST_CASE("chi-square quantile, mean and median") {
  CHECK(chi_square_quantile(0.99, 1.0) == doctest::Approx(6.6348966).epsilon(1e-7));
  CHECK(chi_square_quantile(0.99, 10.0) == doctest::Approx(23.2092512).epsilon(1e-7));
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const MeanStat m = mean_stat(v);
  CHECK(m.mean == 2.5);
  CHECK(m.standard_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(median(v) == 2.5);
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
}

TEST_CASE("tabulated distribution function") {
  // Arcsine density with both endpoint singularities.
  auto arcsine = [](double t) {
    return t > 0.0 && t < 1.0 ? 1.0 / (std::numbers::pi * std::sqrt(t * (1.0 - t))) : 0.0;
  };
  const TabulatedCdf F(arcsine, 0.0, 1.0, 800, 1e-10);
  CHECK(F.mass() == doctest::Approx(1.0).epsilon(1e-8));
  for (double t : {0.01, 0.3, 0.5, 0.97}) {
    // Linear interpolation between nodes bounds the accuracy.
    CHECK(std::abs(F(t) - 2.0 / std::numbers::pi * std::asin(std::sqrt(t))) < 1e-5);
  }
  CHECK(F.quantile(0.5) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(F(-1.0) == 0.0);
  CHECK(F(2.0) == F.mass());
}
