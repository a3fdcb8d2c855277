#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include "doctest.h"
#include "osbm/analytic.hpp"
#include "osbm/quadrature.hpp"
#include "talbot.hpp"

using namespace osbm;

TEST_CASE("erfcx against high-precision values") {
  const struct {
    double z, v;
  } table[] = {{-3.0, 16205.988853999586625}, {-0.5, 1.9523604891825570933}, {0.0, 1.0},
               {0.5, 0.61569034419292587487},  {3.0, 0.17900115118138995042}, {10.0, 0.056140992743822585858},
               {30.0, 0.018795888861416751497}, {1000.0, 0.0005641893014533876542}};
  for (const auto& row : table) CHECK(erfcx(row.z) == doctest::Approx(row.v).epsilon(1e-13));
}

TEST_CASE("first-passage density") {
  CHECK(h_eval(1.0, 1.0) == doctest::Approx(0.2419707245191433498).epsilon(1e-14));
  CHECK(h_eval(0.3, 0.2) == doctest::Approx(0.45426075035743180707).epsilon(1e-14));
  CHECK(first_passage_density(0.0, 1.0) == 0.0);
  CHECK(first_passage_density(1.0, 0.0) == 0.0);
  CHECK_THROWS_AS(h_eval(0.0, 1.0), Error);
  // A first-passage law: total mass 1 and the distribution function in closed form.
  const double mass = integrate_to_infinity([](double s) { return first_passage_density(s, 0.7); }, 0.0, {1e-11}).value;
  // The s^{-3/2} tail becomes an endpoint singularity under the half-line map,
  // which caps the attainable accuracy near 1e-8.
  CHECK(std::abs(mass - 1.0) < 2e-8);
  const double cdf = integrate([](double s) { return first_passage_density(s, 0.7); }, 0.0, 2.0, {1e-13});
  CHECK(std::abs(cdf - first_passage_cdf(2.0, 0.7)) < 1e-12);
}

TEST_CASE("sticky factor: atom of the symmetric sticky case") {
  const OsbmParams p = make_params(1.0, 1.0, 1.0);
  CHECK(g_eval(1.0, 0.0, p) / p.theta == doctest::Approx(0.33620400244634121285).epsilon(1e-14));
  const OsbmParams q = make_params(1.0, 2.0, 0.5);
  CHECK(g_eval(1.0, 0.0, q) / q.theta == doctest::Approx(0.60046492467990187274).epsilon(1e-14));
  CHECK(g_eval(1.0, 0.5, q) / q.theta == doctest::Approx(0.40729053758329211587).epsilon(1e-14));
}

TEST_CASE("sticky factor against a Talbot inversion of its transform") {
  // The transform is theta e^{-gamma z} / (lambda + gamma r theta) with gamma = sqrt(2 lambda).
  for (const OsbmParams& p : {make_params(1, 1, 1), make_params(1, 2, 0.5), make_params(2, 1, 3)}) {
    for (double z : {0.0, 0.3, 1.2}) {
      auto transform = [&](std::complex<double> lambda) {
        const auto gamma = std::sqrt(2.0 * lambda);
        return p.theta * std::exp(-gamma * z) / (lambda + gamma * p.r * p.theta);
      };
      for (double s : {0.25, 1.0, 3.0}) {
        CHECK(std::abs(talbot_invert(transform, s) - g_eval(s, z, p)) < 1e-9);
      }
    }
  }
}

TEST_CASE("stable evaluation far in the tail") {
  const OsbmParams p = make_params(1.0, 1.0, 50.0);
  const double v = g_eval(100.0, 0.0, p);
  CHECK(std::isfinite(v));
  CHECK(v > 0.0);
  // Leading asymptotics theta / (r theta sqrt(2 pi s)).
  CHECK(v == doctest::Approx(1.0 / (p.r * std::sqrt(2.0 * std::numbers::pi * 100.0))).epsilon(1e-3));
  CHECK(g_eval(1e-12, 5.0, p) >= 0.0);
}

TEST_CASE("tail integral of the sticky factor") {
  const OsbmParams p = make_params(1.0, 2.0, 0.5);
  for (double z : {0.0, 0.4, 2.0}) {
    const double num = integrate_to_infinity([&](double w) { return g_eval(1.3, w, p); }, z, {1e-13}).value;
    CHECK(std::abs(num - g_tail(1.3, z, p)) < 1e-11);
  }
}

TEST_CASE("killed kernel") {
  const OsbmParams p = make_params(1.0, 2.0, 0.5);
  CHECK(p0_eval(1.0, 0.5, -0.5, p) == 0.0);
  CHECK(p0_eval(1.0, 0.5, 0.5, p) > 0.0);
  // Distribution function in closed form.
  for (double y : {0.1, 0.8, 3.0}) {
    const double num = integrate([&](double v) { return p0_eval(1.0, 0.5, v, p); }, 0.0, y, {1e-13});
    CHECK(std::abs(num - p0_cdf(1.0, 0.5, y, p)) < 1e-12);
  }
  for (double y : {-0.1, -1.5}) {
    const double num = integrate([&](double v) { return p0_eval(1.0, -0.7, v, p); }, y, 0.0, {1e-13});
    CHECK(std::abs(num - (p0_cdf(1.0, -0.7, 0.0, p) - p0_cdf(1.0, -0.7, y, p))) < 1e-12);
  }
}

TEST_CASE("hitting-time transform decays on both sides") {
  const OsbmParams p = make_params(1.0, 2.0, 0.5);
  CHECK(h_laplace(1.0, 0.0, p) == 1.0);
  CHECK(h_laplace(1.0, 1.0, p) < 1.0);
  CHECK(h_laplace(1.0, -1.0, p) < 1.0);
  CHECK(printed::h_laplace(1.0, -1.0, p) > 1.0);
  CHECK_THROWS_AS(h_laplace(0.0, 1.0, p), Error);
}
