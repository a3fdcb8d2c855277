#include <cmath>
#include <numbers>

#include "doctest.h"
#include "osbm/quadrature.hpp"

using namespace osbm;

TEST_CASE("a single Kronrod panel integrates polynomials up to degree 31 exactly") {
  for (int degree : {0, 5, 17, 31}) {
    auto f = [&](double x) { return (degree + 1) * std::pow(x, degree); };
    auto g = f;
    const auto seg = detail::gk21(g, 0.0, 1.0);
    CHECK(seg.value == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("adaptive quadrature meets the requested tolerance") {
  const QuadResult r = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, {1e-13});
  CHECK(r.converged);
  CHECK(std::abs(r.value - 2.0) < 1e-13);

  // Integrable endpoint singularity.
  const double s = integrate([](double x) { return x > 0.0 ? 1.0 / std::sqrt(x) : 0.0; }, 0.0, 1.0, {1e-10});
  CHECK(std::abs(s - 2.0) < 1e-9);
}

TEST_CASE("half-line maps") {
  const QuadResult up = integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0, {1e-12});
  CHECK(std::abs(up.value - 1.0) < 1e-12);
  const QuadResult down = integrate_from_minus_infinity([](double x) { return std::exp(-x * x); }, 0.0, {1e-12});
  CHECK(std::abs(down.value - 0.5 * std::sqrt(std::numbers::pi)) < 1e-12);
}

TEST_CASE("numeric Laplace transform handles an inverse square root at 0") {
  for (double lambda : {0.5, 1.0, 4.0}) {
    const double v = laplace_numeric([](double s) { return 1.0 / std::sqrt(s); }, lambda, 1e-12);
    CHECK(std::abs(v - std::sqrt(std::numbers::pi / lambda)) < 1e-10);
  }
  CHECK_THROWS_AS(laplace_numeric([](double) { return 1.0; }, 0.0), Error);
}

TEST_CASE("an exhausted budget is reported, not hidden") {
  auto wild = [](double x) { return std::sin(1.0 / (x + 1e-9)); };
  const QuadResult r = integrate_adaptive(wild, 0.0, 1.0, {1e-14, 0.0, 200});
  CHECK_FALSE(r.converged);
  CHECK_THROWS_AS(integrate(wild, 0.0, 1.0, {1e-14, 0.0, 200}), QuadratureError);
}
