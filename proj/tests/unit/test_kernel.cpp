#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "osbm/kernel.hpp"
#include "talbot.hpp"

using namespace osbm;
using cd = std::complex<double>;

namespace {

const std::vector<OsbmParams>& lattice() {
  static const std::vector<OsbmParams> ps{make_params(1, 1, 1), make_params(1, 2, 0.5), make_params(2, 1, 3)};
  return ps;
}

// Resolvent written for a complex argument straight from its definition:
// killed part, plus the hitting transform times the resolvent from 0.
cd resolvent_complex(cd lambda, double x, double y, const OsbmParams& p) {
  const cd gamma = std::sqrt(2.0 * lambda);
  const cd rho = lambda + gamma * p.r * p.theta;
  const double sx = sigma_at(p, x), sy = sigma_at(p, y);
  cd killed = 0.0;
  if ((x > 0.0 && y > 0.0) || (x < 0.0 && y < 0.0)) {
    killed = (std::exp(-gamma * std::abs(x - y) / sx) - std::exp(-gamma * (std::abs(x) + std::abs(y)) / sx)) /
             (gamma * sx);
  }
  const cd hit = std::exp(-gamma * std::abs(x) / sx);
  return killed + hit * p.theta * std::exp(-gamma * std::abs(y) / sy) / (sy * sy * rho);
}

cd resolvent_atom_complex(cd lambda, double x, const OsbmParams& p) {
  const cd gamma = std::sqrt(2.0 * lambda);
  return std::exp(-gamma * std::abs(x) / sigma_at(p, x)) / (lambda + gamma * p.r * p.theta);
}

}  // namespace

TEST_CASE("transition density against Talbot inversion of the resolvent") {
  for (const auto& p : lattice()) {
    for (double x : {-1.0, 0.0, 0.5}) {
      for (double y : {-1.3, -0.2, 0.1, 0.9}) {
        for (double t : {0.5, 2.0}) {
          const double inv = talbot_invert([&](cd l) { return resolvent_complex(l, x, y, p); }, t);
          CHECK(std::abs(inv - transition_density(t, x, y, p)) < 1e-8);
        }
      }
      const double inv_atom = talbot_invert([&](cd l) { return resolvent_atom_complex(l, x, p); }, 1.0);
      CHECK(std::abs(inv_atom - transition_atom(1.0, x, p)) < 1e-9);
    }
  }
}

TEST_CASE("kernel mass and distribution function") {
  for (const auto& p : lattice()) {
    for (double x : {-1.0, 0.0, 2.0}) {
      CHECK(std::abs(transition_mass(0.7, x, p).total() - 1.0) < 1e-9);
      const double atom = transition_atom(0.7, x, p);
      CHECK(transition_cdf(0.7, x, 0.0, p) - transition_cdf(0.7, x, -1e-12, p) == doctest::Approx(atom).epsilon(1e-6));
      CHECK(transition_cdf(0.7, x, -60.0, p) < 1e-15);
      CHECK(transition_cdf(0.7, x, 60.0, p) == doctest::Approx(1.0).epsilon(1e-14));
      double prev = 0.0;
      for (double y = -6.0; y <= 6.0; y += 0.37) {
        const double f = transition_cdf(0.7, x, y, p);
        CHECK(f >= prev - 1e-15);
        prev = f;
      }
    }
  }
}

TEST_CASE("mirror symmetry of the kernel") {
  for (const auto& p : lattice()) {
    const OsbmParams q = mirrored(p);
    for (double x : {-0.8, 0.0, 0.6}) {
      CHECK(transition_atom(1.1, x, p) == doctest::Approx(transition_atom(1.1, -x, q)).epsilon(1e-14));
      for (double y : {-1.0, -0.1, 0.4}) {
        CHECK(transition_density(1.1, x, y, p) == doctest::Approx(transition_density(1.1, -x, -y, q)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("Chapman-Kolmogorov through the sticky point") {
  const OsbmParams p = make_params(1.0, 2.0, 0.5);
  const double s = 0.4, t = 0.6, x = 0.3;
  for (double y : {-0.9, 0.5}) {
    auto f = [&](double z) { return transition_density(s, x, z, p) * transition_density(t, z, y, p); };
    const double cont = integrate(f, -30.0, 0.0, {1e-12}) + integrate(f, 0.0, 30.0, {1e-12});
    const double lhs = transition_density(s + t, x, y, p);
    CHECK(std::abs(lhs - (cont + transition_atom(s, x, p) * transition_density(t, 0.0, y, p))) < 1e-8);
  }
  auto fa = [&](double z) { return transition_density(s, x, z, p) * transition_atom(t, z, p); };
  const double atom = integrate(fa, -30.0, 0.0, {1e-12}) + integrate(fa, 0.0, 30.0, {1e-12}) +
                      transition_atom(s, x, p) * transition_atom(t, 0.0, p);
  CHECK(std::abs(atom - transition_atom(s + t, x, p)) < 1e-8);
}

TEST_CASE("resolvent identities") {
  for (const auto& p : lattice()) {
    for (double lambda : {0.5, 2.0}) {
      CHECK(std::abs(lambda * resolvent_mass(lambda, 0.4, p).total() - 1.0) < 1e-9);
      const double gamma = std::sqrt(2.0 * lambda);
      const double rho = lambda + gamma * p.r * p.theta;
      CHECK(resolvent_atom(lambda, 0.0, p) == doctest::Approx(1.0 / rho).epsilon(1e-14));
      CHECK(exit_prob_at_T(lambda, p) == doctest::Approx(lambda / rho).epsilon(1e-14));
      CHECK(resolvent_density(lambda, 0.0, -0.3, p) == doctest::Approx(resolvent_at_zero_density(lambda, -0.3, p)));
      CHECK(killed_resolvent_density(lambda, 0.5, -0.5, p) == 0.0);
      CHECK(killed_resolvent(lambda, -0.5, p).atom_at_zero() == 0.0);
    }
  }
}

TEST_CASE("kernel errors and limits") {
  const OsbmParams p = make_params(1.0, 2.0, 0.5);
  CHECK_THROWS_AS(transition_density(0.0, 0.0, 1.0, p), Error);
  CHECK_THROWS_AS(transition_atom(-1.0, 0.0, p), Error);
  CHECK_THROWS_AS(resolvent(0.0, 0.0, p), Error);
  // Large theta: the atom vanishes and the density approaches the oscillating motion.
  const OsbmParams q = make_params(1.0, 2.0, 1e6);
  CHECK(transition_atom(1.0, 0.0, q) < 1e-5);
  // Symmetric sticky case is symmetric in y.
  const OsbmParams s = make_params(1.0, 1.0, 1.0);
  CHECK(transition_density(1.0, 0.0, 0.7, s) == doctest::Approx(transition_density(1.0, 0.0, -0.7, s)).epsilon(1e-15));
}

TEST_CASE("rejected case rule breaks mass conservation") {
  const OsbmParams p = make_params(1.0, 2.0, 0.5);
  CHECK(printed::transition_density(1.0, -0.5, 0.5, p) == 0.0);
  CHECK(printed::transition_density(1.0, -0.5, -0.5, p) > transition_density(1.0, -0.5, -0.5, p));
  CHECK(printed::transition_density(1.0, 0.5, 0.5, p) == transition_density(1.0, 0.5, 0.5, p));
}
