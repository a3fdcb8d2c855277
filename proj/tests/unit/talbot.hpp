#pragma once

// Fixed Talbot inversion of a Laplace transform (Abate and Valko, 2004).
// Independent of the library: it only sees the transform as a function of
// a complex argument, so it serves as an oracle for the closed forms.

#include <cmath>
#include <complex>
#include <numbers>

template <class F>
double talbot_invert(F&& transform, double t, int m = 32) {
  using cd = std::complex<double>;
  const double r = 2.0 * m / (5.0 * t);
  double sum = 0.5 * std::exp(r * t) * std::real(transform(cd(r, 0.0)));
  for (int k = 1; k < m; ++k) {
    const double th = k * std::numbers::pi / m;
    const double cot = std::cos(th) / std::sin(th);
    const cd s = r * th * cd(cot, 1.0);
    const double sigma = th + (th * cot - 1.0) * cot;
    sum += std::real(std::exp(t * s) * transform(s) * cd(1.0, sigma));
  }
  return r / m * sum;
}
