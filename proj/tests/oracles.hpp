// Test-only reference computations. Nothing here calls into the omqm
// implementation: these are brute-force checks the library is measured
// against.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <random>

namespace oracle {

// Composite Simpson on [a, b] with n (even) panels.
template <class F>
auto simpson(F&& f, double a, double b, std::size_t n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / static_cast<double>(n);
  auto sum = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i) {
    const double x = a + h * static_cast<double>(i);
    sum += (i % 2 ? 4.0 : 2.0) * f(x);
  }
  return sum * (h / 3.0);
}

// Central difference, step h.
template <class F>
double central_diff(F&& f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Five-point central difference, fourth order.
template <class F>
double central_diff4(F&& f, double x, double h = 1e-3) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}

// Classical RK4 for x' = rhs(t, x) from t0 to t1 in n steps.
template <class Rhs>
double rk4(Rhs&& rhs, double x0, double t0, double t1, std::size_t n) {
  const double h = (t1 - t0) / static_cast<double>(n);
  double x = x0, t = t0;
  for (std::size_t i = 0; i < n; ++i) {
    const double k1 = rhs(t, x);
    const double k2 = rhs(t + h / 2, x + h / 2 * k1);
    const double k3 = rhs(t + h / 2, x + h / 2 * k2);
    const double k4 = rhs(t + h, x + h * k3);
    x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += h;
  }
  return x;
}

// Plain normal density written out independently of the library.
inline double gaussian(double x, double mean, double var) {
  return std::exp(-(x - mean) * (x - mean) / (2 * var)) / std::sqrt(2 * M_PI * var);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace oracle
