// Quadrature helpers.
//
// Adaptive Gauss-Kronrod (15-point, Boost.Math) for smooth integrands, and a
// real-line variant that truncates at 10 standard deviations around the
// integrand's Gaussian envelope. Complex integrands are split into real and
// imaginary parts. The uniform-grid trapezoid rule backs all kernel
// composition.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "omqm/errors.hpp"

namespace omqm::quad {

inline constexpr double kTailSigmas = 10.0;
inline constexpr unsigned kMaxDepth = 20;

template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-12) {
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, kMaxDepth, tol, &err);
  if (!std::isfinite(value)) throw NumericError("non-finite quadrature result");
  return value;
}

template <class F>
std::complex<double> integrate_complex(F&& f, double a, double b,
                                       double tol = 1e-12) {
  const double re = integrate([&](double x) { return std::real(f(x)); }, a, b, tol);
  const double im = integrate([&](double x) { return std::imag(f(x)); }, a, b, tol);
  return {re, im};
}

// Integral over R of an integrand dominated by a Gaussian of the given
// centre and standard deviation. Truncated at +-10 sd, where the envelope is
// below 2e-22 of its peak.
template <class F>
double integrate_gaussian(F&& f, double center, double sd, double tol = 1e-12) {
  const double half = kTailSigmas * sd;
  // Split at the centre so the peak sits on a panel boundary.
  return integrate(f, center - half, center, tol) +
         integrate(f, center, center + half, tol);
}

template <class F>
std::complex<double> integrate_gaussian_complex(F&& f, double center, double sd,
                                                double tol = 1e-12) {
  const double half = kTailSigmas * sd;
  return integrate_complex(f, center - half, center, tol) +
         integrate_complex(f, center, center + half, tol);
}

// Uniform grid on [-half_width, half_width] with an odd or even point count.
struct UniformGrid {
  double half_width = 8.0;
  std::size_t points = 401;

  double spacing() const { return 2.0 * half_width / static_cast<double>(points - 1); }
  double x(std::size_t i) const {
    return -half_width + spacing() * static_cast<double>(i);
  }

  std::vector<double> nodes() const {
    std::vector<double> xs(points);
    for (std::size_t i = 0; i < points; ++i) xs[i] = x(i);
    return xs;
  }

  std::vector<double> trapezoid_weights() const {
    std::vector<double> w(points, spacing());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
  }

  void validate() const {
    if (points < 3) throw GridError("grid needs at least 3 points");
    if (!(half_width > 0.0) || !std::isfinite(half_width))
      throw GridError("grid half-width must be finite and > 0");
  }
};

inline double trapezoid(std::span<const double> values, double spacing) {
  if (values.size() < 2) return 0.0;
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
  return sum * spacing;
}

}  // namespace omqm::quad
