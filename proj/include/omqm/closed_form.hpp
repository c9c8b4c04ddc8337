// Closed-form densities of the thermodynamic theory, the oscillator
// propagator, and the Wick-rotation identity between them.
//
// All densities here are normalized. With a = gamma (tau2 - tau1) and
// u = exp(-a), the two-gate function is the Gaussian
//
//   f(x2 | x1; a) = N(x2; u x1, (k_B/s)(1 - u^2)),
//
// which is the textbook Onsager-Machlup transition law written in normalized
// form. Continuing a -> i omega t gives
//
//   f(x2 | x1; i omega t) = exp(i omega t / 2 - dV / (hbar omega)) K(x2, t | x1, 0)
//
// exactly. Written with unnormalized densities the identity picks up an extra
// factor sqrt(2 m omega / hbar); that factor is absent here.
//
// Complex square roots take the principal branch, arg in (-pi, pi].

#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "omqm/errors.hpp"
#include "omqm/params.hpp"

namespace omqm {

// A (position, time) event at which a probability gate is evaluated.
struct Gate {
  double x = 0.0;
  double tau = 0.0;
};

// Complex amplitude; every square root feeding one is principal-branch.
using ComplexAmplitude = std::complex<double>;

inline constexpr double kDefaultCausticEpsilon = 1e-8;

// Equilibrium fluctuation law: sqrt(s / (2 pi k_B)) exp(-s x^2 / (2 k_B)).
inline double stationary_density(const ThermoParams& tp, double x) {
  const double var = tp.stationary_variance();
  return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

inline double transition_mean(double x1, double a) { return std::exp(-a) * x1; }

// (k_B/s)(1 - e^{-2a}), via expm1 so short lags keep full precision.
inline double transition_variance(const ThermoParams& tp, double a) {
  return tp.stationary_variance() * -std::expm1(-2.0 * a);
}

// Two-gate density in reduced time a = gamma * (tau2 - tau1) > 0.
inline double transition_density(const ThermoParams& tp, double x2, double x1,
                                  double a) {
  if (!(a > 0.0)) throw OrderingError("reduced lag must be > 0");
  const double var = transition_variance(tp, a);
  const double d = x2 - transition_mean(x1, a);
  return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

inline double transition_cdf(const ThermoParams& tp, double x2, double x1,
                             double a) {
  const double sd = std::sqrt(transition_variance(tp, a));
  return 0.5 * std::erfc(-(x2 - transition_mean(x1, a)) / (sd * std::numbers::sqrt2));
}

// f(x2, tau2 | x1, tau1); requires tau2 > tau1.
inline double conditional_density(const ThermoParams& tp, const Gate& g2,
                                  const Gate& g1) {
  if (!(g2.tau > g1.tau)) {
    throw OrderingError("conditional density needs tau2 > tau1");
  }
  return transition_density(tp, g2.x, g1.x, tp.gamma() * (g2.tau - g1.tau));
}

// Analytic continuation of transition_density to complex reduced time.
inline std::complex<double> continued_transition_density(const ThermoParams& tp,
                                                         double x2, double x1,
                                                         std::complex<double> a) {
  const std::complex<double> u = std::exp(-a);
  const std::complex<double> one_minus_u2 = 1.0 - u * u;
  const double beta = tp.s() / (2.0 * tp.k_B());
  const std::complex<double> d = x2 - u * x1;
  const std::complex<double> prefactor =
      std::sqrt(beta / (std::numbers::pi * one_minus_u2));
  return prefactor * std::exp(-beta * d * d / one_minus_u2);
}

// |psi_0(x)|^2 = sqrt(m omega / (pi hbar)) exp(-m omega x^2 / hbar).
inline double ground_state_density(const QuantumParams& qp, double x) {
  const double beta = qp.m() * qp.omega() / qp.hbar();
  return std::sqrt(beta / std::numbers::pi) * std::exp(-beta * x * x);
}

// Real-time oscillator propagator K(x2, t2 | x1, t1), valid away from the
// caustics sin(omega (t2 - t1)) = 0.
inline ComplexAmplitude feynman_propagator(const QuantumParams& qp, double x2,
                                           double t2, double x1, double t1,
                                           double eps_caustic = kDefaultCausticEpsilon) {
  using namespace std::complex_literals;
  const double phase = qp.omega() * (t2 - t1);
  const double sn = std::sin(phase);
  if (std::abs(sn) < eps_caustic) {
    throw CausticError("|sin(omega dt)| = " + std::to_string(std::abs(sn)) +
                       " below threshold");
  }
  const double cs = std::cos(phase);
  const double beta = qp.m() * qp.omega() / qp.hbar();
  const ComplexAmplitude prefactor =
      std::sqrt(beta / (2.0 * std::numbers::pi * 1i * sn));
  const double quad = (x2 * x2 + x1 * x1) * cs - 2.0 * x2 * x1;
  return prefactor * std::exp(1i * (0.5 * beta * quad / sn));
}

// Imaginary-time (Euclidean) oscillator kernel at Euclidean time T > 0.
inline double euclidean_propagator(const QuantumParams& qp, double x2, double x1,
                                   double T) {
  if (!(T > 0.0)) throw OrderingError("Euclidean time must be > 0");
  const double phase = qp.omega() * T;
  const double sh = std::sinh(phase);
  const double ch = std::cosh(phase);
  const double beta = qp.m() * qp.omega() / qp.hbar();
  const double quad = (x2 * x2 + x1 * x1) * ch - 2.0 * x2 * x1;
  return std::sqrt(beta / (2.0 * std::numbers::pi * sh)) * std::exp(-0.5 * beta * quad / sh);
}

// Two-gate density rebuilt from the Euclidean kernel through the ground-state
// transform: exp(omega T / 2) psi0(x2)/psi0(x1) K_E(x2, x1; T).
inline double euclidean_transition_density(const QuantumParams& qp, double x2,
                                           double x1, double T) {
  const double dV = qp.potential(x2) - qp.potential(x1);
  return std::exp(0.5 * qp.omega() * T - dV / (qp.hbar() * qp.omega())) *
         euclidean_propagator(qp, x2, x1, T);
}

// f(x2, it | x1, 0) / [exp(i omega t/2 - dV/(hbar omega)) K(x2, t | x1, 0)] - 1.
// Defined for omega t in (0, pi); caustic inputs raise CausticError.
inline std::complex<double> wick_identity_residual(
    const ThermoParams& tp, double hbar, double x2, double x1, double t,
    double eps_caustic = kDefaultCausticEpsilon) {
  using namespace std::complex_literals;
  const QuantumParams qp = to_quantum(tp, hbar);
  const double phase = qp.omega() * t;
  if (std::abs(std::sin(phase)) < eps_caustic) {
    throw CausticError("omega t = " + std::to_string(phase) + " sits on a caustic");
  }
  if (!(phase > 0.0 && phase < std::numbers::pi)) {
    throw DomainError("omega t must lie in (0, pi), got " + std::to_string(phase));
  }
  const std::complex<double> f = continued_transition_density(tp, x2, x1, 1i * phase);
  const ComplexAmplitude K = feynman_propagator(qp, x2, t, x1, 0.0, eps_caustic);
  const double dV = qp.potential(x2) - qp.potential(x1);
  const std::complex<double> factor =
      std::exp(1i * (0.5 * phase) - dV / (qp.hbar() * qp.omega()));
  return f / (factor * K) - 1.0;
}

}  // namespace omqm
