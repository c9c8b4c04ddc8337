// Deterministic side of the linear irreversible process: quadratic entropy,
// force, flux, entropy production, and the extremal path of the
// Onsager-Machlup Lagrangian.

#pragma once

#include <cmath>

#include "omqm/errors.hpp"
#include "omqm/params.hpp"

namespace omqm {

// Entropy near equilibrium, S(x) = S0 - s x^2 / 2 <= S0.
struct EntropyState {
  double S0 = 0.0;
  double x = 0.0;

  double entropy(const ThermoParams& tp) const { return S0 - 0.5 * tp.s() * x * x; }
};

// X = dS/dx = -s x.
inline double thermo_force(const ThermoParams& tp, double x) { return -tp.s() * x; }

// dx/dtau = L X = -gamma x, with L = 1/R.
inline double relaxation_flux(const ThermoParams& tp, double x) {
  return thermo_force(tp, x) / tp.R();
}

// dS/dtau = X dx/dtau.
inline double entropy_production_rate(const ThermoParams& tp, double x, double xdot) {
  return thermo_force(tp, x) * xdot;
}

// Solution of R dx/dtau + s x = 0 from x(0) = x0.
inline double relaxation_path(const ThermoParams& tp, double x0, double tau) {
  return x0 * std::exp(-tp.gamma() * tau);
}

// x(tau) = x2 exp(gamma (tau - tau2)): solves x'' = gamma^2 x with
// x(-inf) = 0, x(tau2) = x2. Defined for tau <= tau2.
inline double extremal_path(const ThermoParams& tp, double x2, double tau2, double tau) {
  if (tau > tau2) throw OrderingError("extremal path is defined for tau <= tau2");
  return x2 * std::exp(tp.gamma() * (tau - tau2));
}

// (1/4k_B) int_{-inf}^{tau2} R (x' + gamma x)^2 dtau along extremal_path.
// On that path x' = gamma x, so the integral is 2 R gamma x2^2 = 2 s x2^2 and
// the exponent is s x2^2 / (2 k_B).
inline double extremal_onegate_exponent(const ThermoParams& tp, double x2) {
  return tp.s() * x2 * x2 / (2.0 * tp.k_B());
}

}  // namespace omqm
