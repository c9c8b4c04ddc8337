// Parameter records of the thermodynamic and quantum descriptions, and the
// dictionary that carries one onto the other:
//
//   omega = gamma = s / R,      m * omega / hbar = s / (2 k_B)
//
// The dictionary fixes only these two ratios, so the conversion takes the
// missing constant (hbar going to the quantum side, k_B coming back) as an
// explicit argument. The coordinate x is a length on both sides.
//
// Units are documented, not enforced:
//   R      time * entropy / length^2
//   s      entropy / length^2
//   k_B    entropy
//   m      mass,  omega  1/time,  hbar  action

#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "omqm/errors.hpp"

namespace omqm {

namespace detail {

inline void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be finite and > 0, got " +
                      std::to_string(v));
  }
}

}  // namespace detail

// Linear irreversible process: Onsager resistance R, entropy curvature s.
class ThermoParams {
 public:
  ThermoParams(double R, double s, double k_B) : R_(R), s_(s), k_B_(k_B) {
    detail::require_positive(R, "R");
    detail::require_positive(s, "s");
    detail::require_positive(k_B, "k_B");
  }

  double R() const noexcept { return R_; }
  double s() const noexcept { return s_; }
  double k_B() const noexcept { return k_B_; }

  // Relaxation rate, 1/time.
  double gamma() const noexcept { return s_ / R_; }

  // Variance k_B/s of the equilibrium fluctuation law.
  double stationary_variance() const noexcept { return k_B_ / s_; }

  friend bool operator==(const ThermoParams&, const ThermoParams&) = default;

 private:
  double R_;
  double s_;
  double k_B_;
};

// Harmonic oscillator.
class QuantumParams {
 public:
  QuantumParams(double m, double omega, double hbar)
      : m_(m), omega_(omega), hbar_(hbar) {
    detail::require_positive(m, "m");
    detail::require_positive(omega, "omega");
    detail::require_positive(hbar, "hbar");
  }

  double m() const noexcept { return m_; }
  double omega() const noexcept { return omega_; }
  double hbar() const noexcept { return hbar_; }

  // Spring constant; derived, never stored.
  double k() const noexcept { return m_ * omega_ * omega_; }

  // Harmonic potential V(x) = k x^2 / 2.
  double potential(double x) const noexcept { return 0.5 * k() * x * x; }

  friend bool operator==(const QuantumParams&, const QuantumParams&) = default;

 private:
  double m_;
  double omega_;
  double hbar_;
};

// Constants for the quantization calculator (c enters only through the
// Compton wavelength).
class PhysicalConstants {
 public:
  PhysicalConstants(double c, double k_B, double hbar)
      : c_(c), k_B_(k_B), hbar_(hbar) {
    detail::require_positive(c, "c");
    detail::require_positive(k_B, "k_B");
    detail::require_positive(hbar, "hbar");
  }

  double c() const noexcept { return c_; }
  double k_B() const noexcept { return k_B_; }
  double hbar() const noexcept { return hbar_; }

 private:
  double c_;
  double k_B_;
  double hbar_;
};

inline QuantumParams to_quantum(const ThermoParams& tp, double hbar) {
  detail::require_positive(hbar, "hbar");
  const double omega = tp.s() / tp.R();
  const double m = hbar * tp.R() / (2.0 * tp.k_B());
  return QuantumParams(m, omega, hbar);
}

inline ThermoParams to_thermo(const QuantumParams& qp, double k_B) {
  detail::require_positive(k_B, "k_B");
  const double R = 2.0 * k_B * qp.m() / qp.hbar();
  const double s = R * qp.omega();
  return ThermoParams(R, s, k_B);
}

// Mechanical time t to thermodynamic time tau = i t.
inline std::complex<double> wick_time(double t) noexcept { return {0.0, t}; }

}  // namespace omqm
