// Quantization calculator: time-temperature reciprocity, Compton length,
// entropy cost of one equivalence class of trajectories, and the quantized
// second law paired with the energy-time uncertainty relation.

#pragma once

#include <cstdint>
#include <string>

#include "omqm/errors.hpp"
#include "omqm/params.hpp"

namespace omqm {

// t = hbar / (k_B T).
inline double time_from_temperature(const PhysicalConstants& pc, double T) {
  detail::require_positive(T, "T");
  return pc.hbar() / (pc.k_B() * T);
}

// lambda_C = hbar / (m c).
inline double compton_wavelength(const PhysicalConstants& pc, double mass) {
  detail::require_positive(mass, "mass");
  return pc.hbar() / (mass * pc.c());
}

// Delta S = n s lambda_C^2. n is left free; order one is the usual guess.
inline double entropy_increase(const ThermoParams& tp, const PhysicalConstants& pc,
                               double mass, double n = 1.0) {
  detail::require_positive(n, "n");
  const double lc = compton_wavelength(pc, mass);
  return n * tp.s() * (lc * lc);
}

struct SecondLawReport {
  std::int64_t quanta = 0;        // N
  double delta_S = 0.0;           // N k_B
  bool at_least_one_quantum = false;  // Delta S >= k_B, i.e. N >= 1
  double uncertainty_bound = 0.0;     // hbar / 2, paired via hbar <-> 2 k_B
  std::string statement;
};

inline SecondLawReport second_law_quantum(const PhysicalConstants& pc, std::int64_t N) {
  if (N < 0) throw DomainError("entropy quantum count must be >= 0");
  SecondLawReport r;
  r.quanta = N;
  r.delta_S = static_cast<double>(N) * pc.k_B();
  r.at_least_one_quantum = N >= 1;
  r.uncertainty_bound = 0.5 * pc.hbar();
  if (r.at_least_one_quantum) {
    r.statement = "Delta S >= k_B  <->  Delta E Delta t >= hbar/2";
  } else {
    r.statement = "N = 0: no entropy produced; Delta S >= 0 is the k_B -> 0 limit";
  }
  return r;
}

}  // namespace omqm
