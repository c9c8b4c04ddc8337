// Isotropic three-dimensional case.
//
// Thermodynamic phase space is R^6 = (q, v). The level sets of
// |v|^2 + gamma^2 |q|^2 are 5-dimensional; restricted to extremal
// trajectories (v = gamma q) they collapse onto configuration-space spheres
// of radius rho / (sqrt(2) gamma), the counterparts of the mechanical
// equipotentials |q| = const.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <random>
#include <vector>

#include "omqm/errors.hpp"
#include "omqm/params.hpp"

namespace omqm {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm2(const Vec3& a) { return dot(a, a); }
inline Vec3 scaled(const Vec3& a, double f) { return {a[0] * f, a[1] * f, a[2] * f}; }

struct State3D {
  Vec3 position{};  // length
  Vec3 velocity{};  // length / time
};

// (R/2)(|v|^2 + gamma^2 |q|^2), entropy per unit time.
inline double thermo_lagrangian_3d(const ThermoParams& tp, const State3D& st) {
  const double g = tp.gamma();
  return 0.5 * tp.R() * (norm2(st.velocity) + g * g * norm2(st.position));
}

// (m/2)(|v|^2 - omega^2 |q|^2).
inline double mech_lagrangian_3d(const QuantumParams& qp, const State3D& st) {
  const double w = qp.omega();
  return 0.5 * qp.m() * (norm2(st.velocity) - w * w * norm2(st.position));
}

// V(q) = m omega^2 |q|^2 / 2.
inline double mech_potential_3d(const QuantumParams& qp, const Vec3& q) {
  return 0.5 * qp.k() * norm2(q);
}

// |v|^2 + gamma^2 |q|^2; its level sets are the isoentropic submanifolds.
inline double isoentropic_value(const ThermoParams& tp, const State3D& st) {
  const double g = tp.gamma();
  return norm2(st.velocity) + g * g * norm2(st.position);
}

// On-shell state through q: velocity gamma q.
inline State3D onshell_state(const ThermoParams& tp, const Vec3& q) {
  return {q, scaled(q, tp.gamma())};
}

// Radius r with 2 gamma^2 r^2 = rho^2.
inline double onshell_sphere_radius(const ThermoParams& tp, double rho) {
  detail::require_positive(rho, "rho");
  return rho / (tp.gamma() * std::numbers::sqrt2);
}

// Uniform direction on the unit sphere (normalized Gaussian triple).
template <class Rng>
Vec3 random_direction(Rng& rng) {
  std::normal_distribution<double> normal;
  for (;;) {
    Vec3 v{normal(rng), normal(rng), normal(rng)};
    const double n = std::sqrt(norm2(v));
    if (n > 1e-12) return scaled(v, 1.0 / n);
  }
}

struct SpherePoint {
  Vec3 q;
  double value;
};

// n on-shell states on the configuration sphere of isoentropic label rho,
// each paired with its isoentropic value (rho^2 up to rounding).
inline std::vector<SpherePoint> sample_isoentropic_sphere(const ThermoParams& tp, double rho,
                                                          std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double r = onshell_sphere_radius(tp, rho);
  std::vector<SpherePoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 q = scaled(random_direction(rng), r);
    pts.push_back({q, isoentropic_value(tp, onshell_state(tp, q))});
  }
  return pts;
}

// n points on the mechanical equipotential |q| = radius with their potential.
inline std::vector<SpherePoint> sample_equipotential_sphere(const QuantumParams& qp,
                                                            double radius, std::size_t n,
                                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<SpherePoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 q = scaled(random_direction(rng), radius);
    pts.push_back({q, mech_potential_3d(qp, q)});
  }
  return pts;
}

inline void write_sphere_csv(std::ostream& os, const std::vector<SpherePoint>& pts) {
  os << "x,y,z,value\n";
  os.precision(17);
  for (const auto& p : pts) {
    os << p.q[0] << ',' << p.q[1] << ',' << p.q[2] << ',' << p.value << '\n';
  }
}

}  // namespace omqm
