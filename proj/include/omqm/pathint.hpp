// Onsager-Machlup action and the path-integral machinery built on it.
//
// Discretization on a uniform grid tau_0 < ... < tau_n, step h:
//   x-dot on interval k  = (x_{k+1} - x_k) / h        (forward difference)
//   x on interval k      = (x_k + x_{k+1}) / 2        (midpoint)
//   A[x] = sum_k h (R/2) (x-dot_k + gamma x_k)^2
//
// The exponent weighting a path is A / (2 k_B). The same discretization makes
// the kinetic + potential form differ from the drift-square form by exactly
// the boundary term (R/2) gamma (x_n^2 - x_0^2).
//
// Kernel composition works on a uniform spatial grid with trapezoid weights.
// Near the grid edges composed kernels lose mass through truncation, so sup
// norms against exact kernels are taken over source points in the inner half
// of the grid (see reference_sup_norm).

#pragma once

#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "omqm/closed_form.hpp"
#include "omqm/errors.hpp"
#include "omqm/params.hpp"
#include "omqm/quadrature.hpp"
#include "omqm/stochastic.hpp"

namespace omqm {

struct ActionValue {
  double value = 0.0;  // entropy
  std::size_t n_steps = 0;
  double dt = 0.0;

  // Weight exponent: the path contributes exp(-exponent).
  double exponent(double k_B) const { return value / (2.0 * k_B); }
};

enum class ActionForm {
  drift_square,       // (R/2)(x' + gamma x)^2
  kinetic_potential,  // (R/2)(x'^2 + gamma^2 x^2), total derivative dropped
};

namespace detail {

inline double uniform_step(const Path& path) {
  if (path.size() < 2) throw GridError("action needs at least 2 path points");
  const auto& t = path.times();
  const double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (std::abs((t[k] - t[k - 1]) - h) > 1e-9 * h) {
      throw GridError("non-uniform time grid at index " + std::to_string(k));
    }
  }
  return h;
}

// Thomas algorithm for a diagonally dominant tridiagonal system. sub[0] and
// sup[n-1] are ignored.
inline std::vector<double> solve_tridiagonal(std::span<const double> sub,
                                             std::span<const double> diag,
                                             std::span<const double> sup,
                                             std::span<const double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n), d(n), x(n);
  double piv = diag[0];
  if (piv == 0.0) throw NumericError("singular tridiagonal system");
  c[0] = sup[0] / piv;
  d[0] = rhs[0] / piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = diag[i] - sub[i] * c[i - 1];
    if (piv == 0.0) throw NumericError("singular tridiagonal system");
    c[i] = (i + 1 < n) ? sup[i] / piv : 0.0;
    d[i] = (rhs[i] - sub[i] * d[i - 1]) / piv;
  }
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

// Per-interval coefficients: x-dot + gamma x_mid = a x_k + b x_{k+1}.
struct IntervalCoefficients {
  double a;
  double b;
  IntervalCoefficients(double gamma, double h) : a(-1.0 / h + 0.5 * gamma), b(1.0 / h + 0.5 * gamma) {}
};

}  // namespace detail

inline ActionValue om_action(const ThermoParams& tp, const Path& path,
                             ActionForm form = ActionForm::drift_square) {
  const double h = detail::uniform_step(path);
  const auto& x = path.values();
  const double g = tp.gamma();
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double xdot = (x[k + 1] - x[k]) / h;
    const double xmid = 0.5 * (x[k] + x[k + 1]);
    if (form == ActionForm::drift_square) {
      const double r = xdot + g * xmid;
      sum += r * r;
    } else {
      sum += xdot * xdot + g * g * xmid * xmid;
    }
  }
  return {0.5 * tp.R() * h * sum, x.size() - 1, h};
}

struct MinimizerResult {
  Path path;
  ActionValue action;
};

namespace detail {

inline void check_endpoints(double tau1, double tau2, std::size_t n_steps) {
  if (!(tau2 > tau1)) throw OrderingError("minimize_action needs tau2 > tau1");
  if (n_steps < 2) throw DomainError("minimize_action needs n_steps >= 2");
}

inline std::vector<double> time_grid(double tau1, double tau2, std::size_t n_steps) {
  std::vector<double> t(n_steps + 1);
  const double h = (tau2 - tau1) / static_cast<double>(n_steps);
  for (std::size_t k = 0; k <= n_steps; ++k) t[k] = tau1 + h * static_cast<double>(k);
  t.back() = tau2;
  return t;
}

}  // namespace detail

// Minimizes the discrete action with x(tau1) = x1, x(tau2) = x2 by solving the
// discrete Euler-Lagrange system
//   a b x_{j-1} + (a^2 + b^2) x_j + a b x_{j+1} = 0,   j = 1 .. n-1,
// which is strictly diagonally dominant for gamma > 0.
inline MinimizerResult minimize_action(const ThermoParams& tp, double x1, double tau1,
                                       double x2, double tau2, std::size_t n_steps) {
  detail::check_endpoints(tau1, tau2, n_steps);
  auto t = detail::time_grid(tau1, tau2, n_steps);
  const double h = (tau2 - tau1) / static_cast<double>(n_steps);
  const detail::IntervalCoefficients cf(tp.gamma(), h);
  const double off = cf.a * cf.b;
  const double diag = cf.a * cf.a + cf.b * cf.b;

  const std::size_t m = n_steps - 1;
  std::vector<double> sub(m, off), dia(m, diag), sup(m, off), rhs(m, 0.0);
  rhs.front() -= off * x1;
  rhs.back() -= off * x2;
  const auto interior = detail::solve_tridiagonal(sub, dia, sup, rhs);

  std::vector<double> x(n_steps + 1);
  x.front() = x1;
  x.back() = x2;
  std::copy(interior.begin(), interior.end(), x.begin() + 1);
  Path path(std::move(t), std::move(x));
  const ActionValue act = om_action(tp, path);
  return {std::move(path), act};
}

// Conjugate-gradient minimization of the same discrete action. Slower than the
// direct solve; kept as an independent cross-check.
inline MinimizerResult minimize_action_iterative(const ThermoParams& tp, double x1,
                                                 double tau1, double x2, double tau2,
                                                 std::size_t n_steps, double tol = 1e-13) {
  detail::check_endpoints(tau1, tau2, n_steps);
  const double h = (tau2 - tau1) / static_cast<double>(n_steps);
  const detail::IntervalCoefficients cf(tp.gamma(), h);
  const std::size_t m = n_steps - 1;

  // Hessian (up to the factor R h) applied to the interior unknowns.
  auto apply = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(m);
    for (std::size_t j = 0; j < m; ++j) {
      double acc = (cf.a * cf.a + cf.b * cf.b) * v[j];
      if (j > 0) acc += cf.a * cf.b * v[j - 1];
      if (j + 1 < m) acc += cf.a * cf.b * v[j + 1];
      out[j] = acc;
    }
    return out;
  };
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs[0] -= cf.a * cf.b * x1;
  rhs[m - 1] -= cf.a * cf.b * x2;

  // Start from the straight line between the endpoints.
  Eigen::VectorXd v(m);
  for (std::size_t j = 0; j < m; ++j) {
    v[j] = x1 + (x2 - x1) * static_cast<double>(j + 1) / static_cast<double>(n_steps);
  }
  Eigen::VectorXd r = rhs - apply(v);
  Eigen::VectorXd p = r;
  double rr = r.squaredNorm();
  const double stop = tol * tol * std::max(1.0, rhs.squaredNorm());
  for (std::size_t it = 0; it < 10 * m && rr > stop; ++it) {
    const Eigen::VectorXd Ap = apply(p);
    const double alpha = rr / p.dot(Ap);
    v += alpha * p;
    r -= alpha * Ap;
    const double rr_next = r.squaredNorm();
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }

  std::vector<double> x(n_steps + 1);
  x.front() = x1;
  x.back() = x2;
  for (std::size_t j = 0; j < m; ++j) x[j + 1] = v[j];
  Path path(detail::time_grid(tau1, tau2, n_steps), std::move(x));
  const ActionValue act = om_action(tp, path);
  return {std::move(path), act};
}

// Exponent (s/2k_B)(x2 - e^{-a} x1)^2 / (1 - e^{-2a}) of the normalized
// two-gate density, a = gamma (tau2 - tau1).
inline double analytic_min_exponent(const ThermoParams& tp, double x1, double x2,
                                    double a) {
  const double d = x2 - std::exp(-a) * x1;
  return tp.s() / (2.0 * tp.k_B()) * d * d / -std::expm1(-2.0 * a);
}

// ---------------------------------------------------------------------------
// Kernels on a spatial grid.

using GridSpec = quad::UniformGrid;

inline constexpr double kDefaultLeakageThreshold = 1e-4;

// K(i, j) = density at x_i given source x_j (columns are sources).
struct GridKernel {
  std::vector<double> x;
  Eigen::MatrixXd values;

  double spacing() const { return x[1] - x[0]; }

  // Trapezoid integral of column j over the target grid.
  double column_mass(std::size_t j) const {
    const auto col = values.col(static_cast<Eigen::Index>(j));
    return quad::trapezoid(std::span<const double>(col.data(), col.size()), spacing());
  }
};

// Grid spec with half-width 8 stationary standard deviations and 401 points.
inline GridSpec default_grid(const ThermoParams& tp) {
  return {8.0 * std::sqrt(tp.stationary_variance()), 401};
}

// Stationary mass outside the grid.
inline double stationary_leakage(const ThermoParams& tp, const GridSpec& grid) {
  const double sd = std::sqrt(tp.stationary_variance());
  return std::erfc(grid.half_width / (sd * std::numbers::sqrt2));
}

enum class ShortTimeKernel {
  exact,  // exact two-gate density for the slice
  euler,  // Gaussian with mean (1 - gamma d) x, variance 2 k_B d / R
};

inline GridKernel sample_kernel(const ThermoParams& tp, double a, const GridSpec& grid,
                                ShortTimeKernel kind = ShortTimeKernel::exact) {
  grid.validate();
  if (!(a > 0.0)) throw DomainError("kernel lag must be > 0");
  GridKernel k;
  k.x = grid.nodes();
  const auto n = static_cast<Eigen::Index>(grid.points);
  k.values.resize(n, n);
  // Slice duration in time is a / gamma, so 2 k_B d / R = 2 k_B a / s.
  const double euler_var = 2.0 * tp.k_B() * a / tp.s();
  const double euler_norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * euler_var);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x2 = k.x[static_cast<std::size_t>(i)];
      const double x1 = k.x[static_cast<std::size_t>(j)];
      if (kind == ShortTimeKernel::exact) {
        k.values(i, j) = transition_density(tp, x2, x1, a);
      } else {
        const double d = x2 - (1.0 - a) * x1;
        k.values(i, j) = euler_norm * std::exp(-0.5 * d * d / euler_var);
      }
    }
  }
  return k;
}

// Composes n_slices short-time kernels of reduced lag total_a / n_slices with
// trapezoid quadrature over the intermediate gates.
inline GridKernel compose_kernel(const ThermoParams& tp, double total_a, std::size_t n_slices,
                                 const GridSpec& grid,
                                 ShortTimeKernel kind = ShortTimeKernel::exact,
                                 double leakage_threshold = kDefaultLeakageThreshold) {
  if (n_slices < 1) throw DomainError("n_slices must be >= 1");
  if (!(total_a > 0.0)) throw DomainError("total_a must be > 0");
  grid.validate();
  const double leak = stationary_leakage(tp, grid);
  if (leak > leakage_threshold) {
    throw CoverageError("stationary mass outside grid " + std::to_string(leak) +
                        " exceeds " + std::to_string(leakage_threshold));
  }
  const GridKernel slice = sample_kernel(tp, total_a / static_cast<double>(n_slices), grid, kind);
  const auto w = grid.trapezoid_weights();
  const Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(w.size()));
  // Slice with quadrature weights folded into its columns: K W.
  const Eigen::MatrixXd weighted = slice.values * wv.asDiagonal();

  GridKernel out{slice.x, slice.values};
  for (std::size_t k = 1; k < n_slices; ++k) out.values = weighted * out.values;
  return out;
}

// Sup-norm difference over all targets and over sources with |x1| <= half of
// the grid half-width.
inline double reference_sup_norm(const GridKernel& lhs, const GridKernel& rhs) {
  const double limit = 0.5 * lhs.x.back();
  double sup = 0.0;
  for (std::size_t j = 0; j < lhs.x.size(); ++j) {
    if (std::abs(lhs.x[j]) > limit * (1.0 + 1e-12)) continue;
    const auto jj = static_cast<Eigen::Index>(j);
    sup = std::max(sup, (lhs.values.col(jj) - rhs.values.col(jj)).cwiseAbs().maxCoeff());
  }
  return sup;
}

// f(x2) = int dx1 f(x2 | x1) f1(x1), trapezoid on the grid.
inline std::vector<double> propagate_onegate(const ThermoParams& tp, const GridSpec& grid,
                                             std::span<const double> f1, double a,
                                             double norm_tol = 1e-6) {
  grid.validate();
  if (f1.size() != grid.points) throw GridError("density length does not match grid");
  for (double v : f1) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw NormalizationError("density must be finite and >= 0");
  }
  const double mass = quad::trapezoid(f1, grid.spacing());
  if (std::abs(mass - 1.0) > norm_tol) {
    throw NormalizationError("input integrates to " + std::to_string(mass));
  }
  const GridKernel k = sample_kernel(tp, a, grid);
  const auto w = grid.trapezoid_weights();
  Eigen::VectorXd src(static_cast<Eigen::Index>(f1.size()));
  for (std::size_t j = 0; j < f1.size(); ++j) src[static_cast<Eigen::Index>(j)] = w[j] * f1[j];
  const Eigen::VectorXd out = k.values * src;
  return {out.data(), out.data() + out.size()};
}

inline void write_kernel_csv(std::ostream& os, const GridKernel& k) {
  os << "x1,x2,value\n";
  os.precision(17);
  for (std::size_t j = 0; j < k.x.size(); ++j) {
    for (std::size_t i = 0; i < k.x.size(); ++i) {
      os << k.x[j] << ',' << k.x[i] << ','
         << k.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) << '\n';
    }
  }
}

}  // namespace omqm
