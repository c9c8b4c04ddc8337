#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "omqm/closed_form.hpp"
#include "omqm/dynamics.hpp"
#include "omqm/pathint.hpp"
#include "oracles.hpp"

using namespace omqm;

namespace {

const ThermoParams kUnit(1, 1, 1);

Path sampled(double t0, double t1, std::size_t n, auto f) {
  std::vector<double> t(n + 1), x(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    t[k] = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(n);
    x[k] = f(t[k]);
  }
  return Path(std::move(t), std::move(x));
}

}  // namespace

TEST(Action, ZeroPathHasZeroAction) {
  const auto p = sampled(0, 1, 10, [](double) { return 0.0; });
  EXPECT_EQ(om_action(kUnit, p).value, 0.0);
}

TEST(Action, RelaxationPathIsNearlyFree) {
  const auto p = sampled(0, 2, 2000, [](double t) { return std::exp(-t); });
  EXPECT_LT(om_action(kUnit, p).value, 1e-6);
}

TEST(Action, ExtremalPathGivesOneGateExponent) {
  const auto p = sampled(-40, 0, 40000, [](double t) { return extremal_path(kUnit, 1.0, 0.0, t); });
  const auto act = om_action(kUnit, p);
  EXPECT_NEAR(act.exponent(kUnit.k_B()), 0.5, 1e-4);
  EXPECT_EQ(act.n_steps, 40000u);
  EXPECT_NEAR(act.dt, 1e-3, 1e-15);
}

TEST(Action, FormsDifferByBoundaryTerm) {
  const ThermoParams tp(1.3, 0.8, 1.1);
  const auto p = sampled(0, 3, 600, [](double t) { return std::sin(t) + 0.5 * t * t; });
  const double drift = om_action(tp, p, ActionForm::drift_square).value;
  const double kin = om_action(tp, p, ActionForm::kinetic_potential).value;
  const double boundary = 0.5 * tp.R() * tp.gamma() * (p.back() * p.back() - p.front() * p.front());
  EXPECT_NEAR(drift - kin, boundary, 1e-8);
}

TEST(Action, RejectsNonUniformGrid) {
  EXPECT_THROW(om_action(kUnit, Path({0, 1, 3}, {0, 0, 0})), GridError);
  EXPECT_THROW(om_action(kUnit, Path({0}, {0})), GridError);
}

TEST(Minimizer, ZeroEndpointsGiveZeroPath) {
  const auto r = minimize_action(kUnit, 0, 0, 0, 1, 100);
  for (double v : r.path.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(r.action.value, 0.0);
}

TEST(Minimizer, TwoGateExample) {
  const auto r = minimize_action(kUnit, 0, 0, 1, 1, 2000);
  EXPECT_NEAR(r.action.exponent(1.0), 0.57825882137, 1e-4 * 0.57825882137);
  EXPECT_NEAR(analytic_min_exponent(kUnit, 0, 1, 1), 0.57825882137, 1e-10);
}

TEST(Minimizer, PathIsHyperbolicCombination) {
  // x'' = gamma^2 x with the two endpoint conditions, solved for A and B by hand.
  const ThermoParams tp(2, 1, 1);
  const double g = tp.gamma(), t1 = 0, t2 = 3, x1 = 0.7, x2 = -1.2;
  const double B = (x1 * std::exp(g * t2) - x2 * std::exp(g * t1)) /
                   (std::exp(g * (t2 - t1)) - std::exp(-g * (t2 - t1)));
  const double A = (x2 - B * std::exp(-g * t2)) / std::exp(g * t2);
  const auto r = minimize_action(tp, x1, t1, x2, t2, 2000);
  for (std::size_t k = 0; k < r.path.size(); ++k) {
    const double t = r.path.times()[k];
    EXPECT_NEAR(r.path.values()[k], A * std::exp(g * t) + B * std::exp(-g * t), 1e-5);
  }
}

TEST(Minimizer, Rejections) {
  EXPECT_THROW(minimize_action(kUnit, 0, 1, 0, 1, 10), OrderingError);
  EXPECT_THROW(minimize_action(kUnit, 0, 1, 0, 0, 10), OrderingError);
  EXPECT_THROW(minimize_action(kUnit, 0, 0, 0, 1, 1), DomainError);
}

TEST(Minimizer, IterativeSolverAgrees) {
  const ThermoParams tp(1.2, 0.6, 0.9);
  const auto direct = minimize_action(tp, 0.4, -1, 1.5, 2, 300);
  const auto cg = minimize_action_iterative(tp, 0.4, -1, 1.5, 2, 300);
  for (std::size_t k = 0; k < direct.path.size(); ++k) {
    EXPECT_NEAR(direct.path.values()[k], cg.path.values()[k], 1e-8);
  }
  EXPECT_NEAR(direct.action.value, cg.action.value, 1e-10);
}

TEST(Minimizer, PerturbationsNeverLower) {
  std::mt19937_64 rng(3);
  const auto r = minimize_action(kUnit, -0.5, 0, 1.0, 2, 200);
  for (int trial = 0; trial < 200; ++trial) {
    auto x = r.path.values();
    const double scale = std::pow(10.0, oracle::uniform(rng, -6, 0));
    for (std::size_t k = 1; k + 1 < x.size(); ++k) x[k] += scale * oracle::uniform(rng, -1, 1);
    const double perturbed = om_action(kUnit, Path(r.path.times(), x)).value;
    EXPECT_GE(perturbed, r.action.value);
  }
}

TEST(Minimizer, SaddlePointMatchesAnalyticExponent) {
  const ThermoParams tp(1, 2, 1);
  for (double x1 : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    for (double x2 : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      const double a = 1.5;
      const auto r = minimize_action(tp, x1, 0, x2, a / tp.gamma(), 2000);
      const double want = analytic_min_exponent(tp, x1, x2, a);
      EXPECT_NEAR(r.action.exponent(tp.k_B()), want, 1e-4 * std::max(want, 1e-12) + 1e-14)
          << x1 << " -> " << x2;
    }
  }
}

TEST(Minimizer, OneGateLimit) {
  for (double x2 : {-1.5, 0.3, 2.0}) {
    const auto r = minimize_action(kUnit, 0, -40, x2, 0, 4000);
    EXPECT_NEAR(r.action.exponent(1.0), extremal_onegate_exponent(kUnit, x2),
                1e-10 * extremal_onegate_exponent(kUnit, x2));
  }
}

TEST(Tridiagonal, MatchesDenseSolve) {
  std::mt19937_64 rng(5);
  const std::size_t n = 12;
  std::vector<double> sub(n), dia(n), sup(n), rhs(n);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    sub[i] = oracle::uniform(rng, -1, 1);
    sup[i] = oracle::uniform(rng, -1, 1);
    dia[i] = 3 + oracle::uniform(rng, 0, 1);
    rhs[i] = b[i] = oracle::uniform(rng, -2, 2);
    M(i, i) = dia[i];
    if (i > 0) M(i, i - 1) = sub[i];
    if (i + 1 < n) M(i, i + 1) = sup[i];
  }
  const Eigen::VectorXd want = M.fullPivLu().solve(b);
  const auto got = detail::solve_tridiagonal(sub, dia, sup, rhs);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(got[i], want[i], 1e-13);
}

TEST(Kernel, SingleSliceIsSampledDensity) {
  const auto grid = default_grid(kUnit);
  const auto k = compose_kernel(kUnit, 0.7, 1, grid);
  EXPECT_NEAR(k.values(200, 200), transition_density(kUnit, 0.0, 0.0, 0.7), 1e-15);
  EXPECT_NEAR(k.values(210, 190), transition_density(kUnit, k.x[210], k.x[190], 0.7), 1e-15);
}

TEST(Kernel, TwoSlicesReproduceExactDensity) {
  const ThermoParams tp(1, 1.5, 0.8);
  const auto grid = default_grid(tp);
  const auto composed = compose_kernel(tp, 1.0, 2, grid);
  const auto exact = sample_kernel(tp, 1.0, grid);
  EXPECT_LT(reference_sup_norm(composed, exact), 1e-8);
}

TEST(Kernel, ColumnsCarryUnitMass) {
  const auto k = compose_kernel(kUnit, 1.0, 4, default_grid(kUnit));
  EXPECT_NEAR(k.column_mass(200), 1.0, 1e-10);
  EXPECT_NEAR(k.column_mass(150), 1.0, 1e-10);
}

TEST(Kernel, EulerSlicesConvergeAtFirstOrder) {
  const auto grid = default_grid(kUnit);
  const auto exact = sample_kernel(kUnit, 1.0, grid);
  std::vector<double> err;
  for (std::size_t n : {16u, 32u, 64u}) {
    err.push_back(reference_sup_norm(compose_kernel(kUnit, 1.0, n, grid, ShortTimeKernel::euler), exact));
  }
  EXPECT_NEAR(err[0], 0.01541, 2e-4);
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double ratio = err[i - 1] / err[i];
    EXPECT_GE(ratio, 1.7);
    EXPECT_LE(ratio, 2.3);
  }
}

TEST(Kernel, NarrowGridIsRejected) {
  EXPECT_THROW(compose_kernel(kUnit, 1.0, 2, GridSpec{2.0, 101}), CoverageError);
  EXPECT_NO_THROW(compose_kernel(kUnit, 1.0, 2, GridSpec{4.0, 101}));
  EXPECT_THROW(compose_kernel(kUnit, 1.0, 0, default_grid(kUnit)), DomainError);
}

TEST(OneGate, StationaryDensityIsFixedPoint) {
  const ThermoParams tp(1, 0.7, 1.2);
  const auto grid = default_grid(tp);
  std::vector<double> f;
  for (double x : grid.nodes()) f.push_back(stationary_density(tp, x));
  for (double a : {0.1, 1.0, 5.0}) {
    const auto out = propagate_onegate(tp, grid, f, a);
    double sup = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) sup = std::max(sup, std::abs(out[i] - f[i]));
    EXPECT_LT(sup, 1e-9) << "a = " << a;
  }
}

TEST(OneGate, PointMassGivesTransitionDensity) {
  const auto grid = default_grid(kUnit);
  std::vector<double> f(grid.points, 0.0);
  f[220] = 1.0 / grid.spacing();
  const auto out = propagate_onegate(kUnit, grid, f, 0.5);
  for (std::size_t i = 0; i < grid.points; i += 37) {
    EXPECT_NEAR(out[i], transition_density(kUnit, grid.x(i), grid.x(220), 0.5), 1e-13);
  }
}

TEST(OneGate, PreservesMass) {
  const auto grid = default_grid(kUnit);
  std::vector<double> f;
  for (double x : grid.nodes()) f.push_back(oracle::gaussian(x, 1.0, 0.5));
  const auto out = propagate_onegate(kUnit, grid, f, 0.8);
  EXPECT_NEAR(quad::trapezoid(out, grid.spacing()), 1.0, 1e-8);
}

TEST(OneGate, RejectsBadInput) {
  const auto grid = default_grid(kUnit);
  std::vector<double> f;
  for (double x : grid.nodes()) f.push_back(2 * stationary_density(kUnit, x));
  EXPECT_THROW(propagate_onegate(kUnit, grid, f, 1.0), NormalizationError);
  f.assign(grid.points, 0.0);
  f[3] = -1.0;
  EXPECT_THROW(propagate_onegate(kUnit, grid, f, 1.0), NormalizationError);
  EXPECT_THROW(propagate_onegate(kUnit, grid, std::vector<double>(5, 0.0), 1.0), GridError);
}
