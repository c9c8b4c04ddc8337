#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "omqm/quanta.hpp"
#include "oracles.hpp"

using namespace omqm;

namespace {
// PhysicalConstants(c, k_B, hbar)
PhysicalConstants consts(double c, double kB, double hbar) { return {c, kB, hbar}; }
}  // namespace

TEST(Reciprocity, Examples) {
  EXPECT_EQ(time_from_temperature(consts(1, 1, 1), 1.0), 1.0);
  EXPECT_EQ(time_from_temperature(consts(1, 2, 1), 0.5), 1.0);
  EXPECT_THROW(time_from_temperature(consts(1, 1, 1), 0.0), DomainError);
}

TEST(Reciprocity, ProductIsOne) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 1000; ++i) {
    const auto pc = consts(1, std::exp(oracle::uniform(rng, -3, 3)), std::exp(oracle::uniform(rng, -3, 3)));
    const double T = std::exp(oracle::uniform(rng, -5, 5));
    EXPECT_NEAR(time_from_temperature(pc, T) * (pc.k_B() / pc.hbar()) * T, 1.0, 1e-15);
  }
}

TEST(Compton, Examples) {
  EXPECT_EQ(compton_wavelength(consts(1, 1, 1), 1.0), 1.0);
  EXPECT_EQ(compton_wavelength(consts(2, 1, 1), 0.5), 1.0);
  const auto pc = consts(2.9, 1, 1.3);
  EXPECT_EQ(compton_wavelength(pc, 2 * 0.7), compton_wavelength(pc, 0.7) / 2);
  EXPECT_THROW(compton_wavelength(pc, 0.0), DomainError);
}

TEST(EntropyIncrease, Examples) {
  EXPECT_EQ(entropy_increase(ThermoParams(1, 1, 1), consts(1, 1, 1), 1.0), 1.0);
  EXPECT_DOUBLE_EQ(entropy_increase(ThermoParams(1, 2, 1), consts(1, 1, 1), 2.0, 3.0), 1.5);
  EXPECT_THROW(entropy_increase(ThermoParams(1, 1, 1), consts(1, 1, 1), 1.0, 0.0), DomainError);
  EXPECT_THROW(entropy_increase(ThermoParams(1, 1, 1), consts(1, 1, 1), -1.0), DomainError);
}

TEST(EntropyIncrease, AlwaysPositive) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 1000; ++i) {
    const ThermoParams tp(1, std::exp(oracle::uniform(rng, -5, 5)), 1);
    const auto pc = consts(std::exp(oracle::uniform(rng, -5, 5)), 1, std::exp(oracle::uniform(rng, -5, 5)));
    EXPECT_GT(entropy_increase(tp, pc, std::exp(oracle::uniform(rng, -5, 5)), oracle::uniform(rng, 0.01, 5)), 0.0);
  }
}

TEST(Scaling, ExactHomogeneity) {
  const ThermoParams tp(1, 0.37, 1);
  const double T = 3.3, m = 0.71, c = 1.9, kB = 1.1, hbar = 0.83, n = 2.5;
  const auto base = consts(c, kB, hbar);
  const auto twice_hbar = consts(c, kB, 2 * hbar);
  EXPECT_EQ(time_from_temperature(twice_hbar, T), 2 * time_from_temperature(base, T));
  EXPECT_EQ(compton_wavelength(twice_hbar, m), 2 * compton_wavelength(base, m));
  EXPECT_EQ(entropy_increase(tp, twice_hbar, m, n), 4 * entropy_increase(tp, base, m, n));
  EXPECT_EQ(entropy_increase(tp, base, m / 2, n), 4 * entropy_increase(tp, base, m, n));
}

TEST(SecondLaw, Examples) {
  auto r = second_law_quantum(consts(1, 1, 1), 0);
  EXPECT_EQ(r.delta_S, 0.0);
  EXPECT_FALSE(r.at_least_one_quantum);
  EXPECT_FALSE(r.statement.empty());

  r = second_law_quantum(consts(1, 1, 1), 1);
  EXPECT_EQ(r.delta_S, 1.0);
  EXPECT_TRUE(r.at_least_one_quantum);
  EXPECT_EQ(r.uncertainty_bound, 0.5);

  r = second_law_quantum(consts(1, 1.380649e-23, 1), 7);
  EXPECT_NEAR(r.delta_S, 9.664543e-23, 1e-29);
  EXPECT_THROW(second_law_quantum(consts(1, 1, 1), -1), DomainError);
}

TEST(SecondLaw, IntegerMultiplesOfKB) {
  const auto pc = consts(1, 1.380649e-23, 1.054571817e-34);
  for (std::int64_t N = 0; N < 200; ++N) {
    EXPECT_EQ(second_law_quantum(pc, N).delta_S, static_cast<double>(N) * pc.k_B());
    EXPECT_EQ(second_law_quantum(pc, N).delta_S / pc.k_B(), static_cast<double>(N));
  }
}
