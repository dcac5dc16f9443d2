#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "mixoram/client.hpp"
#include "mixoram/shuffle.hpp"
#include "mixoram/stats.hpp"

using namespace mixoram;

TEST(Bounds, KrtsAndMerge) {
  EXPECT_NEAR(krts_bound(64, 4), 133.084, 1e-3);
  EXPECT_NEAR(krts_bound(16, 2), 16 * std::log(16.0), 1e-9);
  EXPECT_NEAR(merge_bound(6, 2, 2), 1.5 * std::log(3.0), 1e-12);
  EXPECT_NEAR(harmonic(4), 1 + 0.5 + 1.0 / 3 + 0.25, 1e-12);
}

TEST(Krts, RoundPicksDistinctPositionsAndPermutes) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 500; ++t) {
    std::vector<std::uint64_t> cards(20);
    for (std::uint64_t i = 0; i < 20; ++i) cards[i] = i;
    auto picked = krts_round(std::span<std::uint64_t>(cards), 6, rng);
    ASSERT_EQ(std::set<std::uint64_t>(picked.begin(), picked.end()).size(), 6u);
    ASSERT_TRUE(is_bijection(cards));
    for (std::uint64_t i = 0; i < 20; ++i) {
      if (std::find(picked.begin(), picked.end(), i) == picked.end()) ASSERT_EQ(cards[i], i);
    }
  }
}

TEST(Krts, SimulationValidatesK) {
  std::mt19937_64 rng(2);
  EXPECT_THROW(krts_simulate(16, 3, rng), Error);
  EXPECT_THROW(krts_simulate(4, 6, rng), Error);
  std::vector<std::uint64_t> trace;
  auto rounds = krts_simulate(8, 8, rng, &trace);
  EXPECT_EQ(rounds, 1u);
  EXPECT_EQ(trace.back(), 8u);
}

TEST(Merge, KeepsTheNumberOfAccessedRecords) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    auto mask = merge_simulate(10, 3, 2, 7, rng);
    ASSERT_EQ(std::popcount(mask), 3);
  }
  EXPECT_EQ(merge_simulate(6, 2, 2, 0, rng), 0b11u);
}

TEST(Phi, PointMassAndUniform) {
  std::vector<double> w(16, 0.0);
  w[3] = 1.0;
  EXPECT_NEAR(phi_potential(w), 1.0 - 1.0 / 16, 1e-12);
  std::vector<double> u(16, 1.0 / 16);
  EXPECT_NEAR(phi_potential(u), 0.0, 1e-15);
  std::vector<double> bad(4, 0.3);
  try {
    phi_potential(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kNotAProbabilityVector);
  }
}

TEST(Phi, ClosedFormAndTarget) {
  EXPECT_NEAR(phi_closed_form(16, 4, 3, 1), 0.8, 1e-12);
  EXPECT_NEAR(phi_closed_form(16, 4, 3, 10), std::pow(0.8, 10), 1e-12);
  EXPECT_EQ(phi_closed_form(16, 4, 3, 0), 1.0);
  EXPECT_EQ(phi_target_rounds(16, 4, 3), 23u);
  // More corrupted mixes, slower decay.
  EXPECT_LT(phi_closed_form(16, 4, 0, 5), phi_closed_form(16, 4, 2, 5));
}

TEST(Coupon, ExpectedLayers) {
  auto e = expected_layers(1000000, 1000, 1, 1.0);
  EXPECT_NEAR(e.all, 14392.7, 0.1);
  EXPECT_NEAR(expected_layers(1000000, 1000, 1000, 1.0).all, 14.39, 0.01);
  EXPECT_NEAR(expected_layers(1, 4, 2, 1.0).all, 1.0 / 8, 1e-12);
  auto small = expected_layers(256, 16, 1, 1.0);
  EXPECT_NEAR(small.per_record, 45.2, 0.01);
  EXPECT_THROW(expected_layers(0, 1, 1, 1.0), Error);
}

TEST(Stats, ChiSquaredTail) {
  EXPECT_NEAR(chi_squared_sf(3.841458820694124, 1), 0.05, 1e-9);
  EXPECT_NEAR(chi_squared_sf(0.0, 5), 1.0, 1e-12);
  std::vector<std::uint64_t> flat(10, 100);
  auto c = chi_squared_uniform(flat);
  EXPECT_EQ(c.statistic, 0.0);
  EXPECT_EQ(c.dof, 9u);
  EXPECT_NEAR(c.p_value, 1.0, 1e-12);
  std::vector<std::uint64_t> skew{1000, 0, 0, 0};
  EXPECT_LT(chi_squared_uniform(skew).p_value, 1e-10);
}

TEST(Stats, RunningStats) {
  RunningStats s;
  for (double x : {1.0, 2.0, 3.0, 4.0}) s.add(x);
  EXPECT_DOUBLE_EQ(s.mean(), 2.5);
  EXPECT_NEAR(s.variance(), 5.0 / 3, 1e-12);
  EXPECT_EQ(relative_error(110, 100), 0.1);
}
