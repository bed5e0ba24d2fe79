#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "proxkit/errors.hpp"
#include "proxkit/rng.hpp"
#include "proxkit/simulate.hpp"

namespace proxkit {
namespace {

TEST(Rng, ReproducibleAndSeedSensitive) {
  Rng a(123);
  Rng b(123);
  Rng c(124);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.normal();
    EXPECT_EQ(x, b.normal());
    differs |= x != c.normal();
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    c.uniform();
  }
  EXPECT_TRUE(differs);
  EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
  EXPECT_NE(mix_seed(1, 0), mix_seed(2, 0));
}

TEST(Rng, NormalMoments) {
  Rng rng(5);
  std::vector<double> v(200000);
  for (auto& x : v) {
    x = rng.normal();
  }
  double mean = 0.0;
  for (double x : v) {
    mean += x;
  }
  mean /= static_cast<double>(v.size());
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(oracle::population_variance(v), 1.0, 0.01);
}

TEST(Simulate, DefaultTraceShape) {
  SimConfig cfg;
  const auto trace = generate_trace(cfg);
  EXPECT_EQ(trace.samples.size(), 16800u);
  EXPECT_TRUE(trace.labeled());
  EXPECT_EQ(trace.samples.front().t_ms, 0);
  EXPECT_EQ(trace.samples[1].t_ms, 100);
  EXPECT_EQ(*trace.samples.front().true_distance_m, 0.1);
  EXPECT_EQ(*trace.samples.back().true_distance_m, 3.0);
  for (std::size_t i = 1; i < trace.samples.size(); ++i) {
    EXPECT_LE(trace.samples[i - 1].t_ms, trace.samples[i].t_ms);
  }
}

TEST(Simulate, NoiselessChannel) {
  SimConfig cfg;
  cfg.model = PathLossModel(-79.35, 1.885);
  cfg.noise_sigma = 0.0;
  cfg.samples_per_distance = 5;
  const auto trace = generate_trace(cfg);
  for (const auto& s : trace.samples) {
    EXPECT_EQ(s.rssi_dbm, predict_rssi(cfg.model, *s.true_distance_m));
    EXPECT_NEAR(estimate_distance(cfg.model, s.rssi_dbm) / *s.true_distance_m, 1.0, 1e-9);
  }
}

TEST(Simulate, NoiseStatistics) {
  SimConfig cfg;
  cfg.distances = {1.5};
  cfg.samples_per_distance = 10000;
  cfg.noise_sigma = 2.0;
  cfg.seed = 77;
  const auto trace = generate_trace(cfg);
  std::vector<double> r;
  for (const auto& s : trace.samples) {
    r.push_back(s.rssi_dbm);
  }
  double mean = 0.0;
  for (double x : r) {
    mean += x;
  }
  mean /= static_cast<double>(r.size());
  EXPECT_NEAR(mean, predict_rssi(cfg.model, 1.5), 0.1);
  EXPECT_NEAR(std::sqrt(oracle::population_variance(r)), 2.0, 0.1);
}

TEST(Simulate, OutliersWidenTails) {
  SimConfig base;
  base.distances = {1.0};
  base.samples_per_distance = 20000;
  base.noise_sigma = 1.0;
  SimConfig mixed = base;
  mixed.outlier_prob = 0.2;
  mixed.outlier_sigma = 10.0;
  auto var = [](const RssiTrace& t) {
    std::vector<double> r;
    for (const auto& s : t.samples) {
      r.push_back(s.rssi_dbm);
    }
    return oracle::population_variance(r);
  };
  // 0.8 * 1 + 0.2 * 100 = 20.8
  EXPECT_NEAR(var(generate_trace(mixed)), 20.8, 1.5);
  EXPECT_NEAR(var(generate_trace(base)), 1.0, 0.05);
}

TEST(Simulate, DeterministicUnderSeed) {
  SimConfig cfg;
  cfg.seed = 31;
  cfg.outlier_prob = 0.05;
  const auto a = generate_trace(cfg);
  const auto b = generate_trace(cfg);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(a.samples[i].rssi_dbm, b.samples[i].rssi_dbm);
  }
  cfg.seed = 32;
  EXPECT_NE(generate_trace(cfg).samples[0].rssi_dbm, a.samples[0].rssi_dbm);
}

TEST(Simulate, InvalidConfig) {
  SimConfig cfg;
  cfg.noise_sigma = -1.0;
  EXPECT_THROW(generate_trace(cfg), DomainError);
  cfg = {};
  cfg.outlier_prob = 1.0;
  EXPECT_THROW(generate_trace(cfg), DomainError);
  cfg = {};
  cfg.distances = {1.0, 0.0};
  EXPECT_THROW(generate_trace(cfg), DomainError);
}

TEST(Simulate, PresetsCoverBothRooms) {
  const auto presets = beacon_presets();
  ASSERT_EQ(presets.size(), 6u);
  EXPECT_EQ(presets[1].model.c0(), -79.35);
  EXPECT_EQ(presets[1].model.n(), 1.885);
  EXPECT_EQ(presets[3].model.c0(), -75.39);
  EXPECT_EQ(presets[5].model.n(), 1.637);
}

}  // namespace
}  // namespace proxkit
