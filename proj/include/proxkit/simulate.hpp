#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proxkit/pathloss.hpp"

namespace proxkit {

struct RssiSample {
  std::int64_t t_ms = 0;
  double rssi_dbm = 0.0;
  std::optional<double> true_distance_m;
};

/// Observations from one beacon in arrival order (t_ms non-decreasing).
struct RssiTrace {
  std::string beacon_id;
  std::vector<RssiSample> samples;

  bool labeled() const;
};

/// The fourteen measurement distances (m) of the dwell protocol.
std::vector<double> default_distances();

struct SimConfig {
  static constexpr std::size_t kDefaultSamplesPerDistance = 1200;
  static constexpr std::int64_t kDefaultIntervalMs = 100;
  static constexpr double kDefaultNoiseSigma = 4.0;

  PathLossModel model{-70.0, 2.0};
  std::vector<double> distances = default_distances();
  std::size_t samples_per_distance = kDefaultSamplesPerDistance;
  std::int64_t interval_ms = kDefaultIntervalMs;
  double noise_sigma = kDefaultNoiseSigma;  // dB
  double outlier_prob = 0.0;
  double outlier_sigma = 10.0;  // dB, replaces noise_sigma for outlier samples
  std::uint64_t seed = 1;
  std::string beacon_id = "beacon";
};

/// Throws DomainError when the configuration violates its invariants.
void validate(const SimConfig& cfg);

/// Dwells at each configured distance in order, emitting path-loss RSSI plus
/// Gaussian noise (outlier samples use outlier_sigma instead). Deterministic
/// under cfg.seed.
RssiTrace generate_trace(const SimConfig& cfg);

/// Illustrative simulator preset: a calibrated beacon in a room.
struct BeaconPreset {
  std::string name;
  PathLossModel model;
  double noise_sigma;
};

/// Six presets: two rooms x three beacon models, using the measured path-loss
/// parameters. The noise levels are harness defaults, not measured values.
std::vector<BeaconPreset> beacon_presets();

}  // namespace proxkit
