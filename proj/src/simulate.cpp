#include "proxkit/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "proxkit/errors.hpp"
#include "proxkit/rng.hpp"

namespace proxkit {

bool RssiTrace::labeled() const {
  return !samples.empty() && std::all_of(samples.begin(), samples.end(),
                                         [](const RssiSample& s) { return s.true_distance_m.has_value(); });
}

std::vector<double> default_distances() {
  return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.5, 2.0, 2.5, 3.0};
}

void validate(const SimConfig& cfg) {
  if (cfg.distances.empty()) {
    throw DomainError("simulate: distance list is empty");
  }
  for (double d : cfg.distances) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw DomainError("simulate: distances must be positive and finite");
    }
  }
  if (!(cfg.noise_sigma >= 0.0) || !std::isfinite(cfg.noise_sigma)) {
    throw DomainError("simulate: noise_sigma must be >= 0");
  }
  if (!(cfg.outlier_prob >= 0.0 && cfg.outlier_prob < 1.0)) {
    throw DomainError("simulate: outlier_prob must lie in [0, 1)");
  }
  if (!(cfg.outlier_sigma >= 0.0) || !std::isfinite(cfg.outlier_sigma)) {
    throw DomainError("simulate: outlier_sigma must be >= 0");
  }
  if (cfg.interval_ms < 0) {
    throw DomainError("simulate: interval_ms must be >= 0");
  }
}

RssiTrace generate_trace(const SimConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed);
  RssiTrace trace;
  trace.beacon_id = cfg.beacon_id;
  trace.samples.reserve(cfg.distances.size() * cfg.samples_per_distance);

  std::int64_t t = 0;
  for (double d : cfg.distances) {
    const double mean = predict_rssi(cfg.model, d);
    for (std::size_t k = 0; k < cfg.samples_per_distance; ++k) {
      // Both draws happen for every sample so the stream layout does not
      // depend on outlier_prob.
      const bool outlier = rng.uniform() < cfg.outlier_prob;
      const double z = rng.normal();
      const double sigma = outlier ? cfg.outlier_sigma : cfg.noise_sigma;
      trace.samples.push_back({t, mean + sigma * z, d});
      t += cfg.interval_ms;
    }
  }
  return trace;
}

std::vector<BeaconPreset> beacon_presets() {
  // Larger room at 4 dB, smaller (more reflective) room at 5 dB.
  return {
      {"env1-estimote", PathLossModel(-72.25, 1.601), 4.0},
      {"env1-kontakt", PathLossModel(-79.35, 1.885), 4.0},
      {"env1-gimbal", PathLossModel(-82.42, 1.960), 4.0},
      {"env2-estimote", PathLossModel(-75.39, 1.224), 5.0},
      {"env2-kontakt", PathLossModel(-77.07, 1.523), 5.0},
      {"env2-gimbal", PathLossModel(-81.61, 1.637), 5.0},
  };
}

}  // namespace proxkit
