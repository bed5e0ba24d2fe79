#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "proxkit/rng.hpp"

namespace proxkit {

struct ParticleFilterConfig {
  static constexpr std::size_t kDefaultParticles = 100;

  std::size_t n_particles = kDefaultParticles;
  double process_sigma = 0.1;  // random-walk std-dev per step, dB
  double meas_sigma = 4.0;     // likelihood std-dev, dB
  std::uint64_t seed = 1;
  double ess_threshold_fraction = 0.5;  // resample when ESS < fraction * N
};

struct ParticleStepDiagnostics {
  double ess = 0.0;          // effective sample size after reweighting
  bool resampled = false;
  bool degenerate = false;   // every likelihood underflowed; weights reset to uniform
};

/// Ancestor indices for systematic resampling with stride 1/N and offset u in
/// [0, 1/N). Weights need not be normalized; throws DomainError if they are
/// negative, non-finite or sum to zero.
std::vector<std::size_t> systematic_resample(std::span<const double> weights, double offset);

/// As above with the offset drawn from rng.
std::vector<std::size_t> systematic_resample(std::span<const double> weights, Rng& rng);

double effective_sample_size(std::span<const double> weights);

/// Bootstrap particle filter over the latent RSSI.
///
/// Each step propagates particles through a Gaussian random walk, multiplies
/// weights by the Gaussian likelihood of the observation, normalizes, and
/// resamples systematically when the ESS falls under the configured fraction.
/// The filtered value is the weighted particle mean.
class ParticleFilter {
 public:
  /// Particles ~ N(initial_rssi, spread_sigma^2) with uniform weights.
  /// Throws DomainError if n_particles < 2 or a sigma is invalid.
  ParticleFilter(const ParticleFilterConfig& config, double initial_rssi, double spread_sigma);

  /// Explicit particle set with uniform weights; config.n_particles is ignored.
  ParticleFilter(const ParticleFilterConfig& config, std::vector<double> particles);

  /// propagate() followed by update(rssi).
  double step(double rssi);

  /// Random-walk transition of every particle.
  void propagate();

  /// Likelihood reweighting, normalization and conditional resampling.
  /// Returns the weighted mean.
  double update(double rssi);

  double estimate() const;
  std::span<const double> particles() const { return particles_; }
  std::span<const double> weights() const { return weights_; }
  const ParticleStepDiagnostics& last_diagnostics() const { return diag_; }
  const ParticleFilterConfig& config() const { return config_; }

 private:
  ParticleFilterConfig config_;
  Rng rng_;
  std::vector<double> particles_;
  std::vector<double> weights_;
  std::vector<double> scratch_;
  ParticleStepDiagnostics diag_;
};

/// Convenience constructor mirroring the filter's initial draw.
ParticleFilter pf_init(std::size_t n_particles, double initial_rssi, double spread_sigma,
                       std::uint64_t seed);

}  // namespace proxkit
