#include "proxkit/particle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "proxkit/errors.hpp"

namespace proxkit {

std::vector<std::size_t> systematic_resample(std::span<const double> weights, double offset) {
  const std::size_t n = weights.size();
  if (n == 0) {
    throw DomainError("systematic_resample: empty weight vector");
  }
  const double stride = 1.0 / static_cast<double>(n);
  if (!(offset >= 0.0 && offset < stride)) {
    throw DomainError("systematic_resample: offset must lie in [0, 1/N)");
  }

  std::vector<double> cumulative(n);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!(weights[j] >= 0.0) || !std::isfinite(weights[j])) {
      throw DomainError("systematic_resample: weights must be finite and non-negative");
    }
    total += weights[j];
    cumulative[j] = total;
  }
  if (!(total > 0.0)) {
    throw DomainError("systematic_resample: weights sum to zero");
  }
  for (auto& c : cumulative) {
    c /= total;
  }
  // Close the last non-empty bin at exactly 1 so rounding cannot run past it.
  for (std::size_t j = n; j-- > 0;) {
    if (weights[j] > 0.0) {
      std::fill(cumulative.begin() + static_cast<std::ptrdiff_t>(j), cumulative.end(), 1.0);
      break;
    }
  }

  std::vector<std::size_t> indices(n);
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double position = offset + static_cast<double>(i) * stride;
    while (position >= cumulative[j]) {
      ++j;
    }
    indices[i] = j;
  }
  return indices;
}

std::vector<std::size_t> systematic_resample(std::span<const double> weights, Rng& rng) {
  const double stride = 1.0 / static_cast<double>(std::max<std::size_t>(weights.size(), 1));
  return systematic_resample(weights, rng.uniform() * stride);
}

double effective_sample_size(std::span<const double> weights) {
  double sum_sq = 0.0;
  for (double w : weights) {
    sum_sq += w * w;
  }
  return sum_sq > 0.0 ? 1.0 / sum_sq : 0.0;
}

namespace {

void validate(const ParticleFilterConfig& config, std::size_t n) {
  if (n < 2) {
    throw DomainError("ParticleFilter: need at least 2 particles");
  }
  if (!(config.process_sigma > 0.0) || !(config.meas_sigma > 0.0)) {
    throw DomainError("ParticleFilter: process and measurement sigmas must be positive");
  }
  if (!(config.ess_threshold_fraction >= 0.0 && config.ess_threshold_fraction <= 1.0)) {
    throw DomainError("ParticleFilter: ESS threshold fraction must lie in [0, 1]");
  }
}

}  // namespace

ParticleFilter::ParticleFilter(const ParticleFilterConfig& config, double initial_rssi,
                               double spread_sigma)
    : config_(config), rng_(config.seed) {
  validate(config_, config_.n_particles);
  if (!(spread_sigma >= 0.0) || !std::isfinite(initial_rssi)) {
    throw DomainError("ParticleFilter: invalid initial distribution");
  }
  const std::size_t n = config_.n_particles;
  particles_.resize(n);
  // Draws are assigned by particle index, so the set depends only on the seed.
  for (auto& p : particles_) {
    p = initial_rssi + spread_sigma * rng_.normal();
  }
  weights_.assign(n, 1.0 / static_cast<double>(n));
  scratch_.resize(n);
  diag_.ess = static_cast<double>(n);
}

ParticleFilter::ParticleFilter(const ParticleFilterConfig& config, std::vector<double> particles)
    : config_(config), rng_(config.seed), particles_(std::move(particles)) {
  validate(config_, particles_.size());
  if (!std::all_of(particles_.begin(), particles_.end(), [](double p) { return std::isfinite(p); })) {
    throw DomainError("ParticleFilter: particles must be finite");
  }
  const std::size_t n = particles_.size();
  config_.n_particles = n;
  weights_.assign(n, 1.0 / static_cast<double>(n));
  scratch_.resize(n);
  diag_.ess = static_cast<double>(n);
}

double ParticleFilter::step(double rssi) {
  if (!std::isfinite(rssi)) {
    throw DomainError("ParticleFilter: observation must be finite");
  }
  propagate();
  return update(rssi);
}

void ParticleFilter::propagate() {
  for (auto& p : particles_) {
    p += config_.process_sigma * rng_.normal();
  }
}

double ParticleFilter::update(double rssi) {
  if (!std::isfinite(rssi)) {
    throw DomainError("ParticleFilter: observation must be finite");
  }
  const std::size_t n = particles_.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  diag_ = {};

  // The Gaussian normalization constant cancels under weight normalization.
  const double inv_two_var = 1.0 / (2.0 * config_.meas_sigma * config_.meas_sigma);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double innovation = rssi - particles_[j];
    weights_[j] *= std::exp(-innovation * innovation * inv_two_var);
    total += weights_[j];
  }
  if (total > 0.0 && std::isfinite(total)) {
    for (auto& w : weights_) {
      w /= total;
    }
  } else {
    std::fill(weights_.begin(), weights_.end(), inv_n);
    diag_.degenerate = true;
  }

  diag_.ess = effective_sample_size(weights_);
  if (diag_.ess < config_.ess_threshold_fraction * static_cast<double>(n)) {
    const auto ancestors = systematic_resample(weights_, rng_);
    for (std::size_t j = 0; j < n; ++j) {
      scratch_[j] = particles_[ancestors[j]];
    }
    particles_.swap(scratch_);
    std::fill(weights_.begin(), weights_.end(), inv_n);
    diag_.resampled = true;
  }
  return estimate();
}

double ParticleFilter::estimate() const {
  double mean = 0.0;
  for (std::size_t j = 0; j < particles_.size(); ++j) {
    mean += weights_[j] * particles_[j];
  }
  const auto [lo, hi] = std::minmax_element(particles_.begin(), particles_.end());
  return std::clamp(mean, *lo, *hi);
}

ParticleFilter pf_init(std::size_t n_particles, double initial_rssi, double spread_sigma,
                       std::uint64_t seed) {
  ParticleFilterConfig cfg;
  cfg.n_particles = n_particles;
  cfg.seed = seed;
  return ParticleFilter(cfg, initial_rssi, spread_sigma);
}

}  // namespace proxkit
