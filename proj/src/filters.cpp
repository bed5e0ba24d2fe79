#include "proxkit/filters.hpp"

#include <algorithm>
#include <cmath>

#include "proxkit/errors.hpp"

namespace proxkit {

namespace {

void require_finite(double rssi, const char* who) {
  if (!std::isfinite(rssi)) {
    throw DomainError(std::string(who) + ": observation must be finite");
  }
}

// Deviations are taken from the first element so a constant history yields
// exactly zero variance and an exactly constant mean.
template <typename Range>
double shifted_mean(const Range& values, double pivot) {
  double sum = 0.0;
  for (double v : values) {
    sum += v - pivot;
  }
  return pivot + sum / static_cast<double>(std::size(values));
}

template <typename Range>
double population_variance(const Range& values) {
  if (std::empty(values)) {
    return 0.0;
  }
  const double pivot = *std::begin(values);
  double sum = 0.0;
  for (double v : values) {
    sum += v - pivot;
  }
  const double mean_dev = sum / static_cast<double>(std::size(values));
  double ss = 0.0;
  for (double v : values) {
    const double d = (v - pivot) - mean_dev;
    ss += d * d;
  }
  return ss / static_cast<double>(std::size(values));
}

}  // namespace

MovingAverage::MovingAverage(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) {
    throw DomainError("MovingAverage: window capacity must be positive");
  }
}

double MovingAverage::step(double rssi) {
  require_finite(rssi, "MovingAverage");
  if (window_.size() == capacity_) {
    window_.pop_front();
  }
  window_.push_back(rssi);
  return *value();
}

std::optional<double> MovingAverage::value() const {
  if (window_.empty()) {
    return std::nullopt;
  }
  const auto [lo, hi] = std::minmax_element(window_.begin(), window_.end());
  return std::clamp(shifted_mean(window_, window_.front()), *lo, *hi);
}

double rolling_variance(std::span<const double> history) { return population_variance(history); }

double rolling_variance(const std::deque<double>& history) { return population_variance(history); }

KalmanFilter::KalmanFilter(KalmanConfig config) : config_(config) {
  if (!(config_.r_meas > 0.0) || !std::isfinite(config_.r_meas)) {
    throw DomainError("KalmanFilter: measurement noise r_meas must be positive");
  }
  if (config_.history_size == 0) {
    throw DomainError("KalmanFilter: history size must be positive");
  }
  if (!(config_.delta_s > 0.0)) {
    throw DomainError("KalmanFilter: discretization period must be positive");
  }
}

void KalmanFilter::reset() {
  initialized_ = false;
  x_hat_ = p_ = q_ = gain_ = p_prior_ = 0.0;
  history_.clear();
}

double KalmanFilter::step(double rssi) {
  require_finite(rssi, "KalmanFilter");

  if (config_.variant == KalmanVariant::Dynamic) {
    if (history_.size() == config_.history_size) {
      history_.pop_front();
    }
    history_.push_back(rssi);
  }

  if (!initialized_) {
    // Q(k0) = 0 for the first observation.
    initialized_ = true;
    x_hat_ = rssi;
    p_ = config_.r_meas;
    q_ = 0.0;
    return x_hat_;
  }

  q_ = config_.variant == KalmanVariant::Dynamic ? rolling_variance(history_) : 0.0;

  // Predict (F = 1).
  const double x_prior = x_hat_;
  p_prior_ = p_ + q_;

  // Update.
  gain_ = p_prior_ / (p_prior_ + config_.r_meas);
  x_hat_ = x_prior + gain_ * (rssi - x_prior);
  p_ = (1.0 - gain_) * p_prior_;
  return x_hat_;
}

}  // namespace proxkit
