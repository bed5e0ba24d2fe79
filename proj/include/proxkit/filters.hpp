#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>

namespace proxkit {

/// Simple moving average over a FIFO window of RSSI observations.
class MovingAverage {
 public:
  static constexpr std::size_t kDefaultWindow = 20;

  explicit MovingAverage(std::size_t capacity = kDefaultWindow);

  /// Appends rssi, evicting the oldest entry when full, and returns the window
  /// mean. Throws DomainError on non-finite input without touching the window.
  double step(double rssi);

  std::optional<double> value() const;
  std::size_t size() const { return window_.size(); }
  std::size_t capacity() const { return capacity_; }
  void reset() { window_.clear(); }

 private:
  std::size_t capacity_;
  std::deque<double> window_;
};

/// Population variance sum((r - mu)^2) / N over the current contents.
/// An empty history has variance 0.
double rolling_variance(std::span<const double> history);
double rolling_variance(const std::deque<double>& history);

enum class KalmanVariant { Static, Dynamic };

struct KalmanConfig {
  static constexpr std::size_t kDefaultHistory = 10;
  static constexpr double kDefaultDeltaSeconds = 0.1;

  double r_meas = 1.0;  // measurement noise variance, dB^2
  KalmanVariant variant = KalmanVariant::Static;
  std::size_t history_size = kDefaultHistory;
  // Transmission interval. With zero velocity the transition collapses to F = 1,
  // so delta only documents the step period.
  double delta_s = kDefaultDeltaSeconds;
};

/// Scalar Kalman filter on the RSSI state with F = H = 1.
///
/// The static variant keeps Q = 0. The dynamic variant sets Q to the
/// population variance of the last `history_size` observations, inserting the
/// newest observation before the variance is taken.
class KalmanFilter {
 public:
  explicit KalmanFilter(KalmanConfig config);

  /// Feeds one observation and returns the posterior estimate. The first call
  /// seeds x = rssi, P = r_meas. Throws DomainError on non-finite input.
  double step(double rssi);

  void reset();

  bool initialized() const { return initialized_; }
  double estimate() const { return x_hat_; }
  double variance() const { return p_; }
  double process_noise() const { return q_; }
  // Values from the most recent predict/update; zero before the second step.
  double last_gain() const { return gain_; }
  double last_prior_variance() const { return p_prior_; }
  const std::deque<double>& history() const { return history_; }
  const KalmanConfig& config() const { return config_; }

 private:
  KalmanConfig config_;
  bool initialized_ = false;
  double x_hat_ = 0.0;
  double p_ = 0.0;
  double q_ = 0.0;
  double gain_ = 0.0;
  double p_prior_ = 0.0;
  std::deque<double> history_;
};

}  // namespace proxkit
