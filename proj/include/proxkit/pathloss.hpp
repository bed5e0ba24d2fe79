#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace proxkit {

/// Log-distance path-loss model: RSSI = c0 - 10 n log10(d / d0), d0 = 1 m.
class PathLossModel {
 public:
  static constexpr double kReferenceDistance = 1.0;

  /// Throws DomainError unless c0 is finite and n is finite and positive.
  PathLossModel(double c0, double n);

  double c0() const { return c0_; }
  double n() const { return n_; }
  double d0() const { return kReferenceDistance; }

  /// c0 outside [-100, -40] dBm is legal but unusual for BLE hardware.
  bool c0_in_typical_range() const { return c0_ >= -100.0 && c0_ <= -40.0; }

  friend bool operator==(const PathLossModel&, const PathLossModel&) = default;

 private:
  double c0_;
  double n_;
};

/// Expected RSSI (dBm) at distance_m. Throws DomainError for distance_m <= 0.
double predict_rssi(const PathLossModel& model, double distance_m);

/// Inverse of predict_rssi: 10^((c0 - rssi) / (10 n)). Always positive.
double estimate_distance(const PathLossModel& model, double rssi_dbm);

struct CalibrationSample {
  double distance_m;
  double rssi_dbm;
};

struct Calibration {
  PathLossModel model;
  // Standard deviation of the RSSI residuals (dB), m - 2 degrees of freedom.
  // Zero when the fit has no spare degrees of freedom.
  double residual_sigma;
  std::size_t n_samples;
};

/// Closed-form least-squares fit of rssi = c0 - 10 n log10(d) over the samples.
///
/// Throws DomainError for non-positive distances or non-finite values,
/// CalibrationError when fewer than two distinct distances are present or the
/// fitted exponent is not positive.
Calibration calibrate(std::span<const CalibrationSample> samples);

/// Mean RSSI per distinct distance, sorted by increasing distance.
std::vector<CalibrationSample> average_by_distance(std::span<const CalibrationSample> samples);

}  // namespace proxkit
