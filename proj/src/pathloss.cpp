#include "proxkit/pathloss.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "proxkit/errors.hpp"

namespace proxkit {

PathLossModel::PathLossModel(double c0, double n) : c0_(c0), n_(n) {
  if (!std::isfinite(c0)) {
    throw DomainError("path-loss model: c0 must be finite");
  }
  if (!std::isfinite(n) || n <= 0.0) {
    throw DomainError("path-loss model: exponent n must be positive");
  }
}

double predict_rssi(const PathLossModel& model, double distance_m) {
  if (!(distance_m > 0.0) || !std::isfinite(distance_m)) {
    throw DomainError("predict_rssi: distance must be positive and finite");
  }
  return model.c0() - 10.0 * model.n() * std::log10(distance_m / model.d0());
}

double estimate_distance(const PathLossModel& model, double rssi_dbm) {
  return model.d0() * std::pow(10.0, (model.c0() - rssi_dbm) / (10.0 * model.n()));
}

Calibration calibrate(std::span<const CalibrationSample> samples) {
  const std::size_t m = samples.size();
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& s = samples[i];
    if (!(s.distance_m > 0.0) || !std::isfinite(s.distance_m)) {
      throw DomainError("calibrate: sample distances must be positive and finite");
    }
    if (!std::isfinite(s.rssi_dbm)) {
      throw DomainError("calibrate: sample RSSI must be finite");
    }
    x[i] = std::log10(s.distance_m / PathLossModel::kReferenceDistance);
  }

  const bool distinct = m >= 2 && std::any_of(samples.begin(), samples.end(), [&](const auto& s) {
                          return s.distance_m != samples.front().distance_m;
                        });
  if (!distinct) {
    throw CalibrationError("calibrate: need samples at two or more distinct distances");
  }

  double x_mean = 0.0;
  double y_mean = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    x_mean += x[i];
    y_mean += samples[i].rssi_dbm;
  }
  x_mean /= static_cast<double>(m);
  y_mean /= static_cast<double>(m);

  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = x[i] - x_mean;
    sxx += dx * dx;
    sxy += dx * (samples[i].rssi_dbm - y_mean);
  }
  if (!(sxx > 0.0)) {
    throw CalibrationError("calibrate: degenerate design (no spread in log-distance)");
  }

  const double slope = sxy / sxx;  // slope = -10 n
  const double intercept = y_mean - slope * x_mean;
  const double n = -slope / 10.0;
  if (!(n > 0.0)) {
    std::ostringstream msg;
    msg << "calibrate: fitted path-loss exponent n=" << n
        << " is not positive (RSSI does not decrease with distance); c0=" << intercept;
    throw CalibrationError(msg.str());
  }

  double ssr = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = samples[i].rssi_dbm - (intercept + slope * x[i]);
    ssr += r * r;
  }
  const double sigma = m > 2 ? std::sqrt(ssr / static_cast<double>(m - 2)) : 0.0;

  return Calibration{PathLossModel(intercept, n), sigma, m};
}

std::vector<CalibrationSample> average_by_distance(std::span<const CalibrationSample> samples) {
  std::map<double, std::pair<double, std::size_t>> groups;
  for (const auto& s : samples) {
    auto& [sum, count] = groups[s.distance_m];
    sum += s.rssi_dbm;
    ++count;
  }
  std::vector<CalibrationSample> out;
  out.reserve(groups.size());
  for (const auto& [d, acc] : groups) {
    out.push_back({d, acc.first / static_cast<double>(acc.second)});
  }
  return out;
}

}  // namespace proxkit
