#include "proxkit/nifilter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "proxkit/errors.hpp"

namespace proxkit {

AnchorTable::AnchorTable(std::vector<Anchor> anchors) : anchors_(std::move(anchors)) {
  if (anchors_.empty()) {
    throw DomainError("AnchorTable: at least one anchor is required");
  }
  for (std::size_t i = 0; i < anchors_.size(); ++i) {
    const auto& a = anchors_[i];
    if (!(a.distance_m > 0.0) || !std::isfinite(a.distance_m) || !std::isfinite(a.mean_rssi_dbm)) {
      throw DomainError("AnchorTable: anchors need positive finite distance and finite RSSI");
    }
    if (i > 0 && !(a.distance_m > anchors_[i - 1].distance_m)) {
      throw DomainError("AnchorTable: anchor distances must be strictly increasing");
    }
  }
}

double gaussian_kernel(double r, double r_bar, double sigma, int dim) {
  if (!(sigma > 0.0)) {
    throw DomainError("gaussian_kernel: smoothing parameter must be positive");
  }
  if (dim < 1) {
    throw DomainError("gaussian_kernel: dimension must be positive");
  }
  const double dev = r - r_bar;
  const double norm = std::pow(2.0 * std::numbers::pi, -0.5 * dim) / std::sqrt(sigma);
  return norm * std::exp(-dev * dev / (2.0 * sigma));
}

KdeEstimate kde_update(const AnchorTable& table, double r, double sigma) {
  const auto anchors = table.anchors();
  KdeEstimate est;
  est.weights.resize(anchors.size());

  double total = 0.0;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    est.weights[i] = gaussian_kernel(r, anchors[i].mean_rssi_dbm, sigma);
    total += est.weights[i];
  }

  if (total > 0.0) {
    for (auto& w : est.weights) {
      w /= total;
    }
  } else {
    const auto nearest = std::min_element(anchors.begin(), anchors.end(), [r](const Anchor& a, const Anchor& b) {
      return std::abs(r - a.mean_rssi_dbm) < std::abs(r - b.mean_rssi_dbm);
    });
    std::fill(est.weights.begin(), est.weights.end(), 0.0);
    est.weights[static_cast<std::size_t>(nearest - anchors.begin())] = 1.0;
    est.fallback = true;
  }

  for (std::size_t i = 0; i < anchors.size(); ++i) {
    est.distance_m += est.weights[i] * anchors[i].distance_m;
  }
  // Convex combination; the clamp only absorbs rounding at the hull edges.
  est.distance_m = std::clamp(est.distance_m, table.min_distance(), table.max_distance());
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const double spread = est.distance_m - anchors[i].distance_m;
    est.variance_m2 += est.weights[i] * (sigma + spread * spread);
  }
  return est;
}

NiFilter::NiFilter(AnchorTable table, NiConfig config)
    : table_(std::move(table)), config_(config) {
  if (!(config_.kde_sigma > 0.0)) {
    throw DomainError("NiFilter: KDE smoothing parameter must be positive");
  }
  if (!(config_.process_noise >= 0.0) || !std::isfinite(config_.process_noise)) {
    throw DomainError("NiFilter: process noise must be non-negative");
  }
}

void NiFilter::reset() {
  info_y_ = 0.0;
  x_hat_ = 0.0;
  last_ = {};
}

double NiFilter::step(double r) {
  if (!std::isfinite(r)) {
    throw DomainError("NiFilter: observation must be finite");
  }
  last_ = kde_update(table_, r, config_.kde_sigma);
  if (!(last_.variance_m2 > 0.0)) {
    throw std::logic_error("NiFilter: KDE variance collapsed to zero");
  }

  // Prediction, F = 1: the mean carries over and Q is added in the variance
  // domain. A zero-information prior stays uninformative.
  double prior_info = info_y_;
  if (prior_info > 0.0 && config_.process_noise > 0.0) {
    prior_info = 1.0 / (1.0 / prior_info + config_.process_noise);
  }

  // Update: Y = Y- + 1/P_r and y = y- + x_r/P_r. The mean is carried in gain
  // form, x = x- + (1/P_r)/Y (x_r - x-), which is algebraically the same and
  // returns x_r exactly when the prior holds no information.
  const double meas_info = 1.0 / last_.variance_m2;
  info_y_ = prior_info + meas_info;
  const double gain = meas_info / info_y_;
  x_hat_ = x_hat_ + gain * (last_.distance_m - x_hat_);
  x_hat_ = std::clamp(x_hat_, table_.min_distance(), table_.max_distance());
  return x_hat_;
}

}  // namespace proxkit
