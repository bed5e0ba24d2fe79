#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace proxkit {

/// Training pair: a known distance and the mean RSSI observed there.
struct Anchor {
  double distance_m;
  double mean_rssi_dbm;
};

/// Immutable set of anchors with strictly increasing, positive distances.
class AnchorTable {
 public:
  /// Throws DomainError if the table is empty, unordered, or holds non-finite
  /// or non-positive values. A single anchor is accepted.
  explicit AnchorTable(std::vector<Anchor> anchors);

  std::span<const Anchor> anchors() const { return anchors_; }
  std::size_t size() const { return anchors_.size(); }
  double min_distance() const { return anchors_.front().distance_m; }
  double max_distance() const { return anchors_.back().distance_m; }

 private:
  std::vector<Anchor> anchors_;
};

/// Gaussian kernel (2 pi)^(-d/2) |sigma|^(-1/2) exp(-(r - r_bar)^2 / (2 sigma)).
/// sigma is the smoothing parameter (a variance); throws DomainError unless > 0.
double gaussian_kernel(double r, double r_bar, double sigma, int dim = 1);

struct KdeEstimate {
  double distance_m = 0.0;   // weighted anchor distance
  double variance_m2 = 0.0;  // sum w_i (sigma + (x - x_i)^2)
  std::vector<double> weights;
  bool fallback = false;  // all kernels underflowed; nearest anchor used
};

/// Memoryless KDE measurement: normalized kernel weights over the anchors and
/// the weighted distance and spread they imply.
KdeEstimate kde_update(const AnchorTable& table, double r, double sigma);

struct NiConfig {
  static constexpr double kDefaultKdeSigma = 1.0;

  double kde_sigma = kDefaultKdeSigma;
  double process_noise = 0.0;  // q added to the posterior variance each prediction, m^2
};

/// Nonparametric information filter on distance.
///
/// State is kept as the information pair (Y, y) = (1/P, x/P), starting at
/// (0, 0). Each step predicts with F = 1 and fuses the KDE measurement by
/// adding its information; the first step therefore returns the KDE estimate.
class NiFilter {
 public:
  NiFilter(AnchorTable table, NiConfig config = {});

  /// Returns the posterior distance estimate. Throws DomainError on non-finite r.
  double step(double r);
  void reset();

  double info_matrix() const { return info_y_; }
  double info_vector() const { return info_y_ * x_hat_; }
  double estimate() const { return x_hat_; }
  const KdeEstimate& last_measurement() const { return last_; }
  const AnchorTable& table() const { return table_; }
  const NiConfig& config() const { return config_; }

 private:
  AnchorTable table_;
  NiConfig config_;
  double info_y_ = 0.0;
  double x_hat_ = 0.0;
  KdeEstimate last_;
};

}  // namespace proxkit
