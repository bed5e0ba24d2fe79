#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library.

#include <cmath>
#include <cstddef>
#include <vector>

namespace proxkit::oracle {

// Textbook two-pass population variance.
inline double population_variance(const std::vector<double>& v) {
  if (v.empty()) {
    return 0.0;
  }
  double mean = 0.0;
  for (double x : v) {
    mean += x;
  }
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) {
    ss += (x - mean) * (x - mean);
  }
  return ss / static_cast<double>(v.size());
}

// Log-distance model evaluated through natural logs.
inline double path_loss_rssi(double c0, double n, double d) { return c0 - 10.0 * n * std::log(d) / std::log(10.0); }

// Systematic resampling replication counts by direct interval counting: the
// number of points u + i/N that fall in [C_{j-1}, C_j).
inline std::vector<std::size_t> systematic_counts(const std::vector<double>& w, double u) {
  const std::size_t n = w.size();
  double total = 0.0;
  for (double x : w) {
    total += x;
  }
  std::vector<std::size_t> counts(n, 0);
  double lower = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double upper = j + 1 == n ? 1.0 : lower + w[j] / total;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = u + static_cast<double>(i) / static_cast<double>(n);
      if (p >= lower && p < upper && w[j] > 0.0) {
        ++counts[j];
      }
    }
    lower = upper;
  }
  return counts;
}

}  // namespace proxkit::oracle
