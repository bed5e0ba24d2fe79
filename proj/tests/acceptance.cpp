// Acceptance runner: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "proxkit/evaluate.hpp"
#include "proxkit/filters.hpp"
#include "proxkit/nifilter.hpp"
#include "proxkit/particle.hpp"
#include "proxkit/pathloss.hpp"
#include "proxkit/rng.hpp"
#include "proxkit/simulate.hpp"

using namespace proxkit;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// Every ErrorReport produced by this runner, checked together at the end.
std::vector<ErrorReport> g_reports;

double brute_population_variance(const std::deque<double>& xs) {
  double mean = 0.0;
  for (double x : xs) {
    mean += x;
  }
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) {
    ss += (x - mean) * (x - mean);
  }
  return ss / static_cast<double>(xs.size());
}

Outcome ac1_calibration() {
  const auto start = Clock::now();
  const PathLossModel truth(-79.35, 1.885);
  int ok = 0;
  double worst_c0 = 0.0;
  double worst_n = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    SimConfig cfg;
    cfg.model = truth;
    cfg.noise_sigma = 2.0;
    cfg.samples_per_distance = 70;
    cfg.seed = seed;
    const auto trace = generate_trace(cfg);
    std::vector<CalibrationSample> samples;
    samples.reserve(trace.samples.size());
    for (const auto& s : trace.samples) {
      samples.push_back({*s.true_distance_m, s.rssi_dbm});
    }
    const auto fit = calibrate(samples);
    const double dc0 = std::abs(fit.model.c0() - truth.c0());
    const double dn = std::abs(fit.model.n() - truth.n());
    worst_c0 = std::max(worst_c0, dc0);
    worst_n = std::max(worst_n, dn);
    ok += (dc0 <= 0.5 && dn <= 0.05) ? 1 : 0;
  }
  const double elapsed = seconds_since(start);
  return {ok >= 95 && elapsed < 5.0,
          fmt("%d/100 runs within tolerance (worst |dc0|=%.3f dB, |dn|=%.4f), %.3f s", ok, worst_c0,
              worst_n, elapsed)};
}

Outcome ac2_round_trip() {
  Rng rng(2);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const PathLossModel model(-100.0 + 60.0 * rng.uniform(), 1.0 + 4.0 * rng.uniform());
    const double d = std::pow(10.0, -2.0 + 4.0 * rng.uniform());
    const double back = estimate_distance(model, predict_rssi(model, d));
    worst = std::max(worst, std::abs(back - d) / d);
  }
  return {worst <= 1e-9, fmt("worst relative error %.3g over 10^4 pairs", worst)};
}

Outcome ac3_filter_improvement() {
  const auto start = Clock::now();
  constexpr int kSeeds = 50;
  std::vector<double> mean_mae(kAllFilters.size(), 0.0);
  for (int seed = 1; seed <= kSeeds; ++seed) {
    BenchmarkConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(seed);
    const auto result = run_benchmark(cfg);
    for (std::size_t i = 0; i < result.reports.size(); ++i) {
      mean_mae[i] += result.reports[i].mae_m / kSeeds;
      g_reports.push_back(result.reports[i]);
    }
  }
  const double elapsed = seconds_since(start);
  const double sma = mean_mae[0];
  bool each_le = true;
  std::string parts;
  for (std::size_t i = 0; i < kAllFilters.size(); ++i) {
    parts += fmt("%s=%.4f ", std::string(filter_name(kAllFilters[i])).c_str(), mean_mae[i]);
    if (i > 0 && mean_mae[i] > sma) {
      each_le = false;
    }
  }
  const double pf_gain = 1.0 - mean_mae[3] / sma;
  const double ni_gain = 1.0 - mean_mae[4] / sma;
  const bool big_gain = std::max(pf_gain, ni_gain) >= 0.15;
  return {each_le && big_gain && elapsed < 60.0,
          fmt("mean MAE m: %s| each<=sma: %s, reduction pf=%.1f%% ni=%.1f%%, %.1f s", parts.c_str(),
              each_le ? "yes" : "no", 100.0 * pf_gain, 100.0 * ni_gain, elapsed)};
}

Outcome ac4_jensen() {
  std::size_t bad = 0;
  for (const auto& r : g_reports) {
    // Allowance for rounding only; the inequality itself is exact in reals.
    if (!(r.mae_m <= r.rmse_m * (1.0 + 1e-12))) {
      ++bad;
    }
  }
  return {bad == 0 && !g_reports.empty(),
          fmt("%zu reports checked, %zu violations", g_reports.size(), bad)};
}

Outcome ac5_kalman() {
  Rng rng(5);
  std::size_t steps = 0;
  std::size_t gain_bad = 0;
  std::size_t var_bad = 0;
  for (int run = 0; run < 200; ++run) {
    KalmanConfig cfg;
    cfg.r_meas = 0.1 + 30.0 * rng.uniform();
    cfg.variant = run % 2 == 0 ? KalmanVariant::Static : KalmanVariant::Dynamic;
    KalmanFilter kf(cfg);
    const double level = -90.0 + 40.0 * rng.uniform();
    const double sigma = 0.5 + 6.0 * rng.uniform();
    kf.step(level + sigma * rng.normal());
    for (int k = 0; k < 500; ++k) {
      kf.step(level + sigma * rng.normal());
      ++steps;
      gain_bad += (kf.last_gain() > 0.0 && kf.last_gain() < 1.0) ? 0 : 1;
      var_bad += kf.variance() <= kf.last_prior_variance() ? 0 : 1;
    }
  }
  std::size_t fixed_bad = 0;
  for (int run = 0; run < 40; ++run) {
    KalmanConfig cfg;
    cfg.r_meas = 0.1 + 30.0 * rng.uniform();
    cfg.variant = run % 2 == 0 ? KalmanVariant::Static : KalmanVariant::Dynamic;
    KalmanFilter kf(cfg);
    const double c = -100.0 + 70.0 * rng.uniform();
    for (int k = 0; k < 1000; ++k) {
      fixed_bad += kf.step(c) == c ? 0 : 1;
    }
  }
  return {gain_bad == 0 && var_bad == 0 && fixed_bad == 0,
          fmt("%zu steps: gain outside (0,1) %zu, posterior>prior %zu; constant-input mismatches %zu/40000",
              steps, gain_bad, var_bad, fixed_bad)};
}

Outcome ac6_rolling_variance() {
  Rng rng(6);
  KalmanConfig cfg;
  cfg.r_meas = 16.0;
  cfg.variant = KalmanVariant::Dynamic;
  KalmanFilter kf(cfg);
  std::deque<double> window;
  double worst = 0.0;
  double level = -75.0;
  for (int k = 0; k < 10000; ++k) {
    if (k % 1500 == 0) {
      level = -95.0 + 40.0 * rng.uniform();
    }
    double r = level + 4.0 * rng.normal();
    if (rng.uniform() < 0.05) {
      r += 15.0 * rng.normal();
    }
    kf.step(r);
    window.push_back(r);
    if (window.size() > cfg.history_size) {
      window.pop_front();
    }
    worst = std::max(worst, std::abs(kf.process_noise() - brute_population_variance(window)));
  }
  return {worst <= 1e-12, fmt("worst |q - brute force| = %.3g over 10^4 steps", worst)};
}

Outcome ac7_particle() {
  SimConfig sim;
  sim.model = PathLossModel(-79.35, 1.885);
  sim.samples_per_distance = 400;
  const auto trace = generate_trace(sim);
  ParticleFilterConfig cfg;
  cfg.seed = 77;
  ParticleFilter a(cfg, trace.samples.front().rssi_dbm, cfg.meas_sigma);
  ParticleFilter b(cfg, trace.samples.front().rssi_dbm, cfg.meas_sigma);
  double worst_norm = 0.0;
  std::size_t mismatches = 0;
  for (const auto& s : trace.samples) {
    const double ea = a.step(s.rssi_dbm);
    const double eb = b.step(s.rssi_dbm);
    double sum = 0.0;
    for (double w : a.weights()) {
      sum += w;
    }
    worst_norm = std::max(worst_norm, std::abs(sum - 1.0));
    if (ea != eb || !std::equal(a.particles().begin(), a.particles().end(), b.particles().begin())) {
      ++mismatches;
    }
  }

  Rng rng(7);
  double worst_dev = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 199.0);
    std::vector<double> w(n);
    double total = 0.0;
    for (auto& x : w) {
      x = std::pow(rng.uniform(), 1.0 + 8.0 * (trial % 4));
      total += x;
    }
    for (auto& x : w) {
      x /= total;
    }
    const auto idx = systematic_resample(w, rng);
    std::vector<std::size_t> counts(n, 0);
    for (auto i : idx) {
      ++counts[i];
    }
    for (std::size_t j = 0; j < n; ++j) {
      worst_dev = std::max(worst_dev,
                           std::abs(static_cast<double>(counts[j]) - static_cast<double>(n) * w[j]));
    }
  }
  return {worst_norm < 1e-9 && mismatches == 0 && worst_dev <= 1.0,
          fmt("%zu steps: worst |sum w - 1| = %.3g, seeded mismatches %zu; "
              "1000 resamples: worst |count - N w| = %.4f",
              trace.samples.size(), worst_norm, mismatches, worst_dev)};
}

Outcome ac8_ni() {
  std::vector<Anchor> fourteen;
  const PathLossModel model(-79.35, 1.885);
  for (double d : default_distances()) {
    fourteen.push_back({d, predict_rssi(model, d)});
  }
  const AnchorTable table(fourteen);
  Rng rng(8);
  double worst_norm = 0.0;
  std::size_t outside = 0;
  for (int run = 0; run < 50; ++run) {
    NiFilter ni(table);
    const double level = -95.0 + 40.0 * rng.uniform();
    for (int k = 0; k < 200; ++k) {
      const double r = level + 6.0 * rng.normal();
      const auto est = kde_update(table, r, 1.0);
      double sum = 0.0;
      for (double w : est.weights) {
        sum += w;
      }
      worst_norm = std::max(worst_norm, std::abs(sum - 1.0));
      const double out = ni.step(r);
      outside += (out >= table.min_distance() && out <= table.max_distance()) ? 0 : 1;
    }
  }

  std::size_t single_bad = 0;
  NiFilter single(AnchorTable({{1.7, -77.0}}));
  for (int k = 0; k < 1000; ++k) {
    single_bad += single.step(-120.0 + 100.0 * rng.uniform()) == 1.7 ? 0 : 1;
  }

  const AnchorTable pair({{1.0, -70.0}, {2.0, -76.0}});
  const auto est = kde_update(pair, -73.0, 1.0);
  NiFilter ni_pair(pair);
  std::size_t pair_bad = est.distance_m == 1.5 ? 0 : 1;
  for (int k = 0; k < 10; ++k) {
    pair_bad += ni_pair.step(-73.0) == 1.5 ? 0 : 1;
  }
  return {worst_norm < 1e-9 && outside == 0 && single_bad == 0 && pair_bad == 0,
          fmt("worst |sum w - 1| = %.3g, outside hull %zu/10000, single-anchor mismatches %zu/1000, "
              "two-anchor symmetric mismatches %zu/11",
              worst_norm, outside, single_bad, pair_bad)};
}

Outcome ac9_window_trend() {
  constexpr int kSeeds = 50;
  std::vector<double> sizes;
  for (int n = 2; n <= 10; ++n) {
    sizes.push_back(n);
  }
  const PathLossModel model(-79.35, 1.885);
  int votes = 0;
  std::vector<double> mean_std(sizes.size(), 0.0);
  for (int seed = 1; seed <= kSeeds; ++seed) {
    SweepSetup setup;
    setup.model = model;
    setup.sim.model = model;
    setup.sim.seed = static_cast<std::uint64_t>(seed);
    setup.filter = FilterKind::KalmanDynamic;
    setup.params = default_filter_params(setup.sim.noise_sigma);
    const auto rows = sweep(SweepParam::WindowSize, sizes, setup);
    bool non_increasing = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      mean_std[i] += rows[i].std_dbm / kSeeds;
      if (i > 0 && rows[i].std_dbm > rows[i - 1].std_dbm) {
        non_increasing = false;
      }
    }
    votes += non_increasing ? 1 : 0;
  }
  std::string curve;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    curve += fmt("%.0f:%.3f ", sizes[i], mean_std[i]);
  }
  return {2 * votes > kSeeds,
          fmt("kf-dn history sweep non-increasing in %d/%d seeds; mean std dBm %s", votes, kSeeds,
              curve.c_str())};
}

Outcome ac10_scale() {
  const auto start = Clock::now();
  std::size_t samples = 0;
  for (const auto& preset : beacon_presets()) {
    BenchmarkConfig cfg;
    cfg.true_model = preset.model;
    cfg.noise_sigma = preset.noise_sigma;
    cfg.beacon_id = preset.name;
    const auto result = run_benchmark(cfg);
    for (const auto& r : result.reports) {
      samples += r.n_samples;
      g_reports.push_back(r);
    }
  }
  const double elapsed = seconds_since(start);
  return {samples == 6u * 16800u * 5u && elapsed < 60.0,
          fmt("%zu filtered samples (6 presets x 16800 x 5 filters) in %.2f s", samples, elapsed)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"AC1 path-loss recovery", ac1_calibration},
      {"AC2 round-trip identity", ac2_round_trip},
      {"AC3 filter-improvement trend", ac3_filter_improvement},
      {"AC5 Kalman properties", ac5_kalman},
      {"AC6 rolling variance oracle", ac6_rolling_variance},
      {"AC7 particle filter", ac7_particle},
      {"AC8 NI filter", ac8_ni},
      {"AC9 window-size trend", ac9_window_trend},
      {"AC10 end-to-end scale", ac10_scale},
      // Runs last so it sees every report produced above.
      {"AC4 MAE <= RMSE", ac4_jensen},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failed += outcome.pass ? 0 : 1;
    std::printf("%s %s: %s\n", outcome.pass ? "PASS" : "FAIL", name, outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
