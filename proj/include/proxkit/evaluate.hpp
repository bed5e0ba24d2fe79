#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "proxkit/filters.hpp"
#include "proxkit/nifilter.hpp"
#include "proxkit/particle.hpp"
#include "proxkit/pathloss.hpp"
#include "proxkit/simulate.hpp"

namespace proxkit {

enum class FilterKind { Sma, KalmanStatic, KalmanDynamic, Particle, Ni };

inline constexpr std::array<FilterKind, 5> kAllFilters = {
    FilterKind::Sma, FilterKind::KalmanStatic, FilterKind::KalmanDynamic, FilterKind::Particle,
    FilterKind::Ni};

/// "sma", "kf-st", "kf-dn", "pf", "ni".
std::string_view filter_name(FilterKind kind);

/// Inverse of filter_name; throws UsageError for unknown names.
FilterKind parse_filter(std::string_view name);

/// Noise sigmas derived from a calibration are floored here so a noiseless fit
/// still yields valid filter parameters.
inline constexpr double kMinNoiseSigma = 1e-3;

struct FilterParams {
  std::size_t sma_window = MovingAverage::kDefaultWindow;
  double r_meas = 16.0;  // dB^2
  std::size_t kf_history = KalmanConfig::kDefaultHistory;
  double kf_delta_s = KalmanConfig::kDefaultDeltaSeconds;
  ParticleFilterConfig pf;
  NiConfig ni;
  // NI training pairs. When absent, anchors are placed at the default
  // distances with RSSI predicted by the path-loss model.
  std::optional<AnchorTable> anchors;
};

/// Defaults with both measurement-noise terms tied to the calibration
/// residual: r_meas = sigma^2, pf.meas_sigma = sigma.
FilterParams default_filter_params(double residual_sigma);

/// Anchors at `distances` with model-predicted mean RSSI.
AnchorTable model_anchors(const PathLossModel& model, std::span<const double> distances);

enum class OutputDomain { Rssi, Distance };

/// Uniform streaming interface over the five filters.
class ProximityFilter {
 public:
  virtual ~ProximityFilter() = default;
  /// Native output: filtered RSSI (dBm) or distance (m), see domain().
  virtual double step(double rssi) = 0;
  virtual OutputDomain domain() const = 0;
  /// Forget all state; the next observation starts a fresh recursion.
  virtual void reset() = 0;
};

std::unique_ptr<ProximityFilter> make_filter(FilterKind kind, const FilterParams& params,
                                             const PathLossModel& model);

struct RunOptions {
  // Keep filter state across distance segments instead of resetting at each
  // change of the ground-truth label.
  bool carry_state = false;
};

struct FilteredSample {
  std::int64_t t_ms = 0;
  double rssi_dbm = 0.0;
  std::optional<double> filtered_rssi_dbm;  // absent for distance-domain filters
  double distance_m = 0.0;
  std::optional<double> true_distance_m;
};

/// Streams the trace through a fresh filter. Labeled traces are split into
/// segments at every change of true distance unless options.carry_state.
/// Throws DataError if timestamps decrease.
std::vector<FilteredSample> filter_trace(const RssiTrace& trace, FilterKind kind,
                                         const FilterParams& params, const PathLossModel& model,
                                         RunOptions options = {});

struct DistanceError {
  double distance_m;
  double estimate_m;
  double abs_error_m;
};

struct ErrorReport {
  std::string filter_name;
  std::string beacon_id;
  std::vector<DistanceError> per_distance;
  double mae_m = 0.0;
  double rmse_m = 0.0;
  std::size_t n_samples = 0;
  // Pooled within-segment standard deviation of the filter output in dBm.
  // Distance outputs are mapped back through the path-loss model first.
  double output_std_dbm = 0.0;
};

/// Mean of |e|. Throws DomainError on an empty list.
double mae(std::span<const double> errors);
/// sqrt(mean(e^2)). Throws DomainError on an empty list.
double rmse(std::span<const double> errors);

/// Runs one filter over a labeled trace. Each distance segment contributes the
/// filter's reading at its final sample. Throws DataError for unlabeled traces.
ErrorReport run_experiment(const RssiTrace& trace, const PathLossModel& model, FilterKind kind,
                           const FilterParams& params, RunOptions options = {});

enum class SweepParam { WindowSize, ParticleCount, NoiseSigma };

std::string_view sweep_param_name(SweepParam param);
SweepParam parse_sweep_param(std::string_view name);

struct SweepSetup {
  SimConfig sim;
  PathLossModel model{-70.0, 2.0};
  FilterKind filter = FilterKind::KalmanDynamic;
  FilterParams params;
  RunOptions options;
};

struct SweepRow {
  double value;
  double mae_m;
  double rmse_m;
  double std_dbm;
};

/// One experiment per value. Every value sees a trace simulated from the same
/// sim.seed; particle-filter seeds are mix_seed(params.pf.seed, value index).
/// WindowSize applies to the SMA window or the dynamic Kalman history,
/// ParticleCount to the particle filter. Values run in parallel; results are
/// in input order and independent of scheduling.
std::vector<SweepRow> sweep(SweepParam param, std::span<const double> values,
                            const SweepSetup& setup);

struct BenchmarkConfig {
  PathLossModel true_model{-79.35, 1.885};
  double noise_sigma = SimConfig::kDefaultNoiseSigma;
  double outlier_prob = 0.0;
  std::vector<double> distances = default_distances();
  std::size_t samples_per_distance = SimConfig::kDefaultSamplesPerDistance;
  std::size_t calibration_samples_per_distance = 1000;
  std::uint64_t seed = 1;
  std::string beacon_id = "beacon";
  std::vector<FilterKind> filters{kAllFilters.begin(), kAllFilters.end()};
};

struct BenchmarkResult {
  Calibration calibration;
  AnchorTable anchors;
  FilterParams params;
  std::vector<ErrorReport> reports;  // in config.filters order
};

/// Full simulated procedure: a calibration dwell fits the path-loss model and
/// anchor means, then an independent dwell trace is run through each filter
/// using the calibrated model. Seeds for the two traces and the particle filter
/// are mix_seed(seed, 0..2).
BenchmarkResult run_benchmark(const BenchmarkConfig& config);

}  // namespace proxkit
