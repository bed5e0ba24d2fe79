#include "proxkit/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "proxkit/errors.hpp"
#include "proxkit/rng.hpp"

namespace proxkit {

namespace {

constexpr std::array<std::string_view, 5> kFilterNames = {"sma", "kf-st", "kf-dn", "pf", "ni"};

class SmaAdapter final : public ProximityFilter {
 public:
  explicit SmaAdapter(std::size_t window) : sma_(window) {}
  double step(double rssi) override { return sma_.step(rssi); }
  OutputDomain domain() const override { return OutputDomain::Rssi; }
  void reset() override { sma_.reset(); }

 private:
  MovingAverage sma_;
};

class KalmanAdapter final : public ProximityFilter {
 public:
  explicit KalmanAdapter(KalmanConfig config) : kf_(config) {}
  double step(double rssi) override { return kf_.step(rssi); }
  OutputDomain domain() const override { return OutputDomain::Rssi; }
  void reset() override { kf_.reset(); }

 private:
  KalmanFilter kf_;
};

// Particles are drawn around the first observation after each reset, with a
// spread equal to the measurement sigma. Every restart gets its own stream.
class ParticleAdapter final : public ProximityFilter {
 public:
  explicit ParticleAdapter(ParticleFilterConfig config) : config_(config) {
    ParticleFilter probe(config_, 0.0, 0.0);  // validates the configuration
  }
  double step(double rssi) override {
    if (!pf_) {
      ParticleFilterConfig cfg = config_;
      cfg.seed = mix_seed(config_.seed, restarts_++);
      pf_.emplace(cfg, rssi, cfg.meas_sigma);
    }
    return pf_->step(rssi);
  }
  OutputDomain domain() const override { return OutputDomain::Rssi; }
  void reset() override { pf_.reset(); }

 private:
  ParticleFilterConfig config_;
  std::optional<ParticleFilter> pf_;
  std::uint64_t restarts_ = 0;
};

class NiAdapter final : public ProximityFilter {
 public:
  NiAdapter(AnchorTable table, NiConfig config) : ni_(std::move(table), config) {}
  double step(double rssi) override { return ni_.step(rssi); }
  OutputDomain domain() const override { return OutputDomain::Distance; }
  void reset() override { ni_.reset(); }

 private:
  NiFilter ni_;
};

bool segment_boundary(const RssiSample& prev, const RssiSample& cur) {
  return prev.true_distance_m.has_value() && cur.true_distance_m.has_value() &&
         *prev.true_distance_m != *cur.true_distance_m;
}

void check_jensen(const ErrorReport& report) {
  // mae <= rmse holds exactly in real arithmetic; allow for rounding only.
  if (report.mae_m > report.rmse_m * (1.0 + 1e-12) + 1e-300) {
    throw std::logic_error("ErrorReport: MAE exceeds RMSE for filter " + report.filter_name);
  }
}

}  // namespace

std::string_view filter_name(FilterKind kind) { return kFilterNames[static_cast<std::size_t>(kind)]; }

FilterKind parse_filter(std::string_view name) {
  for (std::size_t i = 0; i < kFilterNames.size(); ++i) {
    if (kFilterNames[i] == name) {
      return kAllFilters[i];
    }
  }
  throw UsageError("unknown filter '" + std::string(name) + "' (expected sma, kf-st, kf-dn, pf or ni)");
}

FilterParams default_filter_params(double residual_sigma) {
  FilterParams params;
  const double sigma = std::max(residual_sigma, kMinNoiseSigma);
  params.r_meas = sigma * sigma;
  params.pf.meas_sigma = sigma;
  return params;
}

AnchorTable model_anchors(const PathLossModel& model, std::span<const double> distances) {
  std::vector<double> sorted(distances.begin(), distances.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<Anchor> anchors;
  anchors.reserve(sorted.size());
  for (double d : sorted) {
    anchors.push_back({d, predict_rssi(model, d)});
  }
  return AnchorTable(std::move(anchors));
}

std::unique_ptr<ProximityFilter> make_filter(FilterKind kind, const FilterParams& params,
                                             const PathLossModel& model) {
  switch (kind) {
    case FilterKind::Sma:
      return std::make_unique<SmaAdapter>(params.sma_window);
    case FilterKind::KalmanStatic:
    case FilterKind::KalmanDynamic: {
      KalmanConfig cfg;
      cfg.r_meas = params.r_meas;
      cfg.history_size = params.kf_history;
      cfg.delta_s = params.kf_delta_s;
      cfg.variant = kind == FilterKind::KalmanStatic ? KalmanVariant::Static : KalmanVariant::Dynamic;
      return std::make_unique<KalmanAdapter>(cfg);
    }
    case FilterKind::Particle:
      return std::make_unique<ParticleAdapter>(params.pf);
    case FilterKind::Ni: {
      const auto defaults = default_distances();
      AnchorTable table = params.anchors ? *params.anchors : model_anchors(model, defaults);
      return std::make_unique<NiAdapter>(std::move(table), params.ni);
    }
  }
  throw UsageError("unknown filter kind");
}

std::vector<FilteredSample> filter_trace(const RssiTrace& trace, FilterKind kind,
                                         const FilterParams& params, const PathLossModel& model,
                                         RunOptions options) {
  auto filter = make_filter(kind, params, model);
  std::vector<FilteredSample> out;
  out.reserve(trace.samples.size());
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    const auto& s = trace.samples[i];
    if (i > 0) {
      const auto& prev = trace.samples[i - 1];
      if (s.t_ms < prev.t_ms) {
        throw DataError("trace '" + trace.beacon_id + "': timestamps decrease at sample " +
                        std::to_string(i));
      }
      if (!options.carry_state && segment_boundary(prev, s)) {
        filter->reset();
      }
    }
    FilteredSample fs;
    fs.t_ms = s.t_ms;
    fs.rssi_dbm = s.rssi_dbm;
    fs.true_distance_m = s.true_distance_m;
    const double value = filter->step(s.rssi_dbm);
    if (filter->domain() == OutputDomain::Rssi) {
      fs.filtered_rssi_dbm = value;
      fs.distance_m = estimate_distance(model, value);
    } else {
      fs.distance_m = value;
    }
    out.push_back(fs);
  }
  return out;
}

double mae(std::span<const double> errors) {
  if (errors.empty()) {
    throw DomainError("mae: empty error list");
  }
  double sum = 0.0;
  for (double e : errors) {
    sum += std::abs(e);
  }
  return sum / static_cast<double>(errors.size());
}

double rmse(std::span<const double> errors) {
  if (errors.empty()) {
    throw DomainError("rmse: empty error list");
  }
  double sum = 0.0;
  for (double e : errors) {
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(errors.size()));
}

ErrorReport run_experiment(const RssiTrace& trace, const PathLossModel& model, FilterKind kind,
                           const FilterParams& params, RunOptions options) {
  if (!trace.labeled()) {
    throw DataError("run_experiment: trace '" + trace.beacon_id +
                    "' lacks true_distance_m labels on some samples");
  }
  const auto filtered = filter_trace(trace, kind, params, model, options);

  ErrorReport report;
  report.filter_name = std::string(filter_name(kind));
  report.beacon_id = trace.beacon_id;
  report.n_samples = filtered.size();

  double pooled_ss = 0.0;
  std::size_t begin = 0;
  while (begin < filtered.size()) {
    std::size_t end = begin + 1;
    while (end < filtered.size() &&
           *filtered[end].true_distance_m == *filtered[begin].true_distance_m) {
      ++end;
    }
    const auto& last = filtered[end - 1];
    const double truth = *last.true_distance_m;
    report.per_distance.push_back({truth, last.distance_m, std::abs(last.distance_m - truth)});

    std::vector<double> dbm;
    dbm.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      dbm.push_back(filtered[i].filtered_rssi_dbm ? *filtered[i].filtered_rssi_dbm
                                                  : predict_rssi(model, filtered[i].distance_m));
    }
    pooled_ss += rolling_variance(dbm) * static_cast<double>(dbm.size());
    begin = end;
  }
  report.output_std_dbm = std::sqrt(pooled_ss / static_cast<double>(filtered.size()));

  std::vector<double> errors;
  errors.reserve(report.per_distance.size());
  for (const auto& e : report.per_distance) {
    errors.push_back(e.abs_error_m);
  }
  report.mae_m = mae(errors);
  report.rmse_m = rmse(errors);
  check_jensen(report);
  return report;
}

std::string_view sweep_param_name(SweepParam param) {
  switch (param) {
    case SweepParam::WindowSize:
      return "window-size";
    case SweepParam::ParticleCount:
      return "particle-count";
    case SweepParam::NoiseSigma:
      return "noise-sigma";
  }
  return "unknown";
}

SweepParam parse_sweep_param(std::string_view name) {
  for (auto p : {SweepParam::WindowSize, SweepParam::ParticleCount, SweepParam::NoiseSigma}) {
    if (sweep_param_name(p) == name) {
      return p;
    }
  }
  throw UsageError("unknown sweep parameter '" + std::string(name) +
                   "' (expected window-size, particle-count or noise-sigma)");
}

std::vector<SweepRow> sweep(SweepParam param, std::span<const double> values,
                            const SweepSetup& setup) {
  if (values.empty()) {
    throw DomainError("sweep: empty parameter range");
  }
  switch (param) {
    case SweepParam::WindowSize:
      if (setup.filter != FilterKind::Sma && setup.filter != FilterKind::KalmanDynamic) {
        throw UsageError("sweep: window-size applies to sma or kf-dn only");
      }
      break;
    case SweepParam::ParticleCount:
      if (setup.filter != FilterKind::Particle) {
        throw UsageError("sweep: particle-count applies to pf only");
      }
      break;
    case SweepParam::NoiseSigma:
      break;
  }
  for (double v : values) {
    const bool integral = param != SweepParam::NoiseSigma;
    if (!std::isfinite(v) || v < 0.0 || (integral && (v < 1.0 || v != std::floor(v)))) {
      throw DomainError("sweep: invalid parameter value " + std::to_string(v));
    }
  }

  validate(setup.sim);
  const RssiTrace shared_trace =
      param == SweepParam::NoiseSigma ? RssiTrace{} : generate_trace(setup.sim);

  std::vector<SweepRow> rows(values.size());
  auto run_one = [&](std::size_t index) {
    const double v = values[index];
    FilterParams params = setup.params;
    params.pf.seed = mix_seed(setup.params.pf.seed, index);
    const RssiTrace* trace = &shared_trace;
    RssiTrace local;
    switch (param) {
      case SweepParam::WindowSize:
        params.sma_window = static_cast<std::size_t>(v);
        params.kf_history = static_cast<std::size_t>(v);
        break;
      case SweepParam::ParticleCount:
        params.pf.n_particles = static_cast<std::size_t>(v);
        break;
      case SweepParam::NoiseSigma: {
        SimConfig sim = setup.sim;
        sim.noise_sigma = v;
        local = generate_trace(sim);
        trace = &local;
        break;
      }
    }
    const auto report = run_experiment(*trace, setup.model, setup.filter, params, setup.options);
    rows[index] = {v, report.mae_m, report.rmse_m, report.output_std_dbm};
  };

  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, values.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(workers);
  auto worker = [&](std::size_t w) {
    try {
      for (std::size_t i = next++; i < values.size(); i = next++) {
        run_one(i);
      }
    } catch (...) {
      failures[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back(worker, w);
    }
  }
  for (const auto& f : failures) {
    if (f) {
      std::rethrow_exception(f);
    }
  }
  return rows;
}

BenchmarkResult run_benchmark(const BenchmarkConfig& config) {
  SimConfig cal_sim;
  cal_sim.model = config.true_model;
  cal_sim.distances = config.distances;
  cal_sim.samples_per_distance = config.calibration_samples_per_distance;
  cal_sim.noise_sigma = config.noise_sigma;
  cal_sim.outlier_prob = config.outlier_prob;
  cal_sim.seed = mix_seed(config.seed, 0);
  cal_sim.beacon_id = config.beacon_id;
  const RssiTrace cal_trace = generate_trace(cal_sim);

  std::vector<CalibrationSample> cal_samples;
  cal_samples.reserve(cal_trace.samples.size());
  for (const auto& s : cal_trace.samples) {
    cal_samples.push_back({*s.true_distance_m, s.rssi_dbm});
  }
  const Calibration calibration = calibrate(cal_samples);

  std::vector<Anchor> anchors;
  for (const auto& mean : average_by_distance(cal_samples)) {
    anchors.push_back({mean.distance_m, mean.rssi_dbm});
  }

  SimConfig run_sim = cal_sim;
  run_sim.samples_per_distance = config.samples_per_distance;
  run_sim.seed = mix_seed(config.seed, 1);
  const RssiTrace trace = generate_trace(run_sim);

  BenchmarkResult result{calibration, AnchorTable(std::move(anchors)),
                         default_filter_params(calibration.residual_sigma), {}};
  result.params.pf.seed = mix_seed(config.seed, 2);
  result.params.anchors = result.anchors;
  for (FilterKind kind : config.filters) {
    result.reports.push_back(run_experiment(trace, calibration.model, kind, result.params));
  }
  return result;
}

}  // namespace proxkit
