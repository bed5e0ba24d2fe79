#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "proxkit/errors.hpp"
#include "proxkit/evaluate.hpp"
#include "proxkit/filters.hpp"
#include "proxkit/nifilter.hpp"
#include "proxkit/particle.hpp"
#include "proxkit/pathloss.hpp"
#include "proxkit/simulate.hpp"

namespace py = pybind11;
using namespace proxkit;

namespace {

std::vector<CalibrationSample> zip_samples(const std::vector<double>& distances,
                                           const std::vector<double>& rssi) {
  if (distances.size() != rssi.size()) {
    throw DomainError("distances and rssi must have the same length");
  }
  std::vector<CalibrationSample> out;
  out.reserve(distances.size());
  for (std::size_t i = 0; i < distances.size(); ++i) {
    out.push_back({distances[i], rssi[i]});
  }
  return out;
}

AnchorTable to_table(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<Anchor> anchors;
  anchors.reserve(pairs.size());
  for (const auto& [d, r] : pairs) {
    anchors.push_back({d, r});
  }
  return AnchorTable(std::move(anchors));
}

std::vector<FilterKind> parse_filters(const std::vector<std::string>& names) {
  std::vector<FilterKind> kinds;
  for (const auto& n : names) {
    kinds.push_back(parse_filter(n));
  }
  return kinds;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "BLE RSSI proximity filters, simulation and evaluation.";

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  static py::exception<DomainError> domain_error(m, "DomainError", error.ptr());
  static py::exception<CalibrationError> calibration_error(m, "CalibrationError", error.ptr());
  static py::exception<DataError> data_error(m, "DataError", error.ptr());
  static py::exception<UsageError> usage_error(m, "UsageError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) {
        std::rethrow_exception(p);
      }
    } catch (const DomainError& e) {
      py::set_error(domain_error, e.what());
    } catch (const CalibrationError& e) {
      py::set_error(calibration_error, e.what());
    } catch (const DataError& e) {
      py::set_error(data_error, e.what());
    } catch (const UsageError& e) {
      py::set_error(usage_error, e.what());
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<PathLossModel>(m, "PathLossModel")
      .def(py::init<double, double>(), py::arg("c0"), py::arg("n"))
      .def_property_readonly("c0", &PathLossModel::c0)
      .def_property_readonly("n", &PathLossModel::n)
      .def("predict_rssi", [](const PathLossModel& self, double d) { return predict_rssi(self, d); },
           py::arg("distance_m"))
      .def("estimate_distance",
           [](const PathLossModel& self, double r) { return estimate_distance(self, r); },
           py::arg("rssi_dbm"))
      .def("__eq__", [](const PathLossModel& a, const PathLossModel& b) { return a == b; })
      .def("__repr__", [](const PathLossModel& self) {
        return "PathLossModel(c0=" + py::repr(py::float_(self.c0())).cast<std::string>() +
               ", n=" + py::repr(py::float_(self.n())).cast<std::string>() + ")";
      });

  m.def("predict_rssi", &predict_rssi, py::arg("model"), py::arg("distance_m"));
  m.def("estimate_distance", &estimate_distance, py::arg("model"), py::arg("rssi_dbm"));

  py::class_<Calibration>(m, "Calibration")
      .def_readonly("model", &Calibration::model)
      .def_readonly("residual_sigma", &Calibration::residual_sigma)
      .def_readonly("n_samples", &Calibration::n_samples);

  m.def(
      "calibrate",
      [](const std::vector<double>& distances, const std::vector<double>& rssi) {
        const auto samples = zip_samples(distances, rssi);
        return calibrate(samples);
      },
      py::arg("distances_m"), py::arg("rssi_dbm"),
      "Least-squares fit of c0 and n to labeled RSSI readings.");

  py::class_<MovingAverage>(m, "MovingAverage")
      .def(py::init<std::size_t>(), py::arg("window") = MovingAverage::kDefaultWindow)
      .def("step", &MovingAverage::step, py::arg("rssi"))
      .def_property_readonly("value", &MovingAverage::value)
      .def("reset", &MovingAverage::reset);

  py::class_<KalmanFilter>(m, "KalmanFilter")
      .def(py::init([](double r_meas, bool dynamic, std::size_t history_size) {
             KalmanConfig cfg;
             cfg.r_meas = r_meas;
             cfg.variant = dynamic ? KalmanVariant::Dynamic : KalmanVariant::Static;
             cfg.history_size = history_size;
             return KalmanFilter(cfg);
           }),
           py::arg("r_meas") = 1.0, py::arg("dynamic") = false,
           py::arg("history_size") = KalmanConfig::kDefaultHistory)
      .def("step", &KalmanFilter::step, py::arg("rssi"))
      .def("reset", &KalmanFilter::reset)
      .def_property_readonly("estimate", &KalmanFilter::estimate)
      .def_property_readonly("variance", &KalmanFilter::variance)
      .def_property_readonly("process_noise", &KalmanFilter::process_noise)
      .def_property_readonly("last_gain", &KalmanFilter::last_gain);

  py::class_<ParticleFilterConfig>(m, "ParticleFilterConfig")
      .def(py::init<>())
      .def_readwrite("n_particles", &ParticleFilterConfig::n_particles)
      .def_readwrite("process_sigma", &ParticleFilterConfig::process_sigma)
      .def_readwrite("meas_sigma", &ParticleFilterConfig::meas_sigma)
      .def_readwrite("seed", &ParticleFilterConfig::seed)
      .def_readwrite("ess_threshold_fraction", &ParticleFilterConfig::ess_threshold_fraction);

  py::class_<ParticleFilter>(m, "ParticleFilter")
      .def(py::init<const ParticleFilterConfig&, double, double>(), py::arg("config"),
           py::arg("initial_rssi"), py::arg("spread_sigma"))
      .def("step", &ParticleFilter::step, py::arg("rssi"))
      .def_property_readonly("estimate", &ParticleFilter::estimate)
      .def_property_readonly("particles",
                             [](const ParticleFilter& pf) {
                               return std::vector<double>(pf.particles().begin(), pf.particles().end());
                             })
      .def_property_readonly("weights", [](const ParticleFilter& pf) {
        return std::vector<double>(pf.weights().begin(), pf.weights().end());
      });

  py::class_<NiFilter>(m, "NiFilter")
      .def(py::init([](const std::vector<std::pair<double, double>>& anchors, double kde_sigma,
                       double process_noise) {
             NiConfig cfg;
             cfg.kde_sigma = kde_sigma;
             cfg.process_noise = process_noise;
             return NiFilter(to_table(anchors), cfg);
           }),
           py::arg("anchors"), py::arg("kde_sigma") = 1.0, py::arg("process_noise") = 0.0,
           "anchors: sequence of (distance_m, mean_rssi_dbm) pairs, increasing in distance.")
      .def("step", &NiFilter::step, py::arg("rssi"))
      .def("reset", &NiFilter::reset)
      .def_property_readonly("estimate", &NiFilter::estimate)
      .def_property_readonly("info_matrix", &NiFilter::info_matrix);

  py::class_<RssiSample>(m, "RssiSample")
      .def_readonly("t_ms", &RssiSample::t_ms)
      .def_readonly("rssi_dbm", &RssiSample::rssi_dbm)
      .def_readonly("true_distance_m", &RssiSample::true_distance_m);

  py::class_<RssiTrace>(m, "RssiTrace")
      .def(py::init([](std::string beacon_id, const std::vector<std::int64_t>& t_ms,
                       const std::vector<double>& rssi,
                       const std::optional<std::vector<double>>& true_distance_m) {
             if (t_ms.size() != rssi.size() ||
                 (true_distance_m && true_distance_m->size() != rssi.size())) {
               throw DomainError("trace columns must have the same length");
             }
             RssiTrace trace{std::move(beacon_id), {}};
             for (std::size_t i = 0; i < rssi.size(); ++i) {
               std::optional<double> label;
               if (true_distance_m) {
                 label = (*true_distance_m)[i];
               }
               trace.samples.push_back({t_ms[i], rssi[i], label});
             }
             return trace;
           }),
           py::arg("beacon_id"), py::arg("t_ms"), py::arg("rssi_dbm"),
           py::arg("true_distance_m") = py::none())
      .def_readonly("beacon_id", &RssiTrace::beacon_id)
      .def_readonly("samples", &RssiTrace::samples)
      .def_property_readonly("rssi_dbm",
                             [](const RssiTrace& t) {
                               std::vector<double> out;
                               for (const auto& s : t.samples) {
                                 out.push_back(s.rssi_dbm);
                               }
                               return out;
                             })
      .def("__len__", [](const RssiTrace& t) { return t.samples.size(); });

  m.def(
      "simulate",
      [](const PathLossModel& model, double noise_sigma, std::size_t samples_per_distance,
         std::uint64_t seed, std::optional<std::vector<double>> distances, double outlier_prob,
         double outlier_sigma, std::string beacon_id) {
        SimConfig cfg;
        cfg.model = model;
        cfg.noise_sigma = noise_sigma;
        cfg.samples_per_distance = samples_per_distance;
        cfg.seed = seed;
        if (distances) {
          cfg.distances = *distances;
        }
        cfg.outlier_prob = outlier_prob;
        cfg.outlier_sigma = outlier_sigma;
        cfg.beacon_id = std::move(beacon_id);
        return generate_trace(cfg);
      },
      py::arg("model"), py::arg("noise_sigma") = SimConfig::kDefaultNoiseSigma,
      py::arg("samples_per_distance") = SimConfig::kDefaultSamplesPerDistance,
      py::arg("seed") = 1, py::arg("distances") = py::none(), py::arg("outlier_prob") = 0.0,
      py::arg("outlier_sigma") = 10.0, py::arg("beacon_id") = "beacon",
      "Seeded synthetic dwell trace: samples_per_distance readings at each distance.");

  m.def("default_distances", &default_distances);

  py::class_<FilterParams>(m, "FilterParams")
      .def(py::init<>())
      .def_readwrite("sma_window", &FilterParams::sma_window)
      .def_readwrite("r_meas", &FilterParams::r_meas)
      .def_readwrite("kf_history", &FilterParams::kf_history)
      .def_readwrite("pf", &FilterParams::pf)
      .def_property(
          "kde_sigma", [](const FilterParams& p) { return p.ni.kde_sigma; },
          [](FilterParams& p, double v) { p.ni.kde_sigma = v; })
      .def_property(
          "ni_process_noise", [](const FilterParams& p) { return p.ni.process_noise; },
          [](FilterParams& p, double v) { p.ni.process_noise = v; })
      .def("set_anchors", [](FilterParams& p, const std::vector<std::pair<double, double>>& a) {
        p.anchors = to_table(a);
      });

  m.def("default_filter_params", &default_filter_params, py::arg("residual_sigma"));
  m.def("filter_names", [] {
    std::vector<std::string> names;
    for (auto kind : kAllFilters) {
      names.emplace_back(filter_name(kind));
    }
    return names;
  });

  m.def(
      "filter_trace",
      [](const RssiTrace& trace, const std::string& filter, const PathLossModel& model,
         const FilterParams& params, bool carry_state) {
        std::vector<double> out;
        for (const auto& s :
             filter_trace(trace, parse_filter(filter), params, model, RunOptions{carry_state})) {
          out.push_back(s.distance_m);
        }
        return out;
      },
      py::arg("trace"), py::arg("filter"), py::arg("model"), py::arg("params"),
      py::arg("carry_state") = false, "Distance estimate in meters after every sample.");

  py::class_<DistanceError>(m, "DistanceError")
      .def_readonly("distance_m", &DistanceError::distance_m)
      .def_readonly("estimate_m", &DistanceError::estimate_m)
      .def_readonly("abs_error_m", &DistanceError::abs_error_m);

  py::class_<ErrorReport>(m, "ErrorReport")
      .def_readonly("filter_name", &ErrorReport::filter_name)
      .def_readonly("beacon_id", &ErrorReport::beacon_id)
      .def_readonly("per_distance", &ErrorReport::per_distance)
      .def_readonly("mae_m", &ErrorReport::mae_m)
      .def_readonly("rmse_m", &ErrorReport::rmse_m)
      .def_readonly("n_samples", &ErrorReport::n_samples)
      .def_readonly("output_std_dbm", &ErrorReport::output_std_dbm);

  m.def("mae", [](const std::vector<double>& e) { return mae(e); }, py::arg("errors"));
  m.def("rmse", [](const std::vector<double>& e) { return rmse(e); }, py::arg("errors"));

  m.def(
      "run_experiment",
      [](const RssiTrace& trace, const PathLossModel& model, const std::string& filter,
         const FilterParams& params, bool carry_state) {
        return run_experiment(trace, model, parse_filter(filter), params, RunOptions{carry_state});
      },
      py::arg("trace"), py::arg("model"), py::arg("filter"), py::arg("params"),
      py::arg("carry_state") = false);

  m.def(
      "run_benchmark",
      [](const PathLossModel& true_model, double noise_sigma, std::size_t samples_per_distance,
         std::uint64_t seed, const std::vector<std::string>& filters) {
        BenchmarkConfig cfg;
        cfg.true_model = true_model;
        cfg.noise_sigma = noise_sigma;
        cfg.samples_per_distance = samples_per_distance;
        cfg.seed = seed;
        cfg.filters = parse_filters(filters);
        return run_benchmark(cfg).reports;
      },
      py::arg("true_model") = PathLossModel(-79.35, 1.885),
      py::arg("noise_sigma") = SimConfig::kDefaultNoiseSigma,
      py::arg("samples_per_distance") = SimConfig::kDefaultSamplesPerDistance,
      py::arg("seed") = 1, py::arg("filters") = std::vector<std::string>{"sma", "kf-st", "kf-dn", "pf", "ni"},
      "Calibrate on a simulated survey, then evaluate each filter on a fresh trace.");

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("value", &SweepRow::value)
      .def_readonly("mae_m", &SweepRow::mae_m)
      .def_readonly("rmse_m", &SweepRow::rmse_m)
      .def_readonly("std_dbm", &SweepRow::std_dbm);

  m.def(
      "sweep",
      [](const std::string& param, const std::vector<double>& values, const PathLossModel& model,
         const std::string& filter, const FilterParams& params, double noise_sigma,
         std::size_t samples_per_distance, std::uint64_t seed) {
        SweepSetup setup;
        setup.model = model;
        setup.sim.model = model;
        setup.sim.noise_sigma = noise_sigma;
        setup.sim.samples_per_distance = samples_per_distance;
        setup.sim.seed = seed;
        setup.filter = parse_filter(filter);
        setup.params = params;
        return sweep(parse_sweep_param(param), values, setup);
      },
      py::arg("param"), py::arg("values"), py::arg("model"), py::arg("filter"), py::arg("params"),
      py::arg("noise_sigma") = SimConfig::kDefaultNoiseSigma,
      py::arg("samples_per_distance") = SimConfig::kDefaultSamplesPerDistance, py::arg("seed") = 1);
}
