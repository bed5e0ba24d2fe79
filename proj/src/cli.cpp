#include "proxkit/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "proxkit/errors.hpp"
#include "proxkit/evaluate.hpp"
#include "proxkit/io.hpp"
#include "proxkit/rng.hpp"

namespace proxkit {

namespace fs = std::filesystem;

const std::map<std::string, std::string>& RunConfig::defaults() {
  static const std::map<std::string, std::string> kDefaults = {
      {"sma.window", "20"},
      {"kf.history", "10"},
      {"kf.delta_s", "0.1"},
      {"kf.r_meas", ""},
      {"pf.n_particles", "100"},
      {"pf.process_sigma", "0.1"},
      {"pf.meas_sigma", ""},
      {"pf.seed", "1"},
      {"pf.ess_threshold_fraction", "0.5"},
      {"ni.kde_sigma", "1"},
      {"ni.process_noise", "0"},
      {"sim.noise_sigma", "4"},
      {"sim.outlier_prob", "0"},
      {"sim.outlier_sigma", "10"},
      {"sim.seed", "1"},
      {"sim.samples_per_distance", "1200"},
      {"sim.interval_ms", "100"},
      {"sim.beacon_id", "beacon"},
      {"sim.distances", "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0,1.5,2.0,2.5,3.0"},
      {"eval.carry_state", "false"},
  };
  return kDefaults;
}

RunConfig::RunConfig() : values_(defaults()) {}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw UsageError("unknown config key '" + key + "'");
  }
  it->second = value;
}

void RunConfig::merge(const std::map<std::string, std::string>& entries) {
  for (const auto& [k, v] : entries) {
    set(k, v);
  }
}

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw UsageError("unknown config key '" + key + "'");
  }
  return it->second;
}

namespace {

template <typename T>
T parse_number(const std::string& key, std::string_view text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw UsageError("config key '" + key + "': invalid value '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

double RunConfig::get_double(const std::string& key) const { return parse_number<double>(key, get(key)); }

std::size_t RunConfig::get_size(const std::string& key) const {
  return parse_number<std::size_t>(key, get(key));
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  return parse_number<std::uint64_t>(key, get(key));
}

bool RunConfig::get_bool(const std::string& key) const {
  const auto& v = get(key);
  if (v == "true" || v == "1" || v == "yes") {
    return true;
  }
  if (v == "false" || v == "0" || v == "no") {
    return false;
  }
  throw UsageError("config key '" + key + "': expected true or false");
}

std::vector<double> RunConfig::get_list(const std::string& key) const {
  std::vector<double> out;
  std::string_view text = get(key);
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(parse_number<double>(key, text.substr(0, comma)));
    if (comma == std::string_view::npos) {
      break;
    }
    text.remove_prefix(comma + 1);
  }
  return out;
}

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open '" + path + "' for reading");
  }
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot open '" + path.string() + "' for writing");
  }
  return out;
}

ModelFile load_model(const std::string& path) {
  auto in = open_in(path);
  return read_model_kv(in, path);
}

FilterParams filter_params_from(const RunConfig& cfg, const ModelFile& model) {
  FilterParams p = default_filter_params(model.residual_sigma);
  p.sma_window = cfg.get_size("sma.window");
  p.kf_history = cfg.get_size("kf.history");
  p.kf_delta_s = cfg.get_double("kf.delta_s");
  if (!cfg.get("kf.r_meas").empty()) {
    p.r_meas = cfg.get_double("kf.r_meas");
  }
  p.pf.n_particles = cfg.get_size("pf.n_particles");
  p.pf.process_sigma = cfg.get_double("pf.process_sigma");
  if (!cfg.get("pf.meas_sigma").empty()) {
    p.pf.meas_sigma = cfg.get_double("pf.meas_sigma");
  }
  p.pf.seed = cfg.get_u64("pf.seed");
  p.pf.ess_threshold_fraction = cfg.get_double("pf.ess_threshold_fraction");
  p.ni.kde_sigma = cfg.get_double("ni.kde_sigma");
  p.ni.process_noise = cfg.get_double("ni.process_noise");
  return p;
}

SimConfig sim_config_from(const RunConfig& cfg, const PathLossModel& model) {
  SimConfig sim;
  sim.model = model;
  sim.distances = cfg.get_list("sim.distances");
  sim.samples_per_distance = cfg.get_size("sim.samples_per_distance");
  sim.interval_ms = static_cast<std::int64_t>(cfg.get_size("sim.interval_ms"));
  sim.noise_sigma = cfg.get_double("sim.noise_sigma");
  sim.outlier_prob = cfg.get_double("sim.outlier_prob");
  sim.outlier_sigma = cfg.get_double("sim.outlier_sigma");
  sim.seed = cfg.get_u64("sim.seed");
  sim.beacon_id = cfg.get("sim.beacon_id");
  return sim;
}

// "a:b" (unit step), "a:b:step", or a comma-separated list.
std::vector<double> parse_range(const std::string& spec) {
  auto num = [&](std::string_view t) { return parse_number<double>("--range", t); };
  std::vector<double> values;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string_view> parts;
    std::string_view text = spec;
    while (true) {
      const auto colon = text.find(':');
      parts.push_back(text.substr(0, colon));
      if (colon == std::string_view::npos) {
        break;
      }
      text.remove_prefix(colon + 1);
    }
    if (parts.size() < 2 || parts.size() > 3) {
      throw UsageError("--range: expected a:b or a:b:step");
    }
    const double lo = num(parts[0]);
    const double hi = num(parts[1]);
    const double step = parts.size() == 3 ? num(parts[2]) : 1.0;
    if (!(step > 0.0) || hi < lo) {
      throw UsageError("--range: need lo <= hi and a positive step");
    }
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
      values.push_back(lo + static_cast<double>(i) * step);
    }
  } else {
    std::string_view text = spec;
    while (!text.empty()) {
      const auto comma = text.find(',');
      values.push_back(num(text.substr(0, comma)));
      if (comma == std::string_view::npos) {
        break;
      }
      text.remove_prefix(comma + 1);
    }
  }
  if (values.empty()) {
    throw UsageError("--range: empty range");
  }
  return values;
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
  auto in = open_in(path);
  return parse_kv(in, path);
}

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;

  // calibrate
  std::string samples_path;
  std::string anchors_out;
  bool pre_average = false;

  // shared
  std::string model_path;
  std::string input_path;
  std::string output_path;
  std::string anchors_in;
  std::string filter = "";
  bool carry_state = false;

  // simulate / benchmark overrides
  double noise_sigma = 0.0;
  double outlier_prob = 0.0;
  double outlier_sigma = 0.0;
  std::uint64_t seed = 0;
  std::size_t samples_per_distance = 0;
  std::string beacon_id;

  // evaluate
  std::string filters = "sma,kf-st,kf-dn,pf,ni";
  bool benchmark = false;
  std::string preset = "env1-kontakt";

  // sweep
  std::string sweep_param;
  std::string range;
};

std::vector<FilterKind> parse_filter_list(const std::string& list) {
  std::vector<FilterKind> kinds;
  std::string_view text = list;
  while (!text.empty()) {
    const auto comma = text.find(',');
    kinds.push_back(parse_filter(text.substr(0, comma)));
    if (comma == std::string_view::npos) {
      break;
    }
    text.remove_prefix(comma + 1);
  }
  if (kinds.empty()) {
    throw UsageError("--filters: empty list");
  }
  return kinds;
}

int cmd_calibrate(const Options& opt, std::ostream& out) {
  auto in = open_in(opt.samples_path);
  const auto samples = read_calibration_csv(in, opt.samples_path);
  const auto means = average_by_distance(samples);
  const Calibration cal = opt.pre_average ? calibrate(means) : calibrate(samples);

  auto model_out = open_out(opt.output_path);
  write_model_kv(model_out, ModelFile{cal.model, cal.residual_sigma});
  if (!opt.anchors_out.empty()) {
    std::vector<Anchor> anchors;
    for (const auto& m : means) {
      anchors.push_back({m.distance_m, m.rssi_dbm});
    }
    auto anchors_file = open_out(opt.anchors_out);
    write_anchors_csv(anchors_file, AnchorTable(std::move(anchors)));
  }
  out << "c0=" << format_double(cal.model.c0()) << " n=" << format_double(cal.model.n())
      << " residual_sigma=" << format_double(cal.residual_sigma) << " samples=" << cal.n_samples
      << (opt.pre_average ? " (pre-averaged)" : "") << '\n';
  if (!cal.model.c0_in_typical_range()) {
    out << "warning: c0 outside the typical [-100, -40] dBm range\n";
  }
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const ModelFile model = load_model(opt.model_path);
  const SimConfig sim = sim_config_from(cfg, model.model);
  const RssiTrace trace = generate_trace(sim);
  auto file = open_out(opt.output_path);
  write_trace_csv(file, std::span(&trace, 1));
  out << "seed=" << sim.seed << " rng=" << Rng::kAlgorithm << " samples=" << trace.samples.size()
      << '\n';
  return kExitOk;
}

std::optional<AnchorTable> load_anchors(const std::string& path) {
  if (path.empty()) {
    return std::nullopt;
  }
  auto in = open_in(path);
  return read_anchors_csv(in, path);
}

std::vector<RssiTrace> load_traces(const std::string& path) {
  auto in = open_in(path);
  auto traces = read_trace_csv(in, path);
  if (traces.empty()) {
    throw DataError(path + ": trace has no samples");
  }
  return traces;
}

int cmd_filter(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const FilterKind kind = parse_filter(opt.filter);
  const ModelFile model = load_model(opt.model_path);
  FilterParams params = filter_params_from(cfg, model);
  params.anchors = load_anchors(opt.anchors_in);
  const auto traces = load_traces(opt.input_path);
  RunOptions run;
  run.carry_state = cfg.get_bool("eval.carry_state");

  auto file = open_out(opt.output_path);
  write_filtered_csv_header(file);
  for (const auto& trace : traces) {
    const auto rows = filter_trace(trace, kind, params, model.model, run);
    write_filtered_csv_rows(file, trace.beacon_id, rows);
  }
  if (kind == FilterKind::Particle) {
    out << "seed=" << params.pf.seed << " rng=" << Rng::kAlgorithm << '\n';
  }
  return kExitOk;
}

void emit_reports(const std::vector<ErrorReport>& reports, const fs::path& dir, bool multi_beacon,
                  const std::map<std::string, std::string>& metadata, std::ostream& out) {
  fs::create_directories(dir);
  out << std::left << std::setw(16) << "beacon" << std::setw(8) << "filter" << std::setw(12)
      << "mae_m" << std::setw(12) << "rmse_m" << '\n';
  for (const auto& r : reports) {
    const std::string stem =
        "report_" + (multi_beacon ? r.beacon_id + "_" : std::string()) + r.filter_name;
    auto json = open_out(dir / (stem + ".json"));
    json << report_to_json(r, metadata) << '\n';
    auto csv = open_out(dir / (stem + ".csv"));
    write_report_csv(csv, r);
    out << std::left << std::setw(16) << r.beacon_id << std::setw(8) << r.filter_name << std::setw(12)
        << format_double(std::round(r.mae_m * 1e4) / 1e4) << std::setw(12)
        << format_double(std::round(r.rmse_m * 1e4) / 1e4) << '\n';
  }
}

int cmd_evaluate(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const auto kinds = parse_filter_list(opt.filters);
  std::map<std::string, std::string> metadata{{"rng", std::string(Rng::kAlgorithm)}};

  if (opt.benchmark) {
    const auto presets = beacon_presets();
    const auto preset = std::find_if(presets.begin(), presets.end(),
                                     [&](const BeaconPreset& p) { return p.name == opt.preset; });
    if (preset == presets.end()) {
      throw UsageError("unknown preset '" + opt.preset + "'");
    }
    BenchmarkConfig bench;
    bench.true_model = preset->model;
    bench.noise_sigma = cfg.get_double("sim.noise_sigma");
    bench.outlier_prob = cfg.get_double("sim.outlier_prob");
    bench.distances = cfg.get_list("sim.distances");
    bench.samples_per_distance = cfg.get_size("sim.samples_per_distance");
    bench.seed = cfg.get_u64("sim.seed");
    bench.beacon_id = preset->name;
    bench.filters = kinds;
    const auto result = run_benchmark(bench);
    metadata["seed"] = std::to_string(bench.seed);
    metadata["preset"] = preset->name;
    metadata["calibrated_c0"] = format_double(result.calibration.model.c0());
    metadata["calibrated_n"] = format_double(result.calibration.model.n());
    out << "seed=" << bench.seed << " rng=" << Rng::kAlgorithm << " preset=" << preset->name << '\n';
    emit_reports(result.reports, opt.output_path, false, metadata, out);
    return kExitOk;
  }

  if (opt.model_path.empty() || opt.input_path.empty()) {
    throw UsageError("evaluate: -m/--model and -i/--input are required unless --benchmark is given");
  }
  const ModelFile model = load_model(opt.model_path);
  FilterParams params = filter_params_from(cfg, model);
  params.anchors = load_anchors(opt.anchors_in);
  const auto traces = load_traces(opt.input_path);
  RunOptions run;
  run.carry_state = cfg.get_bool("eval.carry_state");
  metadata["pf_seed"] = std::to_string(params.pf.seed);

  std::vector<ErrorReport> reports;
  for (const auto& trace : traces) {
    for (FilterKind kind : kinds) {
      reports.push_back(run_experiment(trace, model.model, kind, params, run));
    }
  }
  out << "seed=" << params.pf.seed << " rng=" << Rng::kAlgorithm << '\n';
  emit_reports(reports, opt.output_path, traces.size() > 1, metadata, out);
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const SweepParam param = parse_sweep_param(opt.sweep_param);
  const auto values = parse_range(opt.range);
  const ModelFile model = load_model(opt.model_path);

  SweepSetup setup;
  setup.model = model.model;
  setup.sim = sim_config_from(cfg, model.model);
  setup.params = filter_params_from(cfg, model);
  setup.params.anchors = load_anchors(opt.anchors_in);
  setup.options.carry_state = cfg.get_bool("eval.carry_state");
  if (!opt.filter.empty()) {
    setup.filter = parse_filter(opt.filter);
  } else {
    setup.filter = param == SweepParam::ParticleCount ? FilterKind::Particle
                   : param == SweepParam::WindowSize  ? FilterKind::KalmanDynamic
                                                      : FilterKind::Sma;
  }
  const auto rows = sweep(param, values, setup);
  auto file = open_out(opt.output_path);
  write_sweep_csv(file, rows);
  out << "seed=" << setup.sim.seed << " pf_seed=" << setup.params.pf.seed << " rng=" << Rng::kAlgorithm
      << " filter=" << filter_name(setup.filter) << " rows=" << rows.size() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"proxkit: RSSI proximity estimation toolkit"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--config", opt.config_path, "key=value config file (default: $PROXKIT_CONFIG)");
  app.add_option("--set", opt.overrides, "Override a config entry, key=value (repeatable)");

  auto* calibrate_cmd = app.add_subcommand("calibrate", "Fit the path-loss model to labeled RSSI samples");
  calibrate_cmd->add_option("samples", opt.samples_path, "CSV distance_m,rssi_dbm")->required();
  calibrate_cmd->add_option("-o,--output", opt.output_path, "Model key=value file")->required();
  calibrate_cmd->add_option("--emit-anchors", opt.anchors_out, "Write per-distance mean RSSI anchors");
  calibrate_cmd->add_flag("--pre-average", opt.pre_average, "Fit on per-distance means");

  auto* simulate_cmd = app.add_subcommand("simulate", "Generate a synthetic dwell trace");
  simulate_cmd->add_option("-m,--model", opt.model_path, "Model key=value file")->required();
  simulate_cmd->add_option("-o,--output", opt.output_path, "Trace CSV")->required();
  auto* noise_opt = simulate_cmd->add_option("--noise-sigma", opt.noise_sigma, "Gaussian noise, dB");
  auto* outlier_opt = simulate_cmd->add_option("--outlier-prob", opt.outlier_prob, "Outlier probability");
  auto* outlier_sigma_opt =
      simulate_cmd->add_option("--outlier-sigma", opt.outlier_sigma, "Outlier noise, dB");
  auto* seed_opt = simulate_cmd->add_option("--seed", opt.seed, "RNG seed");
  auto* spd_opt = simulate_cmd->add_option("--samples-per-distance", opt.samples_per_distance,
                                           "Samples per dwell distance");
  auto* beacon_opt = simulate_cmd->add_option("--beacon-id", opt.beacon_id, "beacon_id column value");

  auto* filter_cmd = app.add_subcommand("filter", "Run one filter over a trace");
  filter_cmd->add_option("-m,--model", opt.model_path, "Model key=value file")->required();
  filter_cmd->add_option("-f,--filter", opt.filter, "sma|kf-st|kf-dn|pf|ni")->required();
  filter_cmd->add_option("-i,--input", opt.input_path, "Trace CSV")->required();
  filter_cmd->add_option("-o,--output", opt.output_path, "Filtered CSV")->required();
  filter_cmd->add_option("--anchors", opt.anchors_in, "Anchor CSV for the NI filter");
  auto* filter_carry = filter_cmd->add_flag("--carry-state", opt.carry_state,
                                            "Do not reset at distance changes");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Error reports for each filter");
  evaluate_cmd->add_option("-m,--model", opt.model_path, "Model key=value file");
  evaluate_cmd->add_option("-i,--input", opt.input_path, "Labeled trace CSV");
  evaluate_cmd->add_option("-o,--output-dir", opt.output_path, "Report directory")->required();
  evaluate_cmd->add_option("--anchors", opt.anchors_in, "Anchor CSV for the NI filter");
  evaluate_cmd->add_option("--filters", opt.filters, "Comma-separated filter list");
  auto* eval_carry = evaluate_cmd->add_flag("--carry-state", opt.carry_state,
                                            "Do not reset at distance changes");
  evaluate_cmd->add_flag("--benchmark", opt.benchmark,
                         "Simulate calibration and dwell traces instead of reading files");
  evaluate_cmd->add_option("--preset", opt.preset, "Benchmark preset (env1|env2)-(estimote|kontakt|gimbal)");
  auto* eval_seed = evaluate_cmd->add_option("--seed", opt.seed, "Benchmark seed");
  auto* eval_noise = evaluate_cmd->add_option("--noise-sigma", opt.noise_sigma, "Benchmark noise, dB");

  auto* sweep_cmd = app.add_subcommand("sweep", "Parameter sweep over a simulated trace");
  sweep_cmd->add_option("--param", opt.sweep_param, "window-size|particle-count|noise-sigma")->required();
  sweep_cmd->add_option("--range", opt.range, "a:b, a:b:step or v1,v2,...")->required();
  sweep_cmd->add_option("-m,--model", opt.model_path, "Model key=value file")->required();
  sweep_cmd->add_option("-o,--output", opt.output_path, "Sweep CSV")->required();
  sweep_cmd->add_option("-f,--filter", opt.filter, "Filter to sweep");
  sweep_cmd->add_option("--anchors", opt.anchors_in, "Anchor CSV for the NI filter");
  auto* sweep_seed = sweep_cmd->add_option("--seed", opt.seed, "Trace seed");

  std::vector<std::string> argv_storage{"proxkit"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) {
    argv.push_back(a.c_str());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig cfg;
    std::string config_path = opt.config_path;
    if (config_path.empty()) {
      if (const char* env = std::getenv("PROXKIT_CONFIG"); env != nullptr) {
        config_path = env;
      }
    }
    if (!config_path.empty()) {
      cfg.merge(load_config_file(config_path));
    }
    for (const auto& kv : opt.overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        throw UsageError("--set expects key=value, got '" + kv + "'");
      }
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    auto flag = [&](const CLI::Option* o, const std::string& key, const std::string& value) {
      if (o->count() > 0) {
        cfg.set(key, value);
      }
    };
    flag(noise_opt, "sim.noise_sigma", format_double(opt.noise_sigma));
    flag(eval_noise, "sim.noise_sigma", format_double(opt.noise_sigma));
    flag(outlier_opt, "sim.outlier_prob", format_double(opt.outlier_prob));
    flag(outlier_sigma_opt, "sim.outlier_sigma", format_double(opt.outlier_sigma));
    flag(seed_opt, "sim.seed", std::to_string(opt.seed));
    flag(eval_seed, "sim.seed", std::to_string(opt.seed));
    flag(sweep_seed, "sim.seed", std::to_string(opt.seed));
    flag(spd_opt, "sim.samples_per_distance", std::to_string(opt.samples_per_distance));
    flag(beacon_opt, "sim.beacon_id", opt.beacon_id);
    flag(filter_carry, "eval.carry_state", "true");
    flag(eval_carry, "eval.carry_state", "true");

    if (calibrate_cmd->parsed()) {
      return cmd_calibrate(opt, out);
    }
    if (simulate_cmd->parsed()) {
      return cmd_simulate(cfg, opt, out);
    }
    if (filter_cmd->parsed()) {
      return cmd_filter(cfg, opt, out);
    }
    if (evaluate_cmd->parsed()) {
      return cmd_evaluate(cfg, opt, out);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(cfg, opt, out);
    }
    err << app.help();
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace proxkit
