#include "proxkit/io.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "proxkit/errors.hpp"

namespace proxkit {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& what) {
  throw DataError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view text, std::string_view source, std::size_t line,
                    std::string_view column) {
  double value = 0.0;
  if (!text.empty() && text.front() == '+') {
    text.remove_prefix(1);
  }
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    fail(source, line, "invalid number '" + std::string(text) + "' in column " + std::string(column));
  }
  return value;
}

std::int64_t parse_int(std::string_view text, std::string_view source, std::size_t line,
                       std::string_view column) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    fail(source, line, "invalid integer '" + std::string(text) + "' in column " + std::string(column));
  }
  return value;
}

// Reads CSV rows, resolving the required columns by header name.
class CsvReader {
 public:
  CsvReader(std::istream& in, std::string_view source, std::vector<std::string_view> required)
      : in_(in), source_(source) {
    std::string header;
    while (std::getline(in_, header)) {
      ++line_;
      if (!trim(header).empty()) {
        break;
      }
    }
    const auto names = split(header);
    for (auto column : required) {
      const auto it = std::find(names.begin(), names.end(), column);
      if (it == names.end()) {
        std::string expected;
        for (auto c : required) {
          expected += expected.empty() ? "" : ",";
          expected += c;
        }
        fail(source_, line_, "missing header (expected columns " + expected + ")");
      }
      index_.push_back(static_cast<std::size_t>(it - names.begin()));
    }
    width_ = names.size();
  }

  /// Next non-blank row, or false at end of input.
  bool next() {
    while (std::getline(in_, row_)) {
      ++line_;
      if (trim(row_).empty()) {
        continue;
      }
      fields_ = split(row_);
      if (fields_.size() != width_) {
        fail(source_, line_, "expected " + std::to_string(width_) + " fields, found " +
                                 std::to_string(fields_.size()));
      }
      return true;
    }
    return false;
  }

  std::string_view field(std::size_t required_index) const { return fields_[index_[required_index]]; }
  std::size_t line() const { return line_; }
  std::string_view source() const { return source_; }

 private:
  std::istream& in_;
  std::string_view source_;
  std::vector<std::size_t> index_;
  std::size_t width_ = 0;
  std::size_t line_ = 0;
  std::string row_;
  std::vector<std::string_view> fields_;
};

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::map<std::string, std::string> parse_kv(std::istream& in, std::string_view source) {
  std::map<std::string, std::string> out;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = raw;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) {
      text = text.substr(0, hash);
    }
    text = trim(text);
    if (text.empty()) {
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      fail(source, line, "expected key=value");
    }
    const auto key = trim(text.substr(0, eq));
    if (key.empty()) {
      fail(source, line, "empty key");
    }
    out[std::string(key)] = std::string(trim(text.substr(eq + 1)));
  }
  return out;
}

ModelFile read_model_kv(std::istream& in, std::string_view source) {
  const auto kv = parse_kv(in, source);
  auto get = [&](const char* key) -> double {
    const auto it = kv.find(key);
    if (it == kv.end()) {
      throw DataError(std::string(source) + ": missing key '" + key + "'");
    }
    return parse_double(it->second, source, 0, key);
  };
  const double c0 = get("c0");
  const double n = get("n");
  const double sigma = kv.count("residual_sigma") ? get("residual_sigma") : 0.0;
  try {
    return ModelFile{PathLossModel(c0, n), sigma};
  } catch (const DomainError& e) {
    throw DataError(std::string(source) + ": " + e.what());
  }
}

void write_model_kv(std::ostream& out, const ModelFile& model) {
  out << "c0=" << format_double(model.model.c0()) << '\n'
      << "n=" << format_double(model.model.n()) << '\n'
      << "residual_sigma=" << format_double(model.residual_sigma) << '\n';
}

std::vector<CalibrationSample> read_calibration_csv(std::istream& in, std::string_view source) {
  CsvReader csv(in, source, {"distance_m", "rssi_dbm"});
  std::vector<CalibrationSample> samples;
  while (csv.next()) {
    const double d = parse_double(csv.field(0), source, csv.line(), "distance_m");
    const double r = parse_double(csv.field(1), source, csv.line(), "rssi_dbm");
    if (!(d > 0.0)) {
      fail(source, csv.line(), "distance_m must be positive");
    }
    samples.push_back({d, r});
  }
  return samples;
}

void write_calibration_csv(std::ostream& out, std::span<const CalibrationSample> samples) {
  out << "distance_m,rssi_dbm\n";
  for (const auto& s : samples) {
    out << format_double(s.distance_m) << ',' << format_double(s.rssi_dbm) << '\n';
  }
}

AnchorTable read_anchors_csv(std::istream& in, std::string_view source) {
  CsvReader csv(in, source, {"distance_m", "mean_rssi_dbm"});
  std::vector<Anchor> anchors;
  while (csv.next()) {
    anchors.push_back({parse_double(csv.field(0), source, csv.line(), "distance_m"),
                       parse_double(csv.field(1), source, csv.line(), "mean_rssi_dbm")});
  }
  try {
    return AnchorTable(std::move(anchors));
  } catch (const DomainError& e) {
    throw DataError(std::string(source) + ": " + e.what());
  }
}

void write_anchors_csv(std::ostream& out, const AnchorTable& table) {
  out << "distance_m,mean_rssi_dbm\n";
  for (const auto& a : table.anchors()) {
    out << format_double(a.distance_m) << ',' << format_double(a.mean_rssi_dbm) << '\n';
  }
}

std::vector<RssiTrace> read_trace_csv(std::istream& in, std::string_view source) {
  CsvReader csv(in, source, {"t_ms", "beacon_id", "rssi_dbm", "true_distance_m"});
  std::vector<RssiTrace> traces;
  std::unordered_map<std::string, std::size_t> by_id;
  while (csv.next()) {
    RssiSample s;
    s.t_ms = parse_int(csv.field(0), source, csv.line(), "t_ms");
    const std::string id(csv.field(1));
    s.rssi_dbm = parse_double(csv.field(2), source, csv.line(), "rssi_dbm");
    if (!csv.field(3).empty()) {
      s.true_distance_m = parse_double(csv.field(3), source, csv.line(), "true_distance_m");
      if (!(*s.true_distance_m > 0.0)) {
        fail(source, csv.line(), "true_distance_m must be positive");
      }
    }
    auto [it, inserted] = by_id.try_emplace(id, traces.size());
    if (inserted) {
      traces.push_back(RssiTrace{id, {}});
    }
    auto& trace = traces[it->second];
    if (!trace.samples.empty() && s.t_ms < trace.samples.back().t_ms) {
      fail(source, csv.line(), "t_ms decreases for beacon '" + id + "'");
    }
    trace.samples.push_back(s);
  }
  return traces;
}

void write_trace_csv(std::ostream& out, std::span<const RssiTrace> traces) {
  out << "t_ms,beacon_id,rssi_dbm,true_distance_m\n";
  for (const auto& trace : traces) {
    for (const auto& s : trace.samples) {
      out << s.t_ms << ',' << trace.beacon_id << ',' << format_double(s.rssi_dbm) << ',';
      if (s.true_distance_m) {
        out << format_double(*s.true_distance_m);
      }
      out << '\n';
    }
  }
}

void write_filtered_csv_header(std::ostream& out) {
  out << "t_ms,beacon_id,rssi_dbm,filtered_rssi_dbm,distance_m,true_distance_m\n";
}

void write_filtered_csv_rows(std::ostream& out, std::string_view beacon_id,
                             std::span<const FilteredSample> rows) {
  for (const auto& r : rows) {
    out << r.t_ms << ',' << beacon_id << ',' << format_double(r.rssi_dbm) << ',';
    if (r.filtered_rssi_dbm) {
      out << format_double(*r.filtered_rssi_dbm);
    }
    out << ',' << format_double(r.distance_m) << ',';
    if (r.true_distance_m) {
      out << format_double(*r.true_distance_m);
    }
    out << '\n';
  }
}

std::string report_to_json(const ErrorReport& report,
                           const std::map<std::string, std::string>& metadata) {
  nlohmann::ordered_json j;
  j["filter_name"] = report.filter_name;
  j["beacon_id"] = report.beacon_id;
  j["per_distance"] = nlohmann::ordered_json::array();
  for (const auto& e : report.per_distance) {
    j["per_distance"].push_back(
        {{"distance_m", e.distance_m}, {"estimate_m", e.estimate_m}, {"abs_error_m", e.abs_error_m}});
  }
  j["mae_m"] = report.mae_m;
  j["rmse_m"] = report.rmse_m;
  j["n_samples"] = report.n_samples;
  j["output_std_dbm"] = report.output_std_dbm;
  if (!metadata.empty()) {
    j["metadata"] = metadata;
  }
  return j.dump(2);
}

void write_report_csv(std::ostream& out, const ErrorReport& report) {
  out << "distance_m,estimate_m,abs_error_m\n";
  for (const auto& e : report.per_distance) {
    out << format_double(e.distance_m) << ',' << format_double(e.estimate_m) << ','
        << format_double(e.abs_error_m) << '\n';
  }
  out << "# filter=" << report.filter_name << '\n'
      << "# beacon_id=" << report.beacon_id << '\n'
      << "# mae_m=" << format_double(report.mae_m) << '\n'
      << "# rmse_m=" << format_double(report.rmse_m) << '\n'
      << "# n_samples=" << report.n_samples << '\n';
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "param,mae_m,rmse_m,std_dbm\n";
  for (const auto& r : rows) {
    out << format_double(r.value) << ',' << format_double(r.mae_m) << ',' << format_double(r.rmse_m)
        << ',' << format_double(r.std_dbm) << '\n';
  }
}

}  // namespace proxkit
