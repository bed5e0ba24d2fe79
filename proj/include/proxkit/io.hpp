#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "proxkit/evaluate.hpp"
#include "proxkit/nifilter.hpp"
#include "proxkit/pathloss.hpp"
#include "proxkit/simulate.hpp"

namespace proxkit {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Flat `key=value` lines; `#` starts a comment, blank lines are skipped and
/// whitespace around keys and values is trimmed. Later keys win. Throws
/// DataError naming the line for lines without '='.
std::map<std::string, std::string> parse_kv(std::istream& in, std::string_view source);

/// Calibrated model as written by `proxkit calibrate`.
struct ModelFile {
  PathLossModel model;
  double residual_sigma = 0.0;
};

ModelFile read_model_kv(std::istream& in, std::string_view source);
void write_model_kv(std::ostream& out, const ModelFile& model);

/// CSV `distance_m,rssi_dbm`.
std::vector<CalibrationSample> read_calibration_csv(std::istream& in, std::string_view source);
void write_calibration_csv(std::ostream& out, std::span<const CalibrationSample> samples);

/// CSV `distance_m,mean_rssi_dbm`.
AnchorTable read_anchors_csv(std::istream& in, std::string_view source);
void write_anchors_csv(std::ostream& out, const AnchorTable& table);

/// CSV `t_ms,beacon_id,rssi_dbm,true_distance_m` (last field may be empty).
/// Rows are grouped by beacon_id in order of first appearance; timestamps must
/// not decrease within a beacon.
std::vector<RssiTrace> read_trace_csv(std::istream& in, std::string_view source);
void write_trace_csv(std::ostream& out, std::span<const RssiTrace> traces);

/// CSV `t_ms,beacon_id,rssi_dbm,filtered_rssi_dbm,distance_m,true_distance_m`.
void write_filtered_csv_header(std::ostream& out);
void write_filtered_csv_rows(std::ostream& out, std::string_view beacon_id,
                             std::span<const FilteredSample> rows);

/// JSON object mirroring ErrorReport; `metadata` entries are added verbatim
/// under a "metadata" key when non-empty.
std::string report_to_json(const ErrorReport& report,
                           const std::map<std::string, std::string>& metadata = {});
/// CSV `distance_m,estimate_m,abs_error_m` followed by summary comment lines.
void write_report_csv(std::ostream& out, const ErrorReport& report);

/// CSV `param,mae_m,rmse_m,std_dbm`.
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace proxkit
