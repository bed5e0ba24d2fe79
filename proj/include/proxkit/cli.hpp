#pragma once

#include <iosfwd>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace proxkit {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2 };

/// Layered key=value configuration: built-in defaults, then a config file,
/// then command-line overrides.
class RunConfig {
 public:
  /// Every recognized key with its default. Empty values mean "derive from the
  /// model file" (kf.r_meas, pf.meas_sigma).
  static const std::map<std::string, std::string>& defaults();

  RunConfig();

  /// Merges entries; throws UsageError for unknown keys.
  void merge(const std::map<std::string, std::string>& entries);
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;

 private:
  std::map<std::string, std::string> values_;
};

/// Runs `proxkit <subcommand> ...`. args excludes the program name. The config
/// file named by --config, or else by $PROXKIT_CONFIG, is layered under flags.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace proxkit
