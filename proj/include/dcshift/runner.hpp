#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcshift/batch.hpp"
#include "dcshift/case_io.hpp"
#include "dcshift/grid.hpp"

namespace dcshift {

inline constexpr const char* kVersion = "0.3.0";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::filesystem::path case_path;
  CaseFormat case_format = CaseFormat::native_json;
  std::filesystem::path timeseries_path;  // native CSV, or RTS directory override
  SeriesResolution rts_series = SeriesResolution::real_time;
  std::optional<std::pair<int, int>> hours;  // inclusive hour-index range; all when unset
  std::vector<Strategy> strategies{Strategy::none};
  double epsilon = 0.2;
  std::vector<int> dc_buses;  // adds data centers when non-empty
  double dc_load_mw = 250.0;
  double p_max_scale = 1.5;
  double shift_cost = 0.0;
  double pair_limit = std::numeric_limits<double>::infinity();
  double alpha = 1.0;
  std::vector<double> alphas;
  std::filesystem::path out_dir = "out";
  int threads = 0;
  std::uint64_t seed = 1;
  bool previous_hour_metric = false;
};

/// "all", "N" or "A-B".
std::optional<std::pair<int, int>> parse_hour_range(const std::string& text);

/// Throws ConfigError.
void validate(const RunConfig& config);

/// Keys match the long CLI flag names with '-' replaced by '_'.
RunConfig parse_run_config_json(const std::string& text, RunConfig base = {});
std::string run_config_to_json(const RunConfig& config);

/// FNV-1a over the canonical JSON of everything that affects results.
std::string config_hash(const RunConfig& config);

struct StrategyTotals {
  int hours_attempted = 0;
  int hours_failed = 0;
  double co2 = 0.0;
  double cost = 0.0;
  double curtailment = 0.0;
};

struct RunManifest {
  std::string config_hash;
  std::string version = kVersion;
  std::vector<int> hours;
  std::map<Strategy, std::vector<std::string>> hour_status;
  std::map<Strategy, StrategyTotals> totals;
  double wall_clock_seconds = 0.0;
  bool pareto_written = false;

  bool all_hours_failed() const;
};

std::string manifest_to_json(const RunManifest& manifest);

/// Network and hourly scenarios after data-center preparation and hour
/// filtering. Throws GridError for unreadable or invalid input.
struct LoadedInputs {
  Network network;
  std::vector<HourlyScenario> scenarios;
};

LoadedInputs load_inputs(const RunConfig& config);

FlexibilityConfig flexibility_of(const Network& network, const RunConfig& config);

/// Runs every strategy over every hour and writes summary.csv, predicted.csv,
/// hours.csv, pareto.csv (when alphas are given) and manifest.json.
RunManifest run(const RunConfig& config);

/// Only the alpha sweep; writes pareto.csv and manifest.json.
RunManifest sweep(const RunConfig& config);

/// Report tables for a finished batch.
std::vector<SummaryRow> summary_rows(const BatchResult& result);

}  // namespace dcshift
