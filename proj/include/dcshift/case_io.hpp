#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dcshift/grid.hpp"

namespace dcshift {

enum class CaseFormat { native_json, rts_gmlc_csv };

CaseFormat parse_case_format(std::string_view text);

/// Reads and validates a case. For rts-gmlc-csv, `path` is the RTS_Data
/// directory (holding SourceData/) or SourceData itself.
Network load_network(const std::filesystem::path& path, CaseFormat format);

/// Native JSON from an in-memory document.
Network parse_network_json(std::string_view text);
std::string serialize_network_json(const Network& network);
void save_network_json(const Network& network, const std::filesystem::path& path);

/// Native hourly series: a wide CSV with header `hour,load:<id>...,avail:<id>...`.
std::vector<HourlyScenario> parse_timeseries_csv(std::istream& in);
std::vector<HourlyScenario> load_timeseries_csv(const std::filesystem::path& path);
void write_timeseries_csv(std::ostream& out, const std::vector<HourlyScenario>& hours);

enum class SeriesResolution { real_time, day_ahead };

/// Hourly scenarios from an RTS-GMLC timeseries_data_files directory. Regional
/// load is spread over buses in proportion to their base MW load; five-minute
/// real-time values are averaged into hours.
std::vector<HourlyScenario> load_rts_gmlc_timeseries(const Network& network,
                                                     const std::filesystem::path& rts_dir,
                                                     SeriesResolution resolution);

/// Minimal CSV reader used by the adaptors: comma separated, optional double
/// quotes, header row first.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(std::string_view name) const;  // -1 when absent
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

}  // namespace dcshift
