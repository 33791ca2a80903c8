#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dcshift {

/// Hours in the simulated year (2020 is a leap year).
inline constexpr int kHoursPerYear = 8784;

enum class FuelClass { coal, gas, oil, nuclear, hydro, wind, solar, storage, other };

std::string_view to_string(FuelClass fuel);
FuelClass parse_fuel_class(std::string_view text);

/// nuclear, hydro, wind, solar and storage count as low-carbon.
bool is_low_carbon_fuel(FuelClass fuel);
/// Only wind and solar output is curtailable.
bool is_curtailable_fuel(FuelClass fuel);

/// Default carbon intensity in tonnes CO2 per MWh for a fuel class; used when
/// a case file does not carry its own value.
double default_carbon_intensity(FuelClass fuel);

class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public GridError {
 public:
  using GridError::GridError;
};

class ValidationError : public GridError {
 public:
  using GridError::GridError;
};

class UnknownIdError : public GridError {
 public:
  using GridError::GridError;
};

struct Bus {
  int id = 0;
  std::string name;
  std::string region;
  bool is_reference = false;

  bool operator==(const Bus&) const = default;
};

/// Flow on the line is base_mva * susceptance * (theta_from - theta_to), in MW,
/// limited to [-flow_limit, flow_limit].
struct Line {
  std::string name;
  int from_bus = 0;
  int to_bus = 0;
  double susceptance = 0.0;  // per unit
  double flow_limit = 0.0;   // MW

  bool operator==(const Line&) const = default;
};

struct Generator {
  int id = 0;
  std::string name;
  int bus = 0;
  double cost = 0.0;              // $/MWh
  double carbon_intensity = 0.0;  // t CO2/MWh
  double p_min = 0.0;
  double p_max = 0.0;              // available capacity for the current hour
  double p_max_nameplate = 0.0;    // upper limit on any hourly availability
  FuelClass fuel = FuelClass::other;
  bool is_low_carbon = false;
  bool is_curtailable_renewable = false;

  bool operator==(const Generator&) const = default;
};

struct LoadPoint {
  int id = 0;
  std::string name;
  int bus = 0;
  double demand = 0.0;  // MW
  bool is_data_center = false;

  bool operator==(const LoadPoint&) const = default;
};

/// Immutable once validated. Bus ids run 1..N, so bus `id` lives at
/// `buses[id - 1]`.
struct Network {
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Line> lines;
  std::vector<Generator> generators;
  std::vector<LoadPoint> loads;
  std::map<std::string, std::vector<int>> regions;

  int bus_count() const { return static_cast<int>(buses.size()); }
  int reference_bus() const;

  /// MW per unit of angle difference on a line.
  double line_coefficient(const Line& line) const { return base_mva * line.susceptance; }

  /// Net demand per bus, indexed by bus id - 1.
  std::vector<double> bus_demand() const;
  double total_demand() const;
  double total_capacity() const;

  /// Indices into `loads` of the data-center loads, in load order.
  std::vector<int> data_center_indices() const;

  int generator_index(int id) const;
  int load_index(int id) const;

  /// Region labels indexed by bus id - 1 mapped to a dense region number in
  /// map order.
  std::vector<int> bus_region_index() const;

  bool operator==(const Network&) const = default;
};

/// Rebuilds `regions` from the per-bus region labels.
void rebuild_regions(Network& network);

/// Throws ValidationError naming the offending record.
void validate(const Network& network);

struct HourlyScenario {
  int hour_index = 0;
  std::map<int, double> load_overrides;          // load id -> MW
  std::map<int, double> renewable_availability;  // generator id -> MW

  bool operator==(const HourlyScenario&) const = default;
};

/// Copy of `network` with the hour's loads and available capacities applied.
Network apply_scenario(const Network& network, const HourlyScenario& scenario);

struct DataCenterSetup {
  std::vector<int> buses;
  double load_mw = 250.0;
  double p_max_scale = 1.5;
};

/// Adds one constant data-center load per listed bus, zeroes every
/// generator's minimum output and scales nameplate capacity.
Network prepare_shifting_case(const Network& network, const DataCenterSetup& setup);

}  // namespace dcshift
