#include "dcshift/grid.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace dcshift {

namespace {

struct FuelName {
  FuelClass fuel;
  std::string_view name;
};

constexpr FuelName kFuelNames[] = {
    {FuelClass::coal, "coal"},       {FuelClass::gas, "gas"},     {FuelClass::oil, "oil"},
    {FuelClass::nuclear, "nuclear"}, {FuelClass::hydro, "hydro"}, {FuelClass::wind, "wind"},
    {FuelClass::solar, "solar"},     {FuelClass::storage, "storage"},
    {FuelClass::other, "other"},
};

template <typename... Args>
std::string concat(const Args&... args) {
  std::ostringstream out;
  (out << ... << args);
  return out.str();
}

}  // namespace

std::string_view to_string(FuelClass fuel) {
  for (const auto& entry : kFuelNames)
    if (entry.fuel == fuel) return entry.name;
  return "other";
}

FuelClass parse_fuel_class(std::string_view text) {
  for (const auto& entry : kFuelNames)
    if (entry.name == text) return entry.fuel;
  throw ParseError(concat("unknown fuel class '", text, "'"));
}

bool is_low_carbon_fuel(FuelClass fuel) {
  switch (fuel) {
    case FuelClass::nuclear:
    case FuelClass::hydro:
    case FuelClass::wind:
    case FuelClass::solar:
    case FuelClass::storage:
      return true;
    default:
      return false;
  }
}

bool is_curtailable_fuel(FuelClass fuel) {
  return fuel == FuelClass::wind || fuel == FuelClass::solar;
}

double default_carbon_intensity(FuelClass fuel) {
  switch (fuel) {
    case FuelClass::coal:
      return 0.95;
    case FuelClass::gas:
      return 0.50;
    case FuelClass::oil:
      return 0.80;
    default:
      return 0.0;
  }
}

int Network::reference_bus() const {
  for (const auto& bus : buses)
    if (bus.is_reference) return bus.id;
  throw ValidationError("network has no reference bus");
}

std::vector<double> Network::bus_demand() const {
  std::vector<double> demand(buses.size(), 0.0);
  for (const auto& load : loads) demand[load.bus - 1] += load.demand;
  return demand;
}

double Network::total_demand() const {
  double total = 0.0;
  for (const auto& load : loads) total += load.demand;
  return total;
}

double Network::total_capacity() const {
  double total = 0.0;
  for (const auto& gen : generators) total += gen.p_max;
  return total;
}

std::vector<int> Network::data_center_indices() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(loads.size()); ++i)
    if (loads[i].is_data_center) out.push_back(i);
  return out;
}

int Network::generator_index(int id) const {
  for (int i = 0; i < static_cast<int>(generators.size()); ++i)
    if (generators[i].id == id) return i;
  return -1;
}

int Network::load_index(int id) const {
  for (int i = 0; i < static_cast<int>(loads.size()); ++i)
    if (loads[i].id == id) return i;
  return -1;
}

std::vector<int> Network::bus_region_index() const {
  std::map<std::string, int> dense;
  for (const auto& [label, members] : regions) dense.emplace(label, static_cast<int>(dense.size()));
  std::vector<int> out(buses.size(), 0);
  for (const auto& bus : buses) {
    auto it = dense.find(bus.region);
    out[bus.id - 1] = it == dense.end() ? 0 : it->second;
  }
  return out;
}

void rebuild_regions(Network& network) {
  network.regions.clear();
  for (const auto& bus : network.buses) network.regions[bus.region].push_back(bus.id);
  for (auto& [label, members] : network.regions) std::sort(members.begin(), members.end());
}

void validate(const Network& network) {
  const int n = network.bus_count();
  if (n == 0) throw ValidationError("network has no buses");
  if (!(network.base_mva > 0.0)) throw ValidationError("base_mva must be positive");

  int references = 0;
  for (int i = 0; i < n; ++i) {
    const auto& bus = network.buses[i];
    if (bus.id != i + 1)
      throw ValidationError(concat("bus ids must be contiguous from 1: found bus ", bus.id,
                                   " at position ", i + 1));
    if (bus.is_reference) ++references;
  }
  if (references == 0) throw ValidationError("network has no reference bus");
  if (references > 1) throw ValidationError("network has more than one reference bus");

  auto check_bus = [n](int bus, const std::string& what) {
    if (bus < 1 || bus > n)
      throw ValidationError(concat(what, " references unknown bus ", bus));
  };

  for (std::size_t i = 0; i < network.lines.size(); ++i) {
    const auto& line = network.lines[i];
    const std::string what =
        concat("line '", line.name.empty() ? std::to_string(i + 1) : line.name, "'");
    check_bus(line.from_bus, what);
    check_bus(line.to_bus, what);
    if (line.from_bus == line.to_bus) throw ValidationError(what + " connects a bus to itself");
    if (!(line.susceptance > 0.0)) throw ValidationError(what + " has non-positive susceptance");
    if (!(line.flow_limit > 0.0)) throw ValidationError(what + " has non-positive flow limit");
  }

  std::set<int> ids;
  for (const auto& gen : network.generators) {
    const std::string what = concat("generator ", gen.id);
    if (!ids.insert(gen.id).second) throw ValidationError("duplicate " + what);
    check_bus(gen.bus, what);
    if (!(gen.p_min >= 0.0 && gen.p_min <= gen.p_max))
      throw ValidationError(what + " violates 0 <= p_min <= p_max");
    if (gen.p_max > gen.p_max_nameplate + 1e-9)
      throw ValidationError(what + " has p_max above nameplate");
    if (!(gen.cost >= 0.0)) throw ValidationError(what + " has negative cost");
    if (!(gen.carbon_intensity >= 0.0))
      throw ValidationError(what + " has negative carbon intensity");
    if (gen.is_curtailable_renewable && !gen.is_low_carbon)
      throw ValidationError(what + " is curtailable but not low-carbon");
  }

  ids.clear();
  for (const auto& load : network.loads) {
    const std::string what = concat("load ", load.id);
    if (!ids.insert(load.id).second) throw ValidationError("duplicate " + what);
    check_bus(load.bus, what);
    if (!(load.demand >= 0.0)) throw ValidationError(what + " has negative demand");
  }

  std::vector<int> owner(n, 0);
  std::size_t covered = 0;
  for (const auto& [label, members] : network.regions) {
    for (int bus : members) {
      check_bus(bus, concat("region '", label, "'"));
      if (owner[bus - 1]++) throw ValidationError(concat("bus ", bus, " is in two regions"));
      if (network.buses[bus - 1].region != label)
        throw ValidationError(concat("bus ", bus, " is labelled region '",
                                     network.buses[bus - 1].region, "' but listed in '", label,
                                     "'"));
      ++covered;
    }
  }
  if (covered != static_cast<std::size_t>(n))
    throw ValidationError("regions do not partition the bus set");
}

Network apply_scenario(const Network& network, const HourlyScenario& scenario) {
  Network out = network;
  for (const auto& [id, mw] : scenario.load_overrides) {
    const int idx = out.load_index(id);
    if (idx < 0) throw UnknownIdError(concat("scenario hour ", scenario.hour_index,
                                             " overrides unknown load ", id));
    if (!(mw >= 0.0))
      throw ValidationError(concat("scenario sets load ", id, " to negative demand"));
    out.loads[idx].demand = mw;
  }
  for (const auto& [id, mw] : scenario.renewable_availability) {
    const int idx = out.generator_index(id);
    if (idx < 0) throw UnknownIdError(concat("scenario hour ", scenario.hour_index,
                                             " sets availability of unknown generator ", id));
    auto& gen = out.generators[idx];
    if (!(mw >= 0.0 && mw <= gen.p_max_nameplate + 1e-9))
      throw ValidationError(concat("availability ", mw, " for generator ", id,
                                   " outside [0, ", gen.p_max_nameplate, "]"));
    gen.p_max = std::min(mw, gen.p_max_nameplate);
    gen.p_min = std::min(gen.p_min, gen.p_max);
  }
  return out;
}

Network prepare_shifting_case(const Network& network, const DataCenterSetup& setup) {
  Network out = network;
  int next_id = 1;
  for (const auto& load : out.loads) next_id = std::max(next_id, load.id + 1);
  for (int bus : setup.buses) {
    if (bus < 1 || bus > out.bus_count())
      throw UnknownIdError(concat("data-center bus ", bus, " does not exist"));
    LoadPoint dc;
    dc.id = next_id++;
    dc.name = concat("DC@", bus);
    dc.bus = bus;
    dc.demand = setup.load_mw;
    dc.is_data_center = true;
    out.loads.push_back(std::move(dc));
  }
  for (auto& gen : out.generators) {
    gen.p_min = 0.0;
    gen.p_max *= setup.p_max_scale;
    gen.p_max_nameplate *= setup.p_max_scale;
  }
  return out;
}

}  // namespace dcshift
