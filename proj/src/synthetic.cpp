#include "dcshift/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "dcshift/opf.hpp"

namespace dcshift {

namespace {

constexpr double kPi = 3.14159265358979323846;

// std::uniform_real_distribution is implementation defined; this is not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  int integer(int lo, int hi) {  // inclusive
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(engine_() % span);
  }

 private:
  std::mt19937_64 engine_;
};

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

struct FuelTemplate {
  FuelClass fuel;
  double cost_lo, cost_hi;
  double cap_lo, cap_hi;
};

constexpr FuelTemplate kFuels[] = {
    {FuelClass::coal, 18.0, 28.0, 80.0, 200.0},  {FuelClass::gas, 25.0, 45.0, 60.0, 180.0},
    {FuelClass::gas, 30.0, 50.0, 40.0, 120.0},   {FuelClass::oil, 60.0, 90.0, 30.0, 80.0},
    {FuelClass::nuclear, 6.0, 10.0, 80.0, 150.0}, {FuelClass::hydro, 2.0, 5.0, 30.0, 90.0},
    {FuelClass::wind, 0.0, 1.0, 40.0, 120.0},    {FuelClass::solar, 0.0, 1.0, 30.0, 100.0},
};

std::vector<HourlyScenario> make_hours(const Network& net, int hours, Rng& rng) {
  std::vector<double> wind_phase(net.generators.size());
  for (auto& p : wind_phase) p = rng.uniform(0.0, 2.0 * kPi);
  std::vector<HourlyScenario> out;
  for (int h = 0; h < hours; ++h) {
    HourlyScenario s;
    s.hour_index = h;
    const double tod = h % 24;
    const double load_factor = 1.0 + 0.15 * std::sin(2.0 * kPi * (tod - 8.0) / 24.0);
    for (const auto& load : net.loads)
      if (!load.is_data_center) s.load_overrides[load.id] = round3(load.demand * load_factor);
    for (std::size_t g = 0; g < net.generators.size(); ++g) {
      const auto& gen = net.generators[g];
      if (!gen.is_curtailable_renewable) continue;
      double avail = 0.0;
      if (gen.fuel == FuelClass::wind)
        avail = 0.5 + 0.3 * std::sin(2.0 * kPi * tod / 24.0 + wind_phase[g]) +
                rng.uniform(-0.1, 0.1);
      else
        avail = std::sin(kPi * (tod - 6.0) / 12.0);
      avail = std::clamp(avail, 0.0, 1.0);
      s.renewable_availability[gen.id] = round3(gen.p_max_nameplate * avail);
    }
    out.push_back(std::move(s));
  }
  return out;
}

bool all_hours_clear(const Network& net, const std::vector<HourlyScenario>& hours) {
  if (!solve_dcopf(net, {}).optimal()) return false;
  for (const auto& s : hours)
    if (!solve_dcopf(apply_scenario(net, s), {}).optimal()) return false;
  return true;
}

}  // namespace

SyntheticCase gen_synthetic_case(int buses, int data_centers, std::uint64_t seed, int hours) {
  if (buses < 2) throw std::invalid_argument("synthetic case needs at least 2 buses");
  if (data_centers < 1) throw std::invalid_argument("synthetic case needs at least 1 data center");
  if (hours < 1) throw std::invalid_argument("synthetic case needs at least 1 hour");
  Rng rng(seed);
  Network net;
  net.base_mva = 100.0;

  const int nregions = std::clamp(buses / 2, 1, 3);
  for (int i = 1; i <= buses; ++i) {
    Bus bus;
    bus.id = i;
    bus.name = "bus" + std::to_string(i);
    bus.region = "R" + std::to_string(1 + (i - 1) * nregions / buses);
    bus.is_reference = i == 1;
    net.buses.push_back(bus);
  }

  std::set<std::pair<int, int>> edges;
  for (int i = 2; i <= buses; ++i) edges.insert({rng.integer(1, i - 1), i});
  const int max_edges = buses * (buses - 1) / 2;
  const int target = std::min(max_edges, buses - 1 + buses / 2);
  while (static_cast<int>(edges.size()) < target) {
    int a = rng.integer(1, buses), b = rng.integer(1, buses);
    if (a == b) continue;
    edges.insert({std::min(a, b), std::max(a, b)});
  }
  for (const auto& [a, b] : edges) {
    Line line;
    line.name = "L" + std::to_string(a) + "-" + std::to_string(b);
    line.from_bus = a;
    line.to_bus = b;
    line.susceptance = round3(rng.uniform(5.0, 20.0));
    line.flow_limit = 1e6;
    net.lines.push_back(line);
  }

  const int ngen = std::max(2, buses + buses / 2);
  for (int g = 0; g < ngen; ++g) {
    // The first two units are thermal so every hour has dispatchable supply.
    const int pick = g < 2 ? g : rng.integer(0, static_cast<int>(std::size(kFuels)) - 1);
    const auto& t = kFuels[pick];
    Generator gen;
    gen.id = g + 1;
    gen.bus = g == 0 ? 1 : rng.integer(1, buses);
    gen.fuel = t.fuel;
    gen.name = std::string(to_string(t.fuel)) + std::to_string(gen.id);
    // Offsets keep costs and intensities distinct across units.
    gen.cost = round3(rng.uniform(t.cost_lo, t.cost_hi) + 0.01 * g);
    gen.carbon_intensity = default_carbon_intensity(t.fuel) == 0.0
                               ? 0.0
                               : round3(default_carbon_intensity(t.fuel) * rng.uniform(0.9, 1.1) +
                                        0.001 * g);
    gen.p_max = gen.p_max_nameplate = round3(rng.uniform(t.cap_lo, t.cap_hi));
    gen.p_min = 0.0;
    gen.is_low_carbon = is_low_carbon_fuel(t.fuel);
    gen.is_curtailable_renewable = is_curtailable_fuel(t.fuel);
    net.generators.push_back(gen);
  }

  double firm = 0.0;
  for (const auto& gen : net.generators)
    if (!gen.is_curtailable_renewable) firm += gen.p_max_nameplate;

  int next_load = 1;
  std::vector<double> base(buses, 0.0);
  for (int i = 0; i < buses; ++i)
    if (i == buses - 1 || rng.uniform(0.0, 1.0) < 0.7) base[i] = rng.uniform(20.0, 80.0);

  std::vector<int> dc_buses;
  std::vector<int> candidates(buses);
  for (int i = 0; i < buses; ++i) candidates[i] = i + 1;
  for (int k = 0; k < data_centers; ++k) {
    if (candidates.empty())
      for (int i = 0; i < buses; ++i) candidates.push_back(i + 1);
    const int idx = rng.integer(0, static_cast<int>(candidates.size()) - 1);
    dc_buses.push_back(candidates[idx]);
    candidates.erase(candidates.begin() + idx);
  }
  std::vector<double> dc_demand;
  for (int k = 0; k < data_centers; ++k) dc_demand.push_back(rng.integer(20, 60));

  // Peak load stays within 60% of firm capacity.
  double total = 0.0;
  for (double b : base) total += b * 1.15;
  for (double d : dc_demand) total += d;
  const double scale = std::min(1.0, 0.6 * firm / total);
  for (int i = 0; i < buses; ++i) {
    if (base[i] == 0.0) continue;
    LoadPoint load;
    load.id = next_load++;
    load.name = "load" + std::to_string(i + 1);
    load.bus = i + 1;
    load.demand = round3(base[i] * scale);
    net.loads.push_back(load);
  }
  for (int k = 0; k < data_centers; ++k) {
    LoadPoint dc;
    dc.id = next_load++;
    dc.name = "DC@" + std::to_string(dc_buses[k]);
    dc.bus = dc_buses[k];
    dc.demand = std::max(1.0, std::round(dc_demand[k] * scale));
    dc.is_data_center = true;
    net.loads.push_back(dc);
  }
  rebuild_regions(net);

  SyntheticCase out;
  out.hours = make_hours(net, hours, rng);

  // Limits from the unconstrained flows, loosened until every hour clears.
  std::vector<double> peak(net.lines.size(), 0.0);
  for (const auto& s : out.hours) {
    const DispatchSolution sol = solve_dcopf(apply_scenario(net, s), {});
    if (!sol.optimal()) continue;
    for (std::size_t l = 0; l < peak.size(); ++l)
      peak[l] = std::max(peak[l], std::abs(sol.line_flow[l]));
  }
  for (std::size_t l = 0; l < net.lines.size(); ++l)
    net.lines[l].flow_limit = round3(std::max(10.0, peak[l] * rng.uniform(0.6, 1.1)));
  for (int attempt = 0; attempt < 200 && !all_hours_clear(net, out.hours); ++attempt)
    for (auto& line : net.lines) line.flow_limit = round3(line.flow_limit * 1.05);
  if (!all_hours_clear(net, out.hours))
    throw std::logic_error("synthetic case generation failed to produce a feasible series");

  validate(net);
  out.network = std::move(net);
  return out;
}

}  // namespace dcshift
