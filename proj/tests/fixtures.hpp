#pragma once

#include <string>

#include "dcshift/grid.hpp"

namespace fixtures {

using dcshift::FuelClass;
using dcshift::Generator;
using dcshift::LoadPoint;
using dcshift::Network;

inline Generator gen(int id, int bus, double cost, double carbon, double p_max,
                     FuelClass fuel = FuelClass::gas, double p_min = 0.0) {
  Generator g;
  g.id = id;
  g.name = "g" + std::to_string(id);
  g.bus = bus;
  g.cost = cost;
  g.carbon_intensity = carbon;
  g.p_min = p_min;
  g.p_max = g.p_max_nameplate = p_max;
  g.fuel = fuel;
  g.is_low_carbon = dcshift::is_low_carbon_fuel(fuel);
  g.is_curtailable_renewable = dcshift::is_curtailable_fuel(fuel);
  return g;
}

inline LoadPoint load(int id, int bus, double mw, bool dc = false) {
  return {id, (dc ? "dc" : "load") + std::to_string(id), bus, mw, dc};
}

/// Bus 1 (reference) holds a 10 $/MWh unit, bus 2 a `cost2` unit and 100 MW
/// of load; one line between them.
inline Network two_bus(double line_limit = 1000.0, double cost2 = 30.0, double g1 = 0.5,
                       double g2 = 1.0) {
  Network n;
  n.buses = {{1, "b1", "A", true}, {2, "b2", "A", false}};
  n.lines = {{"l12", 1, 2, 10.0, line_limit}};
  n.generators = {gen(1, 1, 10.0, g1, 200.0), gen(2, 2, cost2, g2, 200.0)};
  n.loads = {load(1, 2, 100.0)};
  dcshift::rebuild_regions(n);
  return n;
}

/// Two-bus congested case with a data center at each bus.
inline Network two_bus_with_dcs(double dc_mw = 100.0, double line_limit = 50.0) {
  Network n = two_bus(line_limit);
  n.loads.push_back(load(2, 1, dc_mw, true));
  n.loads.push_back(load(3, 2, dc_mw, true));
  n.generators[0].p_max = n.generators[0].p_max_nameplate = 400.0;
  n.generators[1].p_max = n.generators[1].p_max_nameplate = 400.0;
  return n;
}

/// Triangle with a cheap dirty unit at bus 1, a dearer clean unit at bus 2
/// and wind at bus 3; load at buses 2 and 3.
inline Network three_bus(double limit13 = 60.0) {
  Network n;
  n.buses = {{1, "b1", "A", true}, {2, "b2", "A", false}, {3, "b3", "B", false}};
  n.lines = {{"l12", 1, 2, 10.0, 200.0}, {"l13", 1, 3, 10.0, limit13}, {"l23", 2, 3, 10.0, 200.0}};
  n.generators = {gen(1, 1, 15.0, 0.95, 300.0, FuelClass::coal),
                  gen(2, 2, 35.0, 0.45, 300.0, FuelClass::gas),
                  gen(3, 3, 1.0, 0.0, 40.0, FuelClass::wind)};
  n.loads = {load(1, 2, 80.0), load(2, 3, 120.0)};
  dcshift::rebuild_regions(n);
  return n;
}

}  // namespace fixtures
