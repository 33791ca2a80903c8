#include "dcshift/flexibility.hpp"

#include <cmath>
#include <sstream>

namespace dcshift {

double FlexibilityConfig::epsilon_of(int load_id) const {
  auto it = epsilon.find(load_id);
  return it == epsilon.end() ? 0.0 : it->second;
}

double FlexibilityConfig::pair_limit(int from, int to) const {
  auto it = pair_limits.find({from, to});
  return it == pair_limits.end() ? std::numeric_limits<double>::infinity() : it->second;
}

double FlexibilityConfig::shift_cost(int from, int to) const {
  auto it = shift_costs.find({from, to});
  return it == shift_costs.end() ? 0.0 : it->second;
}

FlexibilityConfig uniform_flexibility(const Network& network, double epsilon, double shift_cost,
                                      double pair_limit) {
  FlexibilityConfig flex;
  const auto centers = data_centers_of(network);
  for (const auto& dc : centers) flex.epsilon[dc.load_id] = epsilon;
  for (const auto& a : centers) {
    for (const auto& b : centers) {
      if (a.load_id == b.load_id) continue;
      if (shift_cost != 0.0) flex.shift_costs[{a.load_id, b.load_id}] = shift_cost;
      if (std::isfinite(pair_limit)) flex.pair_limits[{a.load_id, b.load_id}] = pair_limit;
    }
  }
  return flex;
}

void validate(const FlexibilityConfig& flex, const Network& network) {
  auto require_dc = [&](int id) {
    const int idx = network.load_index(id);
    if (idx < 0 || !network.loads[idx].is_data_center) {
      std::ostringstream msg;
      msg << "flexibility references load " << id << ", which is not a data-center load";
      throw ValidationError(msg.str());
    }
  };
  for (const auto& [id, eps] : flex.epsilon) {
    require_dc(id);
    if (!(eps >= 0.0 && eps <= 1.0))
      throw ValidationError("epsilon for load " + std::to_string(id) + " outside [0, 1]");
  }
  for (const auto& [pair, limit] : flex.pair_limits) {
    require_dc(pair.first);
    require_dc(pair.second);
    if (!(limit >= 0.0)) throw ValidationError("negative pair limit");
  }
  for (const auto& [pair, cost] : flex.shift_costs) {
    require_dc(pair.first);
    require_dc(pair.second);
    if (!(cost >= 0.0)) throw ValidationError("negative shift cost");
  }
}

std::vector<DataCenter> data_centers_of(const Network& network) {
  std::vector<DataCenter> out;
  for (int idx : network.data_center_indices()) {
    const auto& load = network.loads[idx];
    out.push_back({load.id, load.bus, load.demand});
  }
  return out;
}

double ShiftPlan::delta_from_transfers(int id) const {
  double in = 0.0, out = 0.0;
  for (const auto& [pair, s] : transfers) {
    if (pair.second == id) in += s;
    if (pair.first == id) out += s;
  }
  return in - out;
}

ShiftPlan zero_plan(const std::vector<DataCenter>& centers, const FlexibilityConfig& flex) {
  ShiftPlan plan;
  for (const auto& dc : centers) {
    plan.delta_p_d[dc.load_id] = 0.0;
    plan.demand[dc.load_id] = dc.demand;
    plan.limit[dc.load_id] = flex.epsilon_of(dc.load_id) * dc.demand;
    plan.max_shiftable += plan.limit[dc.load_id];
  }
  return plan;
}

Network apply_shift(const Network& network, const ShiftPlan& plan) {
  Network out = network;
  for (const auto& [id, delta] : plan.delta_p_d) {
    const int idx = out.load_index(id);
    if (idx < 0) throw UnknownIdError("shift plan references unknown load " + std::to_string(id));
    // Clamp rounding noise at a full downward shift.
    out.loads[idx].demand = std::max(0.0, out.loads[idx].demand + delta);
  }
  return out;
}

}  // namespace dcshift
