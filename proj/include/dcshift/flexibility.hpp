#pragma once

#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "dcshift/grid.hpp"

namespace dcshift {

using LoadPair = std::pair<int, int>;  // (from load id, to load id)

/// How much each data center may move and what moving costs. Keys are
/// data-center load ids; a data center absent from `epsilon` cannot shift,
/// pairs absent from the maps are unlimited and free.
struct FlexibilityConfig {
  std::map<int, double> epsilon;
  std::map<LoadPair, double> pair_limits;  // M_ij, MW
  std::map<LoadPair, double> shift_costs;  // d_ij, $/MW

  double epsilon_of(int load_id) const;
  double pair_limit(int from, int to) const;
  double shift_cost(int from, int to) const;
};

/// Same epsilon for every data-center load of the network, and optionally
/// the same limit and cost for every ordered pair.
FlexibilityConfig uniform_flexibility(const Network& network, double epsilon,
                                      double shift_cost = 0.0,
                                      double pair_limit = std::numeric_limits<double>::infinity());

/// Throws ValidationError when a key is not a data-center load or a value is
/// out of range.
void validate(const FlexibilityConfig& flexibility, const Network& network);

struct DataCenter {
  int load_id = 0;
  int bus = 0;
  double demand = 0.0;
};

std::vector<DataCenter> data_centers_of(const Network& network);

struct ShiftPlan {
  std::map<int, double> delta_p_d;        // load id -> signed MW
  std::map<LoadPair, double> transfers;   // s_ij >= 0
  std::map<int, double> demand;           // data-center demand the plan was made for
  std::map<int, double> limit;            // epsilon_i * P_d,i
  double predicted_objective_change = 0.0;
  double total_shifted = 0.0;             // sum |delta_p_d|
  double max_shiftable = 0.0;             // sum epsilon_i * P_d,i

  /// delta at load `id` rebuilt from the transfers: inflow minus outflow.
  double delta_from_transfers(int id) const;
};

/// A plan that moves nothing for the given data centers.
ShiftPlan zero_plan(const std::vector<DataCenter>& centers, const FlexibilityConfig& flexibility);

/// Applies the plan's deltas to the data-center loads.
Network apply_shift(const Network& network, const ShiftPlan& plan);

}  // namespace dcshift
