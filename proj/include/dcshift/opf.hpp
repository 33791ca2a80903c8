#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcshift/flexibility.hpp"
#include "dcshift/grid.hpp"
#include "dcshift/lp.hpp"

namespace dcshift {

/// Weighted generator objective alpha * cost + (1 - alpha) * carbon.
struct ObjectiveSpec {
  double alpha = 1.0;
};

void validate(const ObjectiveSpec& objective);

enum class SolveStatus { optimal, infeasible, unbounded, failed };

std::string to_string(SolveStatus status);

enum class ConstraintKind { balance, ref_angle, line_upper, line_lower, gen_upper, gen_lower };

std::string to_string(ConstraintKind kind);

/// `index` is the bus id for balance/ref-angle rows and the zero-based
/// position in Network::lines / Network::generators otherwise.
struct ConstraintId {
  ConstraintKind kind = ConstraintKind::balance;
  int index = 0;
  bool nonbasic = false;  // the solver holds this constraint in its basis definition

  bool same_constraint(const ConstraintId& other) const {
    return kind == other.kind && index == other.index;
  }
};

/// Constraints active at a solution: every balance row and the reference
/// angle, then inequalities satisfied with equality, in construction order.
struct BindingSet {
  std::vector<ConstraintId> members;

  bool contains(ConstraintKind kind, int index) const;
  /// Same constraints, ignoring solver status.
  bool same_constraints(const BindingSet& other) const;
  int inequality_count() const;
};

struct DispatchSolution {
  SolveStatus status = SolveStatus::failed;
  int hour = -1;
  std::vector<double> p_g;          // MW per generator
  std::vector<double> theta;        // rad per bus
  std::vector<double> line_flow;    // MW per line
  std::vector<double> nodal_duals;  // $/MWh (weighted objective units) per bus
  double objective_value = 0.0;
  double total_emissions = 0.0;     // t CO2
  double total_cost = 0.0;          // $
  double curtailment = 0.0;         // MW
  BindingSet binding_set;
  std::string message;  // infeasibility hint or solver detail
  int iterations = 0;

  bool optimal() const { return status == SolveStatus::optimal; }
};

struct FlexSolution {
  DispatchSolution dispatch;
  ShiftPlan shift_plan;
};

/// Tolerance for deciding a bound is active, MW.
inline constexpr double kBindingTolerance = 1e-7;

/// DC OPF on the network's loads plus an optional per-bus extra demand
/// (indexed by bus id - 1).
DispatchSolution solve_dcopf(const Network& network, const ObjectiveSpec& objective,
                             std::span<const double> extra_bus_demand = {});

/// DC OPF with the data-center shift variables embedded in the clearing.
FlexSolution solve_dcopf_flex(const Network& network, const ObjectiveSpec& objective,
                              const FlexibilityConfig& flexibility);

struct ParetoPoint {
  double alpha = 1.0;
  double total_cost = 0.0;
  double total_emissions = 0.0;
  double objective_value = 0.0;
  SolveStatus status = SolveStatus::failed;
};

std::vector<ParetoPoint> pareto_sweep(const Network& network,
                                      const std::optional<FlexibilityConfig>& flexibility,
                                      std::span<const double> alphas);

/// Totals recomputed from a dispatch; used by solvers and tests alike.
double emissions_of(const Network& network, std::span<const double> p_g);
double cost_of(const Network& network, std::span<const double> p_g);
double curtailment_of(const Network& network, std::span<const double> p_g);

/// Activity-based binding set for a dispatch; `nonbasic` flags come from
/// `hint` when given.
BindingSet binding_set_of(const Network& network, std::span<const double> p_g,
                          std::span<const double> line_flow, const BindingSet* hint = nullptr);

/// Names the most likely cause of an infeasible clearing.
std::string infeasibility_hint(const Network& network, std::span<const double> extra_bus_demand);

}  // namespace dcshift
