#include "dcshift/opf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dcshift {

void validate(const ObjectiveSpec& objective) {
  if (!(objective.alpha >= 0.0 && objective.alpha <= 1.0))
    throw ValidationError("objective alpha must lie in [0, 1]");
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::infeasible:
      return "infeasible";
    case SolveStatus::unbounded:
      return "unbounded";
    case SolveStatus::failed:
      return "failed";
  }
  return "failed";
}

std::string to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::balance:
      return "balance";
    case ConstraintKind::ref_angle:
      return "ref-angle";
    case ConstraintKind::line_upper:
      return "line-upper";
    case ConstraintKind::line_lower:
      return "line-lower";
    case ConstraintKind::gen_upper:
      return "gen-upper";
    case ConstraintKind::gen_lower:
      return "gen-lower";
  }
  return "unknown";
}

bool BindingSet::contains(ConstraintKind kind, int index) const {
  return std::any_of(members.begin(), members.end(), [&](const ConstraintId& c) {
    return c.kind == kind && c.index == index;
  });
}

bool BindingSet::same_constraints(const BindingSet& other) const {
  return std::equal(members.begin(), members.end(), other.members.begin(), other.members.end(),
                    [](const ConstraintId& a, const ConstraintId& b) { return a.same_constraint(b); });
}

int BindingSet::inequality_count() const {
  return static_cast<int>(std::count_if(members.begin(), members.end(), [](const ConstraintId& c) {
    return c.kind != ConstraintKind::balance && c.kind != ConstraintKind::ref_angle;
  }));
}

double emissions_of(const Network& network, std::span<const double> p_g) {
  double total = 0.0;
  for (std::size_t i = 0; i < p_g.size(); ++i) total += network.generators[i].carbon_intensity * p_g[i];
  return total;
}

double cost_of(const Network& network, std::span<const double> p_g) {
  double total = 0.0;
  for (std::size_t i = 0; i < p_g.size(); ++i) total += network.generators[i].cost * p_g[i];
  return total;
}

double curtailment_of(const Network& network, std::span<const double> p_g) {
  double total = 0.0;
  for (std::size_t i = 0; i < p_g.size(); ++i) {
    const auto& gen = network.generators[i];
    if (gen.is_curtailable_renewable) total += std::max(0.0, gen.p_max - p_g[i]);
  }
  return total;
}

namespace {

bool at_bound(double value, double bound) {
  return std::abs(value - bound) <= kBindingTolerance * std::max(1.0, std::abs(bound));
}

struct SolverFlags {
  std::vector<bool> balance_nonbasic;
  std::vector<bool> line_nonbasic;
  std::vector<bool> gen_nonbasic;
};

BindingSet make_binding_set(const Network& network, std::span<const double> p_g,
                            std::span<const double> line_flow, const SolverFlags* flags,
                            const BindingSet* hint) {
  auto hinted = [hint](ConstraintKind kind, int index, bool fallback) {
    if (!hint) return fallback;
    for (const auto& c : hint->members)
      if (c.kind == kind && c.index == index) return c.nonbasic;
    return false;
  };
  BindingSet set;
  for (const auto& bus : network.buses) {
    const bool nb = flags ? flags->balance_nonbasic[bus.id - 1] : true;
    set.members.push_back({ConstraintKind::balance, bus.id, hinted(ConstraintKind::balance, bus.id, nb)});
  }
  set.members.push_back({ConstraintKind::ref_angle, network.reference_bus(), true});
  for (int l = 0; l < static_cast<int>(network.lines.size()); ++l) {
    const double lim = network.lines[l].flow_limit;
    const bool nb = flags ? flags->line_nonbasic[l] : false;
    if (at_bound(line_flow[l], lim))
      set.members.push_back({ConstraintKind::line_upper, l, hinted(ConstraintKind::line_upper, l, nb)});
    if (at_bound(line_flow[l], -lim))
      set.members.push_back({ConstraintKind::line_lower, l, hinted(ConstraintKind::line_lower, l, nb)});
  }
  for (int g = 0; g < static_cast<int>(network.generators.size()); ++g) {
    const auto& gen = network.generators[g];
    const bool nb = flags ? flags->gen_nonbasic[g] : false;
    if (at_bound(p_g[g], gen.p_max))
      set.members.push_back({ConstraintKind::gen_upper, g, hinted(ConstraintKind::gen_upper, g, nb)});
    if (at_bound(p_g[g], gen.p_min))
      set.members.push_back({ConstraintKind::gen_lower, g, hinted(ConstraintKind::gen_lower, g, nb)});
  }
  return set;
}

struct Layout {
  int nbus = 0, ngen = 0, nline = 0, ndc = 0;
  int theta0 = 0, pg0 = 0, dp0 = 0, s0 = 0;
  int balance0 = 0, line0 = 0;
  std::vector<DataCenter> centers;
  std::vector<std::pair<int, int>> pairs;  // indices into centers
};

lp::Model build_model(const Network& net, const ObjectiveSpec& objective,
                      std::span<const double> extra, const FlexibilityConfig* flex, Layout& layout) {
  lp::Model model;
  layout.nbus = net.bus_count();
  layout.ngen = static_cast<int>(net.generators.size());
  layout.nline = static_cast<int>(net.lines.size());
  const int ref = net.reference_bus();

  layout.theta0 = 0;
  for (const auto& bus : net.buses) {
    if (bus.id == ref)
      model.add_column(0.0, 0.0, 0.0);
    else
      model.add_column(0.0, -lp::kInf, lp::kInf);
  }
  layout.pg0 = model.num_columns();
  const double alpha = objective.alpha;
  for (const auto& gen : net.generators)
    model.add_column(alpha * gen.cost + (1.0 - alpha) * gen.carbon_intensity, gen.p_min, gen.p_max);

  if (flex) {
    layout.centers = data_centers_of(net);
    layout.ndc = static_cast<int>(layout.centers.size());
    layout.dp0 = model.num_columns();
    for (const auto& dc : layout.centers) {
      const double lim = flex->epsilon_of(dc.load_id) * dc.demand;
      model.add_column(0.0, -lim, lim);
    }
    layout.s0 = model.num_columns();
    for (int i = 0; i < layout.ndc; ++i) {
      for (int j = 0; j < layout.ndc; ++j) {
        if (i == j) continue;
        const int a = layout.centers[i].load_id, b = layout.centers[j].load_id;
        model.add_column(flex->shift_cost(a, b), 0.0, flex->pair_limit(a, b));
        layout.pairs.emplace_back(i, j);
      }
    }
  }

  std::vector<std::vector<lp::Entry>> balance(layout.nbus);
  for (int g = 0; g < layout.ngen; ++g)
    balance[net.generators[g].bus - 1].push_back({layout.pg0 + g, 1.0});
  for (const auto& line : net.lines) {
    const double k = net.line_coefficient(line);
    const int f = line.from_bus - 1, t = line.to_bus - 1;
    balance[f].push_back({layout.theta0 + f, -k});
    balance[f].push_back({layout.theta0 + t, k});
    balance[t].push_back({layout.theta0 + f, k});
    balance[t].push_back({layout.theta0 + t, -k});
  }
  for (int c = 0; c < layout.ndc; ++c)
    balance[layout.centers[c].bus - 1].push_back({layout.dp0 + c, -1.0});

  const auto demand = net.bus_demand();
  layout.balance0 = model.num_rows();
  for (int b = 0; b < layout.nbus; ++b) {
    const double rhs = demand[b] + (extra.empty() ? 0.0 : extra[b]);
    model.add_row(rhs, rhs, std::move(balance[b]));
  }
  layout.line0 = model.num_rows();
  for (const auto& line : net.lines) {
    const double k = net.line_coefficient(line);
    model.add_row(-line.flow_limit, line.flow_limit,
                  {{layout.theta0 + line.from_bus - 1, k}, {layout.theta0 + line.to_bus - 1, -k}});
  }

  if (flex) {
    // delta_i = inflow - outflow
    for (int c = 0; c < layout.ndc; ++c) {
      std::vector<lp::Entry> row{{layout.dp0 + c, 1.0}};
      for (std::size_t p = 0; p < layout.pairs.size(); ++p) {
        if (layout.pairs[p].second == c) row.push_back({layout.s0 + static_cast<int>(p), -1.0});
        if (layout.pairs[p].first == c) row.push_back({layout.s0 + static_cast<int>(p), 1.0});
      }
      model.add_row(0.0, 0.0, std::move(row));
    }
    std::vector<lp::Entry> sum;
    for (int c = 0; c < layout.ndc; ++c) sum.push_back({layout.dp0 + c, 1.0});
    if (!sum.empty()) model.add_row(0.0, 0.0, std::move(sum));
  }
  return model;
}

DispatchSolution extract(const Network& net, const Layout& layout, const lp::Result& res,
                         std::span<const double> extra) {
  DispatchSolution sol;
  sol.iterations = res.iterations;
  switch (res.status) {
    case lp::Status::optimal:
      sol.status = SolveStatus::optimal;
      break;
    case lp::Status::infeasible:
      sol.status = SolveStatus::infeasible;
      sol.message = infeasibility_hint(net, extra);
      return sol;
    case lp::Status::unbounded:
      sol.status = SolveStatus::unbounded;
      sol.message = "unbounded clearing problem: the network model is malformed";
      return sol;
    default:
      sol.status = SolveStatus::failed;
      sol.message = "simplex " + lp::to_string(res.status);
      return sol;
  }

  sol.theta.assign(res.x.begin() + layout.theta0, res.x.begin() + layout.theta0 + layout.nbus);
  sol.p_g.assign(res.x.begin() + layout.pg0, res.x.begin() + layout.pg0 + layout.ngen);
  sol.line_flow.resize(layout.nline);
  for (int l = 0; l < layout.nline; ++l) {
    const auto& line = net.lines[l];
    sol.line_flow[l] =
        net.line_coefficient(line) * (sol.theta[line.from_bus - 1] - sol.theta[line.to_bus - 1]);
  }
  sol.nodal_duals.assign(res.row_dual.begin() + layout.balance0,
                         res.row_dual.begin() + layout.balance0 + layout.nbus);
  sol.objective_value = res.objective;
  sol.total_emissions = emissions_of(net, sol.p_g);
  sol.total_cost = cost_of(net, sol.p_g);
  sol.curtailment = curtailment_of(net, sol.p_g);

  SolverFlags flags;
  flags.balance_nonbasic.resize(layout.nbus);
  for (int b = 0; b < layout.nbus; ++b)
    flags.balance_nonbasic[b] = res.row_status[layout.balance0 + b] != lp::BasisStatus::basic;
  flags.line_nonbasic.resize(layout.nline);
  for (int l = 0; l < layout.nline; ++l)
    flags.line_nonbasic[l] = res.row_status[layout.line0 + l] != lp::BasisStatus::basic;
  flags.gen_nonbasic.resize(layout.ngen);
  for (int g = 0; g < layout.ngen; ++g)
    flags.gen_nonbasic[g] = res.col_status[layout.pg0 + g] != lp::BasisStatus::basic;
  sol.binding_set = make_binding_set(net, sol.p_g, sol.line_flow, &flags, nullptr);
  return sol;
}

}  // namespace

BindingSet binding_set_of(const Network& network, std::span<const double> p_g,
                          std::span<const double> line_flow, const BindingSet* hint) {
  return make_binding_set(network, p_g, line_flow, nullptr, hint);
}

std::string infeasibility_hint(const Network& network, std::span<const double> extra) {
  auto demand = network.bus_demand();
  if (!extra.empty())
    for (std::size_t b = 0; b < demand.size(); ++b) demand[b] += extra[b];
  const double load = std::accumulate(demand.begin(), demand.end(), 0.0);
  double p_max = 0.0, p_min = 0.0;
  for (const auto& gen : network.generators) {
    p_max += gen.p_max;
    p_min += gen.p_min;
  }
  std::ostringstream msg;
  if (p_max < load) {
    msg << "capacity shortfall: total p_max " << p_max << " MW < total load " << load << " MW";
    return msg.str();
  }
  if (p_min > load) {
    msg << "minimum generation " << p_min << " MW exceeds total load " << load << " MW";
    return msg.str();
  }

  const int n = network.bus_count();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const auto& line : network.lines) parent[find(line.from_bus - 1)] = find(line.to_bus - 1);
  std::vector<double> cap(n, 0.0), floor_(n, 0.0), need(n, 0.0);
  for (const auto& gen : network.generators) {
    cap[find(gen.bus - 1)] += gen.p_max;
    floor_[find(gen.bus - 1)] += gen.p_min;
  }
  for (int b = 0; b < n; ++b) need[find(b)] += demand[b];
  for (int b = 0; b < n; ++b) {
    const int root = find(b);
    if (root != b) continue;
    if (need[root] > cap[root] + 1e-9 || floor_[root] > need[root] + 1e-9) {
      int first = n;
      for (int v = 0; v < n; ++v)
        if (find(v) == root) first = std::min(first, v);
      msg << "islanded bus " << first + 1 << ": its island cannot balance " << need[root]
          << " MW of load with [" << floor_[root] << ", " << cap[root] << "] MW of generation";
      return msg.str();
    }
  }
  return "transmission limits prevent serving the load";
}

DispatchSolution solve_dcopf(const Network& network, const ObjectiveSpec& objective,
                             std::span<const double> extra_bus_demand) {
  validate(objective);
  if (!extra_bus_demand.empty() &&
      extra_bus_demand.size() != static_cast<std::size_t>(network.bus_count()))
    throw std::invalid_argument("extra_bus_demand must have one entry per bus");
  Layout layout;
  const lp::Model model = build_model(network, objective, extra_bus_demand, nullptr, layout);
  const lp::Result res = lp::solve(model);
  return extract(network, layout, res, extra_bus_demand);
}

FlexSolution solve_dcopf_flex(const Network& network, const ObjectiveSpec& objective,
                              const FlexibilityConfig& flexibility) {
  validate(objective);
  validate(flexibility, network);
  Layout layout;
  const lp::Model model = build_model(network, objective, {}, &flexibility, layout);
  const lp::Result res = lp::solve(model);

  FlexSolution out;
  out.dispatch = extract(network, layout, res, {});
  out.shift_plan = zero_plan(layout.centers, flexibility);
  if (!out.dispatch.optimal()) return out;

  auto& plan = out.shift_plan;
  plan.total_shifted = 0.0;
  for (int c = 0; c < layout.ndc; ++c) {
    const double delta = res.x[layout.dp0 + c];
    plan.delta_p_d[layout.centers[c].load_id] = delta;
    plan.total_shifted += std::abs(delta);
  }
  for (std::size_t p = 0; p < layout.pairs.size(); ++p) {
    const auto [i, j] = layout.pairs[p];
    plan.transfers[{layout.centers[i].load_id, layout.centers[j].load_id}] =
        res.x[layout.s0 + static_cast<int>(p)];
  }
  return out;
}

std::vector<ParetoPoint> pareto_sweep(const Network& network,
                                      const std::optional<FlexibilityConfig>& flexibility,
                                      std::span<const double> alphas) {
  if (alphas.empty()) throw std::invalid_argument("pareto sweep needs at least one alpha");
  std::vector<ParetoPoint> out;
  for (double alpha : alphas) {
    const ObjectiveSpec objective{alpha};
    const DispatchSolution sol = flexibility
                                     ? solve_dcopf_flex(network, objective, *flexibility).dispatch
                                     : solve_dcopf(network, objective);
    ParetoPoint point;
    point.alpha = alpha;
    point.status = sol.status;
    if (sol.optimal()) {
      point.total_cost = sol.total_cost;
      point.total_emissions = sol.total_emissions;
      point.objective_value = sol.objective_value;
    }
    out.push_back(point);
  }
  return out;
}

}  // namespace dcshift
