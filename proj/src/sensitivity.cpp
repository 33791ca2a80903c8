#include "dcshift/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace dcshift {

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::lmp:
      return "lmp";
    case MetricKind::co2_marginal:
      return "co2_marginal";
    case MetricKind::average:
      return "average";
    case MetricKind::excess:
      return "excess";
  }
  return "lmp";
}

MetricKind parse_metric_kind(std::string_view text) {
  if (text == "lmp") return MetricKind::lmp;
  if (text == "co2_marginal" || text == "co2") return MetricKind::co2_marginal;
  if (text == "average") return MetricKind::average;
  if (text == "excess") return MetricKind::excess;
  throw std::invalid_argument("unknown metric kind '" + std::string(text) + "'");
}

std::string metric_to_csv(const MetricVector& metric) {
  std::ostringstream out;
  out << "bus_id,value\n";
  char buf[64];
  for (std::size_t b = 0; b < metric.values.size(); ++b) {
    out << b + 1 << ',';
    if (metric.values[b]) {
      std::snprintf(buf, sizeof buf, "%.12g", *metric.values[b]);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

std::string metric_to_json(const MetricVector& metric) {
  nlohmann::ordered_json doc;
  doc["kind"] = to_string(metric.kind);
  doc["hour"] = metric.hour;
  doc["source"] = metric.source;
  auto values = nlohmann::ordered_json::array();
  for (const auto& v : metric.values) values.push_back(v ? nlohmann::ordered_json(*v) : nullptr);
  doc["values"] = std::move(values);
  doc["warnings"] = metric.warnings;
  return doc.dump();
}

namespace {

// Greedy row selection keeping the selected rows linearly independent.
class RowSpan {
 public:
  explicit RowSpan(int dim) : dim_(dim) {}

  bool try_add(const Eigen::VectorXd& row) {
    const double norm = row.norm();
    if (norm == 0.0 || static_cast<int>(basis_.size()) >= dim_) return false;
    Eigen::VectorXd v = row;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis_) v -= q.dot(v) * q;
    const double residual = v.norm();
    if (residual <= 1e-9 * norm) return false;
    basis_.push_back(v / residual);
    return true;
  }

  int size() const { return static_cast<int>(basis_.size()); }

 private:
  int dim_;
  std::vector<Eigen::VectorXd> basis_;
};

MetricVector empty_metric(MetricKind kind, const Network& network, const DispatchSolution& solution,
                          std::string source) {
  MetricVector out;
  out.kind = kind;
  out.values.assign(network.bus_count(), std::nullopt);
  out.hour = solution.hour;
  out.source = std::move(source);
  return out;
}

void require_optimal(const DispatchSolution& solution) {
  if (!solution.optimal())
    throw std::invalid_argument("metric requires an optimal dispatch (status " +
                                to_string(solution.status) + ")");
}

}  // namespace

SensitivityBasis build_sensitivity_basis(const Network& network, const DispatchSolution& solution) {
  require_optimal(solution);
  const int nbus = network.bus_count();
  const int ngen = static_cast<int>(network.generators.size());
  const int n = nbus + ngen;

  const BindingSet active = binding_set_of(network, solution.p_g, solution.line_flow,
                                           &solution.binding_set);
  const auto demand = network.bus_demand();

  auto row_of = [&](const ConstraintId& c, double& rhs) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    switch (c.kind) {
      case ConstraintKind::balance: {
        const int b = c.index - 1;
        for (int g = 0; g < ngen; ++g)
          if (network.generators[g].bus == c.index) row[nbus + g] += 1.0;
        for (const auto& line : network.lines) {
          const double k = network.line_coefficient(line);
          const int f = line.from_bus - 1, t = line.to_bus - 1;
          if (f == b) {
            row[f] -= k;
            row[t] += k;
          }
          if (t == b) {
            row[f] += k;
            row[t] -= k;
          }
        }
        rhs = demand[b];
        break;
      }
      case ConstraintKind::ref_angle:
        row[c.index - 1] = 1.0;
        rhs = 0.0;
        break;
      case ConstraintKind::line_upper:
      case ConstraintKind::line_lower: {
        const auto& line = network.lines[c.index];
        const double k = network.line_coefficient(line);
        row[line.from_bus - 1] += k;
        row[line.to_bus - 1] -= k;
        rhs = c.kind == ConstraintKind::line_upper ? line.flow_limit : -line.flow_limit;
        break;
      }
      case ConstraintKind::gen_upper:
        row[nbus + c.index] = 1.0;
        rhs = network.generators[c.index].p_max;
        break;
      case ConstraintKind::gen_lower:
        row[nbus + c.index] = 1.0;
        rhs = network.generators[c.index].p_min;
        break;
    }
    return row;
  };

  RowSpan span(n);
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  SensitivityBasis basis;
  auto take = [&](const ConstraintId& c) {
    double b = 0.0;
    Eigen::VectorXd row = row_of(c, b);
    if (!span.try_add(row)) return false;
    rows.push_back(std::move(row));
    rhs.push_back(b);
    basis.rows.push_back(c);
    return true;
  };

  for (const auto& c : active.members) {
    if (c.kind != ConstraintKind::balance && c.kind != ConstraintKind::ref_angle) continue;
    if (!take(c))
      throw DegenerateBasisError(to_string(c.kind) + " row at bus " + std::to_string(c.index) +
                                 " is linearly dependent on the other equalities");
  }
  // The solver's own nonbasic constraints first, then any other active bound.
  for (bool want_nonbasic : {true, false})
    for (const auto& c : active.members) {
      if (span.size() == n) break;
      if (c.kind == ConstraintKind::balance || c.kind == ConstraintKind::ref_angle) continue;
      if (c.nonbasic == want_nonbasic) take(c);
    }
  if (span.size() < n) {
    std::ostringstream msg;
    msg << "active constraints span rank " << span.size() << " < " << n
        << "; the solution is not a basic vertex";
    throw DegenerateBasisError(msg.str());
  }

  basis.matrix.resize(n, n);
  basis.rhs.resize(n);
  for (int r = 0; r < n; ++r) {
    basis.matrix.row(r) = rows[r].transpose();
    basis.rhs[r] = rhs[r];
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis.matrix);
  basis.condition_estimate = lu.rcond();
  if (!(basis.condition_estimate >= kMinReciprocalCondition)) {
    std::ostringstream msg;
    msg << "sensitivity basis is ill-conditioned (rcond " << basis.condition_estimate << ")";
    throw DegenerateBasisError(msg.str());
  }
  basis.inverse = lu.inverse();
  basis.generation_response = basis.inverse.block(nbus, 0, ngen, nbus);
  return basis;
}

MetricVector lambda_co2(const Network& network, const DispatchSolution& solution,
                        const SensitivityBasis& basis) {
  require_optimal(solution);
  MetricVector out = empty_metric(MetricKind::co2_marginal, network, solution, "basis");
  const int ngen = static_cast<int>(network.generators.size());
  Eigen::RowVectorXd g(ngen);
  for (int i = 0; i < ngen; ++i) g[i] = network.generators[i].carbon_intensity;
  const Eigen::RowVectorXd values = g * basis.generation_response;
  for (int b = 0; b < network.bus_count(); ++b) out.values[b] = values[b];
  return out;
}

MetricVector lambda_co2_finite_difference(const Network& network, const DispatchSolution& solution,
                                          std::span<const int> buses, double delta_mw,
                                          const ObjectiveSpec& objective) {
  require_optimal(solution);
  if (!(delta_mw > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  MetricVector out = empty_metric(MetricKind::co2_marginal, network, solution, "finite-difference");
  std::vector<double> extra(network.bus_count(), 0.0);
  for (int bus : buses) {
    if (bus < 1 || bus > network.bus_count())
      throw UnknownIdError("finite difference at unknown bus " + std::to_string(bus));
    extra[bus - 1] = delta_mw;
    const DispatchSolution perturbed = solve_dcopf(network, objective, extra);
    extra[bus - 1] = 0.0;
    if (!perturbed.optimal()) {
      out.warnings.push_back("bus " + std::to_string(bus) + ": perturbed solve " +
                             to_string(perturbed.status));
      continue;
    }
    out.values[bus - 1] = (perturbed.total_emissions - solution.total_emissions) / delta_mw;
  }
  return out;
}

MetricVector lambda_lmp(const DispatchSolution& solution) {
  require_optimal(solution);
  MetricVector out;
  out.kind = MetricKind::lmp;
  out.hour = solution.hour;
  out.source = "dual";
  if (solution.nodal_duals.empty()) throw std::invalid_argument("solution carries no nodal duals");
  for (double d : solution.nodal_duals) out.values.emplace_back(d);
  return out;
}

MetricVector lambda_average(const Network& network, const DispatchSolution& solution) {
  require_optimal(solution);
  MetricVector out = empty_metric(MetricKind::average, network, solution, "regional");
  for (const auto& [label, members] : network.regions) {
    double carbon = 0.0, output = 0.0;
    for (std::size_t g = 0; g < network.generators.size(); ++g) {
      const auto& gen = network.generators[g];
      if (network.buses[gen.bus - 1].region != label) continue;
      carbon += gen.carbon_intensity * solution.p_g[g];
      output += solution.p_g[g];
    }
    double value = 0.0;
    if (output > 1e-9)
      value = carbon / output;
    else
      out.warnings.push_back("region " + label + " has no generation; average set to 0");
    for (int bus : members) out.values[bus - 1] = value;
  }
  return out;
}

MetricVector lambda_excess(const Network& network, const DispatchSolution& solution) {
  require_optimal(solution);
  MetricVector out = empty_metric(MetricKind::excess, network, solution, "regional");
  for (const auto& [label, members] : network.regions) {
    double excess = 0.0;
    for (std::size_t g = 0; g < network.generators.size(); ++g) {
      const auto& gen = network.generators[g];
      if (!gen.is_low_carbon || network.buses[gen.bus - 1].region != label) continue;
      excess += std::max(0.0, gen.p_max - solution.p_g[g]);
    }
    for (int bus : members) out.values[bus - 1] = excess == 0.0 ? 0.0 : -excess;
  }
  return out;
}

MarginalResponse marginal_response(const Network& network, const DispatchSolution& solution,
                                   const ObjectiveSpec& objective) {
  require_optimal(solution);
  const int nbus = network.bus_count();
  const int ngen = static_cast<int>(network.generators.size());
  MarginalResponse out;
  out.co2.assign(nbus, std::nullopt);
  out.cost.assign(nbus, std::nullopt);
  out.curtailment.assign(nbus, std::nullopt);
  try {
    const SensitivityBasis basis = build_sensitivity_basis(network, solution);
    for (int b = 0; b < nbus; ++b) {
      double co2 = 0.0, cost = 0.0, curtail = 0.0;
      for (int g = 0; g < ngen; ++g) {
        const double dp = basis.generation_response(g, b);
        const auto& gen = network.generators[g];
        co2 += gen.carbon_intensity * dp;
        cost += gen.cost * dp;
        if (gen.is_curtailable_renewable) curtail -= dp;
      }
      out.co2[b] = co2;
      out.cost[b] = cost;
      out.curtailment[b] = curtail;
    }
    return out;
  } catch (const DegenerateBasisError& e) {
    out.finite_difference = true;
    out.note = e.what();
  }

  std::vector<int> buses;
  for (const auto& dc : data_centers_of(network)) buses.push_back(dc.bus);
  std::sort(buses.begin(), buses.end());
  buses.erase(std::unique(buses.begin(), buses.end()), buses.end());
  std::vector<double> extra(nbus, 0.0);
  for (int bus : buses) {
    extra[bus - 1] = kFallbackDeltaMw;
    const DispatchSolution perturbed = solve_dcopf(network, objective, extra);
    extra[bus - 1] = 0.0;
    if (!perturbed.optimal()) continue;
    out.co2[bus - 1] = (perturbed.total_emissions - solution.total_emissions) / kFallbackDeltaMw;
    out.cost[bus - 1] = (perturbed.total_cost - solution.total_cost) / kFallbackDeltaMw;
    out.curtailment[bus - 1] = (perturbed.curtailment - solution.curtailment) / kFallbackDeltaMw;
  }
  return out;
}

MetricVector co2_metric(const Network& network, const DispatchSolution& solution,
                        const MarginalResponse& response) {
  MetricVector out = empty_metric(MetricKind::co2_marginal, network, solution,
                                  response.finite_difference ? "finite-difference" : "basis");
  out.values = response.co2;
  if (response.finite_difference) out.warnings.push_back(response.note);
  return out;
}

}  // namespace dcshift
