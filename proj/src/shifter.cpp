#include "dcshift/shifter.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "dcshift/lp.hpp"

namespace dcshift {

namespace {

double snap(double v) { return std::abs(v) < 1e-10 ? 0.0 : v; }

}  // namespace

ShiftPlan solve_shift_lp(const MetricVector& metric, std::span<const DataCenter> data_centers,
                         const FlexibilityConfig& flexibility) {
  const std::vector<DataCenter> centers(data_centers.begin(), data_centers.end());
  ShiftPlan plan = zero_plan(centers, flexibility);
  const int ndc = static_cast<int>(centers.size());
  if (ndc == 0) return plan;

  std::vector<double> lambda(ndc, 0.0);
  for (int c = 0; c < ndc; ++c) {
    const auto& dc = centers[c];
    if (dc.demand < 0.0)
      throw std::invalid_argument("data center " + std::to_string(dc.load_id) +
                                  " has negative demand");
    if (plan.limit[dc.load_id] == 0.0) continue;
    if (dc.bus < 1 || dc.bus > static_cast<int>(metric.values.size()) ||
        !metric.values[dc.bus - 1])
      throw MissingMetricError(to_string(metric.kind) + " has no value at bus " +
                               std::to_string(dc.bus) + " (data center " +
                               std::to_string(dc.load_id) + ")");
    lambda[c] = *metric.values[dc.bus - 1];
  }

  lp::Model model;
  for (int c = 0; c < ndc; ++c) {
    const double lim = plan.limit[centers[c].load_id];
    model.add_column(lambda[c], -lim, lim);
  }
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < ndc; ++i)
    for (int j = 0; j < ndc; ++j) {
      if (i == j) continue;
      const int from = centers[i].load_id, to = centers[j].load_id;
      model.add_column(flexibility.shift_cost(from, to), 0.0, flexibility.pair_limit(from, to));
      pairs.emplace_back(i, j);
    }
  for (int c = 0; c < ndc; ++c) {
    std::vector<lp::Entry> row{{c, 1.0}};
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const int col = ndc + static_cast<int>(p);
      if (pairs[p].second == c) row.push_back({col, -1.0});
      if (pairs[p].first == c) row.push_back({col, 1.0});
    }
    model.add_row(0.0, 0.0, std::move(row));
  }
  std::vector<lp::Entry> total;
  for (int c = 0; c < ndc; ++c) total.push_back({c, 1.0});
  model.add_row(0.0, 0.0, std::move(total));

  const lp::Result res = lp::solve(model);
  // The zero plan is always feasible and the variables are bounded.
  if (res.status != lp::Status::optimal)
    throw std::logic_error("shift LP did not solve: " + lp::to_string(res.status));

  for (int c = 0; c < ndc; ++c) {
    const double delta = snap(res.x[c]);
    plan.delta_p_d[centers[c].load_id] = delta;
    plan.total_shifted += std::abs(delta);
  }
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const double s = snap(res.x[ndc + p]);
    if (s != 0.0)
      plan.transfers[{centers[pairs[p].first].load_id, centers[pairs[p].second].load_id}] = s;
  }
  plan.predicted_objective_change = res.objective;
  return plan;
}

LinearPrediction predict_change(const MarginalResponse& response, const ShiftPlan& plan,
                                std::span<const DataCenter> data_centers) {
  LinearPrediction out;
  for (const auto& dc : data_centers) {
    auto it = plan.delta_p_d.find(dc.load_id);
    if (it == plan.delta_p_d.end() || it->second == 0.0) continue;
    const int b = dc.bus - 1;
    if (!response.co2[b] || !response.cost[b] || !response.curtailment[b]) {
      out.available = false;
      continue;
    }
    out.co2 += *response.co2[b] * it->second;
    out.cost += *response.cost[b] * it->second;
    out.curtailment += *response.curtailment[b] * it->second;
  }
  return out;
}

BaselineAnalysis analyze_baseline(const Network& network, const ObjectiveSpec& objective) {
  BaselineAnalysis out;
  out.solution = solve_dcopf(network, objective);
  if (out.solution.optimal()) out.response = marginal_response(network, out.solution, objective);
  return out;
}

MetricVector compute_metric(MetricKind kind, const Network& network,
                            const BaselineAnalysis& baseline) {
  switch (kind) {
    case MetricKind::lmp:
      return lambda_lmp(baseline.solution);
    case MetricKind::co2_marginal:
      return co2_metric(network, baseline.solution, baseline.response);
    case MetricKind::average:
      return lambda_average(network, baseline.solution);
    case MetricKind::excess:
      return lambda_excess(network, baseline.solution);
  }
  throw std::invalid_argument("unknown metric kind");
}

std::string to_string(PipelineStatus status) {
  switch (status) {
    case PipelineStatus::ok:
      return "ok";
    case PipelineStatus::baseline_infeasible:
      return "baseline_infeasible";
    case PipelineStatus::metric_unavailable:
      return "metric_unavailable";
    case PipelineStatus::post_shift_infeasible:
      return "post_shift_infeasible";
  }
  return "ok";
}

PipelineResult run_pipeline(const Network& network, MetricKind metric_kind,
                            const FlexibilityConfig& flexibility, const ObjectiveSpec& objective,
                            const PipelineOptions& options) {
  const auto centers = data_centers_of(network);
  if (centers.empty()) throw std::invalid_argument("pipeline needs at least one data-center load");
  validate(flexibility, network);

  PipelineResult out;
  BaselineAnalysis local;
  if (!options.baseline) local = analyze_baseline(network, objective);
  const BaselineAnalysis& base = options.baseline ? *options.baseline : local;
  out.baseline = base.solution;
  out.plan = zero_plan(centers, flexibility);
  if (!base.solution.optimal()) {
    out.status = PipelineStatus::baseline_infeasible;
    out.message = base.solution.message;
    return out;
  }

  try {
    out.metric = options.metric_override ? *options.metric_override
                                         : compute_metric(metric_kind, network, base);
    out.plan = solve_shift_lp(out.metric, centers, flexibility);
  } catch (const MissingMetricError& e) {
    out.status = PipelineStatus::metric_unavailable;
    out.message = e.what();
    return out;
  }
  out.predicted = predict_change(base.response, out.plan, centers);

  if (out.plan.total_shifted == 0.0) {
    out.post_shift = base.solution;
    return out;
  }
  out.post_shift = solve_dcopf(apply_shift(network, out.plan), objective);
  out.post_shift.hour = base.solution.hour;
  if (!out.post_shift.optimal()) {
    out.status = PipelineStatus::post_shift_infeasible;
    out.message = out.post_shift.message;
  }
  return out;
}

namespace {

nlohmann::ordered_json plan_json(const ShiftPlan& plan) {
  nlohmann::ordered_json doc;
  auto deltas = nlohmann::ordered_json::object();
  for (const auto& [id, d] : plan.delta_p_d) deltas[std::to_string(id)] = d;
  doc["delta_p_d"] = std::move(deltas);
  auto transfers = nlohmann::ordered_json::array();
  for (const auto& [pair, s] : plan.transfers)
    transfers.push_back({{"from", pair.first}, {"to", pair.second}, {"mw", s}});
  doc["transfers"] = std::move(transfers);
  doc["predicted_objective_change"] = plan.predicted_objective_change;
  doc["total_shifted"] = plan.total_shifted;
  doc["max_shiftable"] = plan.max_shiftable;
  return doc;
}

nlohmann::ordered_json dispatch_json(const DispatchSolution& sol) {
  nlohmann::ordered_json doc;
  doc["status"] = to_string(sol.status);
  doc["total_cost"] = sol.total_cost;
  doc["total_emissions"] = sol.total_emissions;
  doc["curtailment"] = sol.curtailment;
  doc["p_g"] = sol.p_g;
  doc["nodal_duals"] = sol.nodal_duals;
  if (!sol.message.empty()) doc["message"] = sol.message;
  return doc;
}

}  // namespace

std::string plan_to_json(const ShiftPlan& plan) { return plan_json(plan).dump(); }

std::string pipeline_to_json(const PipelineResult& result) {
  nlohmann::ordered_json doc;
  doc["hour"] = result.baseline.hour;
  doc["status"] = to_string(result.status);
  doc["metric_kind"] = to_string(result.metric.kind);
  doc["metric"] = nlohmann::ordered_json::parse(metric_to_json(result.metric));
  doc["plan"] = plan_json(result.plan);
  doc["predicted"] = {{"co2", result.predicted.co2},
                      {"cost", result.predicted.cost},
                      {"curtailment", result.predicted.curtailment},
                      {"available", result.predicted.available}};
  doc["baseline"] = dispatch_json(result.baseline);
  doc["post_shift"] = dispatch_json(result.post_shift);
  if (!result.message.empty()) doc["message"] = result.message;
  return doc.dump();
}

}  // namespace dcshift
