#include "dcshift/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace dcshift {

HourRecord record_of_dispatch(const DispatchSolution& solution) {
  HourRecord rec;
  rec.hour = solution.hour;
  rec.ok = solution.optimal();
  rec.status = to_string(solution.status);
  rec.message = solution.message;
  if (rec.ok) {
    rec.co2 = solution.total_emissions;
    rec.cost = solution.total_cost;
    rec.curtailment = solution.curtailment;
    rec.objective = solution.objective_value;
  }
  return rec;
}

HourRecord record_of_flex(const FlexSolution& solution, const ShiftPlan& fallback_plan) {
  HourRecord rec = record_of_dispatch(solution.dispatch);
  rec.plan = rec.ok ? solution.shift_plan : fallback_plan;
  return rec;
}

HourRecord record_of_pipeline(const PipelineResult& result) {
  HourRecord rec;
  rec.hour = result.baseline.hour;
  rec.ok = result.ok();
  rec.status = to_string(result.status);
  rec.message = result.message;
  rec.plan = result.plan;
  rec.predicted = result.predicted;
  rec.metric_source = result.metric.source;
  if (rec.ok) {
    rec.co2 = result.post_shift.total_emissions;
    rec.cost = result.post_shift.total_cost;
    rec.curtailment = result.post_shift.curtailment;
    rec.objective = result.post_shift.objective_value;
  }
  return rec;
}

void compute_mu(EvaluationReport& r) {
  r.mu_percent_co2.reset();
  r.mu_percent_cost.reset();
  r.mu_shift_co2.reset();
  r.mu_shift_cost.reset();
  if (r.max_shiftable != 0.0) {
    r.mu_percent_co2 = r.delta_co2 / r.max_shiftable;
    r.mu_percent_cost = r.delta_cost / r.max_shiftable;
  }
  if (r.total_shifted != 0.0) {
    r.mu_shift_co2 = r.delta_co2 / r.total_shifted;
    r.mu_shift_cost = r.delta_cost / r.total_shifted;
  }
}

EvaluationReport evaluate(std::span<const HourRecord> baseline, std::span<const HourRecord> strategy) {
  if (baseline.size() != strategy.size())
    throw EvaluationError("batches differ in length (" + std::to_string(baseline.size()) + " vs " +
                          std::to_string(strategy.size()) + ")");
  EvaluationReport r;
  for (std::size_t h = 0; h < baseline.size(); ++h) {
    const auto& b = baseline[h];
    const auto& s = strategy[h];
    if (b.hour != s.hour)
      throw EvaluationError("batches misaligned at position " + std::to_string(h) + ": hour " +
                            std::to_string(b.hour) + " vs " + std::to_string(s.hour));
    if (!b.ok || !s.ok) {
      ++r.hours_excluded;
      continue;
    }
    ++r.hours_used;
    r.baseline_co2 += b.co2;
    r.baseline_cost += b.cost;
    r.baseline_curtailment += b.curtailment;
    r.delta_co2 += s.co2 - b.co2;
    r.delta_cost += s.cost - b.cost;
    r.delta_curtailment += s.curtailment - b.curtailment;
    if (s.predicted.available) {
      r.predicted_delta_co2 += s.predicted.co2;
      r.predicted_delta_cost += s.predicted.cost;
      r.predicted_delta_curtailment += s.predicted.curtailment;
    } else {
      ++r.hours_without_prediction;
    }
    r.max_shiftable += s.plan.max_shiftable;
    r.total_shifted += s.plan.total_shifted;
  }
  if (r.hours_used == 0 && !baseline.empty())
    throw EvaluationError("no hour solved for both the baseline and the strategy");
  if (baseline.empty()) throw EvaluationError("empty batch");
  compute_mu(r);
  return r;
}

EvaluationReport evaluate(std::span<const DispatchSolution> baseline_batch,
                          std::span<const PipelineResult> shifted_batch,
                          const FlexibilityConfig& /*flexibility*/) {
  std::vector<HourRecord> base, shifted;
  for (const auto& s : baseline_batch) base.push_back(record_of_dispatch(s));
  for (const auto& p : shifted_batch) shifted.push_back(record_of_pipeline(p));
  return evaluate(base, shifted);
}

EvaluationReport evaluate(std::span<const DispatchSolution> baseline_batch,
                          std::span<const FlexSolution> flex_batch,
                          const FlexibilityConfig& /*flexibility*/) {
  std::vector<HourRecord> base, flex;
  for (const auto& s : baseline_batch) base.push_back(record_of_dispatch(s));
  for (const auto& f : flex_batch) flex.push_back(record_of_flex(f, f.shift_plan));
  EvaluationReport r = evaluate(base, flex);
  r.predicted_delta_co2 = r.delta_co2;
  r.predicted_delta_cost = r.delta_cost;
  r.predicted_delta_curtailment = r.delta_curtailment;
  return r;
}

std::vector<AccuracyRow> accuracy_report(std::span<const PipelineResult> shifted_batch) {
  if (shifted_batch.empty()) throw EvaluationError("empty batch");
  std::map<MetricKind, AccuracyRow> rows;
  for (const auto& p : shifted_batch) {
    if (!p.ok() || !p.predicted.available) continue;
    auto& row = rows[p.metric.kind];
    row.metric_kind = p.metric.kind;
    ++row.hours;
    row.predicted_co2 += p.predicted.co2;
    row.actual_co2 += p.post_shift.total_emissions - p.baseline.total_emissions;
    row.predicted_cost += p.predicted.cost;
    row.actual_cost += p.post_shift.total_cost - p.baseline.total_cost;
  }
  std::vector<AccuracyRow> out;
  for (auto& [kind, row] : rows) {
    row.gap_co2 = row.actual_co2 - row.predicted_co2;
    row.gap_cost = row.actual_cost - row.predicted_cost;
    out.push_back(row);
  }
  return out;
}

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;  // no "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string format_optional(const std::optional<double>& value) {
  return value ? format_number(*value) : std::string();
}

std::string accuracy_csv(std::span<const AccuracyRow> rows) {
  std::ostringstream out;
  out << "metric,hours,predicted_co2_t,actual_co2_t,gap_co2_t,predicted_cost_usd,actual_cost_usd,"
         "gap_cost_usd\n";
  for (const auto& r : rows)
    out << to_string(r.metric_kind) << ',' << r.hours << ',' << format_number(r.predicted_co2)
        << ',' << format_number(r.actual_co2) << ',' << format_number(r.gap_co2) << ','
        << format_number(r.predicted_cost) << ',' << format_number(r.actual_cost) << ','
        << format_number(r.gap_cost) << '\n';
  return out.str();
}

namespace {

std::optional<double> percent(double delta, double base) {
  if (base == 0.0) return delta == 0.0 ? std::optional<double>(0.0) : std::nullopt;
  return 100.0 * delta / base;
}

const char* kTableHeader =
    "strategy,hours,co2_t,cost_usd,curtailment_mwh,co2_change_pct,cost_change_pct,"
    "curtailment_change_pct,mu_percent_co2,mu_percent_cost,mu_shift_co2,mu_shift_cost,"
    "max_shiftable_mw,total_shifted_mw\n";

std::string table_csv(std::span<const SummaryRow> rows, bool predicted) {
  std::ostringstream out;
  out << kTableHeader;
  for (const auto& row : rows) {
    EvaluationReport r = row.report;
    if (row.is_baseline) {
      r.delta_co2 = r.delta_cost = r.delta_curtailment = 0.0;
      r.max_shiftable = r.total_shifted = 0.0;
      compute_mu(r);
    } else if (predicted && !row.flexible_clearing) {
      r.delta_co2 = r.predicted_delta_co2;
      r.delta_cost = r.predicted_delta_cost;
      r.delta_curtailment = r.predicted_delta_curtailment;
      compute_mu(r);
    }
    out << row.label << ',' << r.hours_used << ',' << format_number(r.baseline_co2 + r.delta_co2)
        << ',' << format_number(r.baseline_cost + r.delta_cost) << ','
        << format_number(r.baseline_curtailment + r.delta_curtailment) << ','
        << format_optional(percent(r.delta_co2, r.baseline_co2)) << ','
        << format_optional(percent(r.delta_cost, r.baseline_cost)) << ','
        << format_optional(percent(r.delta_curtailment, r.baseline_curtailment)) << ','
        << format_optional(r.mu_percent_co2) << ',' << format_optional(r.mu_percent_cost) << ','
        << format_optional(r.mu_shift_co2) << ',' << format_optional(r.mu_shift_cost) << ','
        << format_number(r.max_shiftable) << ',' << format_number(r.total_shifted) << '\n';
  }
  return out.str();
}

}  // namespace

std::string summary_csv(std::span<const SummaryRow> rows) { return table_csv(rows, false); }
std::string predicted_csv(std::span<const SummaryRow> rows) { return table_csv(rows, true); }

}  // namespace dcshift
