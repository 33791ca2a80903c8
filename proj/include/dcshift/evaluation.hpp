#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcshift/flexibility.hpp"
#include "dcshift/opf.hpp"
#include "dcshift/shifter.hpp"

namespace dcshift {

/// Compact per-hour outcome of one strategy. For a shifting pipeline the
/// totals are the post-shift clearing; for the plain and FLEX clearings they
/// are that solve.
struct HourRecord {
  int hour = -1;
  bool ok = false;
  std::string status;
  double co2 = 0.0;
  double cost = 0.0;
  double curtailment = 0.0;
  double objective = 0.0;
  LinearPrediction predicted;
  ShiftPlan plan;
  std::string metric_source;
  std::string message;
};

HourRecord record_of_dispatch(const DispatchSolution& solution);
HourRecord record_of_flex(const FlexSolution& solution, const ShiftPlan& fallback_plan);
HourRecord record_of_pipeline(const PipelineResult& result);

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Totals summed over the hours where both the baseline and the strategy
/// solved. Deltas are strategy minus baseline. mu values are absent when
/// their denominator is zero.
struct EvaluationReport {
  int hours_used = 0;
  int hours_excluded = 0;
  int hours_without_prediction = 0;

  double baseline_co2 = 0.0;
  double baseline_cost = 0.0;
  double baseline_curtailment = 0.0;

  double delta_co2 = 0.0;
  double delta_cost = 0.0;
  double delta_curtailment = 0.0;
  double predicted_delta_co2 = 0.0;
  double predicted_delta_cost = 0.0;
  double predicted_delta_curtailment = 0.0;

  double max_shiftable = 0.0;  // L, MW
  double total_shifted = 0.0;  // S, MW

  std::optional<double> mu_percent_co2;
  std::optional<double> mu_shift_co2;
  std::optional<double> mu_percent_cost;
  std::optional<double> mu_shift_cost;
};

/// Fills the mu fields from the delta, L and S fields.
void compute_mu(EvaluationReport& report);

EvaluationReport evaluate(std::span<const HourRecord> baseline, std::span<const HourRecord> strategy);

EvaluationReport evaluate(std::span<const DispatchSolution> baseline_batch,
                          std::span<const PipelineResult> shifted_batch,
                          const FlexibilityConfig& flexibility);

EvaluationReport evaluate(std::span<const DispatchSolution> baseline_batch,
                          std::span<const FlexSolution> flex_batch,
                          const FlexibilityConfig& flexibility);

struct AccuracyRow {
  MetricKind metric_kind = MetricKind::lmp;
  int hours = 0;
  double predicted_co2 = 0.0;
  double actual_co2 = 0.0;
  double gap_co2 = 0.0;  // actual - predicted
  double predicted_cost = 0.0;
  double actual_cost = 0.0;
  double gap_cost = 0.0;
};

/// One row per metric kind present among the successful pipelines, in
/// MetricKind order.
std::vector<AccuracyRow> accuracy_report(std::span<const PipelineResult> shifted_batch);

std::string accuracy_csv(std::span<const AccuracyRow> rows);

/// One line of the summary tables. `flexible_clearing` marks the FLEX row,
/// whose predicted change is its own clearing.
struct SummaryRow {
  std::string label;
  EvaluationReport report;
  bool is_baseline = false;
  bool flexible_clearing = false;
};

/// Realised totals and changes.
std::string summary_csv(std::span<const SummaryRow> rows);
/// Totals and changes implied by the linear predictions.
std::string predicted_csv(std::span<const SummaryRow> rows);

/// Fixed-precision number formatting shared by every report writer.
std::string format_number(double value);
std::string format_optional(const std::optional<double>& value);

}  // namespace dcshift
