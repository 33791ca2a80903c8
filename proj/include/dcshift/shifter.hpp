#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcshift/flexibility.hpp"
#include "dcshift/grid.hpp"
#include "dcshift/opf.hpp"
#include "dcshift/sensitivity.hpp"

namespace dcshift {

class MissingMetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minimises sum(lambda_i * dP_i) + sum(d_ij * s_ij) over the data-center
/// shifts. Data centers sharing a bus read the same metric value.
ShiftPlan solve_shift_lp(const MetricVector& metric, std::span<const DataCenter> data_centers,
                         const FlexibilityConfig& flexibility);

/// First-order change in system totals implied by a plan.
struct LinearPrediction {
  double co2 = 0.0;          // t
  double cost = 0.0;         // $
  double curtailment = 0.0;  // MW
  bool available = true;     // false when a shifted bus has no marginal response
};

LinearPrediction predict_change(const MarginalResponse& response, const ShiftPlan& plan,
                                std::span<const DataCenter> data_centers);

/// Baseline clearing and its marginal response, shared by every metric for one hour.
struct BaselineAnalysis {
  DispatchSolution solution;
  MarginalResponse response;
};

BaselineAnalysis analyze_baseline(const Network& network, const ObjectiveSpec& objective);

MetricVector compute_metric(MetricKind kind, const Network& network,
                            const BaselineAnalysis& baseline);

enum class PipelineStatus { ok, baseline_infeasible, metric_unavailable, post_shift_infeasible };

std::string to_string(PipelineStatus status);

struct PipelineResult {
  DispatchSolution baseline;
  MetricVector metric;
  ShiftPlan plan;
  DispatchSolution post_shift;
  LinearPrediction predicted;
  PipelineStatus status = PipelineStatus::ok;
  std::string message;

  bool ok() const { return status == PipelineStatus::ok; }
};

struct PipelineOptions {
  /// Reuse an existing baseline analysis for this network and objective.
  const BaselineAnalysis* baseline = nullptr;
  /// Shift on this metric instead of the one computed from the baseline.
  const MetricVector* metric_override = nullptr;
};

PipelineResult run_pipeline(const Network& network, MetricKind metric_kind,
                            const FlexibilityConfig& flexibility, const ObjectiveSpec& objective,
                            const PipelineOptions& options = {});

std::string plan_to_json(const ShiftPlan& plan);
std::string pipeline_to_json(const PipelineResult& result);

}  // namespace dcshift
