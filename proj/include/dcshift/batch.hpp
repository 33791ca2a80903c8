#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcshift/evaluation.hpp"
#include "dcshift/flexibility.hpp"
#include "dcshift/grid.hpp"
#include "dcshift/opf.hpp"

namespace dcshift {

enum class Strategy { none, flex, lmp, co2_marginal, average, excess };

std::string to_string(Strategy strategy);
Strategy parse_strategy(std::string_view text);
/// Row label used in the report tables.
std::string table_label(Strategy strategy);
bool is_metric_strategy(Strategy strategy);
MetricKind metric_of(Strategy strategy);

struct BatchConfig {
  std::vector<Strategy> strategies;
  FlexibilityConfig flexibility;
  ObjectiveSpec objective;
  /// Shift on the metric of the previous scenario in the list.
  bool previous_hour_metric = false;
  int threads = 0;  // 0: OpenMP default
};

/// Per-strategy records aligned with `hours`, sorted by hour index. The
/// plain clearing (Strategy::none) is always present.
struct BatchResult {
  std::vector<int> hours;
  std::map<Strategy, std::vector<HourRecord>> records;

  const std::vector<HourRecord>& of(Strategy strategy) const { return records.at(strategy); }
};

/// Plain loop over the hours; reference for the parallel version.
BatchResult run_batch_serial(const Network& network, std::span<const HourlyScenario> scenarios,
                             const BatchConfig& config);

/// Hours distributed over OpenMP threads. Same output as the serial run.
BatchResult run_batch_parallel(const Network& network, std::span<const HourlyScenario> scenarios,
                               const BatchConfig& config);

struct ParetoRow {
  double alpha = 1.0;
  bool flexible = false;
  int hours_ok = 0;
  int hours_failed = 0;
  double total_cost = 0.0;
  double total_emissions = 0.0;
  double objective_value = 0.0;
};

/// Alpha sweep summed over the hours, with and without flexibility.
std::vector<ParetoRow> pareto_batch(const Network& network,
                                    std::span<const HourlyScenario> scenarios,
                                    const FlexibilityConfig& flexibility,
                                    std::span<const double> alphas, int threads = 0);

std::string pareto_csv(std::span<const ParetoRow> rows);

/// Per-hour detail: hour, strategy, status, shifted MW, predicted and
/// actual changes against the plain clearing.
std::string hours_csv(const BatchResult& result);

}  // namespace dcshift
