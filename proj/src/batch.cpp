#include "dcshift/batch.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <optional>
#include <sstream>

#include <omp.h>

#include "dcshift/shifter.hpp"

namespace dcshift {

std::string to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::none:
      return "none";
    case Strategy::flex:
      return "flex";
    case Strategy::lmp:
      return "lmp";
    case Strategy::co2_marginal:
      return "co2_marginal";
    case Strategy::average:
      return "average";
    case Strategy::excess:
      return "excess";
  }
  return "none";
}

Strategy parse_strategy(std::string_view text) {
  for (Strategy s : {Strategy::none, Strategy::flex, Strategy::lmp, Strategy::co2_marginal,
                     Strategy::average, Strategy::excess})
    if (text == to_string(s)) return s;
  if (text == "co2") return Strategy::co2_marginal;
  throw std::invalid_argument("unknown strategy '" + std::string(text) + "'");
}

std::string table_label(Strategy strategy) {
  switch (strategy) {
    case Strategy::none:
      return "DC OPF";
    case Strategy::flex:
      return "DC OPF-FLEX";
    case Strategy::lmp:
      return "lambda_LMP";
    case Strategy::co2_marginal:
      return "lambda_CO2";
    case Strategy::average:
      return "lambda_average";
    case Strategy::excess:
      return "lambda_excess";
  }
  return "DC OPF";
}

bool is_metric_strategy(Strategy s) {
  return s != Strategy::none && s != Strategy::flex;
}

MetricKind metric_of(Strategy s) {
  switch (s) {
    case Strategy::lmp:
      return MetricKind::lmp;
    case Strategy::co2_marginal:
      return MetricKind::co2_marginal;
    case Strategy::average:
      return MetricKind::average;
    case Strategy::excess:
      return MetricKind::excess;
    default:
      throw std::invalid_argument("strategy " + to_string(s) + " has no metric");
  }
}

namespace {

using MetricSet = std::map<MetricKind, MetricVector>;

std::vector<Strategy> strategies_with_baseline(const BatchConfig& config) {
  std::vector<Strategy> out{Strategy::none};
  for (Strategy s : config.strategies)
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> hour_order(std::span<const HourlyScenario> scenarios) {
  std::vector<std::size_t> order(scenarios.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scenarios[a].hour_index < scenarios[b].hour_index;
  });
  for (std::size_t i = 1; i < order.size(); ++i)
    if (scenarios[order[i]].hour_index == scenarios[order[i - 1]].hour_index)
      throw std::invalid_argument("duplicate hour " +
                                  std::to_string(scenarios[order[i]].hour_index));
  return order;
}

Network hour_network(const Network& network, const HourlyScenario& scenario) {
  return apply_scenario(network, scenario);
}

MetricSet metrics_for_hour(const Network& network, const HourlyScenario& scenario,
                           const BatchConfig& config) {
  MetricSet out;
  const Network net = hour_network(network, scenario);
  BaselineAnalysis analysis = analyze_baseline(net, config.objective);
  analysis.solution.hour = scenario.hour_index;
  if (!analysis.solution.optimal()) return out;
  for (Strategy s : config.strategies)
    if (is_metric_strategy(s)) out[metric_of(s)] = compute_metric(metric_of(s), net, analysis);
  return out;
}

std::vector<HourRecord> process_hour(const Network& network, const HourlyScenario& scenario,
                                     const BatchConfig& config,
                                     const std::vector<Strategy>& strategies,
                                     const MetricSet* previous) {
  std::vector<HourRecord> out;
  const int hour = scenario.hour_index;
  try {
    const Network net = hour_network(network, scenario);
    const auto centers = data_centers_of(net);
    BaselineAnalysis analysis = analyze_baseline(net, config.objective);
    analysis.solution.hour = hour;
    for (Strategy s : strategies) {
      HourRecord rec;
      if (s == Strategy::none) {
        rec = record_of_dispatch(analysis.solution);
        rec.plan = zero_plan(centers, config.flexibility);
      } else if (s == Strategy::flex) {
        FlexSolution flex = solve_dcopf_flex(net, config.objective, config.flexibility);
        rec = record_of_flex(flex, zero_plan(centers, config.flexibility));
      } else {
        PipelineOptions options;
        options.baseline = &analysis;
        if (previous) {
          auto it = previous->find(metric_of(s));
          if (it != previous->end()) options.metric_override = &it->second;
        }
        rec = record_of_pipeline(
            run_pipeline(net, metric_of(s), config.flexibility, config.objective, options));
      }
      rec.hour = hour;
      out.push_back(std::move(rec));
    }
  } catch (const std::exception& e) {
    out.clear();
    for (std::size_t i = 0; i < strategies.size(); ++i) {
      HourRecord rec;
      rec.hour = hour;
      rec.status = "error";
      rec.message = e.what();
      out.push_back(std::move(rec));
    }
  }
  return out;
}

struct Plan {
  std::vector<std::size_t> order;
  std::vector<Strategy> strategies;
};

BatchResult assemble(std::span<const HourlyScenario> scenarios, const Plan& plan,
                     std::vector<std::vector<HourRecord>>& per_hour) {
  BatchResult result;
  for (std::size_t i = 0; i < plan.order.size(); ++i)
    result.hours.push_back(scenarios[plan.order[i]].hour_index);
  for (std::size_t k = 0; k < plan.strategies.size(); ++k) {
    auto& column = result.records[plan.strategies[k]];
    column.reserve(per_hour.size());
    for (auto& hour : per_hour) column.push_back(std::move(hour[k]));
  }
  return result;
}

Plan make_plan(std::span<const HourlyScenario> scenarios, const BatchConfig& config) {
  if (config.strategies.empty()) throw std::invalid_argument("no strategies requested");
  return {hour_order(scenarios), strategies_with_baseline(config)};
}

}  // namespace

BatchResult run_batch_serial(const Network& network, std::span<const HourlyScenario> scenarios,
                             const BatchConfig& config) {
  const Plan plan = make_plan(scenarios, config);
  const std::size_t n = plan.order.size();
  std::vector<MetricSet> metrics;
  if (config.previous_hour_metric) {
    metrics.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      try {
        metrics[i] = metrics_for_hour(network, scenarios[plan.order[i]], config);
      } catch (const std::exception&) {
        metrics[i].clear();
      }
    }
  }
  std::vector<std::vector<HourRecord>> per_hour(n);
  for (std::size_t i = 0; i < n; ++i) {
    const MetricSet* previous = config.previous_hour_metric && i > 0 ? &metrics[i - 1] : nullptr;
    per_hour[i] = process_hour(network, scenarios[plan.order[i]], config, plan.strategies, previous);
  }
  return assemble(scenarios, plan, per_hour);
}

BatchResult run_batch_parallel(const Network& network, std::span<const HourlyScenario> scenarios,
                               const BatchConfig& config) {
  const Plan plan = make_plan(scenarios, config);
  const long n = static_cast<long>(plan.order.size());
  const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
  std::vector<MetricSet> metrics;
  if (config.previous_hour_metric) {
    metrics.resize(n);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long i = 0; i < n; ++i) {
      try {
        metrics[i] = metrics_for_hour(network, scenarios[plan.order[i]], config);
      } catch (const std::exception&) {
        metrics[i].clear();
      }
    }
  }
  std::vector<std::vector<HourRecord>> per_hour(n);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    const MetricSet* previous = config.previous_hour_metric && i > 0 ? &metrics[i - 1] : nullptr;
    per_hour[i] = process_hour(network, scenarios[plan.order[i]], config, plan.strategies, previous);
  }
  return assemble(scenarios, plan, per_hour);
}

std::vector<ParetoRow> pareto_batch(const Network& network,
                                    std::span<const HourlyScenario> scenarios,
                                    const FlexibilityConfig& flexibility,
                                    std::span<const double> alphas, int threads) {
  if (alphas.empty()) throw std::invalid_argument("pareto sweep needs at least one alpha");
  for (double a : alphas) validate(ObjectiveSpec{a});
  const auto order = hour_order(scenarios);
  const long n = static_cast<long>(order.size());
  const std::size_t na = alphas.size();
  // [hour][alpha][flexible]
  std::vector<std::vector<std::array<ParetoPoint, 2>>> points(n);
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
  for (long i = 0; i < n; ++i) {
    points[i].resize(na);
    try {
      const Network net = hour_network(network, scenarios[order[i]]);
      const auto plain = pareto_sweep(net, std::nullopt, alphas);
      const auto flex = pareto_sweep(net, flexibility, alphas);
      for (std::size_t a = 0; a < na; ++a) points[i][a] = {plain[a], flex[a]};
    } catch (const std::exception&) {
      for (std::size_t a = 0; a < na; ++a) points[i][a][0].status = points[i][a][1].status =
          SolveStatus::failed;
    }
  }
  std::vector<ParetoRow> rows;
  for (int f = 0; f < 2; ++f)
    for (std::size_t a = 0; a < na; ++a) {
      ParetoRow row;
      row.alpha = alphas[a];
      row.flexible = f == 1;
      for (long i = 0; i < n; ++i) {
        const auto& p = points[i][a][f];
        if (p.status != SolveStatus::optimal) {
          ++row.hours_failed;
          continue;
        }
        ++row.hours_ok;
        row.total_cost += p.total_cost;
        row.total_emissions += p.total_emissions;
        row.objective_value += p.objective_value;
      }
      rows.push_back(row);
    }
  return rows;
}

std::string pareto_csv(std::span<const ParetoRow> rows) {
  std::ostringstream out;
  out << "alpha,flexible,hours_ok,hours_failed,total_cost_usd,total_co2_t,objective\n";
  for (const auto& r : rows)
    out << format_number(r.alpha) << ',' << (r.flexible ? 1 : 0) << ',' << r.hours_ok << ','
        << r.hours_failed << ',' << format_number(r.total_cost) << ','
        << format_number(r.total_emissions) << ',' << format_number(r.objective_value) << '\n';
  return out.str();
}

std::string hours_csv(const BatchResult& result) {
  std::ostringstream out;
  out << "hour,strategy,status,total_shifted_mw,max_shiftable_mw,co2_t,cost_usd,curtailment_mw,"
         "predicted_delta_co2_t,actual_delta_co2_t,predicted_delta_cost_usd,actual_delta_cost_usd,"
         "metric_source\n";
  const auto& base = result.of(Strategy::none);
  for (std::size_t h = 0; h < result.hours.size(); ++h) {
    for (const auto& [strategy, column] : result.records) {
      const HourRecord& r = column[h];
      const HourRecord& b = base[h];
      const bool both = r.ok && b.ok;
      const bool has_prediction = both && is_metric_strategy(strategy) && r.predicted.available;
      out << r.hour << ',' << to_string(strategy) << ',' << r.status << ','
          << format_number(r.plan.total_shifted) << ',' << format_number(r.plan.max_shiftable)
          << ',' << (r.ok ? format_number(r.co2) : "") << ','
          << (r.ok ? format_number(r.cost) : "") << ','
          << (r.ok ? format_number(r.curtailment) : "") << ','
          << (has_prediction ? format_number(r.predicted.co2) : "") << ','
          << (both ? format_number(r.co2 - b.co2) : "") << ','
          << (has_prediction ? format_number(r.predicted.cost) : "") << ','
          << (both ? format_number(r.cost - b.cost) : "") << ',' << r.metric_source << '\n';
    }
  }
  return out.str();
}

}  // namespace dcshift
