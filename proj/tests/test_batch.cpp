#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dcshift/batch.hpp"
#include "dcshift/synthetic.hpp"
#include "fixtures.hpp"

using namespace dcshift;

namespace {

const std::vector<Strategy> kAll{Strategy::none,         Strategy::flex,    Strategy::lmp,
                                 Strategy::co2_marginal, Strategy::average, Strategy::excess};

bool same_records(const BatchResult& a, const BatchResult& b) {
  if (a.hours != b.hours || a.records.size() != b.records.size()) return false;
  for (const auto& [s, col] : a.records) {
    const auto& other = b.of(s);
    for (std::size_t h = 0; h < col.size(); ++h) {
      const auto& x = col[h];
      const auto& y = other[h];
      if (x.hour != y.hour || x.ok != y.ok || x.status != y.status || x.co2 != y.co2 ||
          x.cost != y.cost || x.curtailment != y.curtailment ||
          x.plan.delta_p_d != y.plan.delta_p_d || x.predicted.co2 != y.predicted.co2)
        return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("strategy names") {
  CHECK(parse_strategy("co2") == Strategy::co2_marginal);
  CHECK(parse_strategy("co2_marginal") == Strategy::co2_marginal);
  CHECK(parse_strategy("flex") == Strategy::flex);
  CHECK_THROWS(parse_strategy("random"));
  CHECK(table_label(Strategy::none) == "DC OPF");
  CHECK(table_label(Strategy::flex) == "DC OPF-FLEX");
  CHECK(table_label(Strategy::co2_marginal) == "lambda_CO2");
  CHECK(is_metric_strategy(Strategy::average));
  CHECK_FALSE(is_metric_strategy(Strategy::flex));
  CHECK(metric_of(Strategy::excess) == MetricKind::excess);
  for (Strategy s : kAll) CHECK(parse_strategy(to_string(s)) == s);
}

TEST_CASE("parallel batch reproduces the serial batch") {
  const SyntheticCase sc = gen_synthetic_case(6, 3, 5, 24);
  BatchConfig config;
  config.strategies = kAll;
  config.flexibility = uniform_flexibility(sc.network, 0.2);
  const BatchResult serial = run_batch_serial(sc.network, sc.hours, config);
  for (int threads : {1, 2, 4}) {
    config.threads = threads;
    CHECK(same_records(serial, run_batch_parallel(sc.network, sc.hours, config)));
  }
  CHECK(serial.hours.size() == 24);
  CHECK(serial.records.size() == kAll.size());
}

TEST_CASE("batch invariants") {
  const SyntheticCase sc = gen_synthetic_case(5, 3, 9, 12);
  BatchConfig config;
  config.strategies = {Strategy::lmp, Strategy::co2_marginal, Strategy::flex};
  config.flexibility = uniform_flexibility(sc.network, 0.2);
  const BatchResult r = run_batch_parallel(sc.network, sc.hours, config);
  REQUIRE(r.records.count(Strategy::none) == 1);  // added implicitly
  const auto& base = r.of(Strategy::none);
  for (const auto& [s, col] : r.records) {
    for (std::size_t h = 0; h < col.size(); ++h) {
      const auto& rec = col[h];
      CHECK(rec.hour == r.hours[h]);
      double sum = 0.0;
      for (const auto& [id, d] : rec.plan.delta_p_d) {
        sum += d;
        CHECK(std::abs(d) <= rec.plan.limit.at(id) + 1e-9);
      }
      CHECK(std::abs(sum) <= 1e-9);
      if (s == Strategy::flex && rec.ok && base[h].ok)
        CHECK(rec.objective <= base[h].objective + 1e-6 * std::max(1.0, base[h].objective));
    }
  }
  const std::string csv = hours_csv(r);
  CHECK(csv.rfind("hour,strategy,status,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 12 * 4);
}

TEST_CASE("hours are sorted and duplicates rejected") {
  SyntheticCase sc = gen_synthetic_case(4, 2, 3, 5);
  std::reverse(sc.hours.begin(), sc.hours.end());
  BatchConfig config;
  config.strategies = {Strategy::none};
  config.flexibility = uniform_flexibility(sc.network, 0.2);
  const BatchResult r = run_batch_serial(sc.network, sc.hours, config);
  CHECK(r.hours == std::vector<int>{0, 1, 2, 3, 4});
  sc.hours.push_back(sc.hours.front());
  CHECK_THROWS(run_batch_serial(sc.network, sc.hours, config));
}

TEST_CASE("failed hours are recorded, not fatal") {
  SyntheticCase sc = gen_synthetic_case(4, 2, 3, 3);
  for (auto& [id, mw] : sc.hours[1].load_overrides) mw *= 100.0;
  BatchConfig config;
  config.strategies = {Strategy::none, Strategy::co2_marginal};
  config.flexibility = uniform_flexibility(sc.network, 0.2);
  const BatchResult r = run_batch_parallel(sc.network, sc.hours, config);
  CHECK_FALSE(r.of(Strategy::none)[1].ok);
  CHECK(r.of(Strategy::co2_marginal)[1].status == "baseline_infeasible");
  CHECK(r.of(Strategy::none)[0].ok);

  sc.hours[2].load_overrides[999] = 1.0;
  const BatchResult e = run_batch_serial(sc.network, sc.hours, config);
  CHECK(e.of(Strategy::none)[2].status == "error");
  CHECK(e.of(Strategy::none)[2].message.find("999") != std::string::npos);
}

TEST_CASE("previous-hour metric mode") {
  const SyntheticCase sc = gen_synthetic_case(6, 3, 21, 8);
  BatchConfig config;
  config.strategies = {Strategy::lmp};
  config.flexibility = uniform_flexibility(sc.network, 0.2);
  const BatchResult same = run_batch_serial(sc.network, sc.hours, config);
  config.previous_hour_metric = true;
  const BatchResult prev = run_batch_serial(sc.network, sc.hours, config);
  config.threads = 2;
  CHECK(same_records(prev, run_batch_parallel(sc.network, sc.hours, config)));
  // The first hour has no predecessor and uses its own metric.
  CHECK(prev.of(Strategy::lmp)[0].plan.delta_p_d == same.of(Strategy::lmp)[0].plan.delta_p_d);

  // Hour h under previous-hour mode equals an explicit override with hour h-1's metric.
  for (std::size_t h = 1; h < sc.hours.size(); ++h) {
    const Network before = apply_scenario(sc.network, sc.hours[h - 1]);
    const Network now = apply_scenario(sc.network, sc.hours[h]);
    const MetricVector m = lambda_lmp(solve_dcopf(before, {}));
    PipelineOptions opts;
    opts.metric_override = &m;
    const PipelineResult p = run_pipeline(now, MetricKind::lmp, config.flexibility, {}, opts);
    CHECK(prev.of(Strategy::lmp)[h].plan.delta_p_d == p.plan.delta_p_d);
  }
}

TEST_CASE("pareto batch") {
  const SyntheticCase sc = gen_synthetic_case(5, 2, 4, 6);
  const FlexibilityConfig flex = uniform_flexibility(sc.network, 0.2);
  std::vector<double> alphas;
  for (int k = 0; k <= 10; ++k) alphas.push_back(k / 10.0);
  const auto rows = pareto_batch(sc.network, sc.hours, flex, alphas, 2);
  REQUIRE(rows.size() == 22);
  const auto serial = pareto_batch(sc.network, sc.hours, flex, alphas, 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].total_cost == serial[i].total_cost);
    CHECK(rows[i].total_emissions == serial[i].total_emissions);
  }
  for (const auto& row : rows) CHECK(row.hours_ok == 6);
  const std::string csv = pareto_csv(rows);
  CHECK(csv.rfind("alpha,flexible,hours_ok,hours_failed,total_cost_usd,total_co2_t,objective\n", 0)
        == 0);
}
