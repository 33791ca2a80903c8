// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "dcshift/batch.hpp"
#include "dcshift/evaluation.hpp"
#include "dcshift/runner.hpp"
#include "dcshift/sensitivity.hpp"
#include "dcshift/shifter.hpp"
#include "dcshift/synthetic.hpp"
#include "fixtures.hpp"

using namespace dcshift;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", id, what.c_str(),
              detail.c_str());
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

struct Instance {
  Network network;
  int seed = 0;
  int hour = 0;
};

// 50 synthetic networks of 3 to 8 buses, each with a few hours.
std::vector<Instance> property_instances() {
  std::vector<Instance> out;
  for (int seed = 1; seed <= 50; ++seed) {
    const int buses = 3 + (seed - 1) % 6;
    const SyntheticCase sc = gen_synthetic_case(buses, std::min(3, buses), 1000 + seed, 4);
    for (const auto& h : sc.hours)
      out.push_back({apply_scenario(sc.network, h), seed, h.hour_index});
  }
  return out;
}

std::vector<int> dc_buses(const Network& n) {
  std::vector<int> b;
  for (const auto& dc : data_centers_of(n)) b.push_back(dc.bus);
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

void criteria_1_to_3(const std::vector<Instance>& cases) {
  const auto t1 = std::chrono::steady_clock::now();
  int checks = 0, skipped = 0, degenerate = 0, bad = 0;
  double worst = 0.0;
  for (const auto& c : cases) {
    const DispatchSolution s = solve_dcopf(c.network, {});
    if (!s.optimal()) { ++bad; continue; }
    SensitivityBasis basis;
    try {
      basis = build_sensitivity_basis(c.network, s);
    } catch (const DegenerateBasisError&) {
      ++degenerate;
      continue;
    }
    const MetricVector co2 = lambda_co2(c.network, s, basis);
    for (int bus : dc_buses(c.network)) {
      std::vector<double> extra(c.network.bus_count(), 0.0);
      extra[bus - 1] = 0.1;
      const DispatchSolution p = solve_dcopf(c.network, {}, extra);
      if (!p.optimal() || !p.binding_set.same_constraints(s.binding_set)) { ++skipped; continue; }
      const MetricVector fd =
          lambda_co2_finite_difference(c.network, s, std::vector<int>{bus}, 0.1);
      const double err = std::abs(*fd.at(bus) - *co2.at(bus));
      worst = std::max(worst, err);
      if (err > 1e-4) ++bad;
      ++checks;
    }
  }
  const double dt1 = seconds_since(t1);
  report(1, bad == 0 && checks > 0 && dt1 < 60.0,
         "basis lambda_CO2 matches finite differences at data-center buses",
         std::to_string(checks) + " checks, " + std::to_string(skipped) + " binding-set changes, " +
             std::to_string(degenerate) + " degenerate, " + fmt("max err %.3g, %.2f s", worst, dt1));

  int lmp_checks = 0, lmp_bad = 0;
  double lmp_worst = 0.0;
  for (const auto& c : cases) {
    const DispatchSolution s = solve_dcopf(c.network, {});
    if (!s.optimal()) { ++lmp_bad; continue; }
    try {
      build_sensitivity_basis(c.network, s);
    } catch (const DegenerateBasisError&) {
      continue;
    }
    for (int bus = 1; bus <= c.network.bus_count(); ++bus) {
      std::vector<double> extra(c.network.bus_count(), 0.0);
      extra[bus - 1] = 0.1;
      const DispatchSolution p = solve_dcopf(c.network, {}, extra);
      if (!p.optimal() || !p.binding_set.same_constraints(s.binding_set)) continue;
      const double fd = (p.objective_value - s.objective_value) / 0.1;
      const double rel = std::abs(s.nodal_duals[bus - 1] - fd) / std::max(std::abs(fd), 1e-9);
      lmp_worst = std::max(lmp_worst, rel);
      if (rel > 1e-4) ++lmp_bad;
      ++lmp_checks;
    }
  }
  report(2, lmp_bad == 0 && lmp_checks > 0, "balance duals match finite-difference cost sensitivity",
         std::to_string(lmp_checks) + fmt(" checks, max rel err %.3g", lmp_worst));

  int r1_checks = 0, r1_bad = 0;
  double r1_worst = 0.0;
  for (const auto& c : cases) {
    const DispatchSolution s = solve_dcopf(c.network, ObjectiveSpec{0.0});
    if (!s.optimal()) { ++r1_bad; continue; }
    SensitivityBasis basis;
    try {
      basis = build_sensitivity_basis(c.network, s);
    } catch (const DegenerateBasisError&) {
      continue;
    }
    const MetricVector co2 = lambda_co2(c.network, s, basis);
    for (int bus = 1; bus <= c.network.bus_count(); ++bus) {
      const double err = std::abs(s.nodal_duals[bus - 1] - *co2.at(bus));
      r1_worst = std::max(r1_worst, err);
      if (err > 1e-6) ++r1_bad;
      ++r1_checks;
    }
  }
  report(3, r1_bad == 0 && r1_checks > 0, "carbon-only duals equal lambda_CO2",
         std::to_string(r1_checks) + fmt(" bus checks, max err %.3g", r1_worst));
}

// Cheapest weighted objective over integer shifts, re-solving the OPF per point.
double grid_flex_optimum(const Network& n, const FlexibilityConfig& flex, int* points) {
  const auto centers = data_centers_of(n);
  const int k = static_cast<int>(centers.size());
  std::vector<int> lim(k);
  for (int i = 0; i < k; ++i)
    lim[i] = static_cast<int>(std::floor(flex.epsilon_of(centers[i].load_id) * centers[i].demand));
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> d(k, 0);
  auto rec = [&](auto&& self, int i, int sum) -> void {
    if (i == k - 1) {
      if (std::abs(sum) > lim[i]) return;
      d[i] = -sum;
      ShiftPlan plan = zero_plan(centers, flex);
      for (int j = 0; j < k; ++j) plan.delta_p_d[centers[j].load_id] += d[j];
      const DispatchSolution s = solve_dcopf(apply_shift(n, plan), {});
      ++*points;
      if (s.optimal()) best = std::min(best, s.objective_value);
      return;
    }
    for (int v = -lim[i]; v <= lim[i]; ++v) {
      d[i] = v;
      self(self, i + 1, sum + v);
    }
  };
  rec(rec, 0, 0);
  return best;
}

void criterion_4() {
  const auto t = std::chrono::steady_clock::now();
  int instances = 0, bad = 0, points = 0;
  double worst_gap = 0.0, worst_ratio = 0.0;
  for (int seed = 1; seed <= 16; ++seed) {
    const int buses = 3 + (seed - 1) % 4;
    const int dcs = 2 + seed % 2;
    const SyntheticCase sc = gen_synthetic_case(buses, dcs, 500 + seed, 24);
    for (int hour : {0, 13}) {
      const Network n = apply_scenario(sc.network, sc.hours[hour]);
      const FlexibilityConfig flex = uniform_flexibility(n, 0.2);
      const FlexSolution f = solve_dcopf_flex(n, {}, flex);
      if (!f.dispatch.optimal()) { ++bad; continue; }
      const double grid = grid_flex_optimum(n, flex, &points);
      // Rounding the continuous optimum to the grid moves each data center
      // by under 1 MW; each MW moved is worth at most the spread of unit costs.
      double lo = 1e300, hi = -1e300;
      for (const auto& g : n.generators) {
        lo = std::min(lo, g.cost);
        hi = std::max(hi, g.cost);
      }
      const double step = static_cast<double>(dcs) * (hi - lo);
      const double gap = grid - f.dispatch.objective_value;
      worst_gap = std::max(worst_gap, gap);
      if (step > 0.0) worst_ratio = std::max(worst_ratio, gap / step);
      if (gap < -1e-6 * std::max(1.0, grid) || gap > step + 1e-6) ++bad;
      ++instances;
    }
  }
  const double dt = seconds_since(t);
  report(4, bad == 0 && instances > 0 && dt < 300.0,
         "flexible clearing matches exhaustive 1 MW shift enumeration",
         std::to_string(instances) + " instances, " + std::to_string(points) +
             fmt(" grid solves, max gap %.4g (%.2f of one step), %.2f s", worst_gap, worst_ratio, dt));
}

int check_plan(const ShiftPlan& plan, const FlexibilityConfig& flex, bool is_metric,
               bool free_shifts) {
  int bad = 0;
  double sum = 0.0;
  for (const auto& [id, d] : plan.delta_p_d) {
    sum += d;
    if (std::abs(d) > plan.limit.at(id) + 1e-9) ++bad;
    if (std::abs(plan.delta_from_transfers(id) - d) > 1e-9) ++bad;
  }
  if (std::abs(sum) > 1e-9) ++bad;
  for (const auto& [pair, s] : plan.transfers)
    if (s < 0.0 || s > flex.pair_limit(pair.first, pair.second) + 1e-9) ++bad;
  if (is_metric && free_shifts && plan.predicted_objective_change > 1e-9) ++bad;
  return bad;
}

void criterion_5() {
  int plans = 0, bad = 0;
  const std::vector<Strategy> all{Strategy::none, Strategy::flex, Strategy::lmp,
                                  Strategy::co2_marginal, Strategy::average, Strategy::excess};
  for (int seed = 1; seed <= 12; ++seed) {
    const SyntheticCase sc = gen_synthetic_case(3 + seed % 6, 1 + seed % 4, 700 + seed, 24);
    for (int variant = 0; variant < 2; ++variant) {
      BatchConfig config;
      config.strategies = all;
      config.flexibility = variant == 0 ? uniform_flexibility(sc.network, 0.2)
                                        : uniform_flexibility(sc.network, 0.3, 0.5, 4.0);
      config.previous_hour_metric = seed % 3 == 0;
      const BatchResult r = run_batch_parallel(sc.network, sc.hours, config);
      for (const auto& [s, col] : r.records)
        for (const auto& rec : col) {
          bad += check_plan(rec.plan, config.flexibility, is_metric_strategy(s), variant == 0);
          ++plans;
        }
    }
  }
  report(5, bad == 0 && plans > 0, "shift plans conserve load and respect every bound",
         std::to_string(plans) + " plans, " + std::to_string(bad) + " violations");
}

void criterion_6() {
  int reports = 0, bad = 0;
  auto identities = [&](const EvaluationReport& r) {
    ++reports;
    if (r.max_shiftable != 0.0) {
      if (*r.mu_percent_co2 != r.delta_co2 / r.max_shiftable) ++bad;
      if (*r.mu_percent_cost != r.delta_cost / r.max_shiftable) ++bad;
    } else if (r.mu_percent_co2) {
      ++bad;
    }
    if (r.total_shifted != 0.0) {
      if (*r.mu_shift_co2 != r.delta_co2 / r.total_shifted) ++bad;
      if (*r.mu_shift_cost != r.delta_cost / r.total_shifted) ++bad;
    } else if (r.mu_shift_co2) {
      ++bad;
    }
  };
  for (int seed = 1; seed <= 6; ++seed) {
    const SyntheticCase sc = gen_synthetic_case(4 + seed % 4, 3, 900 + seed, 24);
    BatchConfig config;
    config.strategies = {Strategy::flex, Strategy::lmp, Strategy::co2_marginal,
                         Strategy::average, Strategy::excess};
    config.flexibility = uniform_flexibility(sc.network, 0.2);
    const BatchResult r = run_batch_serial(sc.network, sc.hours, config);
    for (const auto& row : summary_rows(r)) identities(row.report);
  }

  // Two equal data centers on either side of a congested line: the price
  // gap makes every hour shift the full amount.
  const Network n = fixtures::two_bus_with_dcs(100.0, 50.0);
  std::vector<HourlyScenario> hours;
  for (int h = 0; h < 24; ++h) {
    HourlyScenario s;
    s.hour_index = h;
    s.load_overrides[1] = 80.0 + 2.0 * h;
    hours.push_back(s);
  }
  BatchConfig config;
  config.strategies = {Strategy::lmp, Strategy::co2_marginal};
  config.flexibility = uniform_flexibility(n, 0.2);
  const BatchResult r = run_batch_serial(n, hours, config);
  bool full = true;
  for (const auto& row : summary_rows(r)) {
    if (row.is_baseline) continue;
    identities(row.report);
    const auto& rep = row.report;
    full = full && rep.hours_used == 24 && rep.total_shifted == rep.max_shiftable &&
           rep.mu_shift_co2 == rep.mu_percent_co2 && rep.mu_shift_cost == rep.mu_percent_cost;
  }
  report(6, bad == 0 && full, "mu identities hold and full shifts give mu_shift = mu_percent",
         std::to_string(reports) + " reports, " + std::to_string(bad) + " mismatches, full-shift " +
             (full ? "equal" : "unequal"));
}

void criterion_8() {
  const SyntheticCase sc = gen_synthetic_case(5, 3, 8, 24);
  const FlexibilityConfig flex = uniform_flexibility(sc.network, 0.2);
  std::vector<double> alphas;
  for (int k = 0; k <= 10; ++k) alphas.push_back(k / 10.0);
  const auto rows = pareto_batch(sc.network, sc.hours, flex, alphas);
  std::vector<ParetoRow> plain, flexible;
  for (const auto& r : rows) (r.flexible ? flexible : plain).push_back(r);
  int bad = 0, failed_hours = 0, coordinate_wins = 0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    failed_hours += plain[i].hours_failed + flexible[i].hours_failed;
    // Below-left in the weighted objective the clearing minimises.
    const double slack = 1e-6 * std::max(1.0, std::abs(plain[i].objective_value));
    if (flexible[i].objective_value > plain[i].objective_value + slack) ++bad;
    if (flexible[i].total_cost <= plain[i].total_cost + 1e-6 * plain[i].total_cost &&
        flexible[i].total_emissions <= plain[i].total_emissions + 1e-6 * plain[i].total_emissions)
      ++coordinate_wins;
    if (i > 0) {
      // alphas ascend, so emissions must not fall as alpha grows back.
      for (const auto* side : {&plain, &flexible}) {
        const auto& lower = (*side)[i - 1];
        const auto& upper = (*side)[i];
        if (lower.total_emissions > upper.total_emissions + 1e-6 * upper.total_emissions) ++bad;
      }
    }
  }
  report(8, bad == 0 && failed_hours == 0,
         "flexible sweep lies below-left and emissions fall as alpha decreases",
         "11 alphas, 24 hours, " + std::to_string(coordinate_wins) +
             " of 11 points better in both cost and emissions, " + std::to_string(bad) +
             " violations");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_9() {
  const fs::path dir = fs::temp_directory_path() / "dcshift_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const SyntheticCase sc = gen_synthetic_case(7, 3, 77, 24);
  std::ofstream(dir / "case.json") << serialize_network_json(sc.network);
  {
    std::ofstream ts(dir / "timeseries.csv");
    write_timeseries_csv(ts, sc.hours);
  }
  RunConfig c;
  c.case_path = dir / "case.json";
  c.timeseries_path = dir / "timeseries.csv";
  c.strategies = {Strategy::none, Strategy::flex, Strategy::lmp, Strategy::co2_marginal,
                  Strategy::average, Strategy::excess};
  c.alphas = {0.0, 0.25, 0.5, 0.75, 1.0};
  c.out_dir = dir / "a";
  c.threads = 1;
  run(c);
  c.out_dir = dir / "b";
  c.threads = 3;
  run(c);
  bool same = true;
  for (const char* f : {"summary.csv", "predicted.csv", "pareto.csv"})
    same = same && slurp(dir / "a" / f) == slurp(dir / "b" / f) && !slurp(dir / "a" / f).empty();
  report(9, same, "repeated runs write byte-identical reports",
         "summary.csv, predicted.csv, pareto.csv at 1 and 3 threads");
  fs::remove_all(dir);
}

}  // namespace

int main() {
  try {
    criteria_1_to_3(property_instances());
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_8();
    criterion_9();
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("criterion 7 needs the RTS-GMLC data set; see acceptance_rts\n");
  return failures == 0 ? 0 : 1;
}
