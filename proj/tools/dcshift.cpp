#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dcshift/case_io.hpp"
#include "dcshift/runner.hpp"
#include "dcshift/synthetic.hpp"

using namespace dcshift;

namespace {

enum Exit { kOk = 0, kConfig = 1, kInput = 2, kAllFailed = 3 };

struct RunFlags {
  std::string config_file;
  std::optional<std::string> case_path, case_format, timeseries, rts_series, hours, out;
  std::optional<std::vector<std::string>> strategies;
  std::optional<std::vector<int>> dc_buses;
  std::optional<std::vector<double>> alphas;
  std::optional<double> epsilon, dc_load, pmax_scale, shift_cost, pair_limit, alpha;
  std::optional<int> threads;
  bool previous_hour_metric = false;
};

void add_run_flags(CLI::App* app, RunFlags& f) {
  app->add_option("--config", f.config_file, "JSON config file; flags override it");
  app->add_option("--case", f.case_path, "case file (native JSON) or RTS-GMLC directory");
  app->add_option("--case-format", f.case_format, "native-json or rts-gmlc-csv");
  app->add_option("--timeseries", f.timeseries, "hourly series CSV or RTS-GMLC directory");
  app->add_option("--rts-series", f.rts_series, "real-time or day-ahead");
  app->add_option("--hours", f.hours, "all, N or A-B (inclusive)");
  app->add_option("--strategies", f.strategies, "none,flex,lmp,co2_marginal,average,excess")
      ->delimiter(',');
  app->add_option("--epsilon", f.epsilon, "shiftable fraction of each data center's load");
  app->add_option("--dc-buses", f.dc_buses, "buses that receive a data center")->delimiter(',');
  app->add_option("--dc-load", f.dc_load, "data-center load, MW");
  app->add_option("--pmax-scale", f.pmax_scale, "generator capacity multiplier");
  app->add_option("--shift-cost", f.shift_cost, "cost per MW moved between data centers");
  app->add_option("--pair-limit", f.pair_limit, "MW limit per data-center pair");
  app->add_option("--alpha", f.alpha, "cost weight of the clearing objective");
  app->add_option("--alphas", f.alphas, "alpha values for the Pareto sweep")->delimiter(',');
  app->add_option("--out", f.out, "output directory");
  app->add_option("--threads", f.threads, "worker threads (0: all cores)");
  app->add_flag("--previous-hour-metric", f.previous_hour_metric,
                "shift on the previous hour's metric");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig build_config(const RunFlags& f) {
  RunConfig c;
  if (!f.config_file.empty()) c = parse_run_config_json(read_file(f.config_file));
  try {
    if (f.case_path) c.case_path = *f.case_path;
    if (f.case_format) c.case_format = parse_case_format(*f.case_format);
    if (f.timeseries) c.timeseries_path = *f.timeseries;
    if (f.rts_series) {
      if (*f.rts_series == "real-time") c.rts_series = SeriesResolution::real_time;
      else if (*f.rts_series == "day-ahead") c.rts_series = SeriesResolution::day_ahead;
      else throw ConfigError("unknown rts series '" + *f.rts_series + "'");
    }
    if (f.hours) c.hours = parse_hour_range(*f.hours);
    if (f.strategies) {
      c.strategies.clear();
      for (const auto& s : *f.strategies) c.strategies.push_back(parse_strategy(s));
    }
    if (f.epsilon) c.epsilon = *f.epsilon;
    if (f.dc_buses) c.dc_buses = *f.dc_buses;
    if (f.dc_load) c.dc_load_mw = *f.dc_load;
    if (f.pmax_scale) c.p_max_scale = *f.pmax_scale;
    if (f.shift_cost) c.shift_cost = *f.shift_cost;
    if (f.pair_limit) c.pair_limit = *f.pair_limit;
    if (f.alpha) c.alpha = *f.alpha;
    if (f.alphas) c.alphas = *f.alphas;
    if (f.out) c.out_dir = *f.out;
    if (f.threads) c.threads = *f.threads;
    if (f.previous_hour_metric) c.previous_hour_metric = true;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return c;
}

int report(const RunManifest& m, const RunConfig& c) {
  for (const auto& [s, t] : m.totals)
    std::printf("%-13s hours %d failed %d co2 %.3f t cost %.2f\n", to_string(s).c_str(),
                t.hours_attempted, t.hours_failed, t.co2, t.cost);
  std::printf("wrote %s (%.2f s)\n", c.out_dir.string().c_str(), m.wall_clock_seconds);
  return m.all_hours_failed() ? kAllFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-center load shifting on DC optimal power flow"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  RunFlags run_flags, sweep_flags;
  auto* run_cmd = app.add_subcommand("run", "run shifting strategies over the hours");
  add_run_flags(run_cmd, run_flags);
  auto* sweep_cmd = app.add_subcommand("sweep", "alpha sweep with and without flexibility");
  add_run_flags(sweep_cmd, sweep_flags);

  int buses = 5, data_centers = 2, gen_hours = 24;
  std::uint64_t seed = 1;
  std::string gen_out = "case_out";
  auto* gen_cmd = app.add_subcommand("gen-case", "write a synthetic case and hourly series");
  gen_cmd->add_option("--buses", buses, "bus count (>= 2)");
  gen_cmd->add_option("--data-centers", data_centers, "data-center count (>= 1)");
  gen_cmd->add_option("--seed", seed, "random seed");
  gen_cmd->add_option("--hours", gen_hours, "hours in the series");
  gen_cmd->add_option("--out", gen_out, "output directory");

  std::string lint_case, lint_format = "native-json", lint_series;
  auto* lint_cmd = app.add_subcommand("validate", "check a case file");
  lint_cmd->add_option("--case", lint_case, "case path")->required();
  lint_cmd->add_option("--case-format", lint_format, "native-json or rts-gmlc-csv");
  lint_cmd->add_option("--timeseries", lint_series, "native hourly series to check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run_cmd) {
      const RunConfig c = build_config(run_flags);
      return report(run(c), c);
    }
    if (*sweep_cmd) {
      const RunConfig c = build_config(sweep_flags);
      return report(sweep(c), c);
    }
    if (*gen_cmd) {
      SyntheticCase sc;
      try {
        sc = gen_synthetic_case(buses, data_centers, seed, gen_hours);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      std::filesystem::create_directories(gen_out);
      save_network_json(sc.network, std::filesystem::path(gen_out) / "case.json");
      std::ofstream ts(std::filesystem::path(gen_out) / "timeseries.csv", std::ios::binary);
      write_timeseries_csv(ts, sc.hours);
      if (!ts) throw GridError("failed writing timeseries.csv");
      std::printf("wrote %s/case.json and %s/timeseries.csv\n", gen_out.c_str(), gen_out.c_str());
      return kOk;
    }
    if (*lint_cmd) {
      CaseFormat format;
      try {
        format = parse_case_format(lint_format);
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
      const Network net = load_network(lint_case, format);
      int dcs = static_cast<int>(net.data_center_indices().size());
      std::printf("ok: %d buses, %zu lines, %zu generators, %zu loads (%d data centers), %zu regions\n",
                  net.bus_count(), net.lines.size(), net.generators.size(), net.loads.size(), dcs,
                  net.regions.size());
      if (!lint_series.empty()) {
        const auto hours = load_timeseries_csv(lint_series);
        for (const auto& h : hours) (void)apply_scenario(net, h);
        std::printf("ok: %zu hours\n", hours.size());
      }
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const GridError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInput;
  }
  return kOk;
}
