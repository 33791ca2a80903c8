#include "dcshift/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace dcshift {

using nlohmann::ordered_json;

std::optional<std::pair<int, int>> parse_hour_range(const std::string& text) {
  if (text.empty() || text == "all") return std::nullopt;
  try {
    std::size_t pos = 0;
    const int first = std::stoi(text, &pos);
    if (pos == text.size()) return std::pair{first, first};
    if (text[pos] != '-') throw ConfigError("");
    std::size_t pos2 = 0;
    const std::string rest = text.substr(pos + 1);
    const int last = std::stoi(rest, &pos2);
    if (pos2 != rest.size()) throw ConfigError("");
    return std::pair{first, last};
  } catch (const std::exception&) {
    throw ConfigError("bad hour range '" + text + "' (expected all, N or A-B)");
  }
}

void validate(const RunConfig& c) {
  if (c.case_path.empty()) throw ConfigError("no case given");
  if (c.strategies.empty()) throw ConfigError("no strategies given");
  if (!(c.epsilon >= 0.0 && c.epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
  if (!(c.dc_load_mw >= 0.0)) throw ConfigError("dc-load must be non-negative");
  if (!(c.p_max_scale > 0.0)) throw ConfigError("pmax-scale must be positive");
  if (!(c.shift_cost >= 0.0)) throw ConfigError("shift-cost must be non-negative");
  if (!(c.pair_limit >= 0.0)) throw ConfigError("pair-limit must be non-negative");
  if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  for (double a : c.alphas)
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("alphas must lie in [0, 1]");
  if (c.hours && c.hours->first > c.hours->second) throw ConfigError("empty hour range");
  if (c.threads < 0) throw ConfigError("threads must be non-negative");
}

namespace {

std::string format_name(CaseFormat f) {
  return f == CaseFormat::native_json ? "native-json" : "rts-gmlc-csv";
}

std::string series_name(SeriesResolution r) {
  return r == SeriesResolution::real_time ? "real-time" : "day-ahead";
}

SeriesResolution parse_series(const std::string& s) {
  if (s == "real-time") return SeriesResolution::real_time;
  if (s == "day-ahead") return SeriesResolution::day_ahead;
  throw ConfigError("unknown rts series '" + s + "' (real-time or day-ahead)");
}

ordered_json result_fields(const RunConfig& c) {
  ordered_json j;
  j["case"] = c.case_path.generic_string();
  j["case_format"] = format_name(c.case_format);
  j["timeseries"] = c.timeseries_path.generic_string();
  j["rts_series"] = series_name(c.rts_series);
  j["hours"] = c.hours ? std::to_string(c.hours->first) + "-" + std::to_string(c.hours->second)
                       : std::string("all");
  auto strategies = ordered_json::array();
  for (Strategy s : c.strategies) strategies.push_back(to_string(s));
  j["strategies"] = strategies;
  j["epsilon"] = c.epsilon;
  j["dc_buses"] = c.dc_buses;
  j["dc_load"] = c.dc_load_mw;
  j["pmax_scale"] = c.p_max_scale;
  j["shift_cost"] = c.shift_cost;
  j["pair_limit"] = std::isfinite(c.pair_limit) ? ordered_json(c.pair_limit) : ordered_json("inf");
  j["alpha"] = c.alpha;
  j["alphas"] = c.alphas;
  j["previous_hour_metric"] = c.previous_hour_metric;
  return j;
}

std::filesystem::path out_file(const RunConfig& c, const char* name) { return c.out_dir / name; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw GridError("cannot write " + path.string());
  out << text;
  if (!out) throw GridError("failed writing " + path.string());
}

double parse_limit(const ordered_json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    throw ConfigError("pair_limit must be a number or \"inf\"");
  }
  return v.get<double>();
}

std::vector<Strategy> parse_strategies(const ordered_json& v) {
  std::vector<Strategy> out;
  for (const auto& s : v) out.push_back(parse_strategy(s.get<std::string>()));
  return out;
}

}  // namespace

RunConfig parse_run_config_json(const std::string& text, RunConfig c) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "case") c.case_path = v.get<std::string>();
      else if (key == "case_format") c.case_format = parse_case_format(v.get<std::string>());
      else if (key == "timeseries") c.timeseries_path = v.get<std::string>();
      else if (key == "rts_series") c.rts_series = parse_series(v.get<std::string>());
      else if (key == "hours") c.hours = parse_hour_range(v.get<std::string>());
      else if (key == "strategies") c.strategies = parse_strategies(v);
      else if (key == "epsilon") c.epsilon = v.get<double>();
      else if (key == "dc_buses") c.dc_buses = v.get<std::vector<int>>();
      else if (key == "dc_load") c.dc_load_mw = v.get<double>();
      else if (key == "pmax_scale") c.p_max_scale = v.get<double>();
      else if (key == "shift_cost") c.shift_cost = v.get<double>();
      else if (key == "pair_limit") c.pair_limit = parse_limit(v);
      else if (key == "alpha") c.alpha = v.get<double>();
      else if (key == "alphas") c.alphas = v.get<std::vector<double>>();
      else if (key == "out") c.out_dir = v.get<std::string>();
      else if (key == "threads") c.threads = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "previous_hour_metric") c.previous_hour_metric = v.get<bool>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

std::string run_config_to_json(const RunConfig& c) {
  ordered_json j = result_fields(c);
  j["out"] = c.out_dir.generic_string();
  j["threads"] = c.threads;
  j["seed"] = c.seed;
  return j.dump(2);
}

std::string config_hash(const RunConfig& c) {
  const std::string text = result_fields(c).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool RunManifest::all_hours_failed() const {
  if (totals.empty()) return false;
  for (const auto& [s, t] : totals)
    if (t.hours_attempted > t.hours_failed) return false;
  return true;
}

std::string manifest_to_json(const RunManifest& m) {
  ordered_json j;
  j["tool"] = "dcshift";
  j["version"] = m.version;
  j["config_hash"] = m.config_hash;
  j["hours"] = m.hours;
  auto totals = ordered_json::object();
  for (const auto& [s, t] : m.totals)
    totals[to_string(s)] = {{"hours_attempted", t.hours_attempted},
                            {"hours_failed", t.hours_failed},
                            {"co2_t", t.co2},
                            {"cost_usd", t.cost},
                            {"curtailment_mwh", t.curtailment}};
  j["totals"] = totals;
  auto status = ordered_json::object();
  for (const auto& [s, v] : m.hour_status) status[to_string(s)] = v;
  j["hour_status"] = status;
  j["pareto_written"] = m.pareto_written;
  j["wall_clock_seconds"] = m.wall_clock_seconds;
  return j.dump(2);
}

LoadedInputs load_inputs(const RunConfig& c) {
  LoadedInputs in;
  Network raw = load_network(c.case_path, c.case_format);
  in.network = c.dc_buses.empty()
                   ? raw
                   : prepare_shifting_case(raw, {c.dc_buses, c.dc_load_mw, c.p_max_scale});
  validate(in.network);

  if (c.case_format == CaseFormat::rts_gmlc_csv) {
    const auto dir = c.timeseries_path.empty() ? c.case_path : c.timeseries_path;
    in.scenarios = load_rts_gmlc_timeseries(in.network, dir, c.rts_series);
  } else if (!c.timeseries_path.empty()) {
    in.scenarios = load_timeseries_csv(c.timeseries_path);
  } else {
    in.scenarios = {HourlyScenario{}};
  }
  if (c.hours) {
    std::vector<HourlyScenario> kept;
    for (auto& s : in.scenarios)
      if (s.hour_index >= c.hours->first && s.hour_index <= c.hours->second)
        kept.push_back(std::move(s));
    const int wanted = c.hours->second - c.hours->first + 1;
    if (static_cast<int>(kept.size()) != wanted)
      throw ConfigError("hours " + std::to_string(c.hours->first) + "-" +
                        std::to_string(c.hours->second) + " outside the timeseries span");
    in.scenarios = std::move(kept);
  }
  if (in.scenarios.empty()) throw GridError("timeseries holds no hours");
  return in;
}

FlexibilityConfig flexibility_of(const Network& network, const RunConfig& c) {
  return uniform_flexibility(network, c.epsilon, c.shift_cost, c.pair_limit);
}

std::vector<SummaryRow> summary_rows(const BatchResult& result) {
  std::vector<SummaryRow> rows;
  const auto& base = result.of(Strategy::none);
  for (Strategy s : {Strategy::none, Strategy::flex, Strategy::co2_marginal, Strategy::lmp,
                     Strategy::average, Strategy::excess}) {
    auto it = result.records.find(s);
    if (it == result.records.end()) continue;
    SummaryRow row;
    row.label = table_label(s);
    row.is_baseline = s == Strategy::none;
    row.flexible_clearing = s == Strategy::flex;
    try {
      row.report = evaluate(base, it->second);
    } catch (const EvaluationError&) {
      // Every hour failed for this strategy; the row keeps zero hours.
    }
    if (row.flexible_clearing) {
      row.report.predicted_delta_co2 = row.report.delta_co2;
      row.report.predicted_delta_cost = row.report.delta_cost;
      row.report.predicted_delta_curtailment = row.report.delta_curtailment;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

void prepare_out_dir(const RunConfig& c) {
  std::error_code ec;
  std::filesystem::create_directories(c.out_dir, ec);
  if (ec) throw GridError("cannot create output directory " + c.out_dir.string());
}

void write_pareto(const RunConfig& c, const LoadedInputs& in, RunManifest& m) {
  const auto flex = flexibility_of(in.network, c);
  const auto rows = pareto_batch(in.network, in.scenarios, flex, c.alphas, c.threads);
  write_text(out_file(c, "pareto.csv"), pareto_csv(rows));
  m.pareto_written = true;
  if (!m.totals.empty()) return;
  for (const auto& row : rows) {
    auto& t = m.totals[row.flexible ? Strategy::flex : Strategy::none];
    t.hours_attempted += row.hours_ok + row.hours_failed;
    t.hours_failed += row.hours_failed;
  }
}

}  // namespace

RunManifest run(const RunConfig& c) {
  validate(c);
  const auto start = std::chrono::steady_clock::now();
  const LoadedInputs in = load_inputs(c);
  prepare_out_dir(c);

  BatchConfig bc;
  bc.strategies = c.strategies;
  bc.objective = ObjectiveSpec{c.alpha};
  bc.flexibility = flexibility_of(in.network, c);
  bc.previous_hour_metric = c.previous_hour_metric;
  bc.threads = c.threads;
  for (Strategy s : c.strategies)
    if (s != Strategy::none && data_centers_of(in.network).empty())
      throw ConfigError("strategy " + to_string(s) + " needs data-center loads (set dc-buses)");
  const BatchResult result = run_batch_parallel(in.network, in.scenarios, bc);

  RunManifest m;
  m.config_hash = config_hash(c);
  m.hours = result.hours;
  for (const auto& [s, column] : result.records) {
    auto& t = m.totals[s];
    auto& status = m.hour_status[s];
    for (const auto& rec : column) {
      ++t.hours_attempted;
      status.push_back(rec.status);
      if (!rec.ok) {
        ++t.hours_failed;
        continue;
      }
      t.co2 += rec.co2;
      t.cost += rec.cost;
      t.curtailment += rec.curtailment;
    }
  }

  const auto rows = summary_rows(result);
  write_text(out_file(c, "summary.csv"), summary_csv(rows));
  write_text(out_file(c, "predicted.csv"), predicted_csv(rows));
  write_text(out_file(c, "hours.csv"), hours_csv(result));
  if (!c.alphas.empty()) write_pareto(c, in, m);

  m.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_text(out_file(c, "manifest.json"), manifest_to_json(m));
  return m;
}

RunManifest sweep(const RunConfig& config) {
  RunConfig c = config;
  if (c.alphas.empty())
    for (int k = 0; k <= 10; ++k) c.alphas.push_back(k / 10.0);
  validate(c);
  const auto start = std::chrono::steady_clock::now();
  const LoadedInputs in = load_inputs(c);
  prepare_out_dir(c);
  RunManifest m;
  m.config_hash = config_hash(c);
  for (const auto& s : in.scenarios) m.hours.push_back(s.hour_index);
  std::sort(m.hours.begin(), m.hours.end());
  write_pareto(c, in, m);
  m.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_text(out_file(c, "manifest.json"), manifest_to_json(m));
  return m;
}

}  // namespace dcshift
