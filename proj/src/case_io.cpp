#include "dcshift/case_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace dcshift {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParseError(what + ": '" + text + "' is not a number");
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used != text.size()) throw ParseError(what + ": '" + text + "' is not a number");
  return value;
}

int parse_int(const std::string& text, const std::string& what) {
  const double value = parse_double(text, what);
  if (value != std::floor(value)) throw ParseError(what + ": '" + text + "' is not an integer");
  return static_cast<int>(value);
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : it->template get<T>();
}

}  // namespace

CaseFormat parse_case_format(std::string_view text) {
  if (text == "native-json") return CaseFormat::native_json;
  if (text == "rts-gmlc-csv" || text == "rts-gmlc") return CaseFormat::rts_gmlc_csv;
  throw ParseError("unknown case format '" + std::string(text) + "'");
}

// --- CSV --------------------------------------------------------------------

int CsvTable::column(std::string_view name) const {
  for (int i = 0; i < static_cast<int>(header.size()); ++i)
    if (header[i] == name) return i;
  return -1;
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          field += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(trim(field));
        field.clear();
      } else {
        field += c;
      }
    }
    fields.push_back(trim(field));
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != table.header.size())
        throw ParseError("csv row " + std::to_string(table.rows.size() + 2) + " has " +
                         std::to_string(fields.size()) + " fields, header has " +
                         std::to_string(table.header.size()));
      table.rows.push_back(std::move(fields));
    }
  }
  if (first) throw ParseError("csv input is empty");
  return table;
}

CsvTable read_csv_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return read_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path.filename().string() + ": " + e.what());
  }
}

// --- native JSON ------------------------------------------------------------

Network parse_network_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed case json: ") + e.what());
  }

  Network net;
  std::string record = "document";
  try {
    net.base_mva = get_or(doc, "base_mva", 100.0);

    std::map<FuelClass, double> carbon_defaults;
    if (auto it = doc.find("carbon_intensity_defaults"); it != doc.end())
      for (const auto& [fuel, value] : it->items())
        carbon_defaults[parse_fuel_class(fuel)] = value.get<double>();

    for (const auto& b : doc.at("buses")) {
      record = "bus " + b.dump();
      Bus bus;
      bus.id = b.at("id").get<int>();
      bus.name = get_or<std::string>(b, "name", "");
      bus.region = get_or<std::string>(b, "region", "R1");
      bus.is_reference = get_or(b, "is_reference", false);
      net.buses.push_back(std::move(bus));
    }
    std::sort(net.buses.begin(), net.buses.end(),
              [](const Bus& a, const Bus& b) { return a.id < b.id; });

    for (const auto& l : doc.at("lines")) {
      record = "line " + l.dump();
      Line line;
      line.name = get_or<std::string>(l, "name", "");
      line.from_bus = l.at("from").get<int>();
      line.to_bus = l.at("to").get<int>();
      line.susceptance = l.at("susceptance").get<double>();
      line.flow_limit = l.at("flow_limit").get<double>();
      if (line.name.empty()) line.name = std::to_string(net.lines.size() + 1);
      net.lines.push_back(std::move(line));
    }

    for (const auto& g : doc.at("generators")) {
      record = "generator " + g.dump();
      Generator gen;
      gen.id = g.at("id").get<int>();
      gen.name = get_or<std::string>(g, "name", "");
      gen.bus = g.at("bus").get<int>();
      gen.fuel = parse_fuel_class(get_or<std::string>(g, "fuel", "other"));
      gen.cost = g.at("cost").get<double>();
      if (auto it = g.find("carbon_intensity"); it != g.end()) {
        gen.carbon_intensity = it->get<double>();
      } else if (auto d = carbon_defaults.find(gen.fuel); d != carbon_defaults.end()) {
        gen.carbon_intensity = d->second;
      } else {
        gen.carbon_intensity = default_carbon_intensity(gen.fuel);
      }
      gen.p_min = get_or(g, "p_min", 0.0);
      gen.p_max = g.at("p_max").get<double>();
      gen.p_max_nameplate = get_or(g, "p_max_nameplate", gen.p_max);
      gen.is_low_carbon = get_or(g, "is_low_carbon", is_low_carbon_fuel(gen.fuel));
      gen.is_curtailable_renewable =
          get_or(g, "is_curtailable_renewable", is_curtailable_fuel(gen.fuel));
      net.generators.push_back(std::move(gen));
    }

    for (const auto& d : doc.at("loads")) {
      record = "load " + d.dump();
      LoadPoint load;
      load.id = d.at("id").get<int>();
      load.name = get_or<std::string>(d, "name", "");
      load.bus = d.at("bus").get<int>();
      load.demand = d.at("demand").get<double>();
      load.is_data_center = get_or(d, "is_data_center", false);
      net.loads.push_back(std::move(load));
    }

    if (auto it = doc.find("regions"); it != doc.end()) {
      record = "regions";
      for (const auto& [label, members] : it->items()) {
        auto ids = members.get<std::vector<int>>();
        std::sort(ids.begin(), ids.end());
        net.regions[label] = std::move(ids);
      }
    } else {
      rebuild_regions(net);
    }
  } catch (const json::exception& e) {
    throw ParseError("malformed " + record + ": " + e.what());
  }

  validate(net);
  return net;
}

std::string serialize_network_json(const Network& net) {
  json doc;
  doc["base_mva"] = net.base_mva;
  json buses = json::array();
  for (const auto& bus : net.buses)
    buses.push_back({{"id", bus.id},
                     {"name", bus.name},
                     {"region", bus.region},
                     {"is_reference", bus.is_reference}});
  doc["buses"] = std::move(buses);
  json lines = json::array();
  for (const auto& line : net.lines)
    lines.push_back({{"name", line.name},
                     {"from", line.from_bus},
                     {"to", line.to_bus},
                     {"susceptance", line.susceptance},
                     {"flow_limit", line.flow_limit}});
  doc["lines"] = std::move(lines);
  json gens = json::array();
  for (const auto& gen : net.generators)
    gens.push_back({{"id", gen.id},
                    {"name", gen.name},
                    {"bus", gen.bus},
                    {"fuel", std::string(to_string(gen.fuel))},
                    {"cost", gen.cost},
                    {"carbon_intensity", gen.carbon_intensity},
                    {"p_min", gen.p_min},
                    {"p_max", gen.p_max},
                    {"p_max_nameplate", gen.p_max_nameplate},
                    {"is_low_carbon", gen.is_low_carbon},
                    {"is_curtailable_renewable", gen.is_curtailable_renewable}});
  doc["generators"] = std::move(gens);
  json loads = json::array();
  for (const auto& load : net.loads)
    loads.push_back({{"id", load.id},
                     {"name", load.name},
                     {"bus", load.bus},
                     {"demand", load.demand},
                     {"is_data_center", load.is_data_center}});
  doc["loads"] = std::move(loads);
  json regions = json::object();
  for (const auto& [label, members] : net.regions) regions[label] = members;
  doc["regions"] = std::move(regions);
  return doc.dump(2) + "\n";
}

void save_network_json(const Network& network, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string());
  out << serialize_network_json(network);
}

// --- native timeseries --------------------------------------------------------

std::vector<HourlyScenario> parse_timeseries_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  if (table.header.empty() || table.header[0] != "hour")
    throw ParseError("timeseries csv must start with an 'hour' column");

  struct Column {
    bool is_load;
    int id;
  };
  std::vector<Column> columns;
  for (std::size_t c = 1; c < table.header.size(); ++c) {
    const std::string& name = table.header[c];
    const auto colon = name.find(':');
    if (colon == std::string::npos) throw ParseError("timeseries column '" + name + "' lacks a kind");
    const std::string kind = name.substr(0, colon);
    if (kind != "load" && kind != "avail")
      throw ParseError("timeseries column '" + name + "' has unknown kind");
    columns.push_back({kind == "load", parse_int(name.substr(colon + 1), "column " + name)});
  }

  std::vector<HourlyScenario> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    HourlyScenario hour;
    hour.hour_index = parse_int(row[0], "hour");
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (row[c + 1].empty()) continue;
      const double value = parse_double(row[c + 1], table.header[c + 1]);
      (columns[c].is_load ? hour.load_overrides : hour.renewable_availability)[columns[c].id] =
          value;
    }
    out.push_back(std::move(hour));
  }
  return out;
}

std::vector<HourlyScenario> load_timeseries_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return parse_timeseries_csv(in);
}

void write_timeseries_csv(std::ostream& out, const std::vector<HourlyScenario>& hours) {
  std::set<int> load_ids, gen_ids;
  for (const auto& h : hours) {
    for (const auto& [id, mw] : h.load_overrides) load_ids.insert(id);
    for (const auto& [id, mw] : h.renewable_availability) gen_ids.insert(id);
  }
  out << "hour";
  for (int id : load_ids) out << ",load:" << id;
  for (int id : gen_ids) out << ",avail:" << id;
  out << "\n";
  char buf[64];
  auto put = [&](const std::map<int, double>& values, int id) {
    out << ',';
    if (auto it = values.find(id); it != values.end()) {
      std::snprintf(buf, sizeof buf, "%.17g", it->second);
      out << buf;
    }
  };
  for (const auto& h : hours) {
    out << h.hour_index;
    for (int id : load_ids) put(h.load_overrides, id);
    for (int id : gen_ids) put(h.renewable_availability, id);
    out << "\n";
  }
}

// --- RTS-GMLC -------------------------------------------------------------------

namespace {

fs::path rts_source_dir(const fs::path& path) {
  if (fs::exists(path / "bus.csv")) return path;
  if (fs::exists(path / "SourceData" / "bus.csv")) return path / "SourceData";
  throw ParseError("no RTS-GMLC SourceData (bus.csv) under " + path.string());
}

FuelClass rts_fuel(const std::string& fuel, const std::string& unit_type) {
  std::string f = fuel;
  std::transform(f.begin(), f.end(), f.begin(), [](unsigned char c) { return std::tolower(c); });
  std::string u = unit_type;
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return std::toupper(c); });
  if (f == "coal") return FuelClass::coal;
  if (f == "ng" || f == "gas" || f == "natural gas") return FuelClass::gas;
  if (f == "oil") return FuelClass::oil;
  if (f == "nuclear" || u == "NUCLEAR") return FuelClass::nuclear;
  if (f == "hydro" || u == "HYDRO" || u == "ROR") return FuelClass::hydro;
  if (f == "wind" || u == "WIND") return FuelClass::wind;
  if (f == "solar" || u == "PV" || u == "RTPV" || u == "CSP") return FuelClass::solar;
  if (f == "storage" || u == "STORAGE") return FuelClass::storage;
  return FuelClass::other;
}

constexpr double kLbPerTonne = 2204.62262;

struct RtsColumns {
  const CsvTable& t;
  std::string field(const std::vector<std::string>& row, std::string_view name) const {
    const int c = t.column(name);
    if (c < 0) throw ParseError("missing column '" + std::string(name) + "'");
    return row[c];
  }
  double number(const std::vector<std::string>& row, std::string_view name,
                double fallback) const {
    const int c = t.column(name);
    if (c < 0 || row[c].empty()) return fallback;
    return parse_double(row[c], std::string(name));
  }
};

}  // namespace

namespace detail {

Network load_rts_gmlc(const fs::path& path) {
  const fs::path src = rts_source_dir(path);
  const CsvTable bus_csv = read_csv_file(src / "bus.csv");
  const CsvTable branch_csv = read_csv_file(src / "branch.csv");
  const CsvTable gen_csv = read_csv_file(src / "gen.csv");

  Network net;
  RtsColumns bc{bus_csv};
  std::vector<std::pair<int, const std::vector<std::string>*>> raw;
  for (const auto& row : bus_csv.rows) raw.emplace_back(parse_int(bc.field(row, "Bus ID"), "Bus ID"), &row);
  std::sort(raw.begin(), raw.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::map<int, int> internal;  // RTS bus id -> 1..N
  for (const auto& [rts_id, row] : raw) {
    if (!internal.emplace(rts_id, static_cast<int>(internal.size()) + 1).second)
      throw ValidationError("duplicate RTS bus " + std::to_string(rts_id));
    Bus bus;
    bus.id = internal.at(rts_id);
    bus.name = std::to_string(rts_id);
    bus.region = bc.field(*row, "Area");
    const int type_col = bus_csv.column("Bus Type");
    bus.is_reference = type_col >= 0 && ((*row)[type_col] == "Ref" || (*row)[type_col] == "3");
    net.buses.push_back(bus);
    const double mw = bc.number(*row, "MW Load", 0.0);
    if (mw > 0.0) {
      LoadPoint load;
      load.id = static_cast<int>(net.loads.size()) + 1;
      load.name = "load@" + bus.name;
      load.bus = bus.id;
      load.demand = mw;
      net.loads.push_back(std::move(load));
    }
  }
  if (!net.buses.empty() &&
      std::none_of(net.buses.begin(), net.buses.end(), [](const Bus& b) { return b.is_reference; }))
    net.buses.front().is_reference = true;

  auto map_bus = [&](const std::string& text, const std::string& what) {
    const int rts_id = parse_int(text, what);
    auto it = internal.find(rts_id);
    if (it == internal.end())
      throw ValidationError(what + " references unknown bus " + std::to_string(rts_id));
    return it->second;
  };

  RtsColumns lc{branch_csv};
  for (const auto& row : branch_csv.rows) {
    Line line;
    line.name = lc.field(row, "UID");
    const std::string what = "line '" + line.name + "'";
    line.from_bus = map_bus(lc.field(row, "From Bus"), what);
    line.to_bus = map_bus(lc.field(row, "To Bus"), what);
    const double x = lc.number(row, "X", 0.0);
    if (!(x > 0.0)) throw ValidationError(what + " has non-positive reactance");
    line.susceptance = 1.0 / x;
    line.flow_limit = lc.number(row, "Cont Rating", 0.0);
    net.lines.push_back(std::move(line));
  }

  RtsColumns gc{gen_csv};
  for (const auto& row : gen_csv.rows) {
    Generator gen;
    gen.id = static_cast<int>(net.generators.size()) + 1;
    gen.name = gc.field(row, "GEN UID");
    gen.bus = map_bus(gc.field(row, "Bus ID"), "generator '" + gen.name + "'");
    const int unit_col = gen_csv.column("Unit Type");
    gen.fuel = rts_fuel(gc.field(row, "Fuel"), unit_col >= 0 ? row[unit_col] : "");
    gen.p_max = std::max(0.0, gc.number(row, "PMax MW", 0.0));
    gen.p_min = std::clamp(gc.number(row, "PMin MW", 0.0), 0.0, gen.p_max);
    gen.p_max_nameplate = gen.p_max;
    gen.is_low_carbon = is_low_carbon_fuel(gen.fuel);
    gen.is_curtailable_renewable = is_curtailable_fuel(gen.fuel);

    // Average incremental heat rate over the cost-curve segments, BTU/kWh.
    double heat_rate = gc.number(row, "HR_avg_0", 0.0);
    const double pct0 = gc.number(row, "Output_pct_0", 0.0);
    double weighted = 0.0, span = 0.0, prev = pct0;
    for (int k = 1; k <= 3; ++k) {
      const std::string pk = "Output_pct_" + std::to_string(k);
      const std::string hk = "HR_incr_" + std::to_string(k);
      const double pct = gc.number(row, pk, prev);
      const double incr = gc.number(row, hk, 0.0);
      if (pct > prev && incr > 0.0) {
        weighted += incr * (pct - prev);
        span += pct - prev;
      }
      prev = std::max(prev, pct);
    }
    if (span > 0.0) heat_rate = weighted / span;
    const double mmbtu_per_mwh = heat_rate / 1000.0;
    const double fuel_price = gc.number(row, "Fuel Price $/MMBTU", 0.0);
    gen.cost = std::max(0.0, fuel_price * mmbtu_per_mwh + gc.number(row, "VOM", 0.0));
    const double co2_rate = gc.number(row, "Emissions CO2 Lbs/MMBTU", -1.0);
    if (co2_rate >= 0.0 && mmbtu_per_mwh > 0.0) {
      gen.carbon_intensity = co2_rate * mmbtu_per_mwh / kLbPerTonne;
    } else {
      gen.carbon_intensity = default_carbon_intensity(gen.fuel);
    }
    if (gen.is_low_carbon) gen.carbon_intensity = 0.0;
    net.generators.push_back(std::move(gen));
  }

  rebuild_regions(net);
  validate(net);
  return net;
}

}  // namespace detail

Network load_network(const fs::path& path, CaseFormat format) {
  if (format == CaseFormat::rts_gmlc_csv) return detail::load_rts_gmlc(path);
  return parse_network_json(read_file(path));
}

std::vector<HourlyScenario> load_rts_gmlc_timeseries(const Network& network, const fs::path& rts_dir,
                                                     SeriesResolution resolution) {
  fs::path ts = rts_dir / "timeseries_data_files";
  if (!fs::exists(ts)) ts = rts_dir.parent_path() / "timeseries_data_files";
  if (!fs::exists(ts)) ts = rts_dir;
  const std::string prefix = resolution == SeriesResolution::real_time ? "REAL_TIME_" : "DAY_AHEAD_";
  const int periods_per_hour = resolution == SeriesResolution::real_time ? 12 : 1;

  std::map<std::string, int> gen_by_name;
  for (const auto& gen : network.generators) gen_by_name.emplace(gen.name, gen.id);

  // Per region: buses' base load share.
  std::map<std::string, double> region_base;
  for (const auto& load : network.loads)
    if (!load.is_data_center) region_base[network.buses[load.bus - 1].region] += load.demand;

  // hour -> (key -> (sum, count))
  std::map<int, std::map<std::string, std::pair<double, int>>> region_load;
  std::map<int, std::map<int, std::pair<double, int>>> availability;

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(ts))
    if (entry.is_regular_file() && entry.path().extension() == ".csv" &&
        entry.path().filename().string().rfind(prefix, 0) == 0)
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ParseError("no " + prefix + "*.csv series under " + ts.string());

  for (const auto& file : files) {
    const CsvTable t = read_csv_file(file);
    const int cy = t.column("Year"), cm = t.column("Month"), cd = t.column("Day"),
              cp = t.column("Period");
    if (cy < 0 || cm < 0 || cd < 0 || cp < 0)
      throw ParseError(file.filename().string() + ": missing Year/Month/Day/Period columns");
    const bool is_load = file.parent_path().filename() == "Load" ||
                         file.filename().string().find("Load") != std::string::npos;
    std::map<std::tuple<int, int, int>, int> day_index;
    for (const auto& row : t.rows) {
      const auto key = std::make_tuple(parse_int(row[cy], "Year"), parse_int(row[cm], "Month"),
                                       parse_int(row[cd], "Day"));
      day_index.emplace(key, 0);
    }
    int next = 0;
    for (auto& [key, idx] : day_index) idx = next++;
    for (const auto& row : t.rows) {
      const auto key = std::make_tuple(parse_int(row[cy], "Year"), parse_int(row[cm], "Month"),
                                       parse_int(row[cd], "Day"));
      const int period = parse_int(row[cp], "Period");
      const int hour = day_index.at(key) * 24 + (period - 1) / periods_per_hour;
      for (int c = 0; c < static_cast<int>(t.header.size()); ++c) {
        if (c == cy || c == cm || c == cd || c == cp || row[c].empty()) continue;
        const double value = parse_double(row[c], file.filename().string());
        if (is_load) {
          auto& acc = region_load[hour][t.header[c]];
          acc.first += value;
          acc.second += 1;
        } else if (auto it = gen_by_name.find(t.header[c]); it != gen_by_name.end()) {
          auto& acc = availability[hour][it->second];
          acc.first += value;
          acc.second += 1;
        }
      }
    }
  }

  std::set<int> hours;
  for (const auto& [h, v] : region_load) hours.insert(h);
  for (const auto& [h, v] : availability) hours.insert(h);

  std::vector<HourlyScenario> out;
  for (int h : hours) {
    HourlyScenario scen;
    scen.hour_index = h;
    if (auto it = region_load.find(h); it != region_load.end()) {
      for (const auto& load : network.loads) {
        if (load.is_data_center) continue;
        const std::string& region = network.buses[load.bus - 1].region;
        auto r = it->second.find(region);
        if (r == it->second.end() || region_base[region] <= 0.0) continue;
        const double regional = r->second.first / r->second.second;
        scen.load_overrides[load.id] = load.demand / region_base[region] * regional;
      }
    }
    if (auto it = availability.find(h); it != availability.end()) {
      for (const auto& [id, acc] : it->second) {
        const auto& gen = network.generators[network.generator_index(id)];
        scen.renewable_availability[id] =
            std::clamp(acc.first / acc.second, 0.0, gen.p_max_nameplate);
      }
    }
    out.push_back(std::move(scen));
  }
  return out;
}

}  // namespace dcshift
