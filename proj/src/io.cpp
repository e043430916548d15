#include "phev/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "phev/errors.hpp"

namespace phev {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

class CsvReader {
 public:
  CsvReader(std::istream& in, std::vector<std::string> expected_header)
      : in_(in), columns_(expected_header.size()) {
    std::string line;
    if (!next_nonempty(line)) throw InvalidInput("line 1: missing CSV header");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (split_csv(line) != expected_header) {
      std::string want;
      for (const auto& h : expected_header) want += (want.empty() ? "" : ",") + h;
      throw InvalidInput(where() + "expected header '" + want + "'");
    }
  }

  // False at end of input.
  bool next(std::vector<std::string>& fields) {
    std::string line;
    if (!next_nonempty(line)) return false;
    fields = split_csv(line);
    if (fields.size() != columns_) {
      throw InvalidInput(where() + "expected " + std::to_string(columns_) + " fields, got " +
                         std::to_string(fields.size()));
    }
    return true;
  }

  std::string where() const { return "line " + std::to_string(line_no_) + ": "; }

  double number(const std::string& field, const char* name) const {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
      throw InvalidInput(where() + "bad " + name + " '" + field + "'");
    }
    return value;
  }

  int integer(const std::string& field, const char* name) const {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      throw InvalidInput(where() + "bad " + name + " '" + field + "'");
    }
    return value;
  }

 private:
  bool next_nonempty(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!trim(line).empty()) return true;
    }
    return false;
  }

  std::istream& in_;
  std::size_t columns_;
  std::size_t line_no_ = 0;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  return in;
}

std::string with_file(const std::string& path, const std::exception& e) {
  return path + ": " + e.what();
}

}  // namespace

NetworkGraph read_links_csv(std::istream& in) {
  CsvReader reader(in, {"from", "to", "length_mi", "avg_speed_mph", "mode"});
  std::vector<Link> links;
  std::map<std::pair<NodeId, NodeId>, bool> seen;
  std::vector<std::string> f;
  while (reader.next(f)) {
    Link link;
    link.from = reader.integer(f[0], "from");
    link.to = reader.integer(f[1], "to");
    link.length_mi = reader.number(f[2], "length_mi");
    link.avg_speed_mph = reader.number(f[3], "avg_speed_mph");
    const auto mode = parse_traffic_mode(f[4]);
    if (!mode) throw InvalidInput(reader.where() + "bad mode '" + f[4] + "'");
    link.mode = *mode;
    try {
      NetworkGraph(std::vector<Link>{link});
    } catch (const InvalidInput& e) {
      throw InvalidInput(reader.where() + e.what());
    }
    if (!seen.emplace(std::pair{link.from, link.to}, true).second) {
      throw InvalidInput(reader.where() + "parallel link " + f[0] + "->" + f[1]);
    }
    links.push_back(link);
  }
  return NetworkGraph(std::move(links));
}

NetworkGraph read_links_csv_file(const std::string& path) {
  auto in = open_input(path);
  try {
    return read_links_csv(in);
  } catch (const InvalidInput& e) {
    throw InvalidInput(with_file(path, e));
  }
}

void write_links_csv(std::ostream& out, const NetworkGraph& g) {
  out << "from,to,length_mi,avg_speed_mph,mode\n";
  char buf[64];
  auto num = [&](double v) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  };
  for (const Link& l : g.links()) {
    out << l.from << ',' << l.to << ',' << num(l.length_mi) << ',' << num(l.avg_speed_mph) << ','
        << to_string(l.mode) << '\n';
  }
}

std::vector<SegmentRecord> read_segments_csv(std::istream& in) {
  CsvReader reader(in, {"link_from", "link_to", "seq", "length_mi", "avg_speed_mph"});
  std::vector<SegmentRecord> segments;
  std::vector<std::string> f;
  while (reader.next(f)) {
    SegmentRecord s;
    s.link_from = reader.integer(f[0], "link_from");
    s.link_to = reader.integer(f[1], "link_to");
    s.seq = reader.integer(f[2], "seq");
    s.length_mi = reader.number(f[3], "length_mi");
    s.avg_speed_mph = reader.number(f[4], "avg_speed_mph");
    if (s.link_from <= 0 || s.link_to <= 0 || s.link_from == s.link_to) {
      throw InvalidInput(reader.where() + "bad link endpoints");
    }
    if (s.seq < 0) throw InvalidInput(reader.where() + "seq must be non-negative");
    if (!(s.length_mi > 0.0)) throw InvalidInput(reader.where() + "length_mi must be positive");
    if (!(s.avg_speed_mph > 0.0)) {
      throw InvalidInput(reader.where() + "avg_speed_mph must be positive");
    }
    segments.push_back(s);
  }
  return segments;
}

std::vector<SegmentRecord> read_segments_csv_file(const std::string& path) {
  auto in = open_input(path);
  try {
    return read_segments_csv(in);
  } catch (const InvalidInput& e) {
    throw InvalidInput(with_file(path, e));
  }
}

VehicleEnergyParams read_config(std::istream& in, VehicleEnergyParams params) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw InvalidInput(where + "expected key=value");
    const std::string key = trim(text.substr(0, eq));
    const std::string raw = trim(text.substr(eq + 1));
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc() || ptr != raw.data() + raw.size() || !std::isfinite(value)) {
      throw InvalidInput(where + "bad value for " + key);
    }

    if (key == "c_gas") {
      params.c_gas = value;
    } else if (key == "c_ele") {
      params.c_ele = value;
    } else if (key == "e_init") {
      params.e_init = value;
    } else if (key.rfind("mu_cd_", 0) == 0 || key.rfind("mu_cs_", 0) == 0) {
      const auto mode = parse_traffic_mode(key.substr(6));
      if (!mode) throw InvalidInput(where + "unknown key " + key);
      ConversionFactors f = params.table[*mode];
      (key[4] == 'd' ? f.mu_cd : f.mu_cs) = value;
      try {
        params.table.set(*mode, f);
      } catch (const InvalidInput& e) {
        throw InvalidInput(where + e.what());
      }
    } else {
      throw InvalidInput(where + "unknown key " + key);
    }
  }
  try {
    params.validate();
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
  return params;
}

VehicleEnergyParams read_config_file(const std::string& path, VehicleEnergyParams base) {
  auto in = open_input(path);
  try {
    return read_config(in, std::move(base));
  } catch (const InvalidInput& e) {
    throw InvalidInput(with_file(path, e));
  }
}

std::vector<OdRouteDistribution> read_routes_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("routes JSON: ") + e.what());
  }
  if (!doc.is_array()) throw InvalidInput("routes JSON: top level must be an array");
  std::vector<OdRouteDistribution> result;
  try {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const auto& entry = doc[i];
      OdRouteDistribution dist;
      dist.origin = entry.at("origin").get<NodeId>();
      dist.dest = entry.at("dest").get<NodeId>();
      const auto period = parse_period(entry.at("period").get<std::string>());
      if (!period) throw InvalidInput("routes JSON entry " + std::to_string(i) + ": bad period");
      dist.period = *period;
      double total = 0.0;
      for (const auto& route : entry.at("routes")) {
        WeightedRoute r;
        r.path.nodes = route.at("nodes").get<std::vector<NodeId>>();
        r.probability = route.at("prob").get<double>();
        total += r.probability;
        dist.routes.push_back(std::move(r));
      }
      if (std::abs(total - 100.0) <= 1e-6) {
        for (auto& r : dist.routes) r.probability /= 100.0;
      }
      result.push_back(std::move(dist));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("routes JSON: ") + e.what());
  }
  return result;
}

std::vector<OdRouteDistribution> read_routes_json_file(const std::string& path) {
  auto in = open_input(path);
  try {
    return read_routes_json(in);
  } catch (const InvalidInput& e) {
    throw InvalidInput(with_file(path, e));
  }
}

nlohmann::json to_json(const RouteSolution& s) {
  return {
      {"algorithm", std::string(to_string(s.algorithm))},
      {"path", s.path.nodes},
      {"y", s.y},
      {"energy_cost", s.energy_cost},
      {"travel_time", s.travel_time},
      {"cd_energy", s.cd_energy},
      {"battery_trajectory", s.battery_trajectory},
  };
}

nlohmann::json to_json(const PreprocessReport& r) {
  nlohmann::json assignments = nlohmann::json::array();
  for (const auto& a : r.assignments) {
    assignments.push_back({{"from", a.from},
                           {"to", a.to},
                           {"mode", std::string(to_string(a.mode))},
                           {"mean_mode_index", a.mean_mode_index}});
  }
  return {{"fictitious_nodes_added", r.fictitious_nodes_added},
          {"links_out", r.links_out},
          {"assignments", assignments}};
}

double saving_pct(double baseline, double value) {
  if (baseline == 0.0) return 0.0;
  return (baseline - value) / baseline * 100.0;
}

ComparisonDeltas compute_deltas(const OdComparison& c) {
  ComparisonDeltas d;
  d.crptc_vs_cdf = saving_pct(c.cdf.energy_cost, c.crptc.energy_cost);
  d.crptc_vs_mintime = saving_pct(c.mintime.energy_cost, c.crptc.energy_cost);
  if (c.actual) d.crptc_vs_actual = saving_pct(c.actual->expected_cost, c.crptc.energy_cost);
  if (c.mintime.travel_time != 0.0) {
    d.crptc_extra_time_vs_mintime =
        (c.crptc.travel_time - c.mintime.travel_time) / c.mintime.travel_time * 100.0;
  }
  return d;
}

OdComparison compare_od(const NetworkGraph& g, const VehicleEnergyParams& params, NodeId origin,
                        NodeId dest, const OdRouteDistribution* observed,
                        const RoutingOptions& options) {
  OdComparison c;
  c.origin = origin;
  c.dest = dest;
  c.mintime = shortest_time_path(g, params, origin, dest);
  c.cdf = cdf_route_hybrid_lp(g, params, origin, dest, options);
  c.crptc = crptc_route_milp(g, params, origin, dest, options);
  if (observed) {
    c.period = observed->period;
    c.actual = expected_actual_cost(*observed, g, params);
  }
  c.deltas = compute_deltas(c);
  return c;
}

nlohmann::json to_json(const ComparisonReport& report) {
  const auto& p = report.params;
  nlohmann::json mu = nlohmann::json::object();
  for (TrafficMode m : {TrafficMode::Low, TrafficMode::Medium, TrafficMode::High}) {
    mu[std::string(to_string(m))] = {{"mu_cd", p.table[m].mu_cd}, {"mu_cs", p.table[m].mu_cs}};
  }
  nlohmann::json pairs = nlohmann::json::array();
  for (const OdComparison& c : report.pairs) {
    nlohmann::json entry = {
        {"origin", c.origin},
        {"dest", c.dest},
        {"algorithms",
         {{"mintime", to_json(c.mintime)}, {"cdf", to_json(c.cdf)}, {"crptc", to_json(c.crptc)}}},
    };
    nlohmann::json deltas = {
        {"crptc_vs_cdf_pct", c.deltas.crptc_vs_cdf},
        {"crptc_vs_mintime_pct", c.deltas.crptc_vs_mintime},
        {"crptc_extra_time_vs_mintime_pct", c.deltas.crptc_extra_time_vs_mintime},
    };
    if (c.actual) {
      entry["actual"] = {{"period", std::string(to_string(*c.period))},
                         {"expected_cost", c.actual->expected_cost},
                         {"expected_time", c.actual->expected_time},
                         {"renormalized", c.actual->renormalized}};
      deltas["crptc_vs_actual_pct"] = *c.deltas.crptc_vs_actual;
    }
    entry["deltas"] = deltas;
    pairs.push_back(std::move(entry));
  }
  return {{"params",
           {{"c_gas", p.c_gas}, {"c_ele", p.c_ele}, {"e_init", p.e_init}, {"conversion", mu}}},
          {"pairs", pairs}};
}

void write_plot_csv(std::ostream& out, const ComparisonReport& report) {
  out << "od,algorithm,metric,value\n";
  char buf[64];
  auto num = [&](double v) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  };
  for (const OdComparison& c : report.pairs) {
    const std::string od = std::to_string(c.origin) + "-" + std::to_string(c.dest);
    for (const RouteSolution* s : {&c.mintime, &c.cdf, &c.crptc}) {
      const std::string algo(to_string(s->algorithm));
      out << od << ',' << algo << ",energy_cost," << num(s->energy_cost) << '\n';
      out << od << ',' << algo << ",travel_time," << num(s->travel_time) << '\n';
    }
    if (c.actual) {
      out << od << ",actual,energy_cost," << num(c.actual->expected_cost) << '\n';
      out << od << ",actual,travel_time," << num(c.actual->expected_time) << '\n';
    }
  }
}

}  // namespace phev
