// Command-line front end: route, compare and preprocess.
//
// Exit codes: 0 success, 1 input error, 2 destination unreachable.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "phev/errors.hpp"
#include "phev/io.hpp"
#include "phev/lp_solver.hpp"
#include "phev/preprocess.hpp"
#include "phev/routing.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitInfeasible = 2;

struct VehicleOptions {
  std::string config;
  std::optional<double> battery;

  phev::VehicleEnergyParams load() const {
    phev::VehicleEnergyParams params;
    if (!config.empty()) params = phev::read_config_file(config);
    if (battery) params.e_init = *battery;
    params.validate();
    return params;
  }
};

void add_vehicle_options(CLI::App* cmd, VehicleOptions& v) {
  cmd->add_option("--config", v.config, "key=value vehicle parameter file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--battery", v.battery, "initial battery energy in kWh (overrides config)");
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw phev::InvalidInput("cannot write " + path);
  out << text;
}

struct RouteArgs {
  std::string links;
  std::string algo = "crptc";
  phev::NodeId origin = 0;
  phev::NodeId dest = 0;
  VehicleOptions vehicle;
  std::string out;
  std::string dump_lp;
};

int run_route(const RouteArgs& a) {
  const phev::NetworkGraph g = phev::read_links_csv_file(a.links);
  const phev::VehicleEnergyParams params = a.vehicle.load();
  for (phev::NodeId id : {a.origin, a.dest}) {
    if (!g.has_node(id)) throw phev::InvalidInput("unknown node id " + std::to_string(id));
  }
  if (!a.dump_lp.empty()) {
    std::ofstream dump(a.dump_lp);
    if (!dump) throw phev::InvalidInput("cannot write " + a.dump_lp);
    if (a.algo == "crptc") {
      const auto milp = phev::build_crptc_milp(g, params, a.origin, a.dest);
      phev::write_lp_text(dump, milp.lp, milp.integer_vars);
    } else {
      phev::write_lp_text(dump, phev::build_cs_flow_lp(g, params, a.origin, a.dest));
    }
  }
  phev::RouteSolution s;
  if (a.algo == "mintime") {
    s = phev::shortest_time_path(g, params, a.origin, a.dest);
  } else if (a.algo == "cdf") {
    s = phev::cdf_route_hybrid_lp(g, params, a.origin, a.dest);
  } else {
    s = phev::crptc_route_milp(g, params, a.origin, a.dest);
  }
  nlohmann::json doc = phev::to_json(s);
  doc["origin"] = a.origin;
  doc["dest"] = a.dest;
  write_text(a.out, doc.dump(2) + "\n");
  return kExitOk;
}

struct CompareArgs {
  std::string links;
  std::optional<phev::NodeId> origin;
  std::optional<phev::NodeId> dest;
  std::string routes;
  std::string period = "AM";
  VehicleOptions vehicle;
  std::string out;
  std::string plot;
};

int run_compare(const CompareArgs& a) {
  const phev::NetworkGraph g = phev::read_links_csv_file(a.links);
  phev::ComparisonReport report;
  report.params = a.vehicle.load();
  const auto period = phev::parse_period(a.period);
  if (!period) throw phev::InvalidInput("unknown period " + a.period);
  if (a.origin.has_value() != a.dest.has_value()) {
    throw phev::InvalidInput("--origin and --dest go together");
  }

  std::vector<phev::OdRouteDistribution> observed;
  if (!a.routes.empty()) {
    for (auto& d : phev::read_routes_json_file(a.routes)) {
      if (d.period == *period) observed.push_back(std::move(d));
    }
  }
  auto observed_for = [&](phev::NodeId o, phev::NodeId d) -> const phev::OdRouteDistribution* {
    for (const auto& dist : observed) {
      if (dist.origin == o && dist.dest == d) return &dist;
    }
    return nullptr;
  };

  std::vector<std::pair<phev::NodeId, phev::NodeId>> pairs;
  if (a.origin) {
    pairs.emplace_back(*a.origin, *a.dest);
  } else {
    for (const auto& dist : observed) pairs.emplace_back(dist.origin, dist.dest);
  }
  if (pairs.empty()) {
    throw phev::InvalidInput("nothing to compare: give --origin/--dest or a --routes file");
  }
  for (const auto& [o, d] : pairs) {
    if (!g.has_node(o) || !g.has_node(d)) {
      throw phev::InvalidInput("unknown node in O-D pair " + std::to_string(o) + "-" +
                               std::to_string(d));
    }
    const phev::OdRouteDistribution* dist = observed_for(o, d);
    report.pairs.push_back(phev::compare_od(g, report.params, o, d, dist));
    if (report.pairs.back().actual && report.pairs.back().actual->renormalized) {
      std::cerr << "warning: route probabilities for " << o << "-" << d
                << " did not sum to 1; renormalized\n";
    }
  }

  write_text(a.out, phev::to_json(report).dump(2) + "\n");
  if (!a.plot.empty()) {
    std::ofstream plot(a.plot);
    if (!plot) throw phev::InvalidInput("cannot write " + a.plot);
    phev::write_plot_csv(plot, report);
  }
  return kExitOk;
}

struct PreprocessArgs {
  std::string segments;
  std::string out;
  std::string report;
};

int run_preprocess(const PreprocessArgs& a) {
  const auto segments = phev::read_segments_csv_file(a.segments);
  const auto [graph, report] = phev::build_graph(segments);
  std::ofstream out(a.out);
  if (!out) throw phev::InvalidInput("cannot write " + a.out);
  phev::write_links_csv(out, graph);
  const std::string summary = phev::to_json(report).dump(2) + "\n";
  if (a.report.empty()) {
    std::cerr << summary;
  } else {
    write_text(a.report, summary);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-optimal routing for plug-in hybrid electric vehicles"};
  app.require_subcommand(1);

  RouteArgs route;
  auto* route_cmd = app.add_subcommand("route", "compute one route");
  route_cmd->add_option("--links", route.links, "links CSV")->required()->check(CLI::ExistingFile);
  route_cmd->add_option("--algo", route.algo, "crptc, cdf or mintime")
      ->check(CLI::IsMember({"crptc", "cdf", "mintime"}));
  route_cmd->add_option("--origin", route.origin)->required();
  route_cmd->add_option("--dest", route.dest)->required();
  add_vehicle_options(route_cmd, route.vehicle);
  route_cmd->add_option("--out", route.out, "RouteSolution JSON (default stdout)");
  route_cmd->add_option("--dump-lp", route.dump_lp, "write the LP/MILP instance as text");

  CompareArgs compare;
  auto* compare_cmd = app.add_subcommand("compare", "compare all algorithms");
  compare_cmd->add_option("--links", compare.links, "links CSV")
      ->required()
      ->check(CLI::ExistingFile);
  compare_cmd->add_option("--origin", compare.origin);
  compare_cmd->add_option("--dest", compare.dest);
  compare_cmd->add_option("--routes", compare.routes, "observed routes JSON")
      ->check(CLI::ExistingFile);
  compare_cmd->add_option("--period", compare.period, "AM, MD, PM or NT")
      ->check(CLI::IsMember({"AM", "MD", "PM", "NT"}));
  add_vehicle_options(compare_cmd, compare.vehicle);
  compare_cmd->add_option("--out", compare.out, "report JSON (default stdout)");
  compare_cmd->add_option("--plot", compare.plot, "long-format plot CSV");

  PreprocessArgs pre;
  auto* pre_cmd = app.add_subcommand("preprocess", "segments CSV -> links CSV");
  pre_cmd->add_option("--segments", pre.segments)->required()->check(CLI::ExistingFile);
  pre_cmd->add_option("--out", pre.out, "links CSV")->required();
  pre_cmd->add_option("--report", pre.report, "report JSON (default stderr)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*route_cmd) return run_route(route);
    if (*compare_cmd) return run_compare(compare);
    if (*pre_cmd) return run_preprocess(pre);
  } catch (const phev::Unreachable& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const phev::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}
