#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "phev/energy_model.hpp"
#include "phev/network_graph.hpp"
#include "phev/preprocess.hpp"
#include "phev/routing.hpp"

namespace phev {

// Links CSV: header "from,to,length_mi,avg_speed_mph,mode", mode one of
// low/medium/high. Errors carry the 1-based line number.
NetworkGraph read_links_csv(std::istream& in);
NetworkGraph read_links_csv_file(const std::string& path);
void write_links_csv(std::ostream& out, const NetworkGraph& g);

// Segments CSV: header "link_from,link_to,seq,length_mi,avg_speed_mph".
std::vector<SegmentRecord> read_segments_csv(std::istream& in);
std::vector<SegmentRecord> read_segments_csv_file(const std::string& path);

// key=value lines; '#' starts a comment. Keys: c_gas, c_ele, e_init and
// mu_cd_{low,medium,high}, mu_cs_{low,medium,high}. Unset keys keep `base`.
VehicleEnergyParams read_config(std::istream& in, VehicleEnergyParams base = {});
VehicleEnergyParams read_config_file(const std::string& path, VehicleEnergyParams base = {});

// Routes JSON: [{origin, dest, period, routes: [{nodes: [...], prob}]}].
// Probabilities that add up to 100 are read as percentages.
std::vector<OdRouteDistribution> read_routes_json(std::istream& in);
std::vector<OdRouteDistribution> read_routes_json_file(const std::string& path);

nlohmann::json to_json(const RouteSolution& s);
nlohmann::json to_json(const PreprocessReport& r);

// Percentage saved by `value` relative to `baseline`; 0 when baseline is 0.
double saving_pct(double baseline, double value);

struct ComparisonDeltas {
  double crptc_vs_cdf = 0.0;      // % energy saved over CDF routing
  double crptc_vs_mintime = 0.0;  // % energy saved over the fastest route
  std::optional<double> crptc_vs_actual;
  double crptc_extra_time_vs_mintime = 0.0;  // % longer travel time
};

struct OdComparison {
  NodeId origin = 0;
  NodeId dest = 0;
  RouteSolution mintime;
  RouteSolution cdf;
  RouteSolution crptc;
  std::optional<Period> period;
  std::optional<ExpectedRouteCost> actual;
  ComparisonDeltas deltas;
};

struct ComparisonReport {
  VehicleEnergyParams params;
  std::vector<OdComparison> pairs;
};

// Runs every algorithm on one O-D pair, plus the observed routes if given.
OdComparison compare_od(const NetworkGraph& g, const VehicleEnergyParams& params, NodeId origin,
                        NodeId dest, const OdRouteDistribution* observed = nullptr,
                        const RoutingOptions& options = {});

ComparisonDeltas compute_deltas(const OdComparison& c);

nlohmann::json to_json(const ComparisonReport& report);

// Long format: od,algorithm,metric,value.
void write_plot_csv(std::ostream& out, const ComparisonReport& report);

}  // namespace phev
