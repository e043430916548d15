#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "phev/energy_model.hpp"
#include "phev/lp_solver.hpp"
#include "phev/network_graph.hpp"

namespace phev {

enum class Algorithm { MinTime, CdfHybridLp, Crptc, CrptcOracle };

std::string_view to_string(Algorithm algorithm);

struct RouteSolution {
  Path path;
  std::vector<double> y;  // CD fraction per path link
  double energy_cost = 0.0;
  double travel_time = 0.0;
  double cd_energy = 0.0;
  std::vector<double> battery_trajectory;  // kWh at each path node, clamped at 0
  Algorithm algorithm = Algorithm::MinTime;
};

struct RoutingOptions {
  // Bound on enumerated (partial) paths for the CDF search and the oracles.
  std::size_t max_paths = kDefaultMaxPaths;
  SolverOptions solver;
};

// Fastest route by Dijkstra on d/v; equal times resolve to the
// lexicographically smaller node sequence. Energy is the CDF cost of the
// path. Throws Unreachable.
RouteSolution shortest_time_path(const NetworkGraph& g, const VehicleEnergyParams& params,
                                 NodeId origin, NodeId dest);

// Charge-depleting-first optimal route:
//  1. rho = CDF cost of the fastest route, an upper bound on the optimum;
//  2. grow simple paths from the origin, cut each at the first node where the
//     battery is exhausted and drop prefixes costing more than rho;
//  3. from every such node, take the cheapest all-gas continuation from the
//     relaxed min-cost-flow LP (re-solved without the prefix nodes if the LP
//     route would revisit one);
//  4. compare with the paths that reach the destination before depleting.
RouteSolution cdf_route_hybrid_lp(const NetworkGraph& g, const VehicleEnergyParams& params,
                                  NodeId origin, NodeId dest,
                                  const RoutingOptions& options = {});

// Joint route and power-train control solved as a MILP with z = x * y.
RouteSolution crptc_route_milp(const NetworkGraph& g, const VehicleEnergyParams& params,
                               NodeId origin, NodeId dest, const RoutingOptions& options = {});

// Enumerates every simple path and allocates the battery optimally on each.
RouteSolution crptc_oracle(const NetworkGraph& g, const VehicleEnergyParams& params,
                           NodeId origin, NodeId dest, const RoutingOptions& options = {});

// Unit-supply min-cost-flow LP with all-gas link costs from `source` to
// `dest`, x in [0, 1], skipping links touching `excluded` nodes.
LinearProgram build_cs_flow_lp(const NetworkGraph& g, const VehicleEnergyParams& params,
                               NodeId source, NodeId dest,
                               const std::vector<NodeId>& excluded = {});

// Variable layout: x for link k at k, y at L + k, z at 2L + k.
MilpProblem build_crptc_milp(const NetworkGraph& g, const VehicleEnergyParams& params,
                             NodeId origin, NodeId dest);

// A simple source -> dest path through links whose flow exceeds 1/2, or
// nullopt. `flow` is indexed like g.links().
std::optional<Path> extract_flow_path(const NetworkGraph& g, std::span<const double> flow,
                                      NodeId source, NodeId dest);

enum class Period { AM, MD, PM, NT };

std::string_view to_string(Period period);
std::optional<Period> parse_period(std::string_view text);

struct WeightedRoute {
  Path path;
  double probability = 0.0;
};

// Observed routes of one origin-destination pair in one time period.
struct OdRouteDistribution {
  NodeId origin = 0;
  NodeId dest = 0;
  Period period = Period::AM;
  std::vector<WeightedRoute> routes;

  // Rescales probabilities to sum to 1. Returns true if they did not already
  // (within 1e-9). Throws InvalidInput on negative or all-zero weights.
  bool normalize();
};

struct ExpectedRouteCost {
  double expected_cost = 0.0;
  double expected_time = 0.0;
  bool renormalized = false;
};

// Probability-weighted CDF energy cost and travel time of the observed
// routes. Throws InvalidInput naming the first route that is not an
// origin -> dest path of g.
ExpectedRouteCost expected_actual_cost(OdRouteDistribution dist, const NetworkGraph& g,
                                       const VehicleEnergyParams& params);

}  // namespace phev
