#include "phev/routing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <string>
#include <unordered_set>

#include "phev/errors.hpp"

namespace phev {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::MinTime:
      return "mintime";
    case Algorithm::CdfHybridLp:
      return "cdf";
    case Algorithm::Crptc:
      return "crptc";
    case Algorithm::CrptcOracle:
      return "crptc_oracle";
  }
  return "?";
}

std::string_view to_string(Period period) {
  switch (period) {
    case Period::AM:
      return "AM";
    case Period::MD:
      return "MD";
    case Period::PM:
      return "PM";
    case Period::NT:
      return "NT";
  }
  return "?";
}

std::optional<Period> parse_period(std::string_view text) {
  if (text == "AM") return Period::AM;
  if (text == "MD") return Period::MD;
  if (text == "PM") return Period::PM;
  if (text == "NT") return Period::NT;
  return std::nullopt;
}

namespace {

constexpr double kCostTieTol = 1e-9;

void check_query(const NetworkGraph& g, const VehicleEnergyParams& params, NodeId origin,
                 NodeId dest) {
  params.validate();
  g.node_index(origin);
  g.node_index(dest);
  if (origin == dest) throw InvalidInput("origin and destination must differ");
}

std::string od_name(NodeId origin, NodeId dest) {
  return std::to_string(origin) + " -> " + std::to_string(dest);
}

RouteSolution make_solution(const NetworkGraph& g, const VehicleEnergyParams& params, Path path,
                            std::vector<double> y, Algorithm algorithm) {
  RouteSolution s;
  const SplitCost split = split_path_cost(path, y, g, params);
  s.energy_cost = split.cost;
  s.cd_energy = split.cd_energy;
  s.travel_time = path_travel_time(g, path);
  s.battery_trajectory = battery_trajectory(path, y, g, params);
  s.path = std::move(path);
  s.y = std::move(y);
  s.algorithm = algorithm;
  return s;
}

RouteSolution make_cdf_solution(const NetworkGraph& g, const VehicleEnergyParams& params,
                                Path path, Algorithm algorithm) {
  std::vector<double> y = cdf_allocation(path, g, params);
  RouteSolution s = make_solution(g, params, std::move(path), std::move(y), algorithm);
  // The CDF cost uses the mixed-link formula directly; it agrees with the
  // split cost of the induced fractions up to rounding.
  s.energy_cost = cdf_path_cost(s.path, g, params).total_cost;
  return s;
}

// Keeps the cheapest path; near-equal costs go to the smaller node sequence.
struct BestPath {
  std::optional<Path> path;
  double cost = std::numeric_limits<double>::infinity();

  void offer(const Path& candidate, double candidate_cost) {
    const bool cheaper = !path || candidate_cost < cost - kCostTieTol;
    const bool tie = path && std::abs(candidate_cost - cost) <= kCostTieTol && candidate < *path;
    if (cheaper || tie) {
      path = candidate;
      cost = candidate_cost;
    }
  }
};

}  // namespace

RouteSolution shortest_time_path(const NetworkGraph& g, const VehicleEnergyParams& params,
                                 NodeId origin, NodeId dest) {
  check_query(g, params, origin, dest);
  const std::size_t n = g.num_nodes();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, kInf);
  std::vector<std::vector<NodeId>> label(n);
  std::vector<bool> settled(n, false);

  using Entry = std::pair<double, std::vector<NodeId>>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  dist[g.node_index(origin)] = 0.0;
  label[g.node_index(origin)] = {origin};
  queue.push({0.0, {origin}});

  while (!queue.empty()) {
    auto [d, nodes] = queue.top();
    queue.pop();
    const NodeId u = nodes.back();
    const std::size_t ui = g.node_index(u);
    if (settled[ui] || d != dist[ui] || nodes != label[ui]) continue;
    settled[ui] = true;
    if (u == dest) break;
    for (std::size_t k : g.out_links(u)) {
      const Link& link = g.links()[k];
      const std::size_t vi = g.node_index(link.to);
      if (settled[vi]) continue;
      const double nd = d + travel_time(link);
      std::vector<NodeId> extended = nodes;
      extended.push_back(link.to);
      const double tol = 1e-12 * (1.0 + nd);
      if (nd < dist[vi] - tol || (nd <= dist[vi] + tol && extended < label[vi])) {
        dist[vi] = nd;
        label[vi] = extended;
        queue.push({nd, std::move(extended)});
      }
    }
  }

  const std::size_t di = g.node_index(dest);
  if (!settled[di]) throw Unreachable("no route " + od_name(origin, dest));
  return make_cdf_solution(g, params, Path{label[di]}, Algorithm::MinTime);
}

LinearProgram build_cs_flow_lp(const NetworkGraph& g, const VehicleEnergyParams& params,
                               NodeId source, NodeId dest, const std::vector<NodeId>& excluded) {
  const std::unordered_set<NodeId> skip(excluded.begin(), excluded.end());
  LinearProgram lp;
  std::vector<std::optional<std::size_t>> var(g.num_links());
  for (std::size_t k = 0; k < g.num_links(); ++k) {
    const Link& link = g.links()[k];
    if (skip.contains(link.from) || skip.contains(link.to)) continue;
    var[k] = lp.add_variable(0.0, 1.0, link_mode_costs(link, params).cs_cost,
                             "x_" + std::to_string(link.from) + "_" + std::to_string(link.to));
  }
  for (NodeId i : g.nodes()) {
    if (skip.contains(i)) continue;
    std::vector<std::pair<std::size_t, double>> terms;
    for (std::size_t k : g.out_links(i)) {
      if (var[k]) terms.emplace_back(*var[k], 1.0);
    }
    for (std::size_t k : g.in_links(i)) {
      if (var[k]) terms.emplace_back(*var[k], -1.0);
    }
    const double supply = i == source ? 1.0 : (i == dest ? -1.0 : 0.0);
    lp.add_constraint(terms, RowSense::Equal, supply);
  }
  return lp;
}

MilpProblem build_crptc_milp(const NetworkGraph& g, const VehicleEnergyParams& params,
                             NodeId origin, NodeId dest) {
  MilpProblem p;
  LinearProgram& lp = p.lp;
  const std::size_t links = g.num_links();
  std::vector<LinkModeCosts> costs;
  for (const Link& link : g.links()) costs.push_back(link_mode_costs(link, params));

  auto suffix = [&](std::size_t k) {
    return "_" + std::to_string(g.links()[k].from) + "_" + std::to_string(g.links()[k].to);
  };
  for (std::size_t k = 0; k < links; ++k) {
    p.integer_vars.push_back(lp.add_variable(0.0, 1.0, costs[k].cs_cost, "x" + suffix(k)));
  }
  for (std::size_t k = 0; k < links; ++k) lp.add_variable(0.0, 1.0, 0.0, "y" + suffix(k));
  for (std::size_t k = 0; k < links; ++k) {
    lp.add_variable(0.0, 1.0, costs[k].cd_cost - costs[k].cs_cost, "z" + suffix(k));
  }
  const auto x = [](std::size_t k) { return k; };
  const auto y = [links](std::size_t k) { return links + k; };
  const auto z = [links](std::size_t k) { return 2 * links + k; };

  for (NodeId i : g.nodes()) {
    std::vector<std::pair<std::size_t, double>> terms;
    for (std::size_t k : g.out_links(i)) terms.emplace_back(x(k), 1.0);
    for (std::size_t k : g.in_links(i)) terms.emplace_back(x(k), -1.0);
    const double supply = i == origin ? 1.0 : (i == dest ? -1.0 : 0.0);
    lp.add_constraint(terms, RowSense::Equal, supply);
  }

  std::vector<std::pair<std::size_t, double>> budget;
  for (std::size_t k = 0; k < links; ++k) budget.emplace_back(z(k), costs[k].cd_energy);
  lp.add_constraint(budget, RowSense::LessEqual, params.e_init);

  for (std::size_t k = 0; k < links; ++k) {
    const std::pair<std::size_t, double> z_le_y[] = {{z(k), 1.0}, {y(k), -1.0}};
    lp.add_constraint(z_le_y, RowSense::LessEqual, 0.0);
    const std::pair<std::size_t, double> z_le_x[] = {{z(k), 1.0}, {x(k), -1.0}};
    lp.add_constraint(z_le_x, RowSense::LessEqual, 0.0);
    const std::pair<std::size_t, double> z_ge[] = {{z(k), 1.0}, {y(k), -1.0}, {x(k), -1.0}};
    lp.add_constraint(z_ge, RowSense::GreaterEqual, -1.0);
  }
  return p;
}

std::optional<Path> extract_flow_path(const NetworkGraph& g, std::span<const double> flow,
                                      NodeId source, NodeId dest) {
  std::vector<bool> seen(g.num_nodes(), false);
  std::vector<NodeId> stack{source};
  seen[g.node_index(source)] = true;

  // Depth-first search, smallest next node first.
  auto search = [&](auto&& self, NodeId u) -> bool {
    if (u == dest) return true;
    for (std::size_t k : g.out_links(u)) {
      if (flow[k] <= 0.5) continue;
      const NodeId v = g.links()[k].to;
      const std::size_t vi = g.node_index(v);
      if (seen[vi]) continue;
      seen[vi] = true;
      stack.push_back(v);
      if (self(self, v)) return true;
      stack.pop_back();
    }
    return false;
  };
  if (!search(search, source)) return std::nullopt;
  return Path{stack};
}

namespace {

struct Suffix {
  Path path;
  double cost = 0.0;
};

class HybridLpSearch {
 public:
  HybridLpSearch(const NetworkGraph& g, const VehicleEnergyParams& params, NodeId origin,
                 NodeId dest, double rho, const RoutingOptions& options)
      : g_(g),
        params_(params),
        origin_(origin),
        dest_(dest),
        prune_above_(rho + kCostTieTol * (1.0 + rho)),
        options_(options),
        on_path_(g.num_nodes(), false) {}

  BestPath run() {
    stack_.push_back(origin_);
    on_path_[g_.node_index(origin_)] = true;
    visit(origin_, params_.e_init, 0.0);
    return best_;
  }

 private:
  void visit(NodeId u, double battery, double cost) {
    if (battery <= 0.0) {
      on_depleted(u, cost);
      return;
    }
    if (u == dest_) {
      best_.offer(Path{stack_}, cost);
      return;
    }
    for (std::size_t k : g_.out_links(u)) {
      const Link& link = g_.links()[k];
      const std::size_t vi = g_.node_index(link.to);
      if (on_path_[vi]) continue;
      const LinkModeCosts c = link_mode_costs(link, params_);
      double link_cost;
      if (battery >= c.cd_energy) {
        link_cost = c.cd_cost;
      } else {
        const ConversionFactors& f = params_.table[link.mode];
        link_cost = params_.c_ele * battery +
                    params_.c_gas * (link.length_mi - f.mu_cd * battery) / f.mu_cs;
      }
      const double next_cost = cost + link_cost;
      if (next_cost > prune_above_) continue;
      if (++expanded_ > options_.max_paths) {
        throw EnumerationOverflow("instance too large for enumeration: more than " +
                                  std::to_string(options_.max_paths) + " partial paths");
      }
      stack_.push_back(link.to);
      on_path_[vi] = true;
      visit(link.to, battery - c.cd_energy, next_cost);
      on_path_[vi] = false;
      stack_.pop_back();
    }
  }

  void on_depleted(NodeId p, double prefix_cost) {
    if (p == dest_) {
      best_.offer(Path{stack_}, prefix_cost);
      return;
    }
    auto cached = unrestricted_.find(p);
    if (cached == unrestricted_.end()) {
      cached = unrestricted_.emplace(p, solve_suffix(p, {})).first;
    }
    std::optional<Suffix> suffix = cached->second;
    if (suffix && revisits_prefix(suffix->path)) {
      std::vector<NodeId> prefix_nodes(stack_.begin(), stack_.end() - 1);
      suffix = solve_suffix(p, prefix_nodes);
    }
    if (!suffix) return;
    Path full{stack_};
    full.nodes.insert(full.nodes.end(), suffix->path.nodes.begin() + 1, suffix->path.nodes.end());
    best_.offer(full, prefix_cost + suffix->cost);
  }

  bool revisits_prefix(const Path& suffix) const {
    for (std::size_t i = 1; i < suffix.nodes.size(); ++i) {
      if (on_path_[g_.node_index(suffix.nodes[i])]) return true;
    }
    return false;
  }

  std::optional<Suffix> solve_suffix(NodeId p, const std::vector<NodeId>& excluded) {
    const LinearProgram lp = build_cs_flow_lp(g_, params_, p, dest_, excluded);
    const SolveResult r = solve_lp(lp, options_.solver);
    if (r.status == SolveStatus::Infeasible) return std::nullopt;
    if (r.status != SolveStatus::Optimal) {
      throw SolverError("all-gas flow LP from node " + std::to_string(p) + " stopped: " +
                        std::string(to_string(r.status)));
    }
    // Map LP columns back to graph links.
    const std::unordered_set<NodeId> skip(excluded.begin(), excluded.end());
    std::vector<double> flow(g_.num_links(), 0.0);
    std::size_t col = 0;
    for (std::size_t k = 0; k < g_.num_links(); ++k) {
      const Link& link = g_.links()[k];
      if (skip.contains(link.from) || skip.contains(link.to)) continue;
      flow[k] = r.values[col++];
    }
    auto path = extract_flow_path(g_, flow, p, dest_);
    if (!path) throw SolverError("flow LP solution does not contain a route");
    Suffix s{std::move(*path), 0.0};
    for (std::size_t k : g_.path_links(s.path)) s.cost += link_mode_costs(g_.links()[k], params_).cs_cost;
    return s;
  }

  const NetworkGraph& g_;
  const VehicleEnergyParams& params_;
  NodeId origin_;
  NodeId dest_;
  double prune_above_;
  const RoutingOptions& options_;
  std::vector<bool> on_path_;
  std::vector<NodeId> stack_;
  std::map<NodeId, std::optional<Suffix>> unrestricted_;
  std::size_t expanded_ = 0;
  BestPath best_;
};

}  // namespace

RouteSolution cdf_route_hybrid_lp(const NetworkGraph& g, const VehicleEnergyParams& params,
                                  NodeId origin, NodeId dest, const RoutingOptions& options) {
  const RouteSolution fastest = shortest_time_path(g, params, origin, dest);
  BestPath best =
      HybridLpSearch(g, params, origin, dest, fastest.energy_cost, options).run();
  // The fastest route's own prefix never exceeds rho, so a candidate exists.
  if (!best.path) throw Unreachable("no route " + od_name(origin, dest));
  return make_cdf_solution(g, params, std::move(*best.path), Algorithm::CdfHybridLp);
}

RouteSolution crptc_route_milp(const NetworkGraph& g, const VehicleEnergyParams& params,
                               NodeId origin, NodeId dest, const RoutingOptions& options) {
  check_query(g, params, origin, dest);
  const MilpProblem milp = build_crptc_milp(g, params, origin, dest);
  const SolveResult r = solve_milp(milp, options.solver);
  if (r.status == SolveStatus::Infeasible) throw Unreachable("no route " + od_name(origin, dest));
  if (r.status != SolveStatus::Optimal) {
    throw SolverError("CRPTC branch and bound stopped: " + std::string(to_string(r.status)));
  }
  const std::size_t links = g.num_links();
  auto path = extract_flow_path(g, std::span(r.values).first(links), origin, dest);
  if (!path) throw SolverError("MILP solution does not contain a route");
  std::vector<double> y;
  for (std::size_t k : g.path_links(*path)) {
    y.push_back(std::clamp(r.values[2 * links + k], 0.0, 1.0));
  }
  return make_solution(g, params, std::move(*path), std::move(y), Algorithm::Crptc);
}

RouteSolution crptc_oracle(const NetworkGraph& g, const VehicleEnergyParams& params,
                           NodeId origin, NodeId dest, const RoutingOptions& options) {
  check_query(g, params, origin, dest);
  std::optional<RouteSolution> best;
  for (Path& path : enumerate_simple_paths(g, origin, dest, options.max_paths)) {
    std::vector<double> y = optimal_pt_allocation(path, g, params);
    RouteSolution s =
        make_solution(g, params, std::move(path), std::move(y), Algorithm::CrptcOracle);
    // Paths arrive in lexicographic order, so only a strictly cheaper one wins.
    if (!best || s.energy_cost < best->energy_cost - kCostTieTol) best = std::move(s);
  }
  if (!best) throw Unreachable("no route " + od_name(origin, dest));
  return *best;
}

bool OdRouteDistribution::normalize() {
  double total = 0.0;
  for (const WeightedRoute& r : routes) {
    if (!(r.probability >= 0.0)) {
      throw InvalidInput("route " + r.path.to_string() + " has a negative probability");
    }
    total += r.probability;
  }
  if (!(total > 0.0)) throw InvalidInput("route probabilities sum to zero");
  if (std::abs(total - 1.0) <= 1e-9) return false;
  for (WeightedRoute& r : routes) r.probability /= total;
  return true;
}

ExpectedRouteCost expected_actual_cost(OdRouteDistribution dist, const NetworkGraph& g,
                                       const VehicleEnergyParams& params) {
  params.validate();
  ExpectedRouteCost result;
  result.renormalized = dist.normalize();
  for (std::size_t i = 0; i < dist.routes.size(); ++i) {
    const WeightedRoute& r = dist.routes[i];
    const auto& nodes = r.path.nodes;
    if (nodes.size() < 2 || nodes.front() != dist.origin || nodes.back() != dist.dest) {
      throw InvalidInput("route " + std::to_string(i + 1) + " (" + r.path.to_string() +
                         ") does not run from " + od_name(dist.origin, dist.dest));
    }
    try {
      result.expected_cost += r.probability * cdf_path_cost(r.path, g, params).total_cost;
      result.expected_time += r.probability * path_travel_time(g, r.path);
    } catch (const InvalidInput& e) {
      throw InvalidInput("route " + std::to_string(i + 1) + " (" + r.path.to_string() +
                         "): " + e.what());
    }
  }
  return result;
}

}  // namespace phev
