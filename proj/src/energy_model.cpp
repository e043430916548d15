#include "phev/energy_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "phev/errors.hpp"

namespace phev {

DriveCycleTable::DriveCycleTable() {
  factors_[static_cast<std::size_t>(TrafficMode::Low)] = {5.7, 58.6};
  factors_[static_cast<std::size_t>(TrafficMode::Medium)] = {6.2, 69.4};
  factors_[static_cast<std::size_t>(TrafficMode::High)] = {4.2, 45.7};
}

void DriveCycleTable::set(TrafficMode mode, ConversionFactors factors) {
  if (!(factors.mu_cd > 0.0) || !(factors.mu_cs > 0.0)) {
    throw InvalidInput("conversion factors for " + std::string(to_string(mode)) +
                       " traffic must be positive");
  }
  factors_[static_cast<std::size_t>(mode)] = factors;
}

void VehicleEnergyParams::validate() const {
  if (!(c_gas >= 0.0)) throw InvalidInput("c_gas must be non-negative");
  if (!(c_ele >= 0.0)) throw InvalidInput("c_ele must be non-negative");
  if (!(e_init >= 0.0)) throw InvalidInput("e_init must be non-negative");
}

LinkModeCosts link_mode_costs(const Link& link, const VehicleEnergyParams& params) {
  const ConversionFactors& f = params.table[link.mode];
  LinkModeCosts c;
  c.cd_energy = link.length_mi / f.mu_cd;
  c.cd_cost = params.c_ele * c.cd_energy;
  c.cs_cost = params.c_gas * link.length_mi / f.mu_cs;
  return c;
}

double savings_per_kwh(TrafficMode mode, const VehicleEnergyParams& params) {
  const ConversionFactors& f = params.table[mode];
  return params.c_gas * f.mu_cd / f.mu_cs - params.c_ele;
}

CdfPathCost cdf_path_cost(const Path& path, const NetworkGraph& g,
                          const VehicleEnergyParams& params) {
  CdfPathCost result;
  double battery = params.e_init;
  for (std::size_t k : g.path_links(path)) {
    const Link& link = g.links()[k];
    const ConversionFactors& f = params.table[link.mode];
    const LinkModeCosts c = link_mode_costs(link, params);
    LinkCostBreakdown b;
    if (battery <= 0.0) {
      b.gas_cost = c.cs_cost;
    } else if (battery >= c.cd_energy) {
      b.elec_cost = c.cd_cost;
      b.cd_energy_used = c.cd_energy;
    } else {
      b.elec_cost = params.c_ele * battery;
      b.gas_cost = params.c_gas * (link.length_mi - f.mu_cd * battery) / f.mu_cs;
      b.cd_energy_used = battery;
    }
    battery -= c.cd_energy;
    b.battery_after = std::max(battery, 0.0);
    result.total_cost += b.elec_cost + b.gas_cost;
    result.links.push_back(b);
  }
  return result;
}

std::vector<double> cdf_allocation(const Path& path, const NetworkGraph& g,
                                   const VehicleEnergyParams& params) {
  std::vector<double> y;
  double battery = params.e_init;
  for (std::size_t k : g.path_links(path)) {
    const double need = link_mode_costs(g.links()[k], params).cd_energy;
    if (battery <= 0.0) {
      y.push_back(0.0);
    } else if (battery >= need) {
      y.push_back(1.0);
    } else {
      y.push_back(battery / need);
    }
    battery -= need;
  }
  return y;
}

SplitCost split_path_cost(const Path& path, std::span<const double> y, const NetworkGraph& g,
                          const VehicleEnergyParams& params) {
  const auto links = g.path_links(path);
  if (y.size() != links.size()) {
    throw InvalidInput("expected " + std::to_string(links.size()) + " CD fractions, got " +
                       std::to_string(y.size()));
  }
  SplitCost result;
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (!(y[i] >= 0.0 && y[i] <= 1.0)) {
      throw InvalidInput("CD fraction " + std::to_string(y[i]) + " on link " +
                         std::to_string(i) + " is outside [0, 1]");
    }
    const LinkModeCosts c = link_mode_costs(g.links()[links[i]], params);
    result.cost += c.cs_cost * (1.0 - y[i]) + c.cd_cost * y[i];
    result.cd_energy += c.cd_energy * y[i];
  }
  return result;
}

std::vector<double> optimal_pt_allocation(const Path& path, const NetworkGraph& g,
                                          const VehicleEnergyParams& params) {
  const auto links = g.path_links(path);
  std::vector<double> savings(links.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    savings[i] = savings_per_kwh(g.links()[links[i]].mode, params);
  }
  std::vector<std::size_t> order(links.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return savings[a] > savings[b]; });

  std::vector<double> y(links.size(), 0.0);
  double remaining = params.e_init;
  for (std::size_t i : order) {
    if (remaining <= 0.0 || savings[i] <= 0.0) break;
    const double need = link_mode_costs(g.links()[links[i]], params).cd_energy;
    if (remaining >= need) {
      y[i] = 1.0;
      remaining -= need;
    } else {
      y[i] = remaining / need;
      remaining = 0.0;
    }
  }
  return y;
}

std::vector<double> battery_trajectory(const Path& path, std::span<const double> y,
                                       const NetworkGraph& g, const VehicleEnergyParams& params) {
  const auto links = g.path_links(path);
  if (y.size() != links.size()) throw InvalidInput("CD fraction count does not match path");
  std::vector<double> trajectory{params.e_init};
  double battery = params.e_init;
  for (std::size_t i = 0; i < links.size(); ++i) {
    battery -= link_mode_costs(g.links()[links[i]], params).cd_energy * y[i];
    trajectory.push_back(std::max(battery, 0.0));
  }
  return trajectory;
}

}  // namespace phev
