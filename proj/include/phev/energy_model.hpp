#pragma once

#include <array>
#include <span>
#include <vector>

#include "phev/network_graph.hpp"

namespace phev {

// Average distance per unit of energy for one drive cycle.
struct ConversionFactors {
  double mu_cd = 0.0;  // mi/kWh in charge-depleting mode
  double mu_cs = 0.0;  // mi/gal in charge-sustaining mode
};

// Conversion factors per traffic mode. Defaults are the PHEV20 values for
// HWFET (low), UDDS (medium) and NYC (high).
class DriveCycleTable {
 public:
  DriveCycleTable();

  const ConversionFactors& operator[](TrafficMode mode) const {
    return factors_[static_cast<std::size_t>(mode)];
  }
  // Throws InvalidInput unless both factors are strictly positive.
  void set(TrafficMode mode, ConversionFactors factors);

  bool operator==(const DriveCycleTable&) const = default;

 private:
  std::array<ConversionFactors, kNumTrafficModes> factors_;
};

struct VehicleEnergyParams {
  double c_gas = 2.75;   // $/gal
  double c_ele = 0.114;  // $/kWh
  double e_init = 5.57;  // kWh available at the origin
  DriveCycleTable table;

  // Throws InvalidInput on negative prices or battery energy.
  void validate() const;
};

struct LinkModeCosts {
  double cd_cost = 0.0;    // $ to drive the whole link in CD mode
  double cs_cost = 0.0;    // $ to drive the whole link in CS mode
  double cd_energy = 0.0;  // kWh to drive the whole link in CD mode
};

LinkModeCosts link_mode_costs(const Link& link, const VehicleEnergyParams& params);

// Marginal dollars saved by spending one kWh of battery on a link of this mode.
double savings_per_kwh(TrafficMode mode, const VehicleEnergyParams& params);

struct LinkCostBreakdown {
  double elec_cost = 0.0;
  double gas_cost = 0.0;
  double cd_energy_used = 0.0;
  double battery_after = 0.0;  // clamped at 0
};

struct CdfPathCost {
  double total_cost = 0.0;
  std::vector<LinkCostBreakdown> links;
};

// Charge-depleting-first cost: drive CD until the battery is empty, then CS.
// The running battery value follows E_j = E_i - d/mu_cd unconditionally and
// only its sign selects the per-link case.
CdfPathCost cdf_path_cost(const Path& path, const NetworkGraph& g,
                          const VehicleEnergyParams& params);

// Per-link CD fractions induced by charge-depleting-first on this path.
std::vector<double> cdf_allocation(const Path& path, const NetworkGraph& g,
                                   const VehicleEnergyParams& params);

struct SplitCost {
  double cost = 0.0;
  double cd_energy = 0.0;
};

// Cost of driving a fraction y[k] of link k in CD mode and the rest in CS.
// Throws InvalidInput if y has the wrong length or leaves [0, 1].
SplitCost split_path_cost(const Path& path, std::span<const double> y, const NetworkGraph& g,
                          const VehicleEnergyParams& params);

// Cheapest CD fractions for a fixed path under the battery budget e_init.
// Continuous knapsack: battery goes to links in decreasing savings per kWh,
// ties to the earlier link; links with non-positive savings get nothing.
std::vector<double> optimal_pt_allocation(const Path& path, const NetworkGraph& g,
                                          const VehicleEnergyParams& params);

// Battery level at every path node given per-link CD fractions, clamped at 0.
std::vector<double> battery_trajectory(const Path& path, std::span<const double> y,
                                       const NetworkGraph& g, const VehicleEnergyParams& params);

}  // namespace phev
