#pragma once

/// @file hw_catalog.hpp
/// Device classes, the builtin accelerator catalog, the operating-cost model
/// and marginal cost-per-resource analytics.

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace agentplan {

struct DeviceClass {
  std::string name;
  std::string vendor;
  double capex_usd = 0.0;
  double mem_capacity_gb = 0.0;
  /// GB/s.
  double mem_bandwidth_gbps_bytes = 0.0;
  double tflops_fp16 = 0.0;
  std::optional<double> tflops_fp8;
  std::optional<double> tdp_watts;
  /// Gb/s inside the scale-up domain (chassis).
  double scaleup_bw_gbps_bits = 0.0;
  /// Gb/s per device across chassis.
  double scaleout_bw_gbps_bits = 0.0;
  /// Published $/hr; takes precedence over the derived annuity + energy cost.
  std::optional<double> op_cost_usd_per_hr;
  int max_per_chassis = 8;
  /// Host CPU units; absent means one unit.
  std::optional<double> gp_compute_units;
  /// Field names whose values are assumptions rather than published data.
  std::set<std::string> assumed;

  /// Throws Error(InvalidArgument) when an invariant does not hold.
  void validate() const;
};

struct CostModelParams {
  double amortization_years = 4.0;
  double annual_interest_rate = 0.08;
  double energy_usd_per_kwh = 0.40;
  double hours_per_month = 730.0;
  double utilization_fraction = 1.0;

  void validate() const;
};

struct HardwareCatalog {
  std::vector<DeviceClass> classes;
  CostModelParams cost_params;

  const DeviceClass* find(std::string_view name) const noexcept;
  /// Throws Error(UnknownClass).
  const DeviceClass& at(std::string_view name) const;
  const DeviceClass& operator[](std::string_view name) const { return at(name); }
  std::size_t size() const noexcept { return classes.size(); }

  void validate() const;
};

/// The six accelerators of the evaluation: A40, A100, Gaudi3, MI300x, H100, B200.
HardwareCatalog builtin_catalog();

/// Monthly payment of a fully amortizing loan; straight-line when rate is 0.
double annuity_payment(double principal, double monthly_rate, int months);

/// $/hr of one device: the published operating cost when present, otherwise the
/// amortized capex per hour plus energy at TDP scaled by utilization.
double hourly_cost(const DeviceClass& device, const CostModelParams& params);

enum class CostBasis { Capex, Opex };

std::string_view to_string(CostBasis basis) noexcept;

struct MarginalCostRow {
  std::string name;
  double usd_per_gbps_bytes = 0.0;
  double usd_per_tflop_fp16 = 0.0;
  std::optional<double> usd_per_tflop_fp8;
  double usd_per_gb = 0.0;
};

std::vector<MarginalCostRow> marginal_costs(const HardwareCatalog& catalog, CostBasis basis);

}  // namespace agentplan
