#include "agentplan/hw_catalog.hpp"

#include <cmath>

#include "agentplan/error.hpp"

namespace agentplan {

void DeviceClass::validate() const {
  auto positive = [&](double v, const char* field) {
    if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, "device '" + name + "': " + field + " must be > 0");
  };
  if (name.empty()) throw Error(ErrorCode::InvalidArgument, "device class with empty name");
  positive(capex_usd, "capex_usd");
  positive(mem_capacity_gb, "mem_capacity_gb");
  positive(mem_bandwidth_gbps_bytes, "mem_bandwidth_gbps_bytes");
  positive(tflops_fp16, "tflops_fp16");
  positive(scaleup_bw_gbps_bits, "scaleup_bw_gbps_bits");
  positive(scaleout_bw_gbps_bits, "scaleout_bw_gbps_bits");
  if (tflops_fp8) positive(*tflops_fp8, "tflops_fp8");
  if (tdp_watts) positive(*tdp_watts, "tdp_watts");
  if (op_cost_usd_per_hr) positive(*op_cost_usd_per_hr, "op_cost_usd_per_hr");
  if (gp_compute_units) positive(*gp_compute_units, "gp_compute_units");
  if (max_per_chassis < 1) throw Error(ErrorCode::InvalidArgument, "device '" + name + "': max_per_chassis must be >= 1");
}

void CostModelParams::validate() const {
  if (!(amortization_years > 0.0) || !(energy_usd_per_kwh > 0.0) || !(hours_per_month > 0.0) ||
      !(utilization_fraction > 0.0) || !(annual_interest_rate >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "cost model parameters must be positive (rate >= 0)");
  }
}

const DeviceClass* HardwareCatalog::find(std::string_view name) const noexcept {
  for (const auto& c : classes) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const DeviceClass& HardwareCatalog::at(std::string_view name) const {
  if (const auto* c = find(name)) return *c;
  throw Error(ErrorCode::UnknownClass, "no device class named '" + std::string(name) + "'");
}

void HardwareCatalog::validate() const {
  cost_params.validate();
  std::set<std::string> names;
  for (const auto& c : classes) {
    c.validate();
    if (!names.insert(c.name).second) throw Error(ErrorCode::DuplicateId, "device class '" + c.name + "' listed twice");
  }
}

HardwareCatalog builtin_catalog() {
  // Cost, memory, bandwidth, FP16 TFLOPs and operating cost are the published
  // table values. FP8 (2x FP16 where supported), TDP, interconnect bandwidths
  // and chassis size come from vendor data sheets and are marked assumed.
  auto make = [](std::string name, std::string vendor, double capex, double mem, double bw, double fp16,
                 std::optional<double> fp8, double tdp, double scaleup, double scaleout, double opex) {
    DeviceClass d;
    d.name = std::move(name);
    d.vendor = std::move(vendor);
    d.capex_usd = capex;
    d.mem_capacity_gb = mem;
    d.mem_bandwidth_gbps_bytes = bw;
    d.tflops_fp16 = fp16;
    d.tflops_fp8 = fp8;
    d.tdp_watts = tdp;
    d.scaleup_bw_gbps_bits = scaleup;
    d.scaleout_bw_gbps_bits = scaleout;
    d.op_cost_usd_per_hr = opex;
    d.max_per_chassis = 8;
    d.assumed = {"tdp_watts", "scaleup_bw_gbps_bits", "scaleout_bw_gbps_bits", "max_per_chassis"};
    if (fp8) d.assumed.insert("tflops_fp8");
    return d;
  };
  HardwareCatalog cat;
  cat.classes = {
      make("A40", "NVIDIA", 3000, 48, 696, 75, std::nullopt, 300, 512, 200, 0.15),
      make("A100", "NVIDIA", 8000, 80, 2039, 322, std::nullopt, 400, 4800, 200, 0.25),
      make("Gaudi3", "Intel", 12500, 128, 3700, 1678, 2 * 1678.0, 900, 4200, 600, 0.49),
      make("MI300x", "AMD", 20000, 192, 5300, 1307, 2 * 1307.0, 750, 7168, 400, 0.52),
      make("H100", "NVIDIA", 25000, 80, 3350, 1979, 2 * 1979.0, 700, 7200, 400, 0.60),
      make("B200", "NVIDIA", 40000, 192, 8000, 2250, 2 * 2250.0, 1000, 14400, 400, 0.83),
  };
  return cat;
}

double annuity_payment(double principal, double monthly_rate, int months) {
  if (months < 1) throw Error(ErrorCode::InvalidArgument, "amortization needs at least one month");
  if (monthly_rate == 0.0) return principal / months;
  // growth - 1 computed with expm1 keeps precision as the rate approaches 0.
  const double log_growth = months * std::log1p(monthly_rate);
  const double growth = std::exp(log_growth);
  return principal * monthly_rate * growth / std::expm1(log_growth);
}

double hourly_cost(const DeviceClass& device, const CostModelParams& params) {
  if (device.op_cost_usd_per_hr) return *device.op_cost_usd_per_hr;
  if (!device.tdp_watts) {
    throw Error(ErrorCode::MissingTdp, "device '" + device.name + "' has neither an operating cost nor a TDP");
  }
  const int months = static_cast<int>(std::lround(params.amortization_years * 12.0));
  const double capital = annuity_payment(device.capex_usd, params.annual_interest_rate / 12.0, months) /
                         params.hours_per_month;
  const double energy = *device.tdp_watts / 1000.0 * params.energy_usd_per_kwh * params.utilization_fraction;
  return capital + energy;
}

std::string_view to_string(CostBasis basis) noexcept { return basis == CostBasis::Capex ? "capex" : "opex"; }

std::vector<MarginalCostRow> marginal_costs(const HardwareCatalog& catalog, CostBasis basis) {
  std::vector<MarginalCostRow> rows;
  for (const auto& d : catalog.classes) {
    const double cost = basis == CostBasis::Capex ? d.capex_usd : hourly_cost(d, catalog.cost_params);
    MarginalCostRow row;
    row.name = d.name;
    row.usd_per_gbps_bytes = cost / d.mem_bandwidth_gbps_bytes;
    row.usd_per_tflop_fp16 = cost / d.tflops_fp16;
    if (d.tflops_fp8) row.usd_per_tflop_fp8 = cost / *d.tflops_fp8;
    row.usd_per_gb = cost / d.mem_capacity_gb;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace agentplan
