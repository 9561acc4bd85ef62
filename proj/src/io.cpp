#include "agentplan/io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "agentplan/error.hpp"
#include "agentplan/graph_json.hpp"

namespace agentplan {

using nlohmann::json;

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_inf(const json& j) { return j.is_null() ? kInf : j.get<double>(); }

namespace {

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
void get_optional(const json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
  else out.reset();
}

}  // namespace

void to_json(json& j, const DeviceClass& d) {
  j = json{{"name", d.name},
           {"vendor", d.vendor},
           {"capex_usd", d.capex_usd},
           {"mem_capacity_gb", d.mem_capacity_gb},
           {"mem_bandwidth_gbps_bytes", d.mem_bandwidth_gbps_bytes},
           {"tflops_fp16", d.tflops_fp16},
           {"scaleup_bw_gbps_bits", d.scaleup_bw_gbps_bits},
           {"scaleout_bw_gbps_bits", d.scaleout_bw_gbps_bits},
           {"max_per_chassis", d.max_per_chassis},
           {"assumed", d.assumed}};
  put_optional(j, "tflops_fp8", d.tflops_fp8);
  put_optional(j, "tdp_watts", d.tdp_watts);
  put_optional(j, "op_cost_usd_per_hr", d.op_cost_usd_per_hr);
  put_optional(j, "gp_compute_units", d.gp_compute_units);
}

void from_json(const json& j, DeviceClass& d) {
  d = DeviceClass{};
  d.name = j.at("name").get<std::string>();
  d.vendor = j.value("vendor", std::string());
  d.capex_usd = j.at("capex_usd").get<double>();
  d.mem_capacity_gb = j.at("mem_capacity_gb").get<double>();
  d.mem_bandwidth_gbps_bytes = j.at("mem_bandwidth_gbps_bytes").get<double>();
  d.tflops_fp16 = j.at("tflops_fp16").get<double>();
  d.scaleup_bw_gbps_bits = j.at("scaleup_bw_gbps_bits").get<double>();
  d.scaleout_bw_gbps_bits = j.at("scaleout_bw_gbps_bits").get<double>();
  d.max_per_chassis = j.value("max_per_chassis", 8);
  if (j.contains("assumed")) d.assumed = j.at("assumed").get<std::set<std::string>>();
  get_optional(j, "tflops_fp8", d.tflops_fp8);
  get_optional(j, "tdp_watts", d.tdp_watts);
  get_optional(j, "op_cost_usd_per_hr", d.op_cost_usd_per_hr);
  get_optional(j, "gp_compute_units", d.gp_compute_units);
}

void to_json(json& j, const CostModelParams& c) {
  j = json{{"amortization_years", c.amortization_years},
           {"annual_interest_rate", c.annual_interest_rate},
           {"energy_usd_per_kwh", c.energy_usd_per_kwh},
           {"hours_per_month", c.hours_per_month},
           {"utilization_fraction", c.utilization_fraction}};
}

void from_json(const json& j, CostModelParams& c) {
  c = CostModelParams{};
  c.amortization_years = j.value("amortization_years", c.amortization_years);
  c.annual_interest_rate = j.value("annual_interest_rate", c.annual_interest_rate);
  c.energy_usd_per_kwh = j.value("energy_usd_per_kwh", c.energy_usd_per_kwh);
  c.hours_per_month = j.value("hours_per_month", c.hours_per_month);
  c.utilization_fraction = j.value("utilization_fraction", c.utilization_fraction);
}

void to_json(json& j, const HardwareCatalog& c) { j = json{{"classes", c.classes}, {"cost_params", c.cost_params}}; }

void from_json(const json& j, HardwareCatalog& c) {
  c = HardwareCatalog{};
  if (j.is_array()) {
    c.classes = j.get<std::vector<DeviceClass>>();
  } else {
    c.classes = j.at("classes").get<std::vector<DeviceClass>>();
    if (j.contains("cost_params")) c.cost_params = j.at("cost_params").get<CostModelParams>();
  }
  c.validate();
}

void to_json(json& j, const ModelSpec& m) {
  j = json{{"name", m.name},
           {"params_billion", m.params_billion},
           {"n_layers", m.n_layers},
           {"d_model", m.d_model},
           {"n_heads", m.n_heads},
           {"n_kv_heads", m.n_kv_heads},
           {"bytes_per_element", m.bytes_per_element},
           {"precision", m.precision}};
}

void from_json(const json& j, ModelSpec& m) {
  m = ModelSpec{};
  m.name = j.at("name").get<std::string>();
  m.params_billion = j.at("params_billion").get<double>();
  m.n_layers = j.at("n_layers").get<int>();
  m.d_model = j.at("d_model").get<int>();
  m.n_heads = j.at("n_heads").get<int>();
  m.n_kv_heads = j.at("n_kv_heads").get<int>();
  m.bytes_per_element = j.value("bytes_per_element", 2);
  m.precision = j.value("precision", std::string(m.bytes_per_element == 1 ? "fp8" : "fp16"));
  m.validate();
}

void to_json(json& j, const ModelCatalog& c) { j = c.models; }

void from_json(const json& j, ModelCatalog& c) {
  c.models = (j.is_array() ? j : j.at("models")).get<std::vector<ModelSpec>>();
}

namespace {

json matrix_to_json(const std::vector<std::vector<double>>& m) {
  json out = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (double v : row) r.push_back(finite_or_null(v));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::vector<double>> matrix_from_json(const json& j) {
  std::vector<std::vector<double>> m;
  for (const auto& row : j) {
    std::vector<double> r;
    for (const auto& v : row) r.push_back(number_or_inf(v));
    m.push_back(std::move(r));
  }
  return m;
}

int index_of(const std::vector<std::string>& names, const json& ref, const char* what) {
  if (ref.is_number_integer()) return ref.get<int>();
  const auto name = ref.get<std::string>();
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == name) return static_cast<int>(k);
  }
  throw Error(ErrorCode::UnknownReference, std::string(what) + " '" + name + "' is not declared");
}

}  // namespace

void to_json(json& j, const AssignmentProblem& p) {
  j = json{{"schema", "problem/v1"},
           {"tasks", p.tasks},
           {"classes", p.classes},
           {"mode", std::string(to_string(p.mode))},
           {"gamma", p.gamma},
           {"sla", p.sla},
           {"perf", matrix_to_json(p.perf)},
           {"cap", matrix_to_json(p.cap)},
           {"unit_cost", matrix_to_json(p.unit_cost)},
           {"static_latency", p.static_latency},
           {"pipeline_cost", matrix_to_json(p.pipeline_cost)},
           {"sync_cost", matrix_to_json(p.sync_cost)}};
  json resources = json::array();
  for (const auto& r : p.resources) resources.push_back({{"name", r.name}, {"timed", r.timed}});
  j["resources"] = std::move(resources);
  json theta = json::array();
  for (const auto& per_task : p.theta) theta.push_back(matrix_to_json(per_task));
  j["theta"] = std::move(theta);
  if (!p.allowed.empty()) j["allowed"] = p.allowed;
  json edges = json::array();
  for (const auto& e : p.edges) {
    json comm = json::array();
    for (const auto& row : e.comm) {
      json r = json::array();
      for (const auto& c : row) r.push_back({{"latency_ms", c.latency_ms}, {"cost_usd", c.cost_usd}});
      comm.push_back(std::move(r));
    }
    edges.push_back({{"src", p.tasks[e.src]}, {"dst", p.tasks[e.dst]}, {"comm", std::move(comm)}});
  }
  j["edges"] = std::move(edges);
}

void from_json(const json& j, AssignmentProblem& p) {
  p = AssignmentProblem{};
  p.tasks = j.at("tasks").get<std::vector<std::string>>();
  p.classes = j.at("classes").get<std::vector<std::string>>();
  for (const auto& r : j.at("resources")) {
    if (r.is_string()) p.resources.push_back({r.get<std::string>(), true});
    else p.resources.push_back({r.at("name").get<std::string>(), r.value("timed", true)});
  }
  for (const auto& per_task : j.at("theta")) p.theta.push_back(matrix_from_json(per_task));
  p.perf = matrix_from_json(j.at("perf"));
  p.unit_cost = matrix_from_json(j.at("unit_cost"));
  if (j.contains("cap")) p.cap = matrix_from_json(j.at("cap"));
  if (j.contains("static_latency")) p.static_latency = j.at("static_latency").get<std::vector<double>>();
  if (j.contains("pipeline_cost")) p.pipeline_cost = matrix_from_json(j.at("pipeline_cost"));
  if (j.contains("sync_cost")) p.sync_cost = matrix_from_json(j.at("sync_cost"));
  p.gamma = j.value("gamma", 1.0);
  if (j.contains("sla")) p.sla = j.at("sla").get<SlaSpec>();
  const auto mode = j.value("mode", std::string("discrete"));
  if (mode != "discrete" && mode != "fractional") throw Error(ErrorCode::InvalidArgument, "unknown mode " + mode);
  p.mode = mode == "discrete" ? SolveMode::Discrete : SolveMode::Fractional;
  if (j.contains("allowed")) p.allowed = j.at("allowed").get<std::vector<std::vector<bool>>>();
  if (j.contains("edges")) {
    for (const auto& je : j.at("edges")) {
      ProblemEdge e;
      e.src = index_of(p.tasks, je.at("src"), "task");
      e.dst = index_of(p.tasks, je.at("dst"), "task");
      if (je.contains("comm")) {
        for (const auto& row : je.at("comm")) {
          std::vector<EdgeComm> r;
          for (const auto& c : row) r.push_back({c.value("latency_ms", 0.0), c.value("cost_usd", 0.0)});
          e.comm.push_back(std::move(r));
        }
      }
      p.edges.push_back(std::move(e));
    }
  }
  p.fill_defaults();
  p.validate();
}

json assignment_to_json(const AssignmentProblem& p, const Assignment& a) {
  json j{{"objective", a.objective},
         {"cost", a.cost},
         {"penalty", a.penalty},
         {"e2e_ms", a.e2e_ms},
         {"feasible", a.feasible},
         {"x", a.x},
         {"slack", a.slack},
         {"task_ms", a.task_ms},
         {"stats", {{"nodes_explored", a.stats.nodes_explored}, {"iterations", a.stats.iterations}}}};
  const auto choice = a.choice();
  if (std::all_of(choice.begin(), choice.end(), [](int c) { return c >= 0; })) {
    json m = json::object();
    for (std::size_t i = 0; i < choice.size(); ++i) m[p.tasks[i]] = p.classes[choice[i]];
    j["choice"] = std::move(m);
  }
  return j;
}

void to_json(json& j, const LpStandardForm& lp) {
  json vars = json::array();
  for (const auto& v : lp.vars) {
    vars.push_back({{"name", v.name}, {"lower", v.lower}, {"upper", finite_or_null(v.upper)}});
  }
  json rows = json::array();
  for (const auto& r : lp.rows) {
    const char* sense = r.sense == RowSense::Le ? "<=" : r.sense == RowSense::Eq ? "=" : ">=";
    rows.push_back({{"name", r.name}, {"coeffs", r.coeffs}, {"sense", sense}, {"rhs", r.rhs}});
  }
  j = json{{"objective", lp.objective}, {"vars", std::move(vars)}, {"rows", std::move(rows)}};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SyntaxError, path + ": " + e.what());
  }
}

}  // namespace agentplan
