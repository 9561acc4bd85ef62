#include "agentplan/graph_json.hpp"

#include <cmath>
#include <limits>

#include "agentplan/error.hpp"

namespace agentplan {

using nlohmann::json;

void to_json(json& j, const ResourceVector& r) {
  j = json{{"hp_compute_tflops", r.hp_compute_tflops},
           {"mem_bandwidth_gbps_bytes", r.mem_bandwidth_gbps_bytes},
           {"mem_capacity_gb", r.mem_capacity_gb},
           {"net_bandwidth_gbps_bits", r.net_bandwidth_gbps_bits},
           {"disk_capacity_gb", r.disk_capacity_gb},
           {"gp_compute_units", r.gp_compute_units}};
  if (r.hp_compute_fp8_tflops) j["hp_compute_fp8_tflops"] = *r.hp_compute_fp8_tflops;
}

void from_json(const json& j, ResourceVector& r) {
  r = ResourceVector{};
  r.hp_compute_tflops = j.value("hp_compute_tflops", 0.0);
  if (j.contains("hp_compute_fp8_tflops")) r.hp_compute_fp8_tflops = j.at("hp_compute_fp8_tflops").get<double>();
  r.mem_bandwidth_gbps_bytes = j.value("mem_bandwidth_gbps_bytes", 0.0);
  r.mem_capacity_gb = j.value("mem_capacity_gb", 0.0);
  r.net_bandwidth_gbps_bits = j.value("net_bandwidth_gbps_bits", 0.0);
  r.disk_capacity_gb = j.value("disk_capacity_gb", 0.0);
  r.gp_compute_units = j.value("gp_compute_units", 0.0);
}

json attributes_to_json(const Attributes& attrs) {
  json j = json::object();
  for (const auto& [key, value] : attrs) {
    std::visit([&](const auto& v) { j[key] = v; }, value);
  }
  return j;
}

Attributes attributes_from_json(const json& j) {
  Attributes attrs;
  for (const auto& [key, value] : j.items()) {
    if (value.is_boolean()) {
      attrs[key] = value.get<bool>();
    } else if (value.is_number_integer()) {
      attrs[key] = value.get<std::int64_t>();
    } else if (value.is_number_float()) {
      attrs[key] = value.get<double>();
    } else if (value.is_string()) {
      attrs[key] = value.get<std::string>();
    } else {
      throw Error(ErrorCode::InvalidArgument, "payload value for '" + key + "' must be a scalar");
    }
  }
  return attrs;
}

void to_json(json& j, const TaskNode& n) {
  j = json{{"id", n.id},
           {"kind", std::string(to_string(n.kind))},
           {"demand", n.demand},
           {"static_latency_ms", n.static_latency_ms},
           {"payload", attributes_to_json(n.payload)}};
  if (n.subgraph) j["subgraph"] = *n.subgraph;
}

void from_json(const json& j, TaskNode& n) {
  n = TaskNode{};
  n.id = j.at("id").get<std::string>();
  auto kind_name = j.at("kind").get<std::string>();
  auto kind = parse_task_kind(kind_name);
  if (!kind) throw Error(ErrorCode::UnknownKind, "unknown task kind '" + kind_name + "'");
  n.kind = *kind;
  if (j.contains("demand")) n.demand = j.at("demand").get<ResourceVector>();
  n.static_latency_ms = j.value("static_latency_ms", 0.0);
  if (j.contains("payload")) n.payload = attributes_from_json(j.at("payload"));
  if (j.contains("subgraph")) n.subgraph = std::make_shared<const TaskGraph>(j.at("subgraph").get<TaskGraph>());
}

void to_json(json& j, const GraphEdge& e) {
  j = json{{"src", e.src},
           {"dst", e.dst},
           {"transfer_bytes", e.transfer_bytes},
           {"mode", std::string(to_string(e.mode))},
           {"kind", std::string(to_string(e.kind))}};
  if (e.loop_annotation) j["loop_annotation"] = *e.loop_annotation;
}

void from_json(const json& j, GraphEdge& e) {
  e = GraphEdge{};
  e.src = j.at("src").get<std::string>();
  e.dst = j.at("dst").get<std::string>();
  e.transfer_bytes = j.value("transfer_bytes", std::uint64_t{0});
  auto mode = j.value("mode", std::string("sync"));
  if (mode == "sync") {
    e.mode = EdgeMode::Sync;
  } else if (mode == "async") {
    e.mode = EdgeMode::Async;
  } else {
    throw Error(ErrorCode::InvalidArgument, "edge mode must be sync or async");
  }
  auto kind = j.value("kind", std::string("data"));
  if (kind == "data") {
    e.kind = EdgeKind::Data;
  } else if (kind == "kv_store") {
    e.kind = EdgeKind::KvStore;
  } else {
    throw Error(ErrorCode::InvalidArgument, "edge kind must be data or kv_store");
  }
  if (j.contains("loop_annotation") && !j.at("loop_annotation").is_null()) {
    e.loop_annotation = j.at("loop_annotation").get<int>();
  }
}

void to_json(json& j, const TaskGraph& g) {
  j = json{{"name", g.name}, {"nodes", g.nodes}, {"edges", g.edges}, {"inputs", g.inputs}, {"outputs", g.outputs}};
}

void from_json(const json& j, TaskGraph& g) {
  g = TaskGraph{};
  g.name = j.value("name", std::string("g"));
  g.nodes = j.at("nodes").get<std::vector<TaskNode>>();
  g.edges = j.value("edges", std::vector<GraphEdge>{});
  g.inputs = j.value("inputs", std::vector<std::string>{});
  g.outputs = j.value("outputs", std::vector<std::string>{});
}

void to_json(json& j, const SlaSpec& s) {
  j = json{{"mode", std::string(to_string(s.mode))}, {"scope", std::string(to_string(s.scope))}};
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  put("ttft_ms", s.ttft_ms);
  put("tbt_ms", s.tbt_ms);
  put("e2e_ms", s.e2e_ms);
  put("min_throughput", s.min_throughput);
  // JSON has no infinity; a hard SLA is written as null.
  if (s.hard()) {
    j["lambda_per_ms"] = nullptr;
  } else {
    j["lambda_per_ms"] = s.lambda_per_ms;
  }
}

void from_json(const json& j, SlaSpec& s) {
  s = SlaSpec{};
  auto mode = j.value("mode", std::string("throughput"));
  s.mode = mode == "latency" ? SlaMode::Latency : SlaMode::Throughput;
  if (mode != "latency" && mode != "throughput") throw Error(ErrorCode::InvalidArgument, "unknown SLA mode " + mode);
  auto scope = j.value("scope", std::string("end_to_end"));
  if (scope != "per_task" && scope != "end_to_end") throw Error(ErrorCode::InvalidArgument, "unknown SLA scope " + scope);
  s.scope = scope == "per_task" ? SlaScope::PerTask : SlaScope::EndToEnd;
  auto get = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
  };
  s.ttft_ms = get("ttft_ms");
  s.tbt_ms = get("tbt_ms");
  s.e2e_ms = get("e2e_ms");
  s.min_throughput = get("min_throughput");
  s.lambda_per_ms = get("lambda_per_ms").value_or(std::numeric_limits<double>::infinity());
}

void to_json(json& j, const Diagnostic& d) {
  j = json{{"code", d.code}, {"subject", d.subject}, {"message", d.message}};
}

}  // namespace agentplan
