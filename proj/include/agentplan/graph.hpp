#pragma once

/// @file graph.hpp
/// Agent workloads as directed task graphs.
///
/// Units are fixed across the project: milliseconds for time, GB = 1e9 bytes,
/// GB/s for memory bandwidth, Gb/s for network bandwidth.

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace agentplan {

enum class TaskKind {
  Input,
  Output,
  Agent,
  ModelExec,
  Prefill,
  Decode,
  ToolCall,
  MemoryLookup,
  KvStore,
  GeneralCompute,
  ControlFlow,
  ObservationStore,
};

/// Canonical lower_snake_case name (e.g. "model_exec").
std::string_view to_string(TaskKind kind) noexcept;
/// Accepts canonical names plus the aliases "llm" and "tool".
std::optional<TaskKind> parse_task_kind(std::string_view name) noexcept;

/// Per-task demand or per-device capacity along the hardware dimensions.
///
/// As a demand, throughput axes are amounts of work: TFLOP of compute, GB moved
/// through memory, Gb over the network, unit-seconds of CPU. Capacity axes
/// (memory, disk) are footprints in GB.
struct ResourceVector {
  double hp_compute_tflops = 0.0;
  std::optional<double> hp_compute_fp8_tflops;
  double mem_bandwidth_gbps_bytes = 0.0;
  double mem_capacity_gb = 0.0;
  double net_bandwidth_gbps_bits = 0.0;
  double disk_capacity_gb = 0.0;
  double gp_compute_units = 0.0;

  bool non_negative() const noexcept;
  bool is_zero() const noexcept;
  ResourceVector& operator+=(const ResourceVector& other);
  bool operator==(const ResourceVector&) const = default;
};

using AttrValue = std::variant<std::int64_t, double, std::string, bool>;
using Attributes = std::map<std::string, AttrValue>;

std::optional<double> attr_number(const Attributes& attrs, const std::string& key);
std::optional<std::string> attr_string(const Attributes& attrs, const std::string& key);

struct TaskGraph;

struct TaskNode {
  std::string id;
  TaskKind kind = TaskKind::GeneralCompute;
  ResourceVector demand;
  double static_latency_ms = 0.0;
  Attributes payload;
  /// Present exactly for Agent nodes.
  std::shared_ptr<const TaskGraph> subgraph;

  bool operator==(const TaskNode& other) const;
};

enum class EdgeMode { Sync, Async };
enum class EdgeKind { Data, KvStore };

std::string_view to_string(EdgeMode mode) noexcept;
std::string_view to_string(EdgeKind kind) noexcept;

struct GraphEdge {
  std::string src;
  std::string dst;
  std::uint64_t transfer_bytes = 0;
  EdgeMode mode = EdgeMode::Sync;
  EdgeKind kind = EdgeKind::Data;
  /// Set on loop-closing edges: the maximum number of loop iterations.
  std::optional<int> loop_annotation;

  bool operator==(const GraphEdge&) const = default;
};

using EdgeKey = std::pair<std::string, std::string>;

struct TaskGraph {
  std::string name = "g";
  std::vector<TaskNode> nodes;
  std::vector<GraphEdge> edges;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  const TaskNode* find(std::string_view id) const noexcept;
  TaskNode* find(std::string_view id) noexcept;
  bool contains(std::string_view id) const noexcept { return find(id) != nullptr; }
  const GraphEdge* find_edge(std::string_view src, std::string_view dst) const noexcept;

  std::vector<const GraphEdge*> in_edges(std::string_view id) const;
  std::vector<const GraphEdge*> out_edges(std::string_view id) const;

  bool operator==(const TaskGraph& other) const;
};

/// Nodes sorted into topological-then-lexicographic order, edges sorted by
/// (src, dst), port lists sorted. Two graphs are structurally equal iff their
/// normalized forms compare equal.
TaskGraph normalize(const TaskGraph& g);
bool structurally_equal(const TaskGraph& a, const TaskGraph& b);

/// Topological order over edges without a loop annotation; ties broken by id.
/// Throws Error(CyclicGraph) when those edges still form a cycle.
std::vector<std::string> topological_order(const TaskGraph& g);

struct Diagnostic {
  std::string code;
  std::string subject;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

std::vector<Diagnostic> validate_graph(const TaskGraph& g);

/// Replicates every annotated loop body k times; outermost loops first.
/// Copies are renamed "<id>#<iteration>". Entry edges keep targeting the first
/// copy and exit edges leave from the last copy.
TaskGraph unroll_cycles(const TaskGraph& g);

/// Longest path through the DAG. Node times come from `node_ms`; edge latencies
/// default to 0 when absent from `edge_ms`.
double critical_path_ms(const TaskGraph& g, const std::map<std::string, double>& node_ms,
                        const std::map<EdgeKey, double>& edge_ms = {});

/// Inlines every Agent node. Nested ids become "<agent>.<inner>"; edges into the
/// agent fan out to the nested inputs, edges out of it leave from the nested
/// outputs.
TaskGraph flatten_hierarchy(const TaskGraph& g);

/// Pairs (input, output) such that the output is reachable from the input.
std::set<EdgeKey> port_reachability(const TaskGraph& g);

enum class SlaMode { Latency, Throughput };
enum class SlaScope { PerTask, EndToEnd };

std::string_view to_string(SlaMode mode) noexcept;
std::string_view to_string(SlaScope scope) noexcept;

struct SlaSpec {
  SlaMode mode = SlaMode::Throughput;
  std::optional<double> ttft_ms;
  std::optional<double> tbt_ms;
  /// T_SLA.
  std::optional<double> e2e_ms;
  /// R: lower bound on the sum of per-task rates 1/t_i.
  std::optional<double> min_throughput;
  /// Slack penalty in $/ms; infinity makes every latency bound hard.
  double lambda_per_ms = std::numeric_limits<double>::infinity();
  SlaScope scope = SlaScope::EndToEnd;

  bool hard() const noexcept { return lambda_per_ms == std::numeric_limits<double>::infinity(); }
  /// Throws Error(InvalidArgument) on a violated invariant.
  void validate() const;
};

}  // namespace agentplan
