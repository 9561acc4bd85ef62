#pragma once

/// @file planner.hpp
/// Graph-level placement onto device classes and the prefill::decode TCO sweep.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agentplan/graph.hpp"
#include "agentplan/hw_catalog.hpp"
#include "agentplan/optimizer.hpp"
#include "agentplan/perf_model.hpp"
#include "json.hpp"

namespace agentplan {

struct TaskPlacement {
  std::string id;
  TaskKind kind = TaskKind::GeneralCompute;
  std::string device_class;
  ParallelismConfig par;
  double time_ms = 0.0;
  double cost_usd = 0.0;
};

struct PlannedTransfer {
  std::string src;
  std::string dst;
  std::uint64_t bytes = 0;
  double ms = 0.0;
  double cost_usd = 0.0;
};

struct PlacementPlan {
  /// "<prefill>::<decode>" when the graph has an LLM, else the classes joined
  /// by '+'.
  std::string label;
  /// Lowered graph the placement refers to; ports carry no placement.
  TaskGraph graph;
  std::vector<TaskPlacement> tasks;
  std::vector<PlannedTransfer> transfers;
  double ttft_ms = 0.0;
  double tbt_ms = 0.0;
  /// Critical path of the placed graph including transfers.
  double e2e_ms = 0.0;
  double tokens_per_sec = 0.0;
  /// Output tokens produced by one request.
  double tokens_per_request = 0.0;
  /// $ per request: task costs plus transfer costs.
  double cost_usd = 0.0;
  double cost_per_1m_tokens = 0.0;
  /// Optimizer objective (cost plus any slack penalty).
  double objective = 0.0;

  const TaskPlacement* find(std::string_view id) const noexcept;
};

nlohmann::json plan_to_json(const PlacementPlan& plan);
/// Throws Error(InvalidPlan) on a malformed document.
PlacementPlan plan_from_json(const nlohmann::json& j);

/// Measured times and costs that replace model-derived values. Keys are task
/// ids of the lowered graph and "src->dst" edge keys; inner keys are class
/// names (edges: "A->B" class pairs). Class pairs missing from a profiled edge
/// cost nothing.
struct PlanProfile {
  struct Entry {
    double time_ms = 0.0;
    double cost_usd = 0.0;
  };
  std::map<std::string, std::map<std::string, Entry>> tasks;
  std::map<std::string, std::map<std::string, EdgeComm>> transfers;
};

PlanProfile profile_from_json(const nlohmann::json& j);

struct PlanOptions {
  double prefill_mfu = 0.5;
  double decode_mfu = 0.5;
  double decode_mem_efficiency = 0.9;
  std::int64_t batch_size = 1;
  /// Fixed latency added to every cross-class transfer.
  double hop_latency_ms = 0.1;
  /// Passes applied before planning (skipped nodes are left as authored).
  std::vector<std::string> passes = {"flatten", "unroll", "split_llm", "split_tool"};
  std::optional<PlanProfile> profile;
  DiscreteOptions solver;
};

/// The assignment problem plan_graph solves, exposed for inspection. Port
/// nodes are not tasks.
AssignmentProblem build_plan_problem(const TaskGraph& lowered, const HardwareCatalog& catalog,
                                     const ModelCatalog& models, const SlaSpec& sla, const PlanOptions& opts,
                                     std::vector<std::vector<ParallelismConfig>>* parallelism = nullptr);

/// Lowers `g`, builds the discrete assignment problem and solves it.
/// Throws Infeasible (message names the binding constraint) or UnknownModel.
PlacementPlan plan_graph(const TaskGraph& g, const HardwareCatalog& catalog, const ModelCatalog& models,
                         const SlaSpec& sla, const PlanOptions& opts = {});

/// Plan for a bare assignment problem: tasks become a chain graph, and edge
/// communication becomes transfers.
PlacementPlan plan_from_problem(const AssignmentProblem& p, const Assignment& a);

// --- TCO sweep -------------------------------------------------------------

struct StageConfig {
  std::string device;
  ParallelismConfig par;
  std::int64_t batch_size = 0;
  /// ttft for prefill, tbt for decode.
  double latency_ms = 0.0;
  double requests_per_sec = 0.0;
  /// $/hr of one replica (all its devices).
  double usd_per_hr = 0.0;
  double usd_per_request = 0.0;
  bool feasible = false;
  std::string binding_constraint;
};

struct TcoRow {
  std::string label;
  std::string model;
  std::string precision;
  std::int64_t isl = 0;
  std::int64_t osl = 0;
  SlaMode sla_mode = SlaMode::Throughput;
  StageConfig prefill;
  StageConfig decode;
  int prefill_replicas = 0;
  int decode_replicas = 0;
  double tokens_per_sec = 0.0;
  double usd_per_hr = 0.0;
  double cost_per_token = 0.0;
  /// Output tokens/s per $/hr of the whole configuration.
  double tokens_per_sec_per_dollar = 0.0;
  double tco_ratio_vs_baseline = 0.0;
  double kv_transfer_ms = 0.0;
  double peak_egress_gbps = 0.0;
  double peak_ingress_gbps = 0.0;
  bool feasible = false;
  std::string binding_constraint;
};

struct SweepOptions {
  /// Empty means every ordered pair of catalog classes.
  std::vector<std::pair<std::string, std::string>> pairs;
  double prefill_mfu = 0.5;
  double decode_mfu = 0.5;
  double decode_mem_efficiency = 0.9;
  double rate_match_tolerance = 0.10;
  int max_pool = 64;
  std::vector<int> tp_choices = {1, 2, 4, 8};
  std::vector<int> pp_choices = {1, 2};
};

/// Parses "P::D" into its two class names. Throws InvalidArgument.
std::pair<std::string, std::string> parse_label(const std::string& label);
std::vector<std::pair<std::string, std::string>> parse_pairs(const std::string& text);

/// Cheapest SLA-feasible configuration of one stage on one device class.
StageConfig best_prefill(const ModelSpec& m, const WorkloadShape& shape, const DeviceClass& d, const SlaSpec& sla,
                         const CostModelParams& cost, const SweepOptions& opts);
StageConfig best_decode(const ModelSpec& m, const WorkloadShape& shape, const DeviceClass& d, const SlaSpec& sla,
                        const CostModelParams& cost, const SweepOptions& opts);

/// Smallest (np + nd) pool sizes whose request rates differ by at most `tol`
/// relative; the closest match within max_pool otherwise.
std::pair<int, int> rate_match(double prefill_rps, double decode_rps, double tol, int max_pool);

/// Rows sorted by ratio descending then label; infeasible rows last.
/// Throws BaselineInfeasible when the baseline pair is unknown or infeasible.
std::vector<TcoRow> sweep_pairs(const ModelSpec& m, const WorkloadShape& shape, const HardwareCatalog& catalog,
                                const SlaSpec& sla, const std::string& baseline, const SweepOptions& opts = {});

/// Sets tco_ratio_vs_baseline. Throws BaselineMissing when no feasible row
/// carries `baseline`.
std::vector<TcoRow> normalize_vs_baseline(std::vector<TcoRow> rows, const std::string& baseline);

nlohmann::json tco_row_to_json(const TcoRow& row);
std::string tco_rows_to_csv(const std::vector<TcoRow>& rows);

}  // namespace agentplan
