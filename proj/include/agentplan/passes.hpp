#pragma once

/// @file passes.hpp
/// Graph rewrites that lower authored agent graphs to schedulable tasks.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agentplan/graph.hpp"
#include "agentplan/perf_model.hpp"

namespace agentplan {

struct PassReport {
  std::string pass;
  int nodes_added = 0;
  int nodes_removed = 0;
  int edges_added = 0;
  int edges_removed = 0;
  std::vector<std::string> notes;
};

struct PassResult {
  TaskGraph graph;
  PassReport report;
};

/// Counts computed from the id sets of `before` and `after`.
PassReport diff_report(std::string pass, const TaskGraph& before, const TaskGraph& after);

/// ModelExec X becomes X.prefill -> X.decode joined by a kv_store edge sized
/// for the prompt at batch 1. Needs payload keys model, in_tokens, out_tokens.
PassResult split_llm(const TaskGraph& g, const ModelCatalog& models);

/// ToolCall T becomes T.lookup (MemoryLookup) -> T.compute (GeneralCompute).
/// Latency, network and disk demand go to the lookup; the rest to compute.
PassResult split_tool(const TaskGraph& g);

/// Merges maximal chains whose nodes share a device class into the chain head.
/// Ports, agents, branch points and loop edges are never fused. The fused
/// graph's ids are a subset of the input's, so `placement` restricted to them
/// remains a valid placement.
PassResult fuse_colocated(const TaskGraph& g, const std::map<std::string, std::string>& placement);

struct PipelineOptions {
  ModelCatalog models;
  /// Required only when the pipeline names fuse_colocated.
  std::optional<std::map<std::string, std::string>> placement;
};

struct PipelineResult {
  TaskGraph graph;
  std::vector<PassReport> reports;
};

/// Pass names: flatten, unroll, split_llm, split_tool, fuse_colocated.
/// Throws Error(InvalidArgument) on an unknown name.
PipelineResult run_pipeline(const TaskGraph& g, const std::vector<std::string>& passes, const PipelineOptions& opts);

/// Splits "a,b,c" and trims blanks.
std::vector<std::string> parse_pass_list(const std::string& text);

}  // namespace agentplan
