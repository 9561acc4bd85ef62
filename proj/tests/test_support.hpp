#pragma once

// Shared fixtures and hand-rolled generators for the test binaries.

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "agentplan/graph.hpp"
#include "agentplan/optimizer.hpp"

namespace agentplan::fixtures {

inline std::string data_path(const std::string& name) { return std::string(AGENTPLAN_DATA_DIR) + "/" + name; }

/// Prefill/decode instance written out by hand: one timed resource carrying
/// the profiled latency through static_latency, token counts as untimed
/// resources priced per token.
inline AssignmentProblem worked_example_problem() {
  AssignmentProblem p;
  p.tasks = {"prefill", "decode"};
  p.classes = {"HP", "CO"};
  p.resources = {{"work_ms", true}, {"prefill_tokens", false}, {"decode_tokens", false}};
  p.theta = {{{80, 1000, 0}, {130, 1000, 0}}, {{25, 0, 500}, {30, 0, 500}}};
  p.perf = {{1, 1, 1}, {1, 1, 1}};
  p.unit_cost = {{0, 0.00008, 0.00006}, {0, 0.00005, 0.00002}};
  p.sla.mode = SlaMode::Latency;
  p.sla.e2e_ms = 120.0;
  p.sla.scope = SlaScope::EndToEnd;
  ProblemEdge kv;
  kv.src = 0;
  kv.dst = 1;
  kv.comm.assign(2, std::vector<EdgeComm>(2));
  kv.comm[0][1] = {10.0, 1000 * 0.000005};
  p.edges.push_back(kv);
  p.mode = SolveMode::Discrete;
  p.fill_defaults();
  return p;
}

/// Random graph whose port lists already match what the text frontend
/// derives: typed Input nodes with no incoming edges, typed Output nodes with
/// no outgoing edges. Roughly one in five graphs carries an Agent node.
class GraphGenerator {
 public:
  explicit GraphGenerator(std::uint64_t seed) : rng_(seed) {}

  TaskGraph next(int max_inner = 7) {
    ++counter_;
    TaskGraph g;
    g.name = "g" + std::to_string(counter_);
    const int inner = uniform(1, max_inner);
    g.nodes.push_back(port("in", TaskKind::Input));
    if (coin(0.3)) g.nodes.push_back(port("in2", TaskKind::Input));
    for (int k = 0; k < inner; ++k) g.nodes.push_back(body_node(k));
    g.nodes.push_back(port("out", TaskKind::Output));
    const int n = static_cast<int>(g.nodes.size());
    const int first_inner = n - 1 - inner;
    // Spine keeps every node connected.
    for (int p = 0; p < first_inner; ++p) {
      g.edges.push_back(edge(g.nodes[p].id, g.nodes[uniform(first_inner, n - 2)].id));
    }
    for (int k = first_inner + 1; k < n; ++k) g.edges.push_back(edge(g.nodes[k - 1].id, g.nodes[k].id));
    // Extra forward edges between inner nodes.
    for (int a = first_inner; a < n - 1; ++a) {
      for (int b = a + 2; b < n - 1; ++b) {
        if (coin(0.25)) g.edges.push_back(edge(g.nodes[a].id, g.nodes[b].id));
      }
    }
    // Occasional annotated back-edge.
    if (inner >= 2 && coin(0.4)) {
      const int b = uniform(first_inner, n - 2);
      const int a = uniform(b, n - 2);
      if (a != b && !g.find_edge(g.nodes[a].id, g.nodes[b].id)) {
        GraphEdge e = edge(g.nodes[a].id, g.nodes[b].id);
        e.loop_annotation = uniform(1, 4);
        g.edges.push_back(e);
      }
    }
    for (const auto& nd : g.nodes) {
      if (nd.kind == TaskKind::Input) g.inputs.push_back(nd.id);
      if (nd.kind == TaskKind::Output) g.outputs.push_back(nd.id);
    }
    return normalize(g);
  }

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

 private:
  TaskNode port(const std::string& id, TaskKind kind) {
    TaskNode n;
    n.id = id;
    n.kind = kind;
    return n;
  }

  TaskNode body_node(int k) {
    static const TaskKind kinds[] = {TaskKind::ModelExec, TaskKind::ToolCall,       TaskKind::MemoryLookup,
                                     TaskKind::KvStore,   TaskKind::GeneralCompute, TaskKind::ControlFlow,
                                     TaskKind::ObservationStore};
    static const char* names[] = {"llm", "tool", "mem", "kv", "stt", "route", "obs"};
    const int pick = uniform(0, 6);
    TaskNode n;
    n.id = std::string(names[pick]) + (coin(0.3) ? ".part" : "") + "_" + std::to_string(k);
    n.kind = kinds[pick];
    if (coin(0.5)) n.static_latency_ms = uniform(0, 400) / 4.0;
    if (coin(0.4)) n.demand.hp_compute_tflops = uniform(1, 100) / 10.0;
    if (coin(0.2)) n.demand.hp_compute_fp8_tflops = uniform(1, 100) / 20.0;
    if (coin(0.3)) n.demand.mem_capacity_gb = uniform(1, 64);
    if (coin(0.2)) n.demand.gp_compute_units = 0.1 * uniform(1, 9);
    if (n.kind == TaskKind::ModelExec) {
      n.payload["model"] = std::string("llama3-8b-fp16");
      n.payload["in_tokens"] = std::int64_t{uniform(1, 4096)};
      n.payload["out_tokens"] = std::int64_t{uniform(1, 1024)};
    }
    if (n.kind == TaskKind::ToolCall) n.payload["response_bytes"] = std::int64_t{uniform(0, 1 << 20)};
    if (coin(0.3)) n.payload["note"] = std::string(coin(0.5) ? "say \"hi\"\n\tthen \\ stop" : "plain");
    if (coin(0.2)) n.payload["cached"] = coin(0.5);
    if (coin(0.2)) n.payload["ratio"] = uniform(-1000, 1000) / 7.0;
    if (coin(0.2)) {
      n.kind = TaskKind::Agent;
      n.payload.erase("model");
      n.subgraph = std::make_shared<const TaskGraph>(nested(n.id));
    }
    return n;
  }

  TaskGraph nested(const std::string& owner) {
    TaskGraph s;
    s.name = "sub_" + std::to_string(counter_) + "_" + std::to_string(nested_++);
    s.nodes.push_back(port("sin", TaskKind::Input));
    TaskNode work;
    work.id = "step";
    work.kind = TaskKind::GeneralCompute;
    work.static_latency_ms = uniform(1, 50);
    work.payload["owner"] = owner;
    s.nodes.push_back(work);
    s.nodes.push_back(port("sout", TaskKind::Output));
    s.edges.push_back(edge("sin", "step"));
    s.edges.push_back(edge("step", "sout"));
    s.inputs = {"sin"};
    s.outputs = {"sout"};
    return normalize(s);
  }

  GraphEdge edge(const std::string& a, const std::string& b) {
    GraphEdge e;
    e.src = a;
    e.dst = b;
    if (coin(0.3)) e.transfer_bytes = static_cast<std::uint64_t>(uniform(1, 1 << 30));
    if (coin(0.15)) e.mode = EdgeMode::Async;
    if (coin(0.1)) e.kind = EdgeKind::KvStore;
    return e;
  }

  std::mt19937_64 rng_;
  int counter_ = 0;
  int nested_ = 0;
};

}  // namespace agentplan::fixtures
