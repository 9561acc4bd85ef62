#pragma once

/// @file simulator.hpp
/// Discrete-event execution of a PlacementPlan: one server pool per device
/// class, one serialized link per ordered class pair. Both serve the oldest
/// request first and are work conserving.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "agentplan/planner.hpp"
#include "json.hpp"

namespace agentplan {

enum class SimEventKind { TransferEnd, TaskEnd, RequestArrival, TransferStart, TaskStart };

std::string_view to_string(SimEventKind kind) noexcept;

/// Events order by (time, kind, request, node, seq). Completions sort before
/// arrivals and starts at the same instant so freed servers are reused.
struct SimEvent {
  double time_ms = 0.0;
  SimEventKind kind = SimEventKind::RequestArrival;
  std::int64_t request = 0;
  /// Task id, or "src->dst" for transfers.
  std::string node;
  std::int64_t seq = 0;

  bool operator<(const SimEvent& other) const;
};

/// "interval:<ms>", "poisson:<requests per second>" or "burst:<n>" (n
/// simultaneous arrivals at t = 0).
struct ArrivalSpec {
  enum class Kind { Interval, Poisson, Burst };
  Kind kind = Kind::Burst;
  double value = 1.0;

  static ArrivalSpec parse(const std::string& text);
  std::string to_string() const;
};

struct SimOptions {
  /// Parallel servers per device class; classes absent here get the largest
  /// replica count among their tasks.
  std::map<std::string, int> servers;
  bool record_events = false;
};

struct RequestRecord {
  std::int64_t id = 0;
  double arrival_ms = 0.0;
  bool completed = false;
  double e2e_ms = 0.0;
  /// Completion of the first prefill (or first task) relative to arrival.
  double ttft_ms = 0.0;
  std::vector<double> tbt_ms;
};

struct SimReport {
  double duration_ms = 0.0;
  std::uint64_t seed = 0;
  std::string arrivals;
  std::int64_t admitted = 0;
  std::int64_t completed = 0;
  std::int64_t in_flight = 0;
  std::vector<RequestRecord> requests;
  std::map<std::string, double> device_utilization;
  std::map<std::string, double> link_utilization;
  double requests_per_sec = 0.0;
  double tokens_per_sec = 0.0;
  /// Bucket upper edges in ms; the last bucket is unbounded.
  std::vector<double> queue_wait_edges_ms = {1.0, 10.0, 100.0, 1000.0};
  std::map<std::string, std::vector<std::int64_t>> queue_wait_histogram;
  std::vector<SimEvent> events;
};

/// Throws InvalidPlan on an inconsistent plan and ZeroDuration when
/// duration_ms <= 0.
SimReport simulate_plan(const PlacementPlan& plan, const ArrivalSpec& arrivals, double duration_ms,
                        std::uint64_t seed, const SimOptions& opts = {});

struct Deviation {
  double ttft_rel = 0.0;
  double tbt_rel = 0.0;
  double e2e_rel = 0.0;
  /// Requests/s at the slowest pool or link.
  double bottleneck_rps = 0.0;
  double throughput_rel = 0.0;
  std::vector<std::string> flagged;
};

/// Largest relative deviation over completed requests of simulated vs
/// predicted ttft/tbt/e2e; entries above `tolerance` are flagged.
Deviation compare_to_analytic(const SimReport& report, const PlacementPlan& plan, double tolerance = 0.01,
                              const SimOptions& opts = {});

/// Requests/s sustained by the slowest device pool or link.
double bottleneck_rps(const PlacementPlan& plan, const SimOptions& opts = {});

nlohmann::json sim_report_to_json(const SimReport& report);
nlohmann::json deviation_to_json(const Deviation& d);

}  // namespace agentplan
