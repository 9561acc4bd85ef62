#pragma once

/// @file perf_model.hpp
/// Analytic roofline models for LLM prefill and decode, KV-cache sizing,
/// disaggregation bandwidth and parallelism overheads.
///
/// FLOPs follow the dense 2 * params * tokens model. Weights and KV cache are
/// sharded across tensor-parallel ranks; pipeline stages divide layers and add a
/// per-boundary activation transfer.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "agentplan/hw_catalog.hpp"

namespace agentplan {

struct ModelSpec {
  std::string name;
  double params_billion = 0.0;
  int n_layers = 0;
  int d_model = 0;
  int n_heads = 0;
  int n_kv_heads = 0;
  /// 2 for FP16, 1 for FP8.
  int bytes_per_element = 2;
  std::string precision = "fp16";

  double weight_bytes() const noexcept { return params_billion * 1e9 * bytes_per_element; }
  void validate() const;
};

struct ModelCatalog {
  std::vector<ModelSpec> models;

  const ModelSpec* find(std::string_view name) const noexcept;
  /// Throws Error(UnknownModel).
  const ModelSpec& at(std::string_view name) const;
};

/// LLaMA 3 8B and 70B, each in FP16 and FP8.
ModelCatalog builtin_models();

struct WorkloadShape {
  std::int64_t isl_tokens = 0;
  std::int64_t osl_tokens = 0;
  std::int64_t batch_size = 1;
};

struct ParallelismConfig {
  int tp_degree = 1;
  int pp_degree = 1;
  int replicas = 1;

  int devices() const noexcept { return tp_degree * pp_degree; }
  bool operator==(const ParallelismConfig&) const = default;
};

enum class Bound { Compute, Memory, Network };

std::string_view to_string(Bound bound) noexcept;

struct PerfEstimate {
  double ttft_ms = 0.0;
  double tbt_ms = 0.0;
  double tokens_per_sec = 0.0;
  double flops_used = 0.0;
  double bytes_moved = 0.0;
  Bound bound = Bound::Compute;
  /// delta: tensor-parallel all-reduce time.
  double comm_overhead_ms = 0.0;
  /// d: pipeline-boundary activation transfer time.
  double pipeline_transfer_ms = 0.0;
};

struct PerfOptions {
  /// Fraction of peak memory bandwidth actually streamed.
  double mem_efficiency = 1.0;
  /// l: added once to TTFT.
  double static_latency_ms = 0.0;
};

/// 2 * layers * d_model * (kv_heads / heads) * isl * bs * bytes_per_element.
std::uint64_t kv_cache_bytes(const ModelSpec& m, std::int64_t isl, std::int64_t bs);

/// Gb/s needed to ship one KV cache per TTFT from each prefill device.
double peak_egress_gbps(double kv_bytes, double ttft_ms, int n_prefill_gpu);
/// Gb/s needed to receive one KV cache per TBT on each decode device.
double peak_ingress_gbps(double kv_bytes, double tbt_ms, int n_decode_gpu);

/// Ring all-reduce time for one pass over `seq_tokens` tokens; 0 when tp = 1.
double comm_overhead_ms(const ModelSpec& m, const WorkloadShape& shape, const ParallelismConfig& par,
                        double link_gbps, std::int64_t seq_tokens);

PerfEstimate prefill_time_ms(const ModelSpec& m, const WorkloadShape& shape, const DeviceClass& device,
                             const ParallelismConfig& par, double mfu, const PerfOptions& opts = {});

/// Per-step decode estimate using the mean context isl + osl/2.
PerfEstimate decode_time_ms(const ModelSpec& m, const WorkloadShape& shape, const DeviceClass& device,
                            const ParallelismConfig& par, double mfu, const PerfOptions& opts = {});

/// Largest batch whose KV cache for isl + osl tokens fits next to the weights.
std::int64_t max_batch(const ModelSpec& m, const WorkloadShape& shape, const DeviceClass& device,
                       const ParallelismConfig& par);

/// Returned by max_batch when a sequence needs no KV cache at all.
inline constexpr std::int64_t kUnboundedBatch = 1 << 20;

}  // namespace agentplan
