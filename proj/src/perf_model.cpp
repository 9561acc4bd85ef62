#include "agentplan/perf_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agentplan/error.hpp"

namespace agentplan {

void ModelSpec::validate() const {
  if (name.empty()) throw Error(ErrorCode::InvalidArgument, "model with empty name");
  if (!(params_billion > 0.0) || n_layers < 1 || d_model < 1 || n_heads < 1 || n_kv_heads < 1) {
    throw Error(ErrorCode::InvalidArgument, "model '" + name + "': sizes must be positive");
  }
  if (n_kv_heads > n_heads) throw Error(ErrorCode::InvalidArgument, "model '" + name + "': n_kv_heads > n_heads");
  if (d_model % n_heads != 0) throw Error(ErrorCode::InvalidArgument, "model '" + name + "': n_heads must divide d_model");
  if (bytes_per_element != 1 && bytes_per_element != 2) {
    throw Error(ErrorCode::InvalidArgument, "model '" + name + "': bytes_per_element must be 1 or 2");
  }
}

const ModelSpec* ModelCatalog::find(std::string_view name) const noexcept {
  for (const auto& m : models) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

const ModelSpec& ModelCatalog::at(std::string_view name) const {
  if (const auto* m = find(name)) return *m;
  throw Error(ErrorCode::UnknownModel, "no model named '" + std::string(name) + "'");
}

ModelCatalog builtin_models() {
  // Architecture constants from the public LLaMA 3 model cards.
  auto make = [](std::string name, double params, int layers, int d_model, int heads, int kv_heads, int bpe) {
    return ModelSpec{std::move(name), params, layers, d_model, heads, kv_heads, bpe, bpe == 1 ? "fp8" : "fp16"};
  };
  return ModelCatalog{{
      make("llama3-8b-fp16", 8, 32, 4096, 32, 8, 2),
      make("llama3-8b-fp8", 8, 32, 4096, 32, 8, 1),
      make("llama3-70b-fp16", 70, 80, 8192, 64, 8, 2),
      make("llama3-70b-fp8", 70, 80, 8192, 64, 8, 1),
  }};
}

std::string_view to_string(Bound bound) noexcept {
  switch (bound) {
    case Bound::Compute: return "compute";
    case Bound::Memory: return "memory";
    case Bound::Network: return "network";
  }
  return "compute";
}

std::uint64_t kv_cache_bytes(const ModelSpec& m, std::int64_t isl, std::int64_t bs) {
  if (isl < 0 || bs < 1) throw Error(ErrorCode::InvalidArgument, "kv_cache_bytes needs isl >= 0 and bs >= 1");
  // d_model * n_kv / n_heads is an integer because n_heads divides d_model.
  const auto kv_width = static_cast<std::uint64_t>(m.d_model / m.n_heads) * static_cast<std::uint64_t>(m.n_kv_heads);
  return 2ULL * static_cast<std::uint64_t>(m.n_layers) * kv_width * static_cast<std::uint64_t>(isl) *
         static_cast<std::uint64_t>(bs) * static_cast<std::uint64_t>(m.bytes_per_element);
}

namespace {

double required_gbps(double kv_bytes, double window_ms, int devices) {
  if (!(window_ms > 0.0) || devices < 1) {
    throw Error(ErrorCode::InvalidArgument, "bandwidth needs a positive time window and at least one device");
  }
  return 8.0 * kv_bytes / (window_ms / 1000.0 * devices) / 1e9;
}

double effective_tflops(const ModelSpec& m, const DeviceClass& device) {
  if (m.bytes_per_element == 1 && device.tflops_fp8) return *device.tflops_fp8;
  return device.tflops_fp16;
}

void check_parallelism(const ModelSpec& m, const DeviceClass& device, const ParallelismConfig& par) {
  if (par.tp_degree < 1 || par.pp_degree < 1 || par.replicas < 1) {
    throw Error(ErrorCode::InvalidArgument, "parallelism degrees must be >= 1");
  }
  if (par.tp_degree > device.max_per_chassis) {
    throw Error(ErrorCode::InvalidArgument, "tp " + std::to_string(par.tp_degree) + " exceeds the scale-up domain of " +
                                                device.name);
  }
  if (m.weight_bytes() / par.devices() > device.mem_capacity_gb * 1e9) {
    throw Error(ErrorCode::ModelTooLarge, m.name + " does not fit on " + std::to_string(par.devices()) + "x " +
                                              device.name);
  }
}

/// Activations crossing pp - 1 stage boundaries; stages spill to scale-out
/// links once the group outgrows one chassis.
double pipeline_ms(const ModelSpec& m, const DeviceClass& device, const ParallelismConfig& par, std::int64_t bs,
                   std::int64_t seq) {
  if (par.pp_degree <= 1) return 0.0;
  const double link = par.devices() <= device.max_per_chassis ? device.scaleup_bw_gbps_bits
                                                              : device.scaleout_bw_gbps_bits;
  const double bytes = static_cast<double>(par.pp_degree - 1) * static_cast<double>(bs) * static_cast<double>(seq) *
                       m.d_model * m.bytes_per_element;
  return bytes * 8.0 / (link * 1e9) * 1000.0;
}

Bound classify(double compute_ms, double mem_ms, double comm_ms) {
  if (comm_ms > compute_ms && comm_ms > mem_ms) return Bound::Network;
  return compute_ms >= mem_ms ? Bound::Compute : Bound::Memory;
}

}  // namespace

double peak_egress_gbps(double kv_bytes, double ttft_ms, int n_prefill_gpu) {
  return required_gbps(kv_bytes, ttft_ms, n_prefill_gpu);
}

double peak_ingress_gbps(double kv_bytes, double tbt_ms, int n_decode_gpu) {
  return required_gbps(kv_bytes, tbt_ms, n_decode_gpu);
}

double comm_overhead_ms(const ModelSpec& m, const WorkloadShape& shape, const ParallelismConfig& par,
                        double link_gbps, std::int64_t seq_tokens) {
  if (par.tp_degree < 1) throw Error(ErrorCode::InvalidArgument, "tp must be >= 1");
  if (par.tp_degree == 1) return 0.0;
  if (!(link_gbps > 0.0)) throw Error(ErrorCode::InvalidArgument, "link bandwidth must be > 0");
  const double tp = par.tp_degree;
  const double bytes = 2.0 * (tp - 1.0) / tp * m.n_layers * static_cast<double>(m.d_model) *
                       static_cast<double>(shape.batch_size) * static_cast<double>(seq_tokens) * m.bytes_per_element;
  return bytes * 8.0 / (link_gbps * 1e9) * 1000.0;
}

PerfEstimate prefill_time_ms(const ModelSpec& m, const WorkloadShape& shape, const DeviceClass& device,
                             const ParallelismConfig& par, double mfu, const PerfOptions& opts) {
  if (!(mfu > 0.0 && mfu <= 1.0)) throw Error(ErrorCode::InvalidArgument, "mfu must lie in (0, 1]");
  if (shape.batch_size < 1) throw Error(ErrorCode::InvalidArgument, "batch_size must be >= 1");
  check_parallelism(m, device, par);

  PerfEstimate est;
  const double tp = par.tp_degree;
  const double params = m.params_billion * 1e9;
  if (shape.isl_tokens > 0) {
    est.flops_used = 2.0 * params * static_cast<double>(shape.isl_tokens) * static_cast<double>(shape.batch_size);
    est.bytes_moved = m.weight_bytes() + static_cast<double>(kv_cache_bytes(m, shape.isl_tokens, shape.batch_size));
  }
  const double compute_ms = est.flops_used / (effective_tflops(m, device) * 1e12 * mfu * tp) * 1000.0;
  const double mem_ms = est.bytes_moved / tp / (device.mem_bandwidth_gbps_bytes * 1e9 * opts.mem_efficiency) * 1000.0;
  if (shape.isl_tokens > 0) {
    est.comm_overhead_ms = comm_overhead_ms(m, shape, par, device.scaleup_bw_gbps_bits, shape.isl_tokens);
    est.pipeline_transfer_ms = pipeline_ms(m, device, par, shape.batch_size, shape.isl_tokens);
  }
  est.bound = classify(compute_ms, mem_ms, est.comm_overhead_ms + est.pipeline_transfer_ms);
  est.ttft_ms = std::max(compute_ms, mem_ms) + est.comm_overhead_ms + est.pipeline_transfer_ms + opts.static_latency_ms;
  if (est.ttft_ms > 0.0) {
    est.tokens_per_sec =
        static_cast<double>(shape.isl_tokens) * static_cast<double>(shape.batch_size) * 1000.0 / est.ttft_ms;
  }
  return est;
}

PerfEstimate decode_time_ms(const ModelSpec& m, const WorkloadShape& shape, const DeviceClass& device,
                            const ParallelismConfig& par, double mfu, const PerfOptions& opts) {
  if (!(mfu > 0.0 && mfu <= 1.0)) throw Error(ErrorCode::InvalidArgument, "mfu must lie in (0, 1]");
  if (shape.batch_size < 1) throw Error(ErrorCode::InvalidArgument, "batch_size must be >= 1");
  check_parallelism(m, device, par);

  PerfEstimate est;
  const double tp = par.tp_degree;
  const double bs = static_cast<double>(shape.batch_size);
  const std::int64_t context = shape.isl_tokens + shape.osl_tokens / 2;
  est.flops_used = 2.0 * m.params_billion * 1e9 * bs;
  est.bytes_moved = m.weight_bytes() + static_cast<double>(kv_cache_bytes(m, context, shape.batch_size));
  const double compute_ms = est.flops_used / (effective_tflops(m, device) * 1e12 * mfu * tp) * 1000.0;
  const double mem_ms = est.bytes_moved / tp / (device.mem_bandwidth_gbps_bytes * 1e9 * opts.mem_efficiency) * 1000.0;
  est.comm_overhead_ms = comm_overhead_ms(m, shape, par, device.scaleup_bw_gbps_bits, 1);
  est.pipeline_transfer_ms = pipeline_ms(m, device, par, shape.batch_size, 1);
  est.bound = classify(compute_ms, mem_ms, est.comm_overhead_ms + est.pipeline_transfer_ms);
  est.tbt_ms = std::max(compute_ms, mem_ms) + est.comm_overhead_ms + est.pipeline_transfer_ms;
  est.tokens_per_sec = bs * 1000.0 / est.tbt_ms;
  return est;
}

std::int64_t max_batch(const ModelSpec& m, const WorkloadShape& shape, const DeviceClass& device,
                       const ParallelismConfig& par) {
  const double pooled = device.mem_capacity_gb * 1e9 * par.devices();
  const double residual = pooled - m.weight_bytes();
  if (residual < 0.0) return 0;
  const auto per_sequence = kv_cache_bytes(m, shape.isl_tokens + shape.osl_tokens, 1);
  if (per_sequence == 0) return kUnboundedBatch;
  return std::min<std::int64_t>(kUnboundedBatch,
                                static_cast<std::int64_t>(std::floor(residual / static_cast<double>(per_sequence))));
}

}  // namespace agentplan
