#pragma once

// Request generation: CSV trace ingestion mapped to the two AI classes,
// synthetic RAN-only background, and load scaling to a target rho.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "airan/model.hpp"

namespace airan {

struct UniformRange {
  double lo = 0.0;
  double hi = 0.0;
};

// Token -> work mapping shared by trace ingestion and the synthetic AI
// generator. Requests with output length strictly above the split quantile
// go to the large-AI service.
struct AiMapping {
  double split_quantile = 0.5;
  double large_flops_per_token = 4e10;
  double small_flops_per_token = 2e9;
  double kv_gb_per_output_token = 0.002;  // large-AI only
  double small_kv_gb_per_output_token = 0.0;
  double cpu_core_s_per_request = 0.0;
  UniformRange large_deadline{1.0, 5.0};
  UniformRange small_deadline{0.1, 0.5};
  int large_group = 0;
  int small_group = 1;
};

// Lognormal token-length generator standing in for an inference trace.
struct SyntheticAiConfig {
  double rate = 0.0;  // requests/s
  double prompt_median = 600.0;
  double prompt_sigma = 0.8;
  double output_median = 250.0;
  double output_sigma = 0.6;
};

struct RanConfig {
  double rate_per_cell = 0.0;  // requests/s
  double urllc_fraction = 0.5;
  double urllc_deadline = 1e-3;
  double embb_deadline = 4e-3;
  double du_gpu_work_mean = 2e9;  // FLOPs
  double du_gpu_work_cv = 0.3;
  double cu_cpu_work_mean = 2e-4;  // core-seconds
  double cu_cpu_work_cv = 0.3;
};

struct WorkloadConfig {
  double horizon = 60.0;
  std::optional<double> rho_target;
  std::optional<std::filesystem::path> trace_path;
  AiMapping mapping;
  SyntheticAiConfig synthetic_ai;
  RanConfig ran;
  std::uint64_t seed = 1;
};

struct TraceRow {
  double timestamp = 0.0;
  double prompt_tokens = 0.0;
  double output_tokens = 0.0;
};

struct IngestResult {
  std::vector<Request> requests;
  std::size_t skipped_rows = 0;
};

// Reads (timestamp, prompt_tokens, output_tokens) rows. Timestamps may be
// numeric seconds or "YYYY-MM-DD HH:MM:SS[.frac]"; they are rebased so the
// first row arrives at 0. A header-only file yields no requests; a file with
// no lines at all is an error. Malformed rows are skipped and counted.
IngestResult ingest_trace(const std::filesystem::path& path, const AiMapping& mapping,
                          const Cluster& cluster, std::uint64_t seed);
std::vector<TraceRow> parse_trace_csv(std::istream& in, std::size_t& skipped);

// Maps token rows onto requests (class split, work, KV, deadline, cell).
std::vector<Request> map_trace_rows(const std::vector<TraceRow>& rows, const AiMapping& mapping,
                                    const Cluster& cluster, std::uint64_t seed);

std::vector<TraceRow> synth_ai_rows(const SyntheticAiConfig& config, double horizon,
                                    std::uint64_t seed);

// Per-cell Poisson RAN-only requests bound to the cell's DU/CU-UP pair.
std::vector<Request> synth_ran(const RanConfig& config, const Cluster& cluster, double horizon,
                               std::uint64_t seed);

// Sorts by arrival (stable) and assigns dense request ids.
void finalize_requests(std::vector<Request>& requests);

// GPU capacity of every node in the cluster.
double cluster_gpu_capacity(const Cluster& cluster);
// GPU capacity of the nodes that host at least one AI instance under the
// given placement: the capacity provisioned for AI serving.
double ai_serving_capacity(const Cluster& cluster, const Placement& placement);

// lambda * mean AI GPU work / (G - floors), G given by the caller.
double measure_rho(const std::vector<Request>& requests, double horizon, double gpu_capacity,
                   double floors_estimate);

struct ScaledWorkload {
  std::vector<Request> requests;
  double factor = 1.0;
  double realized_rho = 0.0;
};

// Thins or replicates AI and RAN arrivals by one common factor f so that
// f*lambda*W / (G - f*F) = rho_target, where F is the time-averaged RAN floor
// measured on the unscaled workload. Replicas keep their work and cell and
// receive uniform arrival times over the horizon.
ScaledWorkload scale_to_rho(const std::vector<Request>& requests, double gpu_capacity,
                            double floors_estimate, double rho_target, double horizon,
                            std::uint64_t seed);

// Base (unscaled) workload: trace or synthetic AI plus synthetic RAN.
std::vector<Request> build_base_workload(const WorkloadConfig& config, const Cluster& cluster);

// Canonical JSON-lines replay format, one request per line.
void write_requests_jsonl(std::ostream& out, const std::vector<Request>& requests);
std::vector<Request> read_requests_jsonl(std::istream& in);

}  // namespace airan
