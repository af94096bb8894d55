#pragma once

// Domain types shared by the allocator, simulator, and placement layer:
// cluster topology, instances, requests, residency, and the latency and
// memory bookkeeping they imply.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace airan {

using RequestId = std::int64_t;
using NodeId = int;
using InstanceId = int;

constexpr NodeId kNoNode = -1;
constexpr InstanceId kNoInstance = -1;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct PlacementInconsistency : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Enumerations
// ---------------------------------------------------------------------------

enum class Category : std::uint8_t { DU, CU_UP, LARGE_AI, SMALL_AI };
enum class RequestClass : std::uint8_t { LARGE_AI, SMALL_AI, RAN_URLLC, RAN_EMBB };
enum class Resource : std::uint8_t { GPU, CPU };

constexpr int kNumCategories = 4;

std::string_view to_string(Category c);
std::string_view to_string(RequestClass c);
Category parse_category(std::string_view s);
RequestClass parse_request_class(std::string_view s);

constexpr bool is_ran(Category c) { return c == Category::DU || c == Category::CU_UP; }
constexpr bool is_ai(Category c) { return !is_ran(c); }
constexpr bool is_ran(RequestClass c) {
  return c == RequestClass::RAN_URLLC || c == RequestClass::RAN_EMBB;
}
constexpr bool is_ai(RequestClass c) { return !is_ran(c); }

// The GPU-bound categories are DU and both AI kinds; CU-UP is CPU-bound.
constexpr Resource dominant_resource(Category c) {
  return c == Category::CU_UP ? Resource::CPU : Resource::GPU;
}

constexpr Category serving_category(RequestClass c) {
  return c == RequestClass::LARGE_AI ? Category::LARGE_AI : Category::SMALL_AI;
}

// ---------------------------------------------------------------------------
// Static topology
// ---------------------------------------------------------------------------

struct NodeSpec {
  NodeId node_id = 0;
  double gpu_capacity = 0.0;   // FLOPs/s
  double cpu_capacity = 0.0;   // cores
  double vram_capacity = 0.0;  // GB
  std::string name;
};

struct InstanceSpec {
  InstanceId instance_id = 0;
  Category category = Category::DU;
  double weight_footprint = 0.0;  // GB, resident weights or PHY/MAC libraries
  double reconfig_delay = 0.0;    // seconds of unavailability after a move
  std::optional<int> cell_id;     // present iff DU / CU-UP
  // Replica group: AI instances sharing a group serve the same model and are
  // interchangeable targets for routing. RAN instances use their own id.
  int service_group = 0;
  std::string name;
};

struct Cluster {
  std::vector<NodeSpec> nodes;
  std::vector<InstanceSpec> instances;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t instance_count() const { return instances.size(); }
  const NodeSpec& node(NodeId n) const { return nodes.at(static_cast<std::size_t>(n)); }
  const InstanceSpec& instance(InstanceId s) const {
    return instances.at(static_cast<std::size_t>(s));
  }

  InstanceId du_of_cell(int cell) const;
  InstanceId cu_up_of_cell(int cell) const;
  std::vector<int> cells() const;
  std::vector<InstanceId> group_members(int service_group) const;

  // Throws ConfigError when capacities, ids, or the per-cell DU/CU-UP pairing
  // are malformed.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Requests
// ---------------------------------------------------------------------------

struct StageWork {
  InstanceId instance_id = kNoInstance;  // resolved at routing for AI requests
  double gpu_work = 0.0;                 // FLOPs
  double cpu_work = 0.0;                 // core-seconds
};

struct Request {
  RequestId request_id = 0;
  RequestClass cls = RequestClass::RAN_URLLC;
  double arrival = 0.0;          // a_q, seconds
  double deadline_budget = 0.0;  // tau_q, seconds
  int cell_id = 0;
  std::optional<int> target_service;  // replica group, AI classes only
  std::vector<StageWork> stages;      // RAN: {DU, CU-UP}; AI: {AI service}
  double kv_cache = 0.0;              // GB, AI only

  // Throws ConfigError if the request violates the class invariants.
  void validate() const;
};

struct CompletionRecord {
  RequestId request_id = 0;
  RequestClass cls = RequestClass::RAN_URLLC;
  double end_to_end_latency = 0.0;
  double transport_delay = 0.0;
  bool met_deadline = false;
};

// Builds a record; met_deadline is exactly (latency <= budget).
CompletionRecord make_completion(const Request& req, double latency, double transport_delay);

// ---------------------------------------------------------------------------
// Residency and allocation
// ---------------------------------------------------------------------------

// Residency y_{n,s}: stored as the host node of every instance, which keeps
// single residency structural. reconfig_until holds the absolute end of the
// current unavailability window (or is empty).
class Placement {
 public:
  Placement() = default;
  explicit Placement(std::vector<NodeId> host_of);

  std::size_t instance_count() const { return host_of_.size(); }
  NodeId host(InstanceId s) const { return host_of_.at(static_cast<std::size_t>(s)); }
  bool resident(NodeId n, InstanceId s) const { return host(s) == n; }
  std::vector<InstanceId> residents(NodeId n) const;
  const std::vector<NodeId>& hosts() const { return host_of_; }

  void move(InstanceId s, NodeId to) { host_of_.at(static_cast<std::size_t>(s)) = to; }

  std::optional<double> reconfig_until(InstanceId s) const;
  void set_reconfig_until(InstanceId s, std::optional<double> until);
  bool reconfiguring(InstanceId s, double now) const;

  // Sum of resident weight footprints on node n.
  double resident_weights(const Cluster& cluster, NodeId n) const;

  bool operator==(const Placement&) const = default;

 private:
  std::vector<NodeId> host_of_;
  std::vector<std::optional<double>> reconfig_until_;
};

struct AllocationVector {
  std::vector<double> gpu;  // per instance, FLOPs/s, on its host node
  std::vector<double> cpu;  // per instance, cores

  explicit AllocationVector(std::size_t instances = 0) : gpu(instances, 0.0), cpu(instances, 0.0) {}
  double node_gpu(const Placement& p, NodeId n) const;
  double node_cpu(const Placement& p, NodeId n) const;
};

// ---------------------------------------------------------------------------
// Latency and feasibility
// ---------------------------------------------------------------------------

// Transport delay: RAN path DU -> CU-UP costs one hop when split across
// nodes. AI requests pay ran_packet_delay plus one hop when the serving
// instance is not on the serving cell's DU node.
double compute_transport_delay(const Request& request, const Cluster& cluster,
                               const Placement& placement, double per_hop,
                               double ran_packet_delay);

// Per-node memory predicate: resident weights + active KV <= VRAM (inclusive).
std::vector<bool> check_memory_feasible(const Placement& placement,
                                        const std::vector<double>& active_kv,
                                        const Cluster& cluster);

// Per-node capacity predicate for the allocation sums, with a relative
// tolerance to absorb floating-point summation order.
bool check_capacity(const AllocationVector& alloc, const Placement& placement,
                    const Cluster& cluster, double rel_tol = 1e-9);

}  // namespace airan
