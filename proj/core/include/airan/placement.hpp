#pragma once

// Slow-timescale placement: epoch snapshots, feasible single-instance
// migration candidates, the agent prompt and its reply parser, and the
// deterministic stub shortlist.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "airan/model.hpp"

namespace airan {

struct MigrationAction {
  enum class Kind : std::uint8_t { NoOp, Move };
  Kind kind = Kind::NoOp;
  InstanceId instance_id = kNoInstance;
  NodeId from_node = kNoNode;
  NodeId to_node = kNoNode;

  static MigrationAction noop() { return {}; }
  static MigrationAction move(InstanceId s, NodeId from, NodeId to) { return {Kind::Move, s, from, to}; }
  bool is_move() const { return kind == Kind::Move; }
  bool operator==(const MigrationAction&) const = default;
};

std::string describe(const MigrationAction& a, const Cluster& cluster);

struct NodeSnapshot {
  NodeId node_id = 0;
  double gpu_util = 0.0;   // time-averaged allocated fraction over the last interval
  double cpu_util = 0.0;
  double floor_util = 0.0;  // time-averaged RAN floor share of GPU capacity
  double vram_headroom = 0.0;  // GB: V - weights - active KV
  double gpu_load = 0.0;  // (recent demand rate + backlog / interval) / capacity
  double cpu_load = 0.0;
  int resident_count = 0;
};

struct InstanceSnapshot {
  InstanceId instance_id = 0;
  Category category = Category::DU;
  NodeId host = kNoNode;
  double backlog_seconds = 0.0;  // backlog at current rate plus remaining reconfiguration
  double backlog_gpu = 0.0;      // FLOPs
  double backlog_cpu = 0.0;      // core-seconds
  double demand_gpu = 0.0;       // FLOPs/s routed here over the last interval
  double demand_cpu = 0.0;
  int active_requests = 0;
  int recent_arrivals = 0;
  bool reconfiguring = false;
  double reconfig_remaining = 0.0;
  double kv_in_use = 0.0;
};

struct EpochSnapshot {
  double timestamp = 0.0;
  double interval = 5.0;
  std::vector<NodeSnapshot> nodes;
  std::vector<InstanceSnapshot> instances;
  // Completions observed over the previous interval (1 when none).
  double recent_large = 1.0;
  double recent_small = 1.0;
  double recent_ran = 1.0;
};

// Offered load of an instance on its dominant resource, in capacity units of
// the given node: (demand rate + backlog / interval) / capacity.
double instance_load(const InstanceSnapshot& inst, const NodeSpec& node, double interval);

// Movable categories, indexed by Category.
using MovableSet = std::array<bool, kNumCategories>;
constexpr MovableSet kAllMovable{true, true, true, true};
constexpr MovableSet kNoLargeMovable{true, true, false, true};

// NoOp first, then every (instance, destination) whose destination can hold
// the instance's weights on top of its resident weights, skipping
// reconfiguring instances. Ordered by instance id then destination.
std::vector<MigrationAction> generate_candidates(const EpochSnapshot& snapshot,
                                                 const Placement& placement,
                                                 const Cluster& cluster,
                                                 const MovableSet& movable);

// Placement after applying an action (residency only).
Placement apply_action(const Placement& placement, const MigrationAction& action);

// Deterministic prompt: system policy, state snapshot, candidate ids, and a
// request for an ordered list of at most K ids in a fenced ```ids block.
std::string build_prompt(const EpochSnapshot& snapshot, const std::vector<MigrationAction>& candidates,
                         const Cluster& cluster, int k);

// The system-policy block on its own (sent as the system message).
std::string system_policy_text(double interval, int k);

// Parses the agent reply. Unknown ids are dropped, duplicates removed, and
// the result truncated to K. Returns nullopt when no id list is found.
std::optional<std::vector<MigrationAction>> parse_shortlist(const std::string& reply,
                                                            const std::vector<MigrationAction>& candidates,
                                                            int k);

struct StubConfig {
  int k = 3;
  double reconfig_penalty_weight = 1.0;
};

// Score of one candidate: squared-load relief over source and destination on
// the instance's dominant resource, minus a reconfiguration penalty
// (weight * R_s / interval), minus the RAN-floor pressure added at the
// destination. NoOp scores 0.
double stub_score(const MigrationAction& action, const EpochSnapshot& snapshot,
                  const Cluster& cluster, const StubConfig& config);

// Up to K-1 positive-score moves, best first (ties: lower instance id, then
// lower destination), followed by NoOp.
std::vector<MigrationAction> stub_shortlist(const EpochSnapshot& snapshot,
                                            const std::vector<MigrationAction>& candidates,
                                            const Cluster& cluster, const StubConfig& config);

// ---------------------------------------------------------------------------
// Policy interface driven by the simulator at each epoch boundary.
// ---------------------------------------------------------------------------

struct CriticForecast {
  double r_large = 0.0;
  double r_small = 0.0;
  double r_ran = 0.0;
};

struct EpochContext {
  const EpochSnapshot& snapshot;
  const std::vector<MigrationAction>& candidates;
  const Cluster& cluster;
  const Placement& placement;
};

struct EpochDecision {
  MigrationAction action;
  std::vector<MigrationAction> shortlist;
  std::vector<CriticForecast> forecasts;
  std::string prompt;
  std::string raw_response;
  bool degraded = false;  // agent unavailable, stub used
};

class PlacementPolicy {
 public:
  virtual ~PlacementPolicy() = default;
  virtual EpochDecision decide(const EpochContext& ctx) = 0;
  virtual const MovableSet& movable() const = 0;
};

}  // namespace airan
