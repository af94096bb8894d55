#pragma once

// Fast-timescale allocation: per-node GPU/CPU shares from RAN deadline floors
// and square-root workload-urgency water-filling with active-set clipping.

#include <cmath>
#include <span>
#include <vector>

#include "airan/model.hpp"

namespace airan {

// Residual work of one active request at an instance.
struct ActiveWork {
  RequestId request_id = 0;
  double arrival = 0.0;
  double deadline_budget = 0.0;
  double resid_gpu = 0.0;  // FLOPs
  double resid_cpu = 0.0;  // core-seconds
};

struct InstanceLoad {
  InstanceId instance_id = kNoInstance;
  double resid_gpu_work = 0.0;  // Psi^g
  double resid_cpu_work = 0.0;  // Psi^c
  double urgency = 0.0;         // omega, 1/s
  double gpu_floor = 0.0;
  double cpu_floor = 0.0;
};

struct InfeasibleFloor : Error {
  InfeasibleFloor(RequestId id, double slack)
      : Error("RAN floor infeasible: request " + std::to_string(id) + " has slack " +
              std::to_string(slack) + " s after overheads"),
        request_id(id),
        slack(slack) {}
  RequestId request_id;
  double slack;
};

struct FloorOverflow : Error {
  FloorOverflow(double floors, double capacity)
      : Error("RAN floors " + std::to_string(floors) + " exceed capacity " + std::to_string(capacity)),
        floors(floors),
        capacity(capacity) {}
  double floors;
  double capacity;
};

// Psi = sum of residual work, omega = sum 1/max(tau - (now - a), epsilon).
InstanceLoad aggregate_load(InstanceId instance, std::span<const ActiveWork> active, double now,
                            double epsilon);

// Minimum rate on the dominant resource (GPU for DU, CPU for CU-UP) that
// clears all pending work before the tightest remaining deadline, net of the
// hop delay and the downstream estimate. Zero when nothing is pending.
// Throws InfeasibleFloor if the tightest slack is non-positive.
double compute_ran_floor(std::span<const ActiveWork> pending_ran, Category category, double now,
                         double per_hop, double downstream_est);

struct ResourceDemand {
  InstanceId instance_id = kNoInstance;
  double weight = 0.0;  // omega * Psi on this resource
  double floor = 0.0;
};

// Closed-form solution of min sum w_i / x_i s.t. sum x_i <= capacity,
// x_i >= floor_i: shares proportional to sqrt(w_i) over the unclipped set,
// with instances whose share would fall under their floor pinned to it.
// Throws FloorOverflow if the floors alone exceed capacity.
std::vector<double> solve_resource(std::span<const ResourceDemand> demands, double capacity);

// Number of clipping rounds used by the last solve on this thread (for tests).
int last_solve_rounds();

// How residual capacity (after floors) is shared. SqrtActiveSet is the
// deadline-aware rule; the others back the baseline policies.
enum class ShareRule { SqrtActiveSet, EqualShare, MaxWeight, BidProportional, AlphaSplit };

struct AllocatorConfig {
  double epsilon = 1e-6;  // seconds
  double per_hop = 200e-6;
  bool floors_enabled = true;  // test-only switch
  ShareRule rule = ShareRule::SqrtActiveSet;
  double alpha = 0.5;  // RAN share of residual capacity under AlphaSplit
};

struct NodeInstanceState {
  InstanceId instance_id = kNoInstance;
  Category category = Category::DU;
  bool available = true;  // false while reconfiguring or memory-blocked
  std::vector<ActiveWork> work;
  double downstream_est = 0.0;  // DU only: expected CU-UP time
};

struct NodeState {
  NodeId node_id = 0;
  double gpu_capacity = 0.0;
  double cpu_capacity = 0.0;
  double now = 0.0;
  std::vector<NodeInstanceState> instances;
};

struct NodeAllocation {
  std::vector<InstanceId> instance_ids;
  std::vector<double> gpu;
  std::vector<double> cpu;
  std::vector<double> gpu_floor;  // floors as applied (after any scaling)
  std::vector<double> cpu_floor;
  bool gpu_floor_overflow = false;
  bool cpu_floor_overflow = false;
  std::vector<RequestId> infeasible_requests;
};

// Solves one node: loads, floors, then the GPU and CPU sub-problems
// independently. Floor overflow is absorbed by scaling floors to capacity and
// flagging the result; requests with non-positive slack are reported and
// excluded from the floor's deadline term.
NodeAllocation allocate_node(const NodeState& state, const AllocatorConfig& config);

// Residual sharing used by the non-sqrt rules. Floors are honored first; the
// residual capacity is split by the rule among instances with positive work.
std::vector<double> share_residual(std::span<const ResourceDemand> demands,
                                   std::span<const Category> categories, double capacity,
                                   ShareRule rule, double alpha);

// EWMA of the observed CU-UP time plus an EWMA of its absolute deviation,
// feeding the DU floor's downstream term.
// The floor uses bound() = mean + margin * deviation so that a deadline-exact
// DU reservation is not undercut by ordinary CU-UP jitter.
class DownstreamEstimator {
 public:
  explicit DownstreamEstimator(double initial = 0.0, double smoothing = 0.2, double dev_smoothing = 0.25,
                               double margin = 4.0)
      : value_(initial), smoothing_(smoothing), dev_smoothing_(dev_smoothing), margin_(margin) {}
  double update(double observed) {
    deviation_ = (1.0 - dev_smoothing_) * deviation_ + dev_smoothing_ * std::abs(observed - value_);
    value_ = (1.0 - smoothing_) * value_ + smoothing_ * observed;
    return value_;
  }
  double value() const { return value_; }
  double deviation() const { return deviation_; }
  double bound() const { return value_ + margin_ * deviation_; }

 private:
  double value_;
  double smoothing_;
  double dev_smoothing_;
  double margin_;
  double deviation_ = 0.0;
};

}  // namespace airan
