#pragma once

// Discrete-event simulator: arrivals, fluid FIFO service at the allocated
// rates, completions and deadline accounting, placement epochs, migration
// reconfiguration windows, and replica-group routing.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "airan/allocator.hpp"
#include "airan/baselines.hpp"
#include "airan/critic.hpp"
#include "airan/placement.hpp"

namespace airan {

enum class EventKind : std::uint8_t { ReconfigEnd = 0, EpochBoundary = 1, Arrival = 2, StageCompletion = 3 };
std::string_view to_string(EventKind k);

struct Event {
  double timestamp = 0.0;
  EventKind kind = EventKind::Arrival;
  std::int64_t payload = 0;  // request id, instance id, or epoch index
};

// Strict processing order: time, then kind, then payload.
bool event_before(const Event& a, const Event& b);

enum class RoutingMode { SmallestBacklog, RoundRobin };

struct SimConfig {
  double horizon = 60.0;
  double drain_limit = 60.0;  // extra time to finish work after the horizon
  double interval = 5.0;      // placement epoch length
  bool epochs_enabled = true;
  int k = 3;
  double ran_packet_delay = 100e-6;  // AI request uplink through the RAN
  AllocatorConfig allocator;
  RoutingMode routing = RoutingMode::SmallestBacklog;
  bool check_invariants = true;
  std::ostream* event_log = nullptr;  // JSON lines when set
};

struct EpochRecord {
  int index = 0;  // k, boundary at k * interval
  double timestamp = 0.0;
  EpochSnapshot snapshot;
  std::size_t candidate_count = 0;
  std::size_t candidate_bound = 0;  // |S^M| (|N| - 1) + 1
  std::vector<MigrationAction> shortlist;
  std::vector<CriticForecast> forecasts;
  MigrationAction action;
  bool member = true;      // action was in the candidate set
  bool committed = false;  // a move was applied
  std::string reject_reason;
  bool degraded = false;
  std::string prompt;
  std::string raw_response;
  Label label{1.0, 1.0, 1.0};  // realized (large, small, RAN) fulfillment of arrivals in the interval
};

struct ClassCounts {
  std::size_t arrived = 0;
  std::size_t completed = 0;
  std::size_t met = 0;
  std::size_t unfinished = 0;

  bool operator==(const ClassCounts&) const = default;
};

struct SimResult {
  std::vector<CompletionRecord> completions;  // in completion order
  std::vector<RequestId> unfinished;          // residual backlog at the end
  std::array<ClassCounts, 4> per_class{};     // indexed by RequestClass
  std::vector<EpochRecord> epochs;
  int migrations_total = 0;
  int migrations_large = 0;
  int rejected_actions = 0;
  int degraded_epochs = 0;
  std::vector<std::string> invariant_violations;  // first few messages
  std::size_t violation_count = 0;
  std::size_t invariant_checks = 0;
  std::size_t event_count = 0;
  std::size_t work_checks = 0;
  double end_time = 0.0;
  std::vector<double> mean_gpu_floor;  // per node, time-averaged over [0, end_time]
  Placement final_placement;
};

class Simulator {
 public:
  // The policy may be null when epochs are disabled.
  Simulator(const Cluster& cluster, Placement initial, std::vector<Request> requests, SimConfig config,
            PlacementPolicy* policy);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  SimResult run();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Fulfillment of the requests that arrived in [from, to) per group (large,
// small, RAN); unfinished requests count as missed, empty groups report 1.
Label interval_fulfillment(const std::vector<Request>& requests, const SimResult& result, double from,
                           double to);

}  // namespace airan
