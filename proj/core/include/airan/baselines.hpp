#pragma once

// Baseline placement policies. These are concrete instantiations chosen for
// this code base; their knobs are exposed through the experiment config.

#include <cstddef>
#include <vector>

#include "airan/placement.hpp"

namespace airan {

// Never migrates. Used when a policy keeps its initial placement but the
// simulator still needs a PlacementPolicy object.
class StaticPolicy : public PlacementPolicy {
 public:
  explicit StaticPolicy(MovableSet movable = kNoLargeMovable) : movable_(movable) {}
  EpochDecision decide(const EpochContext& ctx) override;
  const MovableSet& movable() const override { return movable_; }

 private:
  MovableSet movable_;
};

struct LyapunovConfig {
  double v = 1.0;  // penalty weight
};

// Drift of the quadratic node-load Lyapunov function (sum of squared
// dominant-resource loads, after minus before) plus V times the expected
// fulfillment loss of the outage: (R_s / interval) times the instance's share
// of recent arrivals. NoOp scores 0.
double lyapunov_objective(const MigrationAction& action, const EpochSnapshot& snapshot,
                          const Cluster& cluster, const LyapunovConfig& config);

class LyapunovPolicy : public PlacementPolicy {
 public:
  LyapunovPolicy(LyapunovConfig config, MovableSet movable = kNoLargeMovable)
      : config_(config), movable_(movable) {}
  // Lowest objective wins; ties keep the earlier candidate (NoOp first).
  EpochDecision decide(const EpochContext& ctx) override;
  const MovableSet& movable() const override { return movable_; }

 private:
  LyapunovConfig config_;
  MovableSet movable_;
};

struct GameTheoryConfig {
  int iteration_cap = 100;
  double switch_cost_weight = 1.0;  // times R_s / interval, charged on a move
};

struct BestResponseResult {
  std::vector<MigrationAction> moves;  // in the order players moved
  bool converged = false;              // false when the cap stopped the dynamics
};

// Congestion-game best-response dynamics. Each movable, non-reconfiguring
// instance is a player whose cost on a node is that node's load on the
// player's dominant resource (including itself); a move also pays the switch
// cost. Players move in id order to their best strictly improving node that
// can hold their weights, until a full pass without moves or the cap.
BestResponseResult best_response(const EpochSnapshot& snapshot, const Placement& placement,
                                 const Cluster& cluster, const MovableSet& movable,
                                 const GameTheoryConfig& config);

class GameTheoryPolicy : public PlacementPolicy {
 public:
  GameTheoryPolicy(GameTheoryConfig config, MovableSet movable = kNoLargeMovable)
      : config_(config), movable_(movable) {}
  // Commits the first move of the best-response sequence that is a
  // candidate; NoOp otherwise.
  EpochDecision decide(const EpochContext& ctx) override;
  const MovableSet& movable() const override { return movable_; }

 private:
  GameTheoryConfig config_;
  MovableSet movable_;
};

// Round-robin dispatch over a replica group.
class RoundRobinRouter {
 public:
  InstanceId next(int service_group, const std::vector<InstanceId>& members);

 private:
  std::vector<std::size_t> cursor_;
};

}  // namespace airan
