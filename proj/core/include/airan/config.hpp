#pragma once

// Experiment configuration: a line-oriented "key = value" document with
// `include = <path>` for presets. `node` and `instance` lines accumulate;
// every other key overrides earlier values.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "airan/baselines.hpp"
#include "airan/critic.hpp"
#include "airan/model.hpp"
#include "airan/workload.hpp"

namespace airan {

enum class PolicyKind { Haf, HafNoCritic, Static, RoundRobin, Lyapunov, Game, AlphaSplit };

std::string_view to_string(PolicyKind p);
PolicyKind parse_policy(std::string_view s);

enum class RhoCapacity {
  AiHosts,  // GPU of nodes hosting an AI instance in the initial placement
  Cluster,  // GPU of every node
};

struct AgentConfig {
  std::string endpoint = "stub";  // "stub" or an http(s) URL
  std::string model = "default";
  std::optional<double> timeout;  // defaults to 0.8 * interval
  int retries = 1;
  double stub_penalty = 1.0;
};

struct ExperimentConfig {
  Cluster cluster;
  Placement initial_placement;
  WorkloadConfig workload;
  PolicyKind policy = PolicyKind::Haf;
  double interval = 5.0;
  int k = 3;
  std::vector<std::uint64_t> seeds{1};
  std::filesystem::path output_dir = "out";
  double per_hop = 200e-6;
  double ran_packet_delay = 100e-6;
  double drain_limit = 60.0;
  bool floors_enabled = true;
  RhoCapacity rho_capacity = RhoCapacity::AiHosts;
  double warmup_fraction = 0.05;

  AgentConfig agent;
  CriticWeights critic_weights;
  TrainConfig train;
  std::optional<std::filesystem::path> critic_model;
  double collect_epsilon = 0.3;

  LyapunovConfig lyapunov;
  GameTheoryConfig game;
  double alpha = 0.5;
  MovableSet haf_movable = kAllMovable;
  MovableSet baseline_movable = kNoLargeMovable;
};

// Parses a document; `base_dir` resolves relative includes and paths.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

// The built-in default preset (same content as configs/default.conf).
const std::string& default_config_text();
ExperimentConfig default_config();

// Canonical "key = value" rendering; parse_config(render_config(c)) == c.
std::string render_config(const ExperimentConfig& config);

}  // namespace airan
