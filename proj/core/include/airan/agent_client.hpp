#pragma once

// Shortlist providers (HTTP chat-completion agent, deterministic stub) and
// the HAF placement policy that gates their output with the critic.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "airan/critic.hpp"
#include "airan/placement.hpp"

namespace airan {

struct ShortlistResult {
  std::vector<MigrationAction> actions;
  std::string prompt;
  std::string raw_response;
  bool degraded = false;
};

class ShortlistProvider {
 public:
  virtual ~ShortlistProvider() = default;
  virtual ShortlistResult shortlist(const EpochContext& ctx, int k) = 0;
  virtual std::string name() const = 0;
};

class StubAgent : public ShortlistProvider {
 public:
  explicit StubAgent(double reconfig_penalty_weight = 1.0) : penalty_(reconfig_penalty_weight) {}
  ShortlistResult shortlist(const EpochContext& ctx, int k) override;
  std::string name() const override { return "stub"; }

 private:
  double penalty_;
};

struct AgentClientConfig {
  std::string endpoint;  // e.g. http://127.0.0.1:8000/v1/chat/completions
  std::string model = "default";
  double timeout = 4.0;  // seconds; 0.8 * interval by default
  int retries = 1;
  std::string token_env = "AIRAN_AGENT_TOKEN";
};

// Chat-completion body sent to the agent (temperature 0).
std::string build_chat_request(const std::string& model, const std::string& system,
                               const std::string& user);
// Extracts choices[0].message.content; nullopt on malformed JSON.
std::optional<std::string> extract_chat_content(const std::string& body);

// Talks to a chat-completion endpoint; falls back to the stub when the
// endpoint is unreachable, times out, or replies without a parseable list.
class HttpAgent : public ShortlistProvider {
 public:
  explicit HttpAgent(AgentClientConfig config, double stub_penalty = 1.0);
  ShortlistResult shortlist(const EpochContext& ctx, int k) override;
  std::string name() const override { return config_.model; }
  int degraded_count() const { return degraded_; }

 private:
  std::optional<std::string> post(const std::string& body) const;

  AgentClientConfig config_;
  StubAgent stub_;
  int degraded_ = 0;
};

enum class GateMode {
  Critic,         // critic picks among the shortlist
  NoCritic,       // top-1 of the shortlist
  EpsilonGreedy,  // data collection: random shortlist entry with prob. epsilon, else top-1
};

struct HafConfig {
  int k = 3;
  GateMode mode = GateMode::Critic;
  CriticWeights weights;
  double epsilon = 0.3;
  std::uint64_t seed = 1;
  MovableSet movable = kAllMovable;
};

class HafPolicy : public PlacementPolicy {
 public:
  HafPolicy(std::shared_ptr<ShortlistProvider> provider, std::shared_ptr<const CriticModel> critic,
            HafConfig config);
  EpochDecision decide(const EpochContext& ctx) override;
  const MovableSet& movable() const override { return config_.movable; }

 private:
  std::shared_ptr<ShortlistProvider> provider_;
  std::shared_ptr<const CriticModel> critic_;
  HafConfig config_;
  std::mt19937_64 rng_;
};

}  // namespace airan
