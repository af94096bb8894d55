#include "airan/agent_client.hpp"

#include <cstdlib>
#include <regex>

#include <httplib.h>
#include <json.hpp>

namespace airan {

using nlohmann::json;

ShortlistResult StubAgent::shortlist(const EpochContext& ctx, int k) {
  ShortlistResult r;
  r.actions = stub_shortlist(ctx.snapshot, ctx.candidates, ctx.cluster, StubConfig{k, penalty_});
  return r;
}

std::string build_chat_request(const std::string& model, const std::string& system,
                               const std::string& user) {
  json body = {{"model", model},
               {"temperature", 0},
               {"messages", json::array({{{"role", "system"}, {"content", system}},
                                         {{"role", "user"}, {"content", user}}})}};
  return body.dump();
}

std::optional<std::string> extract_chat_content(const std::string& body) {
  auto doc = json::parse(body, nullptr, false);
  if (doc.is_discarded()) return std::nullopt;
  try {
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

HttpAgent::HttpAgent(AgentClientConfig config, double stub_penalty)
    : config_(std::move(config)), stub_(stub_penalty) {}

std::optional<std::string> HttpAgent::post(const std::string& body) const {
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.endpoint, m, url)) return std::nullopt;
  const std::string base = m[1].str();
  const std::string path = m[2].matched ? m[2].str() : "/v1/chat/completions";

  httplib::Client client(base);
  const auto secs = static_cast<time_t>(config_.timeout);
  const auto usecs = static_cast<time_t>((config_.timeout - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (const char* token = std::getenv(config_.token_env.c_str()); token && *token)
    headers.emplace("Authorization", std::string("Bearer ") + token);

  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    auto res = client.Post(path, headers, body, "application/json");
    if (res && res->status == 200) return res->body;
  }
  return std::nullopt;
}

ShortlistResult HttpAgent::shortlist(const EpochContext& ctx, int k) {
  ShortlistResult r;
  r.prompt = build_prompt(ctx.snapshot, ctx.candidates, ctx.cluster, k);
  const auto body = build_chat_request(config_.model, system_policy_text(ctx.snapshot.interval, k), r.prompt);
  if (auto reply = post(body)) {
    if (auto content = extract_chat_content(*reply)) {
      r.raw_response = *content;
      if (auto parsed = parse_shortlist(*content, ctx.candidates, k); parsed && !parsed->empty()) {
        r.actions = std::move(*parsed);
        return r;
      }
    } else {
      r.raw_response = *reply;
    }
  }
  ++degraded_;
  auto fallback = stub_.shortlist(ctx, k);
  r.actions = std::move(fallback.actions);
  r.degraded = true;
  return r;
}

HafPolicy::HafPolicy(std::shared_ptr<ShortlistProvider> provider, std::shared_ptr<const CriticModel> critic,
                     HafConfig config)
    : provider_(std::move(provider)), critic_(std::move(critic)), config_(config), rng_(config.seed) {
  if (!provider_) throw ConfigError("HAF needs a shortlist provider");
  if (config_.mode == GateMode::Critic && !critic_) throw ConfigError("HAF with critic needs a trained model");
}

EpochDecision HafPolicy::decide(const EpochContext& ctx) {
  EpochDecision d;
  auto result = provider_->shortlist(ctx, config_.k);
  d.prompt = std::move(result.prompt);
  d.raw_response = std::move(result.raw_response);
  d.degraded = result.degraded;
  d.shortlist = std::move(result.actions);
  if (d.shortlist.empty()) d.shortlist.push_back(MigrationAction::noop());

  switch (config_.mode) {
    case GateMode::Critic:
      d.action = select(d.shortlist, ctx.snapshot, ctx.cluster, *critic_, config_.weights, &d.forecasts);
      break;
    case GateMode::NoCritic:
      d.action = d.shortlist.front();
      break;
    case GateMode::EpsilonGreedy: {
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      if (coin(rng_) < config_.epsilon) {
        // Explore over the shortlist plus NoOp so both outcomes are labelled.
        auto options = d.shortlist;
        bool has_noop = false;
        for (const auto& a : options) has_noop = has_noop || !a.is_move();
        if (!has_noop) options.push_back(MigrationAction::noop());
        std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
        d.action = options[pick(rng_)];
      } else {
        d.action = d.shortlist.front();
      }
      break;
    }
  }
  return d;
}

}  // namespace airan
