#include "airan/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace airan {

using nlohmann::json;

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// ----------------------------------------------------------------- workload

PreparedWorkload prepare_workload(const ExperimentConfig& config, std::uint64_t seed) {
  WorkloadConfig wc = config.workload;
  wc.seed = seed;
  PreparedWorkload out;
  auto base = build_base_workload(wc, config.cluster);
  out.capacity = config.rho_capacity == RhoCapacity::AiHosts
                     ? ai_serving_capacity(config.cluster, config.initial_placement)
                     : cluster_gpu_capacity(config.cluster);
  if (out.capacity <= 0.0) throw ConfigError("no GPU capacity is provisioned for AI serving");

  // Warm-up: static placement, deadline-aware allocation, no epochs.
  const double warm = config.warmup_fraction * wc.horizon;
  if (warm > 0.0) {
    std::vector<Request> head;
    for (const auto& r : base)
      if (r.arrival < warm) head.push_back(r);
    SimConfig sc = make_sim_config(config, PolicyKind::Static);
    sc.horizon = warm;
    sc.drain_limit = 0.0;
    sc.check_invariants = false;
    sc.allocator.rule = ShareRule::SqrtActiveSet;
    sc.allocator.floors_enabled = true;
    Simulator sim(config.cluster, config.initial_placement, std::move(head), sc, nullptr);
    const auto res = sim.run();
    for (const auto& n : config.cluster.nodes) {
      const bool counted = config.rho_capacity == RhoCapacity::Cluster ||
                           [&] {
                             for (auto s : config.initial_placement.residents(n.node_id))
                               if (is_ai(config.cluster.instance(s).category)) return true;
                             return false;
                           }();
      if (counted) out.floors_estimate += res.mean_gpu_floor.at(static_cast<std::size_t>(n.node_id));
    }
  }

  if (wc.rho_target) {
    auto scaled = scale_to_rho(base, out.capacity, out.floors_estimate, *wc.rho_target, wc.horizon, seed);
    out.requests = std::move(scaled.requests);
    out.factor = scaled.factor;
    out.realized_rho = scaled.realized_rho;
  } else {
    out.realized_rho = measure_rho(base, wc.horizon, out.capacity, out.floors_estimate);
    out.requests = std::move(base);
  }
  return out;
}

// ------------------------------------------------------------------ metrics

namespace {

double ratio(std::size_t met, std::size_t total, const std::string& name, std::vector<std::string>& vacuous) {
  if (total == 0) {
    vacuous.push_back(name);
    return 1.0;
  }
  return static_cast<double>(met) / static_cast<double>(total);
}

}  // namespace

MetricsReport compute_report(const SimResult& sim, std::string policy, std::uint64_t seed,
                             const PreparedWorkload& workload, std::optional<double> rho_target,
                             const Cluster& cluster) {
  MetricsReport r;
  r.policy = std::move(policy);
  r.seed = seed;
  r.rho_target = rho_target;
  r.realized_rho = workload.realized_rho;
  r.scale_factor = workload.factor;
  r.counts = sim.per_class;
  auto count = [&](std::initializer_list<RequestClass> cls, bool met) {
    std::size_t n = 0;
    for (auto c : cls) {
      const auto& k = sim.per_class[static_cast<std::size_t>(c)];
      n += met ? k.met : k.arrived;
    }
    return n;
  };
  using RC = RequestClass;
  const auto all = {RC::LARGE_AI, RC::SMALL_AI, RC::RAN_URLLC, RC::RAN_EMBB};
  const auto ran = {RC::RAN_URLLC, RC::RAN_EMBB};
  const auto ai = {RC::LARGE_AI, RC::SMALL_AI};
  r.total_requests = count(all, false);
  r.overall = ratio(count(all, true), r.total_requests, "overall", r.vacuous);
  r.qr = ratio(count(ran, true), count(ran, false), "qr", r.vacuous);
  r.qe = ratio(count(ai, true), count(ai, false), "qe", r.vacuous);
  r.large = ratio(count({RC::LARGE_AI}, true), count({RC::LARGE_AI}, false), "large", r.vacuous);
  r.small = ratio(count({RC::SMALL_AI}, true), count({RC::SMALL_AI}, false), "small", r.vacuous);
  r.migrations_large = sim.migrations_large;
  r.migrations_total = sim.migrations_total;
  r.epochs = static_cast<int>(sim.epochs.size());
  r.rejected_actions = sim.rejected_actions;
  r.degraded_epochs = sim.degraded_epochs;
  r.residual_backlog = sim.unfinished.size();
  r.invariant_violations = sim.violation_count;
  for (const auto& e : sim.epochs)
    r.series.push_back({e.timestamp, e.label, describe(e.action, cluster), e.committed, e.candidate_count,
                        e.candidate_bound, e.member});
  return r;
}

json report_to_json(const MetricsReport& r) {
  json j;
  j["policy"] = r.policy;
  j["seed"] = r.seed;
  j["rho_target"] = r.rho_target ? json(*r.rho_target) : json(nullptr);
  j["realized_rho"] = r.realized_rho;
  j["scale_factor"] = r.scale_factor;
  j["fulfillment"] = {{"overall", r.overall}, {"qr", r.qr}, {"qe", r.qe}, {"large_ai", r.large}, {"small_ai", r.small}};
  j["vacuous"] = r.vacuous;
  json counts = json::object();
  for (int c = 0; c < 4; ++c) {
    const auto& k = r.counts[static_cast<std::size_t>(c)];
    counts[std::string(to_string(static_cast<RequestClass>(c)))] = {
        {"arrived", k.arrived}, {"completed", k.completed}, {"met", k.met}, {"unfinished", k.unfinished}};
  }
  j["counts"] = counts;
  j["total_requests"] = r.total_requests;
  j["migrations"] = {{"large_ai", r.migrations_large}, {"total", r.migrations_total}};
  j["epochs"] = r.epochs;
  j["rejected_actions"] = r.rejected_actions;
  j["degraded_epochs"] = r.degraded_epochs;
  j["residual_backlog"] = r.residual_backlog;
  j["invariant_violations"] = r.invariant_violations;
  j["critic_hash"] = r.critic_hash ? json(*r.critic_hash) : json(nullptr);
  json series = json::array();
  for (const auto& p : r.series)
    series.push_back({{"t", p.t},
                      {"label", p.label},
                      {"action", p.action},
                      {"committed", p.committed},
                      {"candidates", p.candidates},
                      {"bound", p.bound},
                      {"member", p.member}});
  j["series"] = series;
  return j;
}

MetricsReport report_from_json(const json& j) {
  MetricsReport r;
  r.policy = j.at("policy").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  if (!j.at("rho_target").is_null()) r.rho_target = j.at("rho_target").get<double>();
  r.realized_rho = j.at("realized_rho").get<double>();
  r.scale_factor = j.at("scale_factor").get<double>();
  const auto& f = j.at("fulfillment");
  r.overall = f.at("overall").get<double>();
  r.qr = f.at("qr").get<double>();
  r.qe = f.at("qe").get<double>();
  r.large = f.at("large_ai").get<double>();
  r.small = f.at("small_ai").get<double>();
  r.vacuous = j.at("vacuous").get<std::vector<std::string>>();
  for (int c = 0; c < 4; ++c) {
    const auto& k = j.at("counts").at(std::string(to_string(static_cast<RequestClass>(c))));
    auto& dst = r.counts[static_cast<std::size_t>(c)];
    dst.arrived = k.at("arrived").get<std::size_t>();
    dst.completed = k.at("completed").get<std::size_t>();
    dst.met = k.at("met").get<std::size_t>();
    dst.unfinished = k.at("unfinished").get<std::size_t>();
  }
  r.total_requests = j.at("total_requests").get<std::size_t>();
  r.migrations_large = j.at("migrations").at("large_ai").get<int>();
  r.migrations_total = j.at("migrations").at("total").get<int>();
  r.epochs = j.at("epochs").get<int>();
  r.rejected_actions = j.at("rejected_actions").get<int>();
  r.degraded_epochs = j.at("degraded_epochs").get<int>();
  r.residual_backlog = j.at("residual_backlog").get<std::size_t>();
  r.invariant_violations = j.at("invariant_violations").get<std::size_t>();
  if (!j.at("critic_hash").is_null()) r.critic_hash = j.at("critic_hash").get<std::uint64_t>();
  for (const auto& p : j.at("series")) {
    EpochPoint e;
    e.t = p.at("t").get<double>();
    e.label = p.at("label").get<Label>();
    e.action = p.at("action").get<std::string>();
    e.committed = p.at("committed").get<bool>();
    e.candidates = p.at("candidates").get<std::size_t>();
    e.bound = p.at("bound").get<std::size_t>();
    e.member = p.at("member").get<bool>();
    r.series.push_back(e);
  }
  return r;
}

// ------------------------------------------------------------------ running

std::shared_ptr<ShortlistProvider> make_provider(const ExperimentConfig& config) {
  if (config.agent.endpoint == "stub") return std::make_shared<StubAgent>(config.agent.stub_penalty);
  AgentClientConfig ac;
  ac.endpoint = config.agent.endpoint;
  ac.model = config.agent.model;
  ac.timeout = config.agent.timeout.value_or(0.8 * config.interval);
  ac.retries = config.agent.retries;
  return std::make_shared<HttpAgent>(ac, config.agent.stub_penalty);
}

SimConfig make_sim_config(const ExperimentConfig& config, PolicyKind policy) {
  SimConfig sc;
  sc.horizon = config.workload.horizon;
  sc.drain_limit = config.drain_limit;
  sc.interval = config.interval;
  sc.k = config.k;
  sc.ran_packet_delay = config.ran_packet_delay;
  sc.allocator.per_hop = config.per_hop;
  sc.allocator.floors_enabled = config.floors_enabled;
  sc.allocator.alpha = config.alpha;
  switch (policy) {
    case PolicyKind::Haf:
    case PolicyKind::HafNoCritic:
      break;
    case PolicyKind::Static:
      sc.epochs_enabled = false;
      break;
    case PolicyKind::RoundRobin:
      sc.epochs_enabled = false;
      sc.routing = RoutingMode::RoundRobin;
      sc.allocator.rule = ShareRule::EqualShare;
      break;
    case PolicyKind::Lyapunov:
      sc.allocator.rule = ShareRule::MaxWeight;
      break;
    case PolicyKind::Game:
      sc.allocator.rule = ShareRule::BidProportional;
      break;
    case PolicyKind::AlphaSplit:
      sc.epochs_enabled = false;
      sc.allocator.rule = ShareRule::AlphaSplit;
      break;
  }
  return sc;
}

namespace {

std::shared_ptr<const CriticModel> resolve_critic(const ExperimentConfig& config, const RunOptions& options) {
  std::shared_ptr<const CriticModel> critic = options.critic;
  if (!critic && config.critic_model) critic = std::make_shared<CriticModel>(CriticModel::load(*config.critic_model));
  if (critic && critic->node_count() != config.cluster.node_count())
    throw ConfigError("critic model was trained for " + std::to_string(critic->node_count()) + " nodes, cluster has " +
                      std::to_string(config.cluster.node_count()));
  return critic;
}

std::unique_ptr<PlacementPolicy> make_policy(const ExperimentConfig& config, PolicyKind policy, std::uint64_t seed,
                                             const RunOptions& options,
                                             std::shared_ptr<const CriticModel>& critic_used) {
  switch (policy) {
    case PolicyKind::Haf:
    case PolicyKind::HafNoCritic: {
      HafConfig hc;
      hc.k = config.k;
      hc.weights = config.critic_weights;
      hc.seed = seed;
      hc.movable = config.haf_movable;
      hc.epsilon = options.epsilon.value_or(config.collect_epsilon);
      hc.mode = policy == PolicyKind::Haf ? GateMode::Critic : GateMode::NoCritic;
      if (options.gate_override) hc.mode = *options.gate_override;
      if (hc.mode == GateMode::Critic) {
        critic_used = resolve_critic(config, options);
        if (!critic_used)
          throw ConfigError("policy haf needs a critic model: run collect-critic-data and train-critic, "
                            "then set critic.model");
      }
      auto provider = options.provider ? options.provider : make_provider(config);
      return std::make_unique<HafPolicy>(provider, critic_used, hc);
    }
    case PolicyKind::Lyapunov:
      return std::make_unique<LyapunovPolicy>(config.lyapunov, config.baseline_movable);
    case PolicyKind::Game:
      return std::make_unique<GameTheoryPolicy>(config.game, config.baseline_movable);
    case PolicyKind::Static:
    case PolicyKind::RoundRobin:
    case PolicyKind::AlphaSplit:
      return nullptr;
  }
  return nullptr;
}

}  // namespace

RunOutput run_policy(const ExperimentConfig& config, PolicyKind policy, std::uint64_t seed,
                     const PreparedWorkload& workload, const RunOptions& options) {
  std::shared_ptr<const CriticModel> critic;
  auto placement_policy = make_policy(config, policy, seed, options, critic);
  SimConfig sc = make_sim_config(config, policy);
  sc.event_log = options.event_log;
  sc.check_invariants = options.check_invariants;
  Simulator sim(config.cluster, config.initial_placement, workload.requests, sc, placement_policy.get());
  RunOutput out;
  out.sim = sim.run();
  out.report = compute_report(out.sim, std::string(to_string(policy)), seed, workload, config.workload.rho_target,
                              config.cluster);
  if (critic) out.report.critic_hash = critic->hash();
  return out;
}

RunOutput run_experiment(const ExperimentConfig& config, PolicyKind policy, std::uint64_t seed,
                         const RunOptions& options) {
  const auto workload = prepare_workload(config, seed);
  return run_policy(config, policy, seed, workload, options);
}

// ------------------------------------------------------------------- sweeps

SweepResult run_load_sweep(const ExperimentConfig& config, const std::vector<double>& rhos,
                           const std::vector<PolicyKind>& policies, const RunOptions& options) {
  if (rhos.empty()) throw ConfigError("a load sweep needs at least one rho value");
  SweepResult out;
  for (double rho : rhos) {
    ExperimentConfig cfg = config;
    cfg.workload.rho_target = rho;
    std::vector<std::vector<MetricsReport>> per_policy(policies.size());
    for (auto seed : cfg.seeds) {
      PreparedWorkload wl;
      try {
        wl = prepare_workload(cfg, seed);
      } catch (const Error& e) {
        out.errors.push_back("rho=" + std::to_string(rho) + " seed=" + std::to_string(seed) + ": " + e.what());
        continue;
      }
      for (std::size_t p = 0; p < policies.size(); ++p) {
        try {
          auto run = run_policy(cfg, policies[p], seed, wl, options);
          per_policy[p].push_back(run.report);
          out.reports.push_back(std::move(run.report));
        } catch (const Error& e) {
          out.errors.push_back("rho=" + std::to_string(rho) + " policy=" + std::string(to_string(policies[p])) +
                               " seed=" + std::to_string(seed) + ": " + e.what());
        }
      }
    }
    for (std::size_t p = 0; p < policies.size(); ++p) {
      if (per_policy[p].empty()) continue;
      std::vector<double> qr, qe, overall, mig;
      for (const auto& r : per_policy[p]) {
        qr.push_back(r.qr);
        qe.push_back(r.qe);
        overall.push_back(r.overall);
        mig.push_back(r.migrations_total);
      }
      out.rows.push_back({rho, std::string(to_string(policies[p])), median(qr), median(qe), median(overall), median(mig)});
    }
  }
  return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "rho,policy,qr_fulfill,qe_fulfill,overall,migrations\n";
  out.precision(17);
  for (const auto& r : rows)
    out << r.rho << ',' << r.policy << ',' << r.qr_fulfill << ',' << r.qe_fulfill << ',' << r.overall << ','
        << r.migrations << '\n';
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::vector<SweepRow> rows;
  std::string line;
  if (!std::getline(in, line) || line != "rho,policy,qr_fulfill,qe_fulfill,overall,migrations")
    throw ConfigError("not a sweep CSV (unexpected header)");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 6) throw ConfigError("sweep CSV row has " + std::to_string(f.size()) + " fields");
    rows.push_back({std::stod(f[0]), f[1], std::stod(f[2]), std::stod(f[3]), std::stod(f[4]), std::stod(f[5])});
  }
  return rows;
}

// ----------------------------------------------------------------- ablation

std::vector<AblationRow> run_ablation(const ExperimentConfig& config, const std::vector<std::string>& agents,
                                      const RunOptions& options) {
  std::vector<AblationRow> rows;
  for (const auto& agent : agents) {
    ExperimentConfig cfg = config;
    cfg.agent.endpoint = agent;
    AblationRow row;
    row.agent = agent;
    std::vector<double> oc, on, mc, mn;
    for (auto seed : cfg.seeds) {
      const auto wl = prepare_workload(cfg, seed);
      RunOptions opts = options;
      opts.provider = make_provider(cfg);
      auto with = run_policy(cfg, PolicyKind::Haf, seed, wl, opts);
      opts.provider = make_provider(cfg);
      auto without = run_policy(cfg, PolicyKind::HafNoCritic, seed, wl, opts);
      row.stub_substituted =
          row.stub_substituted || with.report.degraded_epochs > 0 || without.report.degraded_epochs > 0;
      oc.push_back(with.report.overall);
      on.push_back(without.report.overall);
      mc.push_back(with.report.migrations_total);
      mn.push_back(without.report.migrations_total);
    }
    row.overall_critic = median(oc);
    row.overall_nocritic = median(on);
    row.critic_gain = row.overall_critic - row.overall_nocritic;
    row.migrations_critic = median(mc);
    row.migrations_nocritic = median(mn);
    rows.push_back(row);
  }
  return rows;
}

void write_ablation_csv(std::ostream& out, const std::vector<AblationRow>& rows) {
  out << "agent,overall_critic,overall_nocritic,critic_gain,migrations_critic,migrations_nocritic,stub_substituted\n";
  out.precision(17);
  for (const auto& r : rows)
    out << r.agent << ',' << r.overall_critic << ',' << r.overall_nocritic << ',' << r.critic_gain << ','
        << r.migrations_critic << ',' << r.migrations_nocritic << ',' << (r.stub_substituted ? 1 : 0) << '\n';
}

// --------------------------------------------------------------- collection

std::vector<CollectedSample> collect_samples(const ExperimentConfig& config, const std::vector<std::uint64_t>& seeds,
                                             const std::vector<double>& rhos, double epsilon) {
  std::vector<CollectedSample> out;
  for (double rho : rhos) {
    ExperimentConfig cfg = config;
    cfg.workload.rho_target = rho;
    for (auto seed : seeds) {
      RunOptions opts;
      opts.gate_override = GateMode::EpsilonGreedy;
      opts.epsilon = epsilon;
      opts.check_invariants = false;
      auto run = run_experiment(cfg, PolicyKind::HafNoCritic, seed, opts);
      for (const auto& e : run.sim.epochs) {
        const auto applied = e.committed ? e.action : MigrationAction::noop();
        CollectedSample s;
        s.sample.features = encode_features(e.snapshot, applied, cfg.cluster);
        s.sample.label = e.label;
        s.seed = seed;
        s.rho = rho;
        s.t = e.timestamp;
        s.action = describe(applied, cfg.cluster);
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

void write_samples_jsonl(std::ostream& out, const std::vector<CollectedSample>& samples) {
  for (const auto& s : samples) {
    json j{{"seed", s.seed}, {"rho", s.rho}, {"t", s.t}, {"action", s.action},
           {"features", s.sample.features}, {"label", s.sample.label}};
    out << j.dump() << '\n';
  }
}

std::vector<TrainingSample> read_samples_jsonl(std::istream& in) {
  std::vector<TrainingSample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("features") || !j.contains("label"))
      throw ConfigError("epoch sample line " + std::to_string(lineno) + " is malformed");
    TrainingSample s;
    s.features = j.at("features").get<std::vector<double>>();
    s.label = j.at("label").get<Label>();
    for (double v : s.label)
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("epoch sample line " + std::to_string(lineno) + " has a label outside [0,1]");
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace airan
