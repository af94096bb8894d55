#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "airan/experiment.hpp"

namespace fs = std::filesystem;
using namespace airan;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<double> horizon;
  std::optional<double> rho;
  std::vector<std::uint64_t> seeds;
  std::string critic;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config, "Configuration file (default: built-in preset)")->check(CLI::ExistingFile);
  app->add_option("-o,--out", c.out, "Output directory (default: config output_dir)");
  app->add_option("--horizon", c.horizon, "Override the horizon in seconds")->check(CLI::PositiveNumber);
  app->add_option("--rho", c.rho, "Override the load ratio")->check(CLI::PositiveNumber);
  app->add_option("--critic", c.critic, "Critic model file")->check(CLI::ExistingFile);
}

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? default_config() : load_config(c.config);
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.horizon) cfg.workload.horizon = *c.horizon;
  if (c.rho) cfg.workload.rho_target = *c.rho;
  if (!c.seeds.empty()) cfg.seeds = c.seeds;
  if (!c.critic.empty()) cfg.critic_model = c.critic;
  return cfg;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  return f;
}

int cmd_run(const Common& c, const std::string& policy, std::uint64_t seed, bool trace) {
  auto cfg = load(c);
  const PolicyKind kind = policy.empty() ? cfg.policy : parse_policy(policy);
  RunOptions opts;
  std::ofstream events;
  if (trace) {
    events = open_out(cfg.output_dir / "events.jsonl");
    opts.event_log = &events;
  }
  auto run = run_experiment(cfg, kind, seed, opts);
  auto f = open_out(cfg.output_dir / "metrics.json");
  f << report_to_json(run.report).dump(2) << '\n';
  const auto& r = run.report;
  std::printf("%s seed=%llu rho=%.3f overall=%.4f qr=%.4f qe=%.4f large=%.4f small=%.4f mig=%d/%d\n",
              r.policy.c_str(), static_cast<unsigned long long>(seed), r.realized_rho, r.overall, r.qr, r.qe, r.large,
              r.small, r.migrations_large, r.migrations_total);
  if (r.invariant_violations > 0) {
    for (const auto& m : run.sim.invariant_violations) std::fprintf(stderr, "invariant: %s\n", m.c_str());
    return 3;
  }
  return 0;
}

int cmd_sweep(const Common& c, const std::vector<double>& rhos, const std::vector<std::string>& policies) {
  auto cfg = load(c);
  std::vector<PolicyKind> kinds;
  for (const auto& p : policies) kinds.push_back(parse_policy(p));
  auto res = run_load_sweep(cfg, rhos, kinds);
  auto f = open_out(cfg.output_dir / "sweep.csv");
  write_sweep_csv(f, res.rows);
  nlohmann::json all = nlohmann::json::array();
  for (const auto& r : res.reports) all.push_back(report_to_json(r));
  open_out(cfg.output_dir / "sweep_reports.json") << all.dump(2) << '\n';
  write_sweep_csv(std::cout, res.rows);
  for (const auto& e : res.errors) std::fprintf(stderr, "cell failed: %s\n", e.c_str());
  return res.errors.empty() ? 0 : 2;
}

int cmd_ablate(const Common& c, const std::vector<std::string>& agents) {
  auto cfg = load(c);
  auto rows = run_ablation(cfg, agents);
  auto f = open_out(cfg.output_dir / "ablation.csv");
  write_ablation_csv(f, rows);
  write_ablation_csv(std::cout, rows);
  for (const auto& r : rows)
    if (r.stub_substituted) std::fprintf(stderr, "agent %s unreachable: stub substituted\n", r.agent.c_str());
  return 0;
}

int cmd_collect(const Common& c, std::vector<double> rhos, std::optional<double> epsilon) {
  auto cfg = load(c);
  if (rhos.empty()) rhos.push_back(cfg.workload.rho_target.value_or(1.0));
  auto samples = collect_samples(cfg, cfg.seeds, rhos, epsilon.value_or(cfg.collect_epsilon));
  auto f = open_out(cfg.output_dir / "epoch_samples.jsonl");
  write_samples_jsonl(f, samples);
  std::printf("%zu samples -> %s\n", samples.size(), (cfg.output_dir / "epoch_samples.jsonl").string().c_str());
  return 0;
}

int cmd_train(const Common& c, const std::vector<std::string>& inputs, const std::string& model_out) {
  auto cfg = load(c);
  std::vector<TrainingSample> samples;
  for (const auto& p : inputs) {
    std::ifstream in(p);
    if (!in) throw ConfigError("cannot read " + p);
    auto part = read_samples_jsonl(in);
    samples.insert(samples.end(), part.begin(), part.end());
  }
  auto res = train_critic(samples, cfg.cluster.node_count(), cfg.train);
  const fs::path path = model_out.empty() ? cfg.output_dir / "critic.bin" : fs::path(model_out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  res.model.save(path);
  auto log = open_out(path.parent_path() / "train_log.csv");
  log << "epoch,train_mse,val_mse\n";
  for (std::size_t e = 0; e < res.train_loss.size(); ++e)
    log << e + 1 << ',' << res.train_loss[e] << ',' << res.val_loss[e] << '\n';
  std::printf("samples train=%zu val=%zu untrained_val=%.6g final_train=%.6g final_val=%.6g hash=%016llx\n",
              res.train_count, res.val_count, res.untrained_val_loss, res.train_loss.back(), res.val_loss.back(),
              static_cast<unsigned long long>(res.model.hash()));
  std::printf("model -> %s\n", path.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Placement and allocation simulator for shared AI / RAN edge clusters"};
  app.require_subcommand(1);

  Common common;

  auto* run = app.add_subcommand("run", "Run one policy for one seed and write metrics.json");
  add_common(run, common);
  std::string policy;
  std::uint64_t seed = 1;
  bool trace = false;
  run->add_option("-p,--policy", policy, "haf | haf-nocritic | static | round-robin | lyapunov | game | alpha-split");
  run->add_option("-s,--seed", seed, "Workload seed");
  run->add_flag("-t,--trace", trace, "Write the event log to events.jsonl");

  auto* sweep = app.add_subcommand("sweep", "Load sweep over rho values; writes sweep.csv");
  add_common(sweep, common);
  std::vector<double> rhos{0.75, 1.0, 1.25};
  std::vector<std::string> policies{"haf", "static"};
  sweep->add_option("--rhos", rhos, "Load ratios")->delimiter(',');
  sweep->add_option("--policies", policies, "Policies")->delimiter(',');
  sweep->add_option("--seeds", common.seeds, "Seeds (default: config seeds)")->delimiter(',');

  auto* ablate = app.add_subcommand("ablate", "HAF vs HAF-NoCritic per agent; writes ablation.csv");
  add_common(ablate, common);
  std::vector<std::string> agents{"stub"};
  ablate->add_option("--agents", agents, "Agent endpoints or 'stub'")->delimiter(',');
  ablate->add_option("--seeds", common.seeds, "Seeds (default: config seeds)")->delimiter(',');

  auto* collect = app.add_subcommand("collect-critic-data", "Epsilon-greedy runs; writes epoch_samples.jsonl");
  add_common(collect, common);
  std::vector<double> collect_rhos;
  std::optional<double> epsilon;
  collect->add_option("--rhos", collect_rhos, "Load ratios (default: config rho)")->delimiter(',');
  collect->add_option("--seeds", common.seeds, "Seeds (default: config seeds)")->delimiter(',');
  collect->add_option("--epsilon", epsilon, "Exploration probability")->check(CLI::Range(0.0, 1.0));

  auto* train = app.add_subcommand("train-critic", "Train the critic from epoch sample files");
  add_common(train, common);
  std::vector<std::string> inputs;
  std::string model_out;
  train->add_option("samples", inputs, "epoch_samples.jsonl files")->required()->check(CLI::ExistingFile);
  train->add_option("-m,--model", model_out, "Model output path (default: <out>/critic.bin)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(common, policy, seed, trace);
    if (*sweep) return cmd_sweep(common, rhos, policies);
    if (*ablate) return cmd_ablate(common, agents);
    if (*collect) return cmd_collect(common, collect_rhos, epsilon);
    if (*train) return cmd_train(common, inputs, model_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
