#pragma once

// Experiment runner: workload preparation (warm-up floors, rho scaling),
// policy wiring, metrics, load sweeps, critic ablation, and critic data
// collection. Outputs are JSON / CSV / JSON lines.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "airan/agent_client.hpp"
#include "airan/config.hpp"
#include "airan/sim.hpp"

namespace airan {

struct PreparedWorkload {
  std::vector<Request> requests;
  double factor = 1.0;
  double realized_rho = 0.0;
  double floors_estimate = 0.0;  // time-averaged GPU floor on the capacity nodes, unscaled
  double capacity = 0.0;         // G used for rho
};

// Base workload for the seed, then (when a rho target is set) a warm-up
// simulation over the first warmup_fraction of the horizon to estimate the
// RAN floor reservation, then scaling to the target.
PreparedWorkload prepare_workload(const ExperimentConfig& config, std::uint64_t seed);

struct EpochPoint {
  double t = 0.0;
  Label label{};
  std::string action;
  bool committed = false;
  std::size_t candidates = 0;
  std::size_t bound = 0;
  bool member = true;

  bool operator==(const EpochPoint&) const = default;
};

struct MetricsReport {
  std::string policy;
  std::uint64_t seed = 0;
  std::optional<double> rho_target;
  double realized_rho = 0.0;
  double scale_factor = 1.0;
  double overall = 1.0;
  double qr = 1.0;
  double qe = 1.0;
  double large = 1.0;
  double small = 1.0;
  std::vector<std::string> vacuous;  // metrics computed over zero requests
  std::array<ClassCounts, 4> counts{};
  std::size_t total_requests = 0;
  int migrations_large = 0;
  int migrations_total = 0;
  int epochs = 0;
  int rejected_actions = 0;
  int degraded_epochs = 0;
  std::size_t residual_backlog = 0;
  std::size_t invariant_violations = 0;
  std::optional<std::uint64_t> critic_hash;
  std::vector<EpochPoint> series;

  bool operator==(const MetricsReport&) const = default;
};

nlohmann::json report_to_json(const MetricsReport& r);
MetricsReport report_from_json(const nlohmann::json& j);

// Fulfillment figures and counts from a finished simulation.
MetricsReport compute_report(const SimResult& sim, std::string policy, std::uint64_t seed,
                             const PreparedWorkload& workload, std::optional<double> rho_target,
                             const Cluster& cluster);

struct RunOptions {
  std::shared_ptr<const CriticModel> critic;      // required by haf unless config names a model file
  std::shared_ptr<ShortlistProvider> provider;    // defaults to the configured agent
  std::optional<GateMode> gate_override;          // e.g. epsilon-greedy collection
  std::optional<double> epsilon;                  // for the epsilon-greedy gate
  std::ostream* event_log = nullptr;
  bool check_invariants = true;
};

struct RunOutput {
  MetricsReport report;
  SimResult sim;
};

std::shared_ptr<ShortlistProvider> make_provider(const ExperimentConfig& config);
SimConfig make_sim_config(const ExperimentConfig& config, PolicyKind policy);

RunOutput run_policy(const ExperimentConfig& config, PolicyKind policy, std::uint64_t seed,
                     const PreparedWorkload& workload, const RunOptions& options = {});
RunOutput run_experiment(const ExperimentConfig& config, PolicyKind policy, std::uint64_t seed,
                         const RunOptions& options = {});

// ----------------------------------------------------------------- sweeps

struct SweepRow {
  double rho = 0.0;
  std::string policy;
  double qr_fulfill = 0.0;
  double qe_fulfill = 0.0;
  double overall = 0.0;
  double migrations = 0.0;

  bool operator==(const SweepRow&) const = default;
};

struct SweepResult {
  std::vector<SweepRow> rows;             // medians over the configured seeds
  std::vector<MetricsReport> reports;     // one per (rho, policy, seed)
  std::vector<std::string> errors;        // failed cells, with context
};

SweepResult run_load_sweep(const ExperimentConfig& config, const std::vector<double>& rhos,
                           const std::vector<PolicyKind>& policies, const RunOptions& options = {});

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

// --------------------------------------------------------------- ablation

struct AblationRow {
  std::string agent;
  bool stub_substituted = false;  // the agent was unreachable for at least one epoch
  double overall_critic = 0.0;
  double overall_nocritic = 0.0;
  double critic_gain = 0.0;  // overall_critic - overall_nocritic
  double migrations_critic = 0.0;
  double migrations_nocritic = 0.0;
};

// For each agent ("stub" or an endpoint URL) runs haf and haf-nocritic over
// the configured seeds and reports medians.
std::vector<AblationRow> run_ablation(const ExperimentConfig& config, const std::vector<std::string>& agents,
                                      const RunOptions& options = {});
void write_ablation_csv(std::ostream& out, const std::vector<AblationRow>& rows);

// ------------------------------------------------------ critic collection

struct CollectedSample {
  TrainingSample sample;
  std::uint64_t seed = 0;
  double rho = 0.0;
  double t = 0.0;
  std::string action;
};

// Runs HAF with the epsilon-greedy gate over the stub shortlist for each
// (seed, rho) and returns one labelled sample per epoch.
std::vector<CollectedSample> collect_samples(const ExperimentConfig& config, const std::vector<std::uint64_t>& seeds,
                                             const std::vector<double>& rhos, double epsilon);

void write_samples_jsonl(std::ostream& out, const std::vector<CollectedSample>& samples);
std::vector<TrainingSample> read_samples_jsonl(std::istream& in);

double median(std::vector<double> values);

}  // namespace airan
