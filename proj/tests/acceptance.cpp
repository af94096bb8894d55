// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "airan/experiment.hpp"
#include "oracle.hpp"

using namespace airan;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kDirectionalHorizon = 300.0;
const std::vector<std::uint64_t> kEvalSeeds{1, 2, 3, 4, 5};
const std::vector<std::uint64_t> kTrainSeeds{101, 102, 103, 104, 105};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Every epoch record of every run goes through here.
struct BoundAudit {
  std::size_t epochs = 0;
  std::size_t over_bound = 0;
  std::size_t wrong_bound = 0;
  std::size_t non_member = 0;

  void add(const SimResult& sim, const Cluster& cluster, const MovableSet& movable) {
    std::size_t movable_count = 0;
    for (const auto& s : cluster.instances) movable_count += movable[static_cast<std::size_t>(s.category)];
    const std::size_t bound = movable_count * (cluster.node_count() - 1) + 1;
    for (const auto& e : sim.epochs) {
      ++epochs;
      if (e.candidate_count > bound) ++over_bound;
      if (e.candidate_bound != bound) ++wrong_bound;
      if (e.committed && !e.member) ++non_member;
    }
  }
};

BoundAudit g_audit;

MovableSet movable_for(const ExperimentConfig& cfg, PolicyKind p) {
  return p == PolicyKind::Haf || p == PolicyKind::HafNoCritic ? cfg.haf_movable : cfg.baseline_movable;
}

RunOutput audited_run(const ExperimentConfig& cfg, PolicyKind p, std::uint64_t seed, const PreparedWorkload& wl,
                      const RunOptions& opts) {
  auto out = run_policy(cfg, p, seed, wl, opts);
  g_audit.add(out.sim, cfg.cluster, movable_for(cfg, p));
  return out;
}

// ------------------------------------------------------------------ criteria

Verdict allocator_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> count(2, 8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int trials = 1000;
  double worst_gap = 0.0, worst_alloc = 0.0;
  int failures = 0;
  for (int t = 0; t < trials; ++t) {
    const int n = count(rng);
    const double cap = std::pow(10.0, 12.0 + 3.0 * u(rng));
    std::vector<double> w(n), f(n, 0.0);
    std::vector<ResourceDemand> d(n);
    double fsum = 0.0;
    for (int i = 0; i < n; ++i) {
      w[i] = std::pow(10.0, 6.0 * u(rng));
      if (u(rng) < 0.5) f[i] = u(rng);
      fsum += f[i];
    }
    const double target = 0.9 * cap * u(rng);
    for (auto& x : f) x = fsum > 0.0 ? x * target / fsum : 0.0;
    for (int i = 0; i < n; ++i) d[i] = {i, w[i], f[i]};
    const auto closed = solve_resource(d, cap);
    const auto ref = testing::projected_gradient_solve(w, f, cap);
    const double oc = testing::allocation_objective(w, closed);
    const double orf = testing::allocation_objective(w, ref);
    const double gap = (oc - orf) / orf;
    double alloc_gap = 0.0;
    for (int i = 0; i < n; ++i) alloc_gap = std::max(alloc_gap, std::abs(closed[i] - ref[i]) / cap);
    worst_gap = std::max(worst_gap, gap);
    worst_alloc = std::max(worst_alloc, alloc_gap);
    if (gap > 1e-6) ++failures;
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && secs < 10.0,
          fmt("%d instances, max relative objective gap %.2e (tol 1e-6), max allocation gap %.2e of capacity, "
              "%d over tolerance, %.2f s (limit 10 s)",
              trials, worst_gap, worst_alloc, failures, secs)};
}

Verdict simulation_invariants(const ExperimentConfig& base, const RunOptions& opts) {
  const auto t0 = Clock::now();
  ExperimentConfig cfg = base;  // default preset, 60 s
  const auto wl = prepare_workload(cfg, 1);
  auto a = audited_run(cfg, cfg.policy, 1, wl, opts);
  const double secs = seconds_since(t0);
  auto b = audited_run(cfg, cfg.policy, 1, prepare_workload(cfg, 1), opts);
  const auto ha = std::hash<std::string>{}(report_to_json(a.report).dump(2));
  const auto hb = std::hash<std::string>{}(report_to_json(b.report).dump(2));
  const bool ok = a.sim.violation_count == 0 && a.sim.invariant_checks > 0 && a.sim.work_checks > 0 && ha == hb &&
                  secs < 30.0;
  std::string first = a.sim.invariant_violations.empty() ? "" : "; first: " + a.sim.invariant_violations.front();
  return {ok, fmt("policy %s, %zu requests, %zu invariant checks, %zu work checks, %zu violations, "
                  "metrics hash %s, %.2f s (limit 30 s)%s",
                  std::string(to_string(cfg.policy)).c_str(), a.report.total_requests, a.sim.invariant_checks,
                  a.sim.work_checks, a.sim.violation_count, ha == hb ? "identical" : "DIFFERS", secs,
                  first.c_str())};
}

double pooled_qr(const std::vector<MetricsReport>& rs) {
  std::size_t met = 0, total = 0;
  for (const auto& r : rs)
    for (auto c : {RequestClass::RAN_URLLC, RequestClass::RAN_EMBB}) {
      met += r.counts[static_cast<std::size_t>(c)].met;
      total += r.counts[static_cast<std::size_t>(c)].arrived;
    }
  return total ? static_cast<double>(met) / static_cast<double>(total) : 1.0;
}

Verdict ran_protection(const ExperimentConfig& base, const RunOptions& opts) {
  ExperimentConfig on = base, off = base;
  off.floors_enabled = false;
  std::vector<MetricsReport> ron, roff;
  for (auto s : kEvalSeeds) {
    const auto wl = prepare_workload(on, s);
    ron.push_back(audited_run(on, PolicyKind::Haf, s, wl, opts).report);
    roff.push_back(audited_run(off, PolicyKind::Haf, s, wl, opts).report);
  }
  const double qon = pooled_qr(ron), qoff = pooled_qr(roff);
  const double drop = 100.0 * (qon - qoff);
  return {qon >= 0.94 && drop >= 10.0,
          fmt("HAF, rho 1.0, 5 seeds pooled: Q^r %.2f%% with floors (need >= 94%%), %.2f%% without, "
              "drop %.1f pts (need >= 10)",
              100.0 * qon, 100.0 * qoff, drop)};
}

struct Scenario {
  std::vector<MetricsReport> haf, nocritic, stat;
};

Scenario overload_scenario(const ExperimentConfig& base, const RunOptions& opts) {
  Scenario sc;
  for (auto s : kEvalSeeds) {
    const auto wl = prepare_workload(base, s);
    sc.haf.push_back(audited_run(base, PolicyKind::Haf, s, wl, opts).report);
    sc.nocritic.push_back(audited_run(base, PolicyKind::HafNoCritic, s, wl, opts).report);
    sc.stat.push_back(audited_run(base, PolicyKind::Static, s, wl, opts).report);
  }
  return sc;
}

double med(const std::vector<MetricsReport>& rs, double MetricsReport::*field) {
  std::vector<double> v;
  for (const auto& r : rs) v.push_back(r.*field);
  return median(v);
}

double med_migrations(const std::vector<MetricsReport>& rs) {
  std::vector<double> v;
  for (const auto& r : rs) v.push_back(r.migrations_total);
  return median(v);
}

Verdict placement_matters(const Scenario& sc) {
  const double h = med(sc.haf, &MetricsReport::qe), s = med(sc.stat, &MetricsReport::qe);
  return {100.0 * (h - s) >= 15.0,
          fmt("both large-AI replicas on one GPU-heavy node, rho 1.0, stub agent + trained critic, median of 5 "
              "seeds: Q^e HAF %.2f%%, HAF-Static %.2f%%, gap %.1f pts (need >= 15)",
              100.0 * h, 100.0 * s, 100.0 * (h - s))};
}

Verdict critic_gating(const Scenario& sc) {
  const double mh = med_migrations(sc.haf), mn = med_migrations(sc.nocritic);
  const double oh = med(sc.haf, &MetricsReport::overall), on = med(sc.nocritic, &MetricsReport::overall);
  std::string per_seed;
  for (std::size_t i = 0; i < sc.haf.size(); ++i)
    per_seed += fmt("%s%d/%d", i ? " " : "", sc.haf[i].migrations_total, sc.nocritic[i].migrations_total);
  return {mh < mn && 100.0 * (oh - on) >= -1.0,
          fmt("median migrations HAF %.1f vs HAF-NoCritic %.1f (per seed %s); overall %.2f%% vs %.2f%% "
              "(need >= NoCritic - 1 pt)",
              mh, mn, per_seed.c_str(), 100.0 * oh, 100.0 * on)};
}

Verdict critic_training(const std::vector<TrainingSample>& samples, const TrainResult& res) {
  bool monotone = res.train_loss.size() >= 10;
  for (std::size_t e = 1; e < 10 && e < res.train_loss.size(); ++e)
    monotone = monotone && res.train_loss[e] < res.train_loss[e - 1];
  const double ratio = res.val_loss.back() / res.untrained_val_loss;

  // Gradient check on a fresh model standardized like the trained one.
  CriticModel fresh(res.model.inputs(), res.model.hidden(), res.model.node_count(), 99);
  fresh.set_standardization(res.model.feature_mean(), res.model.feature_std());
  std::vector<TrainingSample> batch(samples.begin(), samples.begin() + 32);
  std::vector<double> grad;
  fresh.loss_and_gradient(batch, grad);
  const auto theta = fresh.parameters();
  double worst = 0.0;
  std::size_t checked = 0, bad = 0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double h = 1e-6;
    auto plus = theta, minus = theta;
    plus[k] += h;
    minus[k] -= h;
    CriticModel a = fresh, b = fresh;
    a.set_parameters(plus);
    b.set_parameters(minus);
    const double fd = (a.loss(batch) - b.loss(batch)) / (2.0 * h);
    const double scale = std::max({std::abs(fd), std::abs(grad[k]), 1e-6});
    const double rel = std::abs(fd - grad[k]) / scale;
    worst = std::max(worst, rel);
    ++checked;
    if (rel > 1e-4) ++bad;
  }
  return {samples.size() >= 500 && monotone && ratio <= 0.5 && bad == 0,
          fmt("%zu samples (%zu train / %zu val); train MSE strictly decreasing over epochs 1-10: %s; "
              "val MSE %.4g vs untrained %.4g (%.1f%% reduction, need >= 50%%); gradient check %zu params, "
              "max rel err %.2e, %zu over 1e-4",
              samples.size(), res.train_count, res.val_count, monotone ? "yes" : "no", res.val_loss.back(),
              res.untrained_val_loss, 100.0 * (1.0 - ratio), checked, worst, bad)};
}

Verdict load_sweep(const ExperimentConfig& base, const RunOptions& opts) {
  std::string detail;
  bool ok = true;
  for (double rho : {0.75, 1.0, 1.25}) {
    ExperimentConfig cfg = base;
    cfg.workload.rho_target = rho;
    std::vector<MetricsReport> h, s;
    for (auto seed : kEvalSeeds) {
      const auto wl = prepare_workload(cfg, seed);
      h.push_back(audited_run(cfg, PolicyKind::Haf, seed, wl, opts).report);
      s.push_back(audited_run(cfg, PolicyKind::Static, seed, wl, opts).report);
    }
    const double gap = 100.0 * (med(h, &MetricsReport::qe) - med(s, &MetricsReport::qe));
    const bool cell = rho < 1.2 ? gap >= 10.0 : gap <= 5.0;
    ok = ok && cell;
    detail += fmt("%srho %.2f: Q^e gap %.1f pts (need %s)", detail.empty() ? "" : "; ", rho, gap,
                  rho < 1.2 ? ">= 10" : "<= 5");
  }
  return {ok, detail};
}

Verdict candidate_bound() {
  const auto& a = g_audit;
  return {a.epochs > 0 && a.over_bound == 0 && a.wrong_bound == 0 && a.non_member == 0,
          fmt("%zu epochs audited: %zu above |S^M|(|N|-1)+1, %zu with a mis-stated bound, %zu committed "
              "actions outside M_k",
              a.epochs, a.over_bound, a.wrong_bound, a.non_member)};
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  std::vector<Verdict> v(9);

  v[1] = allocator_oracle();

  // Critic: collect on held-out seeds, train on 500 samples.
  ExperimentConfig cfg = default_config();
  ExperimentConfig longer = cfg;
  longer.workload.horizon = kDirectionalHorizon;
  longer.workload.rho_target = 1.0;
  auto collected = collect_samples(longer, kTrainSeeds, {0.75, 1.0, 1.25}, longer.collect_epsilon);
  std::vector<TrainingSample> samples;
  for (const auto& c : collected)
    if (samples.size() < 500) samples.push_back(c.sample);
  std::vector<TrainingSample> all;
  for (const auto& c : collected) all.push_back(c.sample);
  TrainResult trained, deployed;
  try {
    trained = train_critic(samples, cfg.cluster.node_count(), cfg.train);
    deployed = train_critic(all, cfg.cluster.node_count(), cfg.train);
  } catch (const std::exception& e) {
    std::printf("critic training failed: %s\n", e.what());
    return 2;
  }
  v[6] = critic_training(samples, trained);
  std::printf("evaluation critic: %zu samples from held-out seeds, val MSE %.4g\n", all.size(),
              deployed.val_loss.back());
  RunOptions opts;
  opts.critic = std::make_shared<CriticModel>(deployed.model);
  const auto hash_before = opts.critic->hash();

  v[2] = simulation_invariants(cfg, opts);
  v[3] = ran_protection(longer, opts);
  const auto scenario = overload_scenario(longer, opts);
  v[4] = placement_matters(scenario);
  v[5] = critic_gating(scenario);
  v[7] = load_sweep(longer, opts);
  v[8] = candidate_bound();

  const char* names[] = {"",
                         "allocator-oracle equivalence",
                         "simulation invariants",
                         "RAN protection",
                         "placement matters",
                         "critic gating",
                         "critic training",
                         "load-sweep shape",
                         "candidate-set bound"};
  int failed = 0;
  for (int i = 1; i <= 8; ++i) {
    std::printf("criterion %d %s: %s | %s\n", i, names[i], v[i].pass ? "PASS" : "FAIL", v[i].detail.c_str());
    failed += !v[i].pass;
  }
  std::printf("critic frozen during evaluation: %s; total %.1f s\n",
              opts.critic->hash() == hash_before ? "yes" : "NO", seconds_since(t0));
  return failed == 0 ? 0 : 1;
}
