#include "airan/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace airan {

namespace {
thread_local int g_last_rounds = 0;

// Trims floating-point excess so the sum never exceeds capacity, taking it
// from the largest share (which is never a pinned floor when one exists).
void enforce_capacity(std::vector<double>& alloc, double capacity) {
  double total = std::accumulate(alloc.begin(), alloc.end(), 0.0);
  while (total > capacity && !alloc.empty()) {
    auto it = std::max_element(alloc.begin(), alloc.end());
    double excess = total - capacity;
    *it = std::max(0.0, *it - std::max(excess, *it * 1e-16));
    total = std::accumulate(alloc.begin(), alloc.end(), 0.0);
  }
}
}  // namespace

InstanceLoad aggregate_load(InstanceId instance, std::span<const ActiveWork> active, double now,
                            double epsilon) {
  InstanceLoad load;
  load.instance_id = instance;
  for (const auto& w : active) {
    load.resid_gpu_work += w.resid_gpu;
    load.resid_cpu_work += w.resid_cpu;
    double slack = w.deadline_budget - (now - w.arrival);
    load.urgency += 1.0 / std::max(slack, epsilon);
  }
  return load;
}

double compute_ran_floor(std::span<const ActiveWork> pending_ran, Category category, double now,
                         double per_hop, double downstream_est) {
  if (!is_ran(category)) throw Error("RAN floor requested for a non-RAN instance");
  if (pending_ran.empty()) return 0.0;
  const bool gpu = category == Category::DU;
  const double downstream = gpu ? downstream_est : 0.0;
  double psi = 0.0;
  double min_slack = std::numeric_limits<double>::infinity();
  RequestId worst = pending_ran.front().request_id;
  for (const auto& w : pending_ran) {
    psi += gpu ? w.resid_gpu : w.resid_cpu;
    double slack = w.deadline_budget - (now - w.arrival) - per_hop - downstream;
    if (slack < min_slack) {
      min_slack = slack;
      worst = w.request_id;
    }
  }
  if (!(min_slack > 0.0)) throw InfeasibleFloor(worst, min_slack);
  return psi / min_slack;
}

std::vector<double> solve_resource(std::span<const ResourceDemand> demands, double capacity) {
  const std::size_t n = demands.size();
  std::vector<double> alloc(n, 0.0);
  g_last_rounds = 0;
  double floors = 0.0;
  for (const auto& d : demands) floors += d.floor;
  if (floors > capacity) throw FloorOverflow(floors, capacity);

  std::vector<double> root(n);
  for (std::size_t i = 0; i < n; ++i) root[i] = std::sqrt(std::max(0.0, demands[i].weight));

  std::vector<bool> pinned(n, false);
  for (;;) {
    ++g_last_rounds;
    double residual = capacity;
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pinned[i]) residual -= demands[i].floor;
      else denom += root[i];
    }
    if (denom <= 0.0) {
      for (std::size_t i = 0; i < n; ++i) alloc[i] = demands[i].floor;
      break;
    }
    residual = std::max(residual, 0.0);
    bool clipped = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (pinned[i]) continue;
      alloc[i] = residual * root[i] / denom;
      if (alloc[i] < demands[i].floor) {
        pinned[i] = true;
        clipped = true;
      }
    }
    if (!clipped) {
      for (std::size_t i = 0; i < n; ++i)
        if (pinned[i]) alloc[i] = demands[i].floor;
      break;
    }
  }
  enforce_capacity(alloc, capacity);
  return alloc;
}

int last_solve_rounds() { return g_last_rounds; }

std::vector<double> share_residual(std::span<const ResourceDemand> demands,
                                   std::span<const Category> categories, double capacity,
                                   ShareRule rule, double alpha) {
  if (rule == ShareRule::SqrtActiveSet) return solve_resource(demands, capacity);

  const std::size_t n = demands.size();
  std::vector<double> alloc(n, 0.0);
  double floors = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    alloc[i] = demands[i].floor;
    floors += demands[i].floor;
  }
  if (floors > capacity) throw FloorOverflow(floors, capacity);
  const double residual = capacity - floors;

  std::vector<std::size_t> working;
  for (std::size_t i = 0; i < n; ++i)
    if (demands[i].weight > 0.0) working.push_back(i);
  if (working.empty() || residual <= 0.0) return alloc;

  switch (rule) {
    case ShareRule::EqualShare:
      for (auto i : working) alloc[i] += residual / static_cast<double>(working.size());
      break;
    case ShareRule::MaxWeight: {
      // Ties go to the lower index.
      std::size_t best = working.front();
      for (auto i : working)
        if (demands[i].weight > demands[best].weight) best = i;
      alloc[best] += residual;
      break;
    }
    case ShareRule::BidProportional: {
      double bids = 0.0;
      for (auto i : working) bids += demands[i].weight;
      for (auto i : working) alloc[i] += residual * demands[i].weight / bids;
      break;
    }
    case ShareRule::AlphaSplit: {
      std::vector<std::size_t> ran, ai;
      for (auto i : working) (is_ran(categories[i]) ? ran : ai).push_back(i);
      double ran_share = ai.empty() ? residual : ran.empty() ? 0.0 : alpha * residual;
      double ai_share = residual - ran_share;
      for (auto i : ran) alloc[i] += ran_share / static_cast<double>(ran.size());
      for (auto i : ai) alloc[i] += ai_share / static_cast<double>(ai.size());
      break;
    }
    case ShareRule::SqrtActiveSet:
      break;
  }
  enforce_capacity(alloc, capacity);
  return alloc;
}

namespace {

// Floor with the offending (already lost) requests removed from the
// deadline term; their work still counts toward the backlog.
double tolerant_floor(const NodeInstanceState& inst, double now, double per_hop,
                      std::vector<RequestId>& infeasible) {
  try {
    return compute_ran_floor(inst.work, inst.category, now, per_hop, inst.downstream_est);
  } catch (const InfeasibleFloor&) {
    const bool gpu = inst.category == Category::DU;
    const double downstream = gpu ? inst.downstream_est : 0.0;
    double psi = 0.0;
    double min_slack = std::numeric_limits<double>::infinity();
    for (const auto& w : inst.work) {
      psi += gpu ? w.resid_gpu : w.resid_cpu;
      double slack = w.deadline_budget - (now - w.arrival) - per_hop - downstream;
      if (slack > 0.0) min_slack = std::min(min_slack, slack);
      else infeasible.push_back(w.request_id);
    }
    return std::isfinite(min_slack) ? psi / min_slack : 0.0;
  }
}

std::vector<double> solve_with_fallback(std::vector<ResourceDemand>& demands,
                                        std::span<const Category> categories, double capacity,
                                        const AllocatorConfig& config, bool& overflow) {
  double floors = 0.0;
  for (const auto& d : demands) floors += d.floor;
  overflow = floors > capacity;
  if (overflow) {
    const double scale = capacity / floors;
    for (auto& d : demands) d.floor *= scale;
    // Rounding can leave the scaled sum a hair above capacity.
    double scaled = 0.0;
    for (const auto& d : demands) scaled += d.floor;
    if (scaled > capacity) {
      auto it = std::max_element(demands.begin(), demands.end(),
                                 [](const auto& a, const auto& b) { return a.floor < b.floor; });
      it->floor -= scaled - capacity;
    }
  }
  return share_residual(demands, categories, capacity, config.rule, config.alpha);
}

}  // namespace

NodeAllocation allocate_node(const NodeState& state, const AllocatorConfig& config) {
  NodeAllocation out;
  const std::size_t n = state.instances.size();
  out.instance_ids.reserve(n);
  out.gpu.assign(n, 0.0);
  out.cpu.assign(n, 0.0);
  out.gpu_floor.assign(n, 0.0);
  out.cpu_floor.assign(n, 0.0);
  if (n == 0) return out;

  std::vector<ResourceDemand> gpu_demand, cpu_demand;
  std::vector<Category> categories;
  std::vector<std::size_t> slot;  // demand index -> instance index
  for (std::size_t i = 0; i < n; ++i) {
    const auto& inst = state.instances[i];
    out.instance_ids.push_back(inst.instance_id);
    if (!inst.available || inst.work.empty()) continue;
    InstanceLoad load = aggregate_load(inst.instance_id, inst.work, state.now, config.epsilon);
    if (config.floors_enabled && is_ran(inst.category)) {
      double floor = tolerant_floor(inst, state.now, config.per_hop, out.infeasible_requests);
      (inst.category == Category::DU ? load.gpu_floor : load.cpu_floor) = floor;
    }
    gpu_demand.push_back({inst.instance_id, load.urgency * load.resid_gpu_work, load.gpu_floor});
    cpu_demand.push_back({inst.instance_id, load.urgency * load.resid_cpu_work, load.cpu_floor});
    categories.push_back(inst.category);
    slot.push_back(i);
  }
  if (slot.empty()) return out;

  auto g = solve_with_fallback(gpu_demand, categories, state.gpu_capacity, config, out.gpu_floor_overflow);
  auto c = solve_with_fallback(cpu_demand, categories, state.cpu_capacity, config, out.cpu_floor_overflow);
  for (std::size_t k = 0; k < slot.size(); ++k) {
    out.gpu[slot[k]] = g[k];
    out.cpu[slot[k]] = c[k];
    out.gpu_floor[slot[k]] = gpu_demand[k].floor;
    out.cpu_floor[slot[k]] = cpu_demand[k].floor;
  }
  return out;
}

}  // namespace airan
