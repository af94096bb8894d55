#include "airan/baselines.hpp"

#include <cmath>
#include <limits>

namespace airan {

namespace {

double capacity_of(const NodeSpec& node, Resource r) {
  return r == Resource::GPU ? node.gpu_capacity : node.cpu_capacity;
}

double& load_ref(std::vector<std::array<double, 2>>& loads, NodeId n, Resource r) {
  return loads[static_cast<std::size_t>(n)][r == Resource::GPU ? 0 : 1];
}

std::vector<std::array<double, 2>> node_loads(const EpochSnapshot& snapshot) {
  std::vector<std::array<double, 2>> loads;
  loads.reserve(snapshot.nodes.size());
  for (const auto& n : snapshot.nodes) loads.push_back({n.gpu_load, n.cpu_load});
  return loads;
}

}  // namespace

EpochDecision StaticPolicy::decide(const EpochContext&) {
  EpochDecision d;
  d.shortlist = {MigrationAction::noop()};
  return d;
}

double lyapunov_objective(const MigrationAction& action, const EpochSnapshot& snapshot,
                          const Cluster& cluster, const LyapunovConfig& config) {
  if (!action.is_move()) return 0.0;
  const auto& spec = cluster.instance(action.instance_id);
  const auto& inst = snapshot.instances.at(static_cast<std::size_t>(action.instance_id));
  const Resource r = dominant_resource(spec.category);
  const auto& src_spec = cluster.node(action.from_node);
  const auto& dst_spec = cluster.node(action.to_node);
  auto loads = node_loads(snapshot);
  const double share = instance_load(inst, src_spec, snapshot.interval);
  double& src = load_ref(loads, action.from_node, r);
  double& dst = load_ref(loads, action.to_node, r);
  const double before = src * src + dst * dst;
  src -= share;
  dst += share * capacity_of(src_spec, r) / capacity_of(dst_spec, r);
  const double drift = src * src + dst * dst - before;

  int total_arrivals = 0;
  for (const auto& s : snapshot.instances) total_arrivals += s.recent_arrivals;
  const double arrival_share =
      total_arrivals > 0 ? static_cast<double>(inst.recent_arrivals) / total_arrivals : 0.0;
  const double penalty = spec.reconfig_delay / snapshot.interval * arrival_share;
  return drift + config.v * penalty;
}

EpochDecision LyapunovPolicy::decide(const EpochContext& ctx) {
  EpochDecision d;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : ctx.candidates) {
    const double v = lyapunov_objective(a, ctx.snapshot, ctx.cluster, config_);
    if (v < best) {
      best = v;
      d.action = a;
    }
  }
  d.shortlist = {d.action};
  return d;
}

BestResponseResult best_response(const EpochSnapshot& snapshot, const Placement& placement,
                                 const Cluster& cluster, const MovableSet& movable,
                                 const GameTheoryConfig& config) {
  BestResponseResult result;
  auto loads = node_loads(snapshot);
  std::vector<NodeId> host = placement.hosts();
  std::vector<double> weights(cluster.node_count());
  for (const auto& n : cluster.nodes)
    weights[static_cast<std::size_t>(n.node_id)] = placement.resident_weights(cluster, n.node_id);

  // Load each player contributes to its original host.
  std::vector<double> base_share(cluster.instance_count(), 0.0);
  for (const auto& inst : snapshot.instances) {
    const auto s = static_cast<std::size_t>(inst.instance_id);
    base_share[s] = instance_load(inst, cluster.node(placement.host(inst.instance_id)), snapshot.interval);
  }

  int moves = 0;
  while (true) {
    bool moved = false;
    for (const auto& spec : cluster.instances) {
      if (!movable[static_cast<std::size_t>(spec.category)]) continue;
      const auto s = static_cast<std::size_t>(spec.instance_id);
      if (snapshot.instances.at(s).reconfiguring || placement.reconfiguring(spec.instance_id, snapshot.timestamp))
        continue;
      const Resource r = dominant_resource(spec.category);
      const NodeId at = host[s];
      const double base_cap = capacity_of(cluster.node(placement.host(spec.instance_id)), r);
      auto share_on = [&](NodeId n) { return base_share[s] * base_cap / capacity_of(cluster.node(n), r); };
      const double stay = load_ref(loads, at, r);
      const double switch_cost = config.switch_cost_weight * spec.reconfig_delay / snapshot.interval;
      NodeId best_node = at;
      double best_cost = stay;
      for (const auto& node : cluster.nodes) {
        if (node.node_id == at) continue;
        if (weights[static_cast<std::size_t>(node.node_id)] + spec.weight_footprint > node.vram_capacity) continue;
        const double cost = load_ref(loads, node.node_id, r) + share_on(node.node_id) + switch_cost;
        if (cost < best_cost - 1e-12) {
          best_cost = cost;
          best_node = node.node_id;
        }
      }
      if (best_node == at) continue;
      load_ref(loads, at, r) -= share_on(at);
      load_ref(loads, best_node, r) += share_on(best_node);
      weights[static_cast<std::size_t>(at)] -= spec.weight_footprint;
      weights[static_cast<std::size_t>(best_node)] += spec.weight_footprint;
      result.moves.push_back(MigrationAction::move(spec.instance_id, at, best_node));
      host[s] = best_node;
      moved = true;
      if (++moves >= config.iteration_cap) return result;
    }
    if (!moved) {
      result.converged = true;
      return result;
    }
  }
}

EpochDecision GameTheoryPolicy::decide(const EpochContext& ctx) {
  EpochDecision d;
  const auto br = best_response(ctx.snapshot, ctx.placement, ctx.cluster, movable_, config_);
  for (const auto& m : br.moves) {
    bool member = false;
    for (const auto& c : ctx.candidates) member = member || c == m;
    if (member) {
      d.action = m;
      break;
    }
  }
  d.shortlist = {d.action};
  return d;
}

InstanceId RoundRobinRouter::next(int service_group, const std::vector<InstanceId>& members) {
  if (members.empty()) throw ConfigError("replica group " + std::to_string(service_group) + " is empty");
  const auto g = static_cast<std::size_t>(service_group);
  if (cursor_.size() <= g) cursor_.resize(g + 1, 0);
  const InstanceId pick = members[cursor_[g] % members.size()];
  cursor_[g] = (cursor_[g] + 1) % members.size();
  return pick;
}

}  // namespace airan
