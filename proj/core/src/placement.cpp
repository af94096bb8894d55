#include "airan/placement.hpp"

#include <algorithm>
#include <cstdarg>
#include <cstdio>
#include <regex>
#include <set>
#include <sstream>

namespace airan {

namespace {

std::string format(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

double capacity_of(const NodeSpec& node, Resource r) {
  return r == Resource::GPU ? node.gpu_capacity : node.cpu_capacity;
}

double node_load(const NodeSnapshot& node, Resource r) {
  return r == Resource::GPU ? node.gpu_load : node.cpu_load;
}

}  // namespace

std::string describe(const MigrationAction& a, const Cluster& cluster) {
  if (!a.is_move()) return "no-op";
  const auto& inst = cluster.instance(a.instance_id);
  return format("move instance %d (%s) node %d -> node %d", a.instance_id,
                std::string(to_string(inst.category)).c_str(), a.from_node, a.to_node);
}

double instance_load(const InstanceSnapshot& inst, const NodeSpec& node, double interval) {
  const Resource r = dominant_resource(inst.category);
  const double demand = r == Resource::GPU ? inst.demand_gpu : inst.demand_cpu;
  const double backlog = r == Resource::GPU ? inst.backlog_gpu : inst.backlog_cpu;
  return (demand + backlog / interval) / capacity_of(node, r);
}

std::vector<MigrationAction> generate_candidates(const EpochSnapshot& snapshot,
                                                 const Placement& placement,
                                                 const Cluster& cluster,
                                                 const MovableSet& movable) {
  std::vector<MigrationAction> out{MigrationAction::noop()};
  std::vector<double> weights(cluster.node_count());
  for (const auto& n : cluster.nodes)
    weights[static_cast<std::size_t>(n.node_id)] = placement.resident_weights(cluster, n.node_id);
  for (const auto& inst : cluster.instances) {
    if (!movable[static_cast<std::size_t>(inst.category)]) continue;
    const auto s = static_cast<std::size_t>(inst.instance_id);
    if (s < snapshot.instances.size() && snapshot.instances[s].reconfiguring) continue;
    if (placement.reconfiguring(inst.instance_id, snapshot.timestamp)) continue;
    const NodeId from = placement.host(inst.instance_id);
    for (const auto& node : cluster.nodes) {
      if (node.node_id == from) continue;
      if (weights[static_cast<std::size_t>(node.node_id)] + inst.weight_footprint > node.vram_capacity)
        continue;
      out.push_back(MigrationAction::move(inst.instance_id, from, node.node_id));
    }
  }
  return out;
}

Placement apply_action(const Placement& placement, const MigrationAction& action) {
  Placement next = placement;
  if (action.is_move()) next.move(action.instance_id, action.to_node);
  return next;
}

std::string system_policy_text(double interval, int k) {
  std::ostringstream out;
  out << "You are the placement agent of an AI-RAN edge cluster where DU and CU-UP radio functions "
         "share GPU, CPU, and GPU memory with AI inference services.\n"
      << "Every " << format("%.1f", interval)
      << " s you may commit at most one single-instance migration. Rank candidates by these "
         "priorities, in order:\n"
      << "1. Keep RAN-only requests (DU and CU-UP stages) within their hard deadlines.\n"
      << "2. Raise the share of AI service requests that finish within their deadlines.\n"
      << "3. Charge each migration its reconfiguration time R_s, during which the moved instance "
         "serves nothing; skip moves whose outage will not pay back.\n"
      << "Prefer moves that relieve GPU/CPU pressure on nodes hosting RAN functions and that put AI "
         "services on nodes with spare GPU, CPU, and VRAM.\n"
      << "Reply with up to " << k << " candidate ids, best first, inside a fenced block:\n"
      << "```ids\n[<id>, ...]\n```\n";
  return out.str();
}

std::string build_prompt(const EpochSnapshot& snapshot, const std::vector<MigrationAction>& candidates,
                         const Cluster& cluster, int k) {
  std::ostringstream out;
  out << "## Policy\n" << system_policy_text(snapshot.interval, k) << "\n";
  out << "## State at t = " << format("%.3f", snapshot.timestamp) << " s\n";
  out << format("recent fulfillment: large-AI %.3f, small-AI %.3f, RAN %.3f\n", snapshot.recent_large,
                snapshot.recent_small, snapshot.recent_ran);
  out << "nodes:\n";
  for (const auto& n : snapshot.nodes) {
    const auto& spec = cluster.node(n.node_id);
    out << format(
        "  node %d (%s): gpu_util %.3f, cpu_util %.3f, ran_floor_util %.3f, vram_headroom %.2f GB, "
        "gpu_load %.3f, cpu_load %.3f, residents %d\n",
        n.node_id, spec.name.c_str(), n.gpu_util, n.cpu_util, n.floor_util, n.vram_headroom,
        n.gpu_load, n.cpu_load, n.resident_count);
  }
  out << "instances:\n";
  for (const auto& s : snapshot.instances) {
    const auto& spec = cluster.instance(s.instance_id);
    out << format(
        "  instance %d (%s): host %d, backlog %.3f s, active %d, kv %.2f GB, weights %.2f GB, "
        "R_s %.3f s, %s\n",
        s.instance_id, std::string(to_string(s.category)).c_str(), s.host, s.backlog_seconds,
        s.active_requests, s.kv_in_use, spec.weight_footprint, spec.reconfig_delay,
        s.reconfiguring ? format("reconfiguring (%.3f s left)", s.reconfig_remaining).c_str() : "ready");
  }
  out << "\n## Candidates\n";
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& a = candidates[i];
    out << "[" << i << "] " << describe(a, cluster);
    if (a.is_move()) {
      const auto& dst = snapshot.nodes.at(static_cast<std::size_t>(a.to_node));
      const double weight = cluster.instance(a.instance_id).weight_footprint;
      out << format(" | dest vram headroom after %.2f GB, dest gpu_load %.3f, dest cpu_load %.3f",
                    dst.vram_headroom - weight, dst.gpu_load, dst.cpu_load);
    }
    out << "\n";
  }
  out << "\nReturn at most " << k << " ids from the list above.\n";
  return out.str();
}

std::optional<std::vector<MigrationAction>> parse_shortlist(const std::string& reply,
                                                            const std::vector<MigrationAction>& candidates,
                                                            int k) {
  std::string body;
  static const std::regex fenced(R"(```[ \t]*(?:ids|json)?[ \t]*\r?\n?([\s\S]*?)```)");
  std::smatch m;
  if (std::regex_search(reply, m, fenced)) body = m[1].str();
  else {
    static const std::regex bracket(R"(\[([0-9,\s]*)\])");
    if (!std::regex_search(reply, m, bracket)) return std::nullopt;
    body = m[1].str();
  }
  static const std::regex number(R"(-?\d+)");
  std::vector<long long> ids;
  for (auto it = std::sregex_iterator(body.begin(), body.end(), number); it != std::sregex_iterator(); ++it)
    ids.push_back(std::stoll(it->str()));
  if (ids.empty()) return std::nullopt;

  std::vector<MigrationAction> out;
  std::set<long long> seen;
  for (auto id : ids) {
    if (id < 0 || id >= static_cast<long long>(candidates.size())) continue;
    if (!seen.insert(id).second) continue;
    out.push_back(candidates[static_cast<std::size_t>(id)]);
    if (static_cast<int>(out.size()) == k) break;
  }
  return out;
}

double stub_score(const MigrationAction& action, const EpochSnapshot& snapshot,
                  const Cluster& cluster, const StubConfig& config) {
  if (!action.is_move()) return 0.0;
  const auto& spec = cluster.instance(action.instance_id);
  const auto& inst = snapshot.instances.at(static_cast<std::size_t>(action.instance_id));
  const Resource r = dominant_resource(spec.category);
  const auto& src_spec = cluster.node(action.from_node);
  const auto& dst_spec = cluster.node(action.to_node);
  const auto& src = snapshot.nodes.at(static_cast<std::size_t>(action.from_node));
  const auto& dst = snapshot.nodes.at(static_cast<std::size_t>(action.to_node));

  const double share_src = instance_load(inst, src_spec, snapshot.interval);
  const double share_dst = share_src * capacity_of(src_spec, r) / capacity_of(dst_spec, r);
  const double load_src = node_load(src, r);
  const double load_dst = node_load(dst, r);
  const double before = load_src * load_src + load_dst * load_dst;
  const double after = (load_src - share_src) * (load_src - share_src) +
                       (load_dst + share_dst) * (load_dst + share_dst);
  const double penalty = config.reconfig_penalty_weight * spec.reconfig_delay / snapshot.interval;
  const double pressure = dst.floor_util * share_dst + (is_ran(spec.category) ? share_dst : 0.0);
  return (before - after) - penalty - pressure;
}

std::vector<MigrationAction> stub_shortlist(const EpochSnapshot& snapshot,
                                            const std::vector<MigrationAction>& candidates,
                                            const Cluster& cluster, const StubConfig& config) {
  struct Scored {
    double score;
    MigrationAction action;
  };
  std::vector<Scored> positive;
  for (const auto& a : candidates) {
    if (!a.is_move()) continue;
    double s = stub_score(a, snapshot, cluster, config);
    if (s > 0.0) positive.push_back({s, a});
  }
  std::sort(positive.begin(), positive.end(), [](const Scored& x, const Scored& y) {
    if (x.score != y.score) return x.score > y.score;
    if (x.action.instance_id != y.action.instance_id) return x.action.instance_id < y.action.instance_id;
    return x.action.to_node < y.action.to_node;
  });
  const int k = std::max(config.k, 1);
  std::vector<MigrationAction> out;
  const std::size_t moves = k == 1 ? 1 : static_cast<std::size_t>(k - 1);
  for (std::size_t i = 0; i < positive.size() && i < moves; ++i) out.push_back(positive[i].action);
  if (static_cast<int>(out.size()) < k) out.push_back(MigrationAction::noop());
  return out;
}

}  // namespace airan
