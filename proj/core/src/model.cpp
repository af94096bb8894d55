#include "airan/model.hpp"

#include <algorithm>
#include <set>

namespace airan {

std::string_view to_string(Category c) {
  switch (c) {
    case Category::DU: return "DU";
    case Category::CU_UP: return "CU_UP";
    case Category::LARGE_AI: return "LARGE_AI";
    case Category::SMALL_AI: return "SMALL_AI";
  }
  return "?";
}

std::string_view to_string(RequestClass c) {
  switch (c) {
    case RequestClass::LARGE_AI: return "LARGE_AI";
    case RequestClass::SMALL_AI: return "SMALL_AI";
    case RequestClass::RAN_URLLC: return "RAN_URLLC";
    case RequestClass::RAN_EMBB: return "RAN_EMBB";
  }
  return "?";
}

Category parse_category(std::string_view s) {
  if (s == "DU") return Category::DU;
  if (s == "CU_UP" || s == "CU-UP") return Category::CU_UP;
  if (s == "LARGE_AI" || s == "large-ai") return Category::LARGE_AI;
  if (s == "SMALL_AI" || s == "small-ai") return Category::SMALL_AI;
  throw ConfigError("unknown instance category '" + std::string(s) + "'");
}

RequestClass parse_request_class(std::string_view s) {
  if (s == "LARGE_AI") return RequestClass::LARGE_AI;
  if (s == "SMALL_AI") return RequestClass::SMALL_AI;
  if (s == "RAN_URLLC") return RequestClass::RAN_URLLC;
  if (s == "RAN_EMBB") return RequestClass::RAN_EMBB;
  throw ConfigError("unknown request class '" + std::string(s) + "'");
}

InstanceId Cluster::du_of_cell(int cell) const {
  for (const auto& inst : instances)
    if (inst.category == Category::DU && inst.cell_id == cell) return inst.instance_id;
  throw ConfigError("no DU for cell " + std::to_string(cell));
}

InstanceId Cluster::cu_up_of_cell(int cell) const {
  for (const auto& inst : instances)
    if (inst.category == Category::CU_UP && inst.cell_id == cell) return inst.instance_id;
  throw ConfigError("no CU-UP for cell " + std::to_string(cell));
}

std::vector<int> Cluster::cells() const {
  std::set<int> out;
  for (const auto& inst : instances)
    if (inst.cell_id) out.insert(*inst.cell_id);
  return {out.begin(), out.end()};
}

std::vector<InstanceId> Cluster::group_members(int service_group) const {
  std::vector<InstanceId> out;
  for (const auto& inst : instances)
    if (is_ai(inst.category) && inst.service_group == service_group) out.push_back(inst.instance_id);
  return out;
}

void Cluster::validate() const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (n.node_id != static_cast<NodeId>(i))
      throw ConfigError("node ids must be dense and ordered; got " + std::to_string(n.node_id));
    if (!(n.gpu_capacity > 0 && n.cpu_capacity > 0 && n.vram_capacity > 0))
      throw ConfigError("node " + std::to_string(n.node_id) + " has a non-positive capacity");
  }
  std::set<int> du_cells, cu_cells;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& s = instances[i];
    if (s.instance_id != static_cast<InstanceId>(i))
      throw ConfigError("instance ids must be dense and ordered; got " + std::to_string(s.instance_id));
    if (!(s.reconfig_delay > 0))
      throw ConfigError("instance " + std::to_string(s.instance_id) + " needs reconfig_delay > 0");
    if (s.weight_footprint < 0)
      throw ConfigError("instance " + std::to_string(s.instance_id) + " has negative weights");
    if (s.category == Category::CU_UP && s.weight_footprint != 0.0)
      throw ConfigError("CU-UP instance " + std::to_string(s.instance_id) + " must have zero weights");
    if (is_ran(s.category) != s.cell_id.has_value())
      throw ConfigError("instance " + std::to_string(s.instance_id) +
                        ": cell_id is required for RAN functions and forbidden otherwise");
    if (s.category == Category::DU && !du_cells.insert(*s.cell_id).second)
      throw ConfigError("cell " + std::to_string(*s.cell_id) + " has more than one DU");
    if (s.category == Category::CU_UP && !cu_cells.insert(*s.cell_id).second)
      throw ConfigError("cell " + std::to_string(*s.cell_id) + " has more than one CU-UP");
  }
  if (du_cells != cu_cells) throw ConfigError("every cell needs exactly one DU and one CU-UP");
}

void Request::validate() const {
  if (!(deadline_budget > 0))
    throw ConfigError("request " + std::to_string(request_id) + " has non-positive deadline");
  if (is_ran(cls)) {
    if (kv_cache != 0.0)
      throw ConfigError("RAN request " + std::to_string(request_id) + " cannot hold KV cache");
    if (stages.size() != 2)
      throw ConfigError("RAN request " + std::to_string(request_id) + " needs DU and CU-UP stages");
  } else {
    if (!target_service)
      throw ConfigError("AI request " + std::to_string(request_id) + " needs a target service");
    if (stages.size() != 1)
      throw ConfigError("AI request " + std::to_string(request_id) + " carries exactly one stage");
    if (kv_cache < 0)
      throw ConfigError("AI request " + std::to_string(request_id) + " has negative KV");
  }
}

CompletionRecord make_completion(const Request& req, double latency, double transport_delay) {
  return CompletionRecord{req.request_id, req.cls, latency, transport_delay,
                          latency <= req.deadline_budget};
}

Placement::Placement(std::vector<NodeId> host_of)
    : host_of_(std::move(host_of)), reconfig_until_(host_of_.size()) {}

std::vector<InstanceId> Placement::residents(NodeId n) const {
  std::vector<InstanceId> out;
  for (std::size_t s = 0; s < host_of_.size(); ++s)
    if (host_of_[s] == n) out.push_back(static_cast<InstanceId>(s));
  return out;
}

std::optional<double> Placement::reconfig_until(InstanceId s) const {
  return reconfig_until_.at(static_cast<std::size_t>(s));
}

void Placement::set_reconfig_until(InstanceId s, std::optional<double> until) {
  reconfig_until_.at(static_cast<std::size_t>(s)) = until;
}

bool Placement::reconfiguring(InstanceId s, double now) const {
  auto u = reconfig_until(s);
  return u && now < *u;
}

double Placement::resident_weights(const Cluster& cluster, NodeId n) const {
  double total = 0.0;
  for (std::size_t s = 0; s < host_of_.size(); ++s)
    if (host_of_[s] == n) total += cluster.instances[s].weight_footprint;
  return total;
}

double AllocationVector::node_gpu(const Placement& p, NodeId n) const {
  double sum = 0.0;
  for (std::size_t s = 0; s < gpu.size(); ++s)
    if (p.host(static_cast<InstanceId>(s)) == n) sum += gpu[s];
  return sum;
}

double AllocationVector::node_cpu(const Placement& p, NodeId n) const {
  double sum = 0.0;
  for (std::size_t s = 0; s < cpu.size(); ++s)
    if (p.host(static_cast<InstanceId>(s)) == n) sum += cpu[s];
  return sum;
}

namespace {

NodeId checked_host(const Cluster& cluster, const Placement& placement, InstanceId s) {
  if (s < 0 || static_cast<std::size_t>(s) >= placement.instance_count())
    throw PlacementInconsistency("stage instance " + std::to_string(s) + " is unknown");
  NodeId n = placement.host(s);
  if (n < 0 || static_cast<std::size_t>(n) >= cluster.node_count())
    throw PlacementInconsistency("instance " + std::to_string(s) + " is not resident on any node");
  return n;
}

}  // namespace

double compute_transport_delay(const Request& request, const Cluster& cluster,
                               const Placement& placement, double per_hop,
                               double ran_packet_delay) {
  if (request.stages.empty())
    throw PlacementInconsistency("request " + std::to_string(request.request_id) + " has no stages");
  if (is_ran(request.cls)) {
    if (request.stages.size() != 2)
      throw PlacementInconsistency("RAN request without a DU/CU-UP stage pair");
    NodeId du = checked_host(cluster, placement, request.stages[0].instance_id);
    NodeId cu = checked_host(cluster, placement, request.stages[1].instance_id);
    return du == cu ? 0.0 : per_hop;
  }
  NodeId ai = checked_host(cluster, placement, request.stages[0].instance_id);
  NodeId ingress = checked_host(cluster, placement, cluster.du_of_cell(request.cell_id));
  return ran_packet_delay + (ai == ingress ? 0.0 : per_hop);
}

std::vector<bool> check_memory_feasible(const Placement& placement,
                                        const std::vector<double>& active_kv,
                                        const Cluster& cluster) {
  std::vector<bool> ok(cluster.node_count());
  for (const auto& node : cluster.nodes) {
    auto n = static_cast<std::size_t>(node.node_id);
    double kv = n < active_kv.size() ? active_kv[n] : 0.0;
    ok[n] = placement.resident_weights(cluster, node.node_id) + kv <= node.vram_capacity;
  }
  return ok;
}

bool check_capacity(const AllocationVector& alloc, const Placement& placement,
                    const Cluster& cluster, double rel_tol) {
  for (const auto& node : cluster.nodes) {
    if (alloc.node_gpu(placement, node.node_id) > node.gpu_capacity * (1.0 + rel_tol)) return false;
    if (alloc.node_cpu(placement, node.node_id) > node.cpu_capacity * (1.0 + rel_tol)) return false;
  }
  for (std::size_t s = 0; s < alloc.gpu.size(); ++s)
    if (alloc.gpu[s] < 0 || alloc.cpu[s] < 0) return false;
  return true;
}

}  // namespace airan
