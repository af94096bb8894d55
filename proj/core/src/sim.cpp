#include "airan/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <ostream>
#include <queue>
#include <unordered_map>

#include <json.hpp>

namespace airan {

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::ReconfigEnd: return "ReconfigEnd";
    case EventKind::EpochBoundary: return "EpochBoundary";
    case EventKind::Arrival: return "Arrival";
    case EventKind::StageCompletion: return "StageCompletion";
  }
  return "?";
}

bool event_before(const Event& a, const Event& b) {
  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
  if (a.kind != b.kind) return a.kind < b.kind;
  return a.payload < b.payload;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDoneTol = 1e-9;  // relative residual treated as finished
constexpr std::size_t kMaxViolationMessages = 20;

int class_group(RequestClass c) {
  switch (c) {
    case RequestClass::LARGE_AI: return 0;
    case RequestClass::SMALL_AI: return 1;
    default: return 2;
  }
}

struct RequestState {
  int stage = 0;
  double resid_g = 0.0;
  double resid_c = 0.0;
  double served_g = 0.0;
  double served_c = 0.0;
  double enqueued = 0.0;
  bool admitted = false;  // in service, holding its KV cache
  bool arrived = false;
  bool done = false;
};

struct InstanceState {
  std::deque<std::size_t> queue;  // request indices, head first
  double gpu = 0.0;
  double cpu = 0.0;
  double gpu_floor = 0.0;
  double routed_gpu = 0.0;  // work routed here since the last epoch
  double routed_cpu = 0.0;
  int routed = 0;
};

struct NodeAccumulator {
  double gpu_alloc = 0.0;  // integral of allocated GPU since the last epoch
  double cpu_alloc = 0.0;
  double gpu_floor = 0.0;
  double floor_total = 0.0;  // integral of GPU floors over the whole run
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const { return event_before(b, a); }
};

}  // namespace

struct Simulator::Impl {
  const Cluster& cluster;
  Placement placement;
  std::vector<Request> requests;
  SimConfig config;
  PlacementPolicy* policy;

  std::vector<RequestState> rs;
  std::vector<InstanceState> inst;
  std::vector<NodeAccumulator> acc;
  std::vector<double> active_kv;  // per node
  std::map<int, DownstreamEstimator> downstream;  // per cell
  std::map<int, std::vector<InstanceId>> groups;
  RoundRobinRouter rr;
  std::priority_queue<Event, std::vector<Event>, EventLater> events;
  double now = 0.0;
  double last_epoch = 0.0;
  std::array<int, 3> recent_total{};
  std::array<int, 3> recent_met{};
  SimResult result;

  Impl(const Cluster& c, Placement p, std::vector<Request> reqs, SimConfig cfg, PlacementPolicy* pol)
      : cluster(c), placement(std::move(p)), requests(std::move(reqs)), config(cfg), policy(pol) {
    cluster.validate();
    if (placement.instance_count() != cluster.instance_count())
      throw ConfigError("placement covers " + std::to_string(placement.instance_count()) +
                        " instances, cluster has " + std::to_string(cluster.instance_count()));
    for (const auto& s : cluster.instances) {
      NodeId h = placement.host(s.instance_id);
      if (h < 0 || static_cast<std::size_t>(h) >= cluster.node_count())
        throw PlacementInconsistency("instance " + std::to_string(s.instance_id) + " has no host");
      if (is_ai(s.category)) groups[s.service_group].push_back(s.instance_id);
    }
    if (config.epochs_enabled && !policy) throw ConfigError("epochs enabled without a placement policy");
    rs.resize(requests.size());
    inst.resize(cluster.instance_count());
    acc.resize(cluster.node_count());
    active_kv.assign(cluster.node_count(), 0.0);
    for (int cell : cluster.cells()) {
      double work = 0.0;
      std::size_t count = 0;
      for (const auto& r : requests)
        if (is_ran(r.cls) && r.cell_id == cell && r.stages.size() == 2) {
          work += r.stages[1].cpu_work;
          ++count;
        }
      const auto cu_host = placement.host(cluster.cu_up_of_cell(cell));
      const double cores = cluster.node(cu_host).cpu_capacity;
      downstream.emplace(cell, DownstreamEstimator(count > 0 && cores > 0.0 ? work / count / cores : 0.0));
    }
    for (std::size_t i = 0; i < requests.size(); ++i) {
      requests[i].validate();
      if (i > 0 && requests[i].arrival < requests[i - 1].arrival)
        throw ConfigError("requests must be sorted by arrival");
      events.push({requests[i].arrival, EventKind::Arrival, static_cast<std::int64_t>(i)});
    }
    if (config.epochs_enabled && config.interval > 0.0 && config.interval <= config.horizon)
      events.push({config.interval, EventKind::EpochBoundary, 1});
  }

  NodeId host(InstanceId s) const { return placement.host(s); }
  const NodeSpec& node_of(InstanceId s) const { return cluster.node(host(s)); }
  bool reconfiguring(InstanceId s) const { return placement.reconfiguring(s, now); }

  bool serving(InstanceId s) const {
    const auto& q = inst[static_cast<std::size_t>(s)].queue;
    return !q.empty() && rs[q.front()].admitted && !reconfiguring(s);
  }

  // ---------------------------------------------------------------- routing

  double backlog_seconds(InstanceId s) const {
    const auto& st = inst[static_cast<std::size_t>(s)];
    const auto& node = node_of(s);
    const double g = st.gpu > 0.0 ? st.gpu : node.gpu_capacity;
    const double c = st.cpu > 0.0 ? st.cpu : node.cpu_capacity;
    double total = 0.0;
    for (auto q : st.queue) total += rs[q].resid_g / g + rs[q].resid_c / c;
    if (auto until = placement.reconfig_until(s); until && *until > now) total += *until - now;
    return total;
  }

  InstanceId route(const Request& r) {
    auto it = groups.find(*r.target_service);
    if (it == groups.end() || it->second.empty())
      throw ConfigError("no resident instance serves group " + std::to_string(*r.target_service));
    if (config.routing == RoutingMode::RoundRobin) return rr.next(it->first, it->second);
    InstanceId best = kNoInstance;
    double best_backlog = kInf;
    for (auto s : it->second) {
      const double b = backlog_seconds(s);
      if (best == kNoInstance || b < best_backlog ||
          (b == best_backlog && (host(s) < host(best) || (host(s) == host(best) && s < best)))) {
        best = s;
        best_backlog = b;
      }
    }
    return best;
  }

  InstanceId stage_instance(std::size_t idx, int stage) {
    auto& st = requests[idx].stages[static_cast<std::size_t>(stage)];
    if (st.instance_id != kNoInstance) return st.instance_id;
    const auto& r = requests[idx];
    if (is_ran(r.cls)) st.instance_id = stage == 0 ? cluster.du_of_cell(r.cell_id) : cluster.cu_up_of_cell(r.cell_id);
    else st.instance_id = route(r);
    return st.instance_id;
  }

  void enqueue(std::size_t idx, int stage) {
    const InstanceId s = stage_instance(idx, stage);
    const auto& work = requests[idx].stages[static_cast<std::size_t>(stage)];
    auto& r = rs[idx];
    r.stage = stage;
    r.resid_g = work.gpu_work;
    r.resid_c = work.cpu_work;
    r.served_g = 0.0;
    r.served_c = 0.0;
    r.enqueued = now;
    r.admitted = false;
    auto& st = inst[static_cast<std::size_t>(s)];
    st.queue.push_back(idx);
    st.routed += 1;
    st.routed_gpu += work.gpu_work;
    st.routed_cpu += work.cpu_work;
  }

  // Head-of-line admission: AI requests need room for their KV cache.
  void try_admit(InstanceId s) {
    auto& st = inst[static_cast<std::size_t>(s)];
    if (st.queue.empty() || rs[st.queue.front()].admitted || reconfiguring(s)) return;
    const std::size_t head = st.queue.front();
    const double kv = is_ai(requests[head].cls) ? requests[head].kv_cache : 0.0;
    const NodeId n = host(s);
    if (kv > 0.0) {
      const double used = placement.resident_weights(cluster, n) + active_kv[static_cast<std::size_t>(n)];
      if (used + kv > cluster.node(n).vram_capacity) return;  // memory-blocked
    }
    active_kv[static_cast<std::size_t>(n)] += kv;
    rs[head].admitted = true;
  }

  void release(std::size_t idx, NodeId n) {
    if (!rs[idx].admitted) return;
    if (is_ai(requests[idx].cls)) {
      auto& kv = active_kv[static_cast<std::size_t>(n)];
      kv = std::max(0.0, kv - requests[idx].kv_cache);
    }
    rs[idx].admitted = false;
  }

  // ------------------------------------------------------------- allocation

  void solve() {
    for (const auto& node : cluster.nodes) {
      NodeState state{node.node_id, node.gpu_capacity, node.cpu_capacity, now, {}};
      for (auto s : placement.residents(node.node_id)) {
        NodeInstanceState x;
        x.instance_id = s;
        x.category = cluster.instance(s).category;
        x.available = serving(s);
        const auto& st = inst[static_cast<std::size_t>(s)];
        if (x.available) {
          x.work.reserve(st.queue.size());
          for (auto q : st.queue) {
            const auto& r = requests[q];
            x.work.push_back({r.request_id, r.arrival, r.deadline_budget, rs[q].resid_g, rs[q].resid_c});
          }
        }
        if (x.category == Category::DU) {
          if (auto c = cluster.instance(s).cell_id) x.downstream_est = downstream.at(*c).bound();
        }
        state.instances.push_back(std::move(x));
      }
      const auto a = allocate_node(state, config.allocator);
      for (std::size_t i = 0; i < a.instance_ids.size(); ++i) {
        auto& st = inst[static_cast<std::size_t>(a.instance_ids[i])];
        st.gpu = a.gpu[i];
        st.cpu = a.cpu[i];
        st.gpu_floor = a.gpu_floor[i];
      }
    }
  }

  // ---------------------------------------------------------- fluid service

  static double phase_time(double resid, double rate) {
    if (resid <= 0.0) return 0.0;
    return rate > 0.0 ? resid / rate : kInf;
  }

  // Next head-of-line completion: (time, instance), ties to the lower request id.
  std::pair<double, InstanceId> next_completion() const {
    double best = kInf;
    InstanceId who = kNoInstance;
    for (std::size_t s = 0; s < inst.size(); ++s) {
      if (!serving(static_cast<InstanceId>(s))) continue;
      const auto& st = inst[s];
      const auto& r = rs[st.queue.front()];
      const double t = now + phase_time(r.resid_g, st.gpu) + phase_time(r.resid_c, st.cpu);
      if (!std::isfinite(t)) continue;
      if (t < best || (t == best && who != kNoInstance &&
                       requests[st.queue.front()].request_id <
                           requests[inst[static_cast<std::size_t>(who)].queue.front()].request_id)) {
        best = t;
        who = static_cast<InstanceId>(s);
      }
    }
    return {best, who};
  }

  void advance(double to) {
    const double dt = to - now;
    if (dt <= 0.0) {
      now = std::max(now, to);
      return;
    }
    for (std::size_t s = 0; s < inst.size(); ++s) {
      auto& st = inst[s];
      const auto n = static_cast<std::size_t>(host(static_cast<InstanceId>(s)));
      acc[n].gpu_alloc += st.gpu * dt;
      acc[n].cpu_alloc += st.cpu * dt;
      acc[n].gpu_floor += st.gpu_floor * dt;
      acc[n].floor_total += st.gpu_floor * dt;
      if (!serving(static_cast<InstanceId>(s))) continue;
      auto& r = rs[st.queue.front()];
      double rem = dt;
      if (r.resid_g > 0.0) {
        if (st.gpu > 0.0) {
          const double need = r.resid_g / st.gpu;
          const double used = std::min(need, rem);
          r.served_g += st.gpu * used;
          r.resid_g = need <= rem ? 0.0 : r.resid_g - st.gpu * used;
          rem -= used;
        } else {
          rem = 0.0;
        }
      }
      if (r.resid_g <= 0.0 && rem > 0.0 && r.resid_c > 0.0 && st.cpu > 0.0) {
        const double need = r.resid_c / st.cpu;
        const double used = std::min(need, rem);
        r.served_c += st.cpu * used;
        r.resid_c = need <= rem ? 0.0 : r.resid_c - st.cpu * used;
      }
    }
    now = to;
  }

  // Same slack as the completion rule: relative 1e-9 or 1e-12 s of service.
  void check_work(std::size_t idx, double gpu_rate, double cpu_rate) {
    const auto& work = requests[idx].stages[static_cast<std::size_t>(rs[idx].stage)];
    const auto& r = rs[idx];
    ++result.work_checks;
    auto off = [](double served, double declared, double rate) {
      return declared > 0.0 && std::abs(served - declared) > kDoneTol * declared + 1e-12 * rate;
    };
    if (off(r.served_g, work.gpu_work, gpu_rate) || off(r.served_c, work.cpu_work, cpu_rate))
      violation("work conservation: request " + std::to_string(requests[idx].request_id) + " stage " +
                std::to_string(r.stage) + " served (" + std::to_string(r.served_g) + ", " +
                std::to_string(r.served_c) + ") of (" + std::to_string(work.gpu_work) + ", " +
                std::to_string(work.cpu_work) + ")");
  }

  void complete_head(InstanceId s) {
    auto& st = inst[static_cast<std::size_t>(s)];
    const std::size_t idx = st.queue.front();
    auto& r = rs[idx];
    const auto& work = requests[idx].stages[static_cast<std::size_t>(r.stage)];
    auto finished = [](double resid, double declared, double rate) {
      return resid <= kDoneTol * declared || (rate > 0.0 && resid / rate <= 1e-12);
    };
    if (!finished(r.resid_g, work.gpu_work, st.gpu) || !finished(r.resid_c, work.cpu_work, st.cpu)) return;
    r.resid_g = 0.0;
    r.resid_c = 0.0;
    if (config.check_invariants) check_work(idx, st.gpu, st.cpu);
    st.queue.pop_front();
    release(idx, host(s));
    const auto& req = requests[idx];
    if (is_ran(req.cls) && r.stage == 0) {
      enqueue(idx, 1);
      return;
    }
    if (is_ran(req.cls)) downstream.at(req.cell_id).update(now - r.enqueued);
    finalize(idx);
  }

  void finalize(std::size_t idx) {
    const auto& req = requests[idx];
    const double delta = compute_transport_delay(req, cluster, placement, config.allocator.per_hop,
                                                 config.ran_packet_delay);
    auto rec = make_completion(req, now - req.arrival + delta, delta);
    rs[idx].done = true;
    auto& counts = result.per_class[static_cast<std::size_t>(req.cls)];
    ++counts.completed;
    if (rec.met_deadline) ++counts.met;
    const int g = class_group(req.cls);
    ++recent_total[static_cast<std::size_t>(g)];
    if (rec.met_deadline) ++recent_met[static_cast<std::size_t>(g)];
    result.completions.push_back(rec);
  }

  // ------------------------------------------------------------ invariants

  void violation(std::string message) {
    ++result.violation_count;
    if (result.invariant_violations.size() < kMaxViolationMessages)
      result.invariant_violations.push_back("t=" + std::to_string(now) + ": " + std::move(message));
  }

  void check_invariants() {
    ++result.invariant_checks;
    AllocationVector alloc(inst.size());
    for (std::size_t s = 0; s < inst.size(); ++s) {
      alloc.gpu[s] = inst[s].gpu;
      alloc.cpu[s] = inst[s].cpu;
      if (reconfiguring(static_cast<InstanceId>(s)) && (inst[s].gpu > 0.0 || inst[s].cpu > 0.0))
        violation("instance " + std::to_string(s) + " allocated while reconfiguring");
    }
    if (!check_capacity(alloc, placement, cluster)) violation("node capacity exceeded");
    const auto mem = check_memory_feasible(placement, active_kv, cluster);
    for (std::size_t n = 0; n < mem.size(); ++n)
      if (!mem[n]) violation("node " + std::to_string(n) + " VRAM exceeded");
    for (std::size_t s = 0; s < placement.instance_count(); ++s) {
      const NodeId h = placement.host(static_cast<InstanceId>(s));
      if (h < 0 || static_cast<std::size_t>(h) >= cluster.node_count())
        violation("instance " + std::to_string(s) + " is not resident on exactly one node");
    }
  }

  // ---------------------------------------------------------------- epochs

  EpochSnapshot snapshot() const {
    EpochSnapshot snap;
    snap.timestamp = now;
    snap.interval = config.interval;
    const double span = now - last_epoch > 0.0 ? now - last_epoch : config.interval;
    for (const auto& spec : cluster.instances) {
      const auto s = static_cast<std::size_t>(spec.instance_id);
      const auto& st = inst[s];
      InstanceSnapshot x;
      x.instance_id = spec.instance_id;
      x.category = spec.category;
      x.host = host(spec.instance_id);
      x.backlog_seconds = backlog_seconds(spec.instance_id);
      for (auto q : st.queue) {
        x.backlog_gpu += rs[q].resid_g;
        x.backlog_cpu += rs[q].resid_c;
        if (rs[q].admitted && is_ai(requests[q].cls)) x.kv_in_use += requests[q].kv_cache;
      }
      x.demand_gpu = st.routed_gpu / span;
      x.demand_cpu = st.routed_cpu / span;
      x.active_requests = static_cast<int>(st.queue.size());
      x.recent_arrivals = st.routed;
      x.reconfiguring = reconfiguring(spec.instance_id);
      if (auto until = placement.reconfig_until(spec.instance_id); until && *until > now)
        x.reconfig_remaining = *until - now;
      snap.instances.push_back(x);
    }
    for (const auto& node : cluster.nodes) {
      const auto n = static_cast<std::size_t>(node.node_id);
      NodeSnapshot x;
      x.node_id = node.node_id;
      x.gpu_util = acc[n].gpu_alloc / (node.gpu_capacity * span);
      x.cpu_util = acc[n].cpu_alloc / (node.cpu_capacity * span);
      x.floor_util = acc[n].gpu_floor / (node.gpu_capacity * span);
      x.vram_headroom = node.vram_capacity - placement.resident_weights(cluster, node.node_id) - active_kv[n];
      for (const auto& i : snap.instances) {
        if (i.host != node.node_id) continue;
        ++x.resident_count;
        x.gpu_load += (i.demand_gpu + i.backlog_gpu / config.interval) / node.gpu_capacity;
        x.cpu_load += (i.demand_cpu + i.backlog_cpu / config.interval) / node.cpu_capacity;
      }
      snap.nodes.push_back(x);
    }
    auto rate = [this](int g) {
      const auto i = static_cast<std::size_t>(g);
      return recent_total[i] > 0 ? static_cast<double>(recent_met[i]) / recent_total[i] : 1.0;
    };
    snap.recent_large = rate(0);
    snap.recent_small = rate(1);
    snap.recent_ran = rate(2);
    return snap;
  }

  void epoch(int k) {
    EpochRecord rec;
    rec.index = k;
    rec.timestamp = now;
    rec.snapshot = snapshot();
    const auto& movable = policy->movable();
    const auto candidates = generate_candidates(rec.snapshot, placement, cluster, movable);
    std::size_t movable_count = 0;
    for (const auto& s : cluster.instances) movable_count += movable[static_cast<std::size_t>(s.category)] ? 1 : 0;
    rec.candidate_count = candidates.size();
    rec.candidate_bound = movable_count * (cluster.node_count() - 1) + 1;

    EpochContext ctx{rec.snapshot, candidates, cluster, placement};
    auto decision = policy->decide(ctx);
    rec.shortlist = std::move(decision.shortlist);
    rec.forecasts = std::move(decision.forecasts);
    rec.action = decision.action;
    rec.degraded = decision.degraded;
    rec.prompt = std::move(decision.prompt);
    rec.raw_response = std::move(decision.raw_response);
    if (rec.degraded) ++result.degraded_epochs;
    rec.member = std::find(candidates.begin(), candidates.end(), rec.action) != candidates.end();
    if (rec.action.is_move()) {
      if (!rec.member) rec.reject_reason = "action is not in the candidate set";
      else rec.reject_reason = commit(rec.action);
      if (rec.reject_reason.empty()) rec.committed = true;
      else ++result.rejected_actions;
    }
    result.epochs.push_back(std::move(rec));

    for (auto& st : inst) {
      st.routed = 0;
      st.routed_gpu = 0.0;
      st.routed_cpu = 0.0;
    }
    for (auto& a : acc) a.gpu_alloc = a.cpu_alloc = a.gpu_floor = 0.0;
    recent_total = {};
    recent_met = {};
    last_epoch = now;
    const double next = (k + 1) * config.interval;
    if (next <= config.horizon + 1e-9) events.push({next, EventKind::EpochBoundary, k + 1});
  }

  // Returns an empty string on success, the rejection reason otherwise.
  std::string commit(const MigrationAction& a) {
    const auto& spec = cluster.instance(a.instance_id);
    if (reconfiguring(a.instance_id)) return "instance is already reconfiguring";
    if (host(a.instance_id) != a.from_node) return "source node does not host the instance";
    const auto& dst = cluster.node(a.to_node);
    const double used = placement.resident_weights(cluster, a.to_node) + active_kv[static_cast<std::size_t>(a.to_node)];
    if (used + spec.weight_footprint > dst.vram_capacity) return "destination VRAM would be exceeded";

    auto& st = inst[static_cast<std::size_t>(a.instance_id)];
    // The in-service head returns to waiting; its residual work is frozen.
    if (!st.queue.empty()) release(st.queue.front(), a.from_node);
    placement.move(a.instance_id, a.to_node);
    placement.set_reconfig_until(a.instance_id, now + spec.reconfig_delay);
    st.gpu = st.cpu = st.gpu_floor = 0.0;
    events.push({now + spec.reconfig_delay, EventKind::ReconfigEnd, a.instance_id});
    ++result.migrations_total;
    if (spec.category == Category::LARGE_AI) ++result.migrations_large;
    return {};
  }

  // --------------------------------------------------------------- logging

  void log_event(const Event& e) {
    if (!config.event_log) return;
    nlohmann::json j;
    j["t"] = e.timestamp;
    j["kind"] = to_string(e.kind);
    j["payload"] = e.payload;
    std::vector<double> g, c;
    for (const auto& node : cluster.nodes) {
      double sg = 0.0, sc = 0.0;
      for (auto s : placement.residents(node.node_id)) {
        sg += inst[static_cast<std::size_t>(s)].gpu;
        sc += inst[static_cast<std::size_t>(s)].cpu;
      }
      g.push_back(sg / node.gpu_capacity);
      c.push_back(sc / node.cpu_capacity);
    }
    j["gpu_util"] = g;
    j["cpu_util"] = c;
    *config.event_log << j.dump() << '\n';
  }

  // ------------------------------------------------------------------ loop

  SimResult run() {
    const double stop = config.horizon + config.drain_limit;
    solve();
    while (true) {
      const auto [t_done, who] = next_completion();
      const bool have_event = !events.empty();
      if (!have_event && who == kNoInstance) break;
      Event e;
      if (have_event && events.top().timestamp <= t_done) {
        e = events.top();
      } else {
        e = {t_done, EventKind::StageCompletion,
             requests[inst[static_cast<std::size_t>(who)].queue.front()].request_id};
      }
      if (e.timestamp > stop) break;
      advance(e.timestamp);
      ++result.event_count;
      switch (e.kind) {
        case EventKind::Arrival: {
          events.pop();
          const auto idx = static_cast<std::size_t>(e.payload);
          rs[idx].arrived = true;
          ++result.per_class[static_cast<std::size_t>(requests[idx].cls)].arrived;
          enqueue(idx, 0);
          break;
        }
        case EventKind::EpochBoundary:
          events.pop();
          epoch(static_cast<int>(e.payload));
          break;
        case EventKind::ReconfigEnd: {
          events.pop();
          const auto s = static_cast<InstanceId>(e.payload);
          if (auto until = placement.reconfig_until(s); until && *until <= now)
            placement.set_reconfig_until(s, std::nullopt);
          break;
        }
        case EventKind::StageCompletion:
          complete_head(who);
          break;
      }
      for (std::size_t s = 0; s < inst.size(); ++s) try_admit(static_cast<InstanceId>(s));
      solve();
      if (config.check_invariants) check_invariants();
      log_event(e);
    }

    result.end_time = now;
    for (std::size_t i = 0; i < requests.size(); ++i) {
      if (rs[i].done) continue;
      result.unfinished.push_back(requests[i].request_id);
      auto& counts = result.per_class[static_cast<std::size_t>(requests[i].cls)];
      ++counts.unfinished;
      if (!rs[i].arrived) ++counts.arrived;
    }
    result.mean_gpu_floor.clear();
    for (const auto& a : acc) result.mean_gpu_floor.push_back(now > 0.0 ? a.floor_total / now : 0.0);
    result.final_placement = placement;
    for (auto& ep : result.epochs)
      ep.label = interval_fulfillment(requests, result, ep.timestamp, ep.timestamp + config.interval);
    return std::move(result);
  }
};

Simulator::Simulator(const Cluster& cluster, Placement initial, std::vector<Request> requests, SimConfig config,
                     PlacementPolicy* policy)
    : impl_(std::make_unique<Impl>(cluster, std::move(initial), std::move(requests), config, policy)) {}

Simulator::~Simulator() = default;

SimResult Simulator::run() { return impl_->run(); }

Label interval_fulfillment(const std::vector<Request>& requests, const SimResult& result, double from,
                           double to) {
  std::unordered_map<RequestId, bool> met;
  met.reserve(result.completions.size());
  for (const auto& c : result.completions) met.emplace(c.request_id, c.met_deadline);
  std::array<int, 3> total{}, ok{};
  for (const auto& r : requests) {
    if (r.arrival < from || r.arrival >= to) continue;
    const auto g = static_cast<std::size_t>(class_group(r.cls));
    ++total[g];
    if (auto it = met.find(r.request_id); it != met.end() && it->second) ++ok[g];
  }
  Label out;
  for (std::size_t g = 0; g < 3; ++g) out[g] = total[g] > 0 ? static_cast<double>(ok[g]) / total[g] : 1.0;
  return out;
}

}  // namespace airan
