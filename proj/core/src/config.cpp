#include "airan/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace airan {

std::string_view to_string(PolicyKind p) {
  switch (p) {
    case PolicyKind::Haf: return "haf";
    case PolicyKind::HafNoCritic: return "haf-nocritic";
    case PolicyKind::Static: return "static";
    case PolicyKind::RoundRobin: return "round-robin";
    case PolicyKind::Lyapunov: return "lyapunov";
    case PolicyKind::Game: return "game";
    case PolicyKind::AlphaSplit: return "alpha-split";
  }
  return "?";
}

PolicyKind parse_policy(std::string_view s) {
  for (auto p : {PolicyKind::Haf, PolicyKind::HafNoCritic, PolicyKind::Static, PolicyKind::RoundRobin,
                 PolicyKind::Lyapunov, PolicyKind::Game, PolicyKind::AlphaSplit})
    if (s == to_string(p)) return p;
  throw ConfigError("unknown policy '" + std::string(s) +
                    "' (haf | haf-nocritic | static | round-robin | lyapunov | game | alpha-split)");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> words(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("'" + key + "' expects on/off, got '" + v + "'");
}

UniformRange to_range(const std::string& key, const std::string& v) {
  auto parts = split(v, ',');
  if (parts.size() != 2) throw ConfigError("'" + key + "' expects 'lo, hi', got '" + v + "'");
  UniformRange r{to_double(key, parts[0]), to_double(key, parts[1])};
  if (!(r.lo > 0 && r.hi >= r.lo)) throw ConfigError("'" + key + "' needs 0 < lo <= hi");
  return r;
}

MovableSet to_movable(const std::string& key, const std::string& v) {
  MovableSet m{false, false, false, false};
  if (v == "none") return m;
  for (const auto& part : split(v, ',')) m[static_cast<std::size_t>(parse_category(part))] = true;
  (void)key;
  return m;
}

std::string movable_text(const MovableSet& m) {
  std::string out;
  for (int c = 0; c < kNumCategories; ++c) {
    if (!m[static_cast<std::size_t>(c)]) continue;
    if (!out.empty()) out += ",";
    out += to_string(static_cast<Category>(c));
  }
  return out.empty() ? "none" : out;
}

std::string num(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

// Attributes of a `node` / `instance` line: "name k=v k=v ...".
struct Record {
  std::string name;
  std::map<std::string, std::string> attrs;
};

Record to_record(const std::string& key, const std::string& v) {
  auto w = words(v);
  if (w.empty()) throw ConfigError("'" + key + "' needs a name");
  Record r{w[0], {}};
  for (std::size_t i = 1; i < w.size(); ++i) {
    auto eq = w[i].find('=');
    if (eq == std::string::npos) throw ConfigError("'" + key + " " + w[0] + "': expected k=v, got '" + w[i] + "'");
    r.attrs[w[i].substr(0, eq)] = w[i].substr(eq + 1);
  }
  return r;
}

std::string take(Record& r, const std::string& what, const std::string& attr) {
  auto it = r.attrs.find(attr);
  if (it == r.attrs.end()) throw ConfigError(what + " '" + r.name + "' is missing " + attr + "=");
  auto v = it->second;
  r.attrs.erase(it);
  return v;
}

void no_leftovers(const Record& r, const std::string& what) {
  if (!r.attrs.empty()) throw ConfigError(what + " '" + r.name + "' has unknown attribute '" + r.attrs.begin()->first + "'");
}

struct Builder {
  ExperimentConfig cfg;
  std::vector<Record> nodes, instances;
  std::set<std::filesystem::path> active;  // include-cycle guard
  std::filesystem::path base;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  std::map<std::string, Setter> setters;

  Builder() {
    auto& c = cfg;
    auto& w = c.workload;
    auto d = [](double& dst) { return [&dst](const std::string& k, const std::string& v) { dst = to_double(k, v); }; };
    setters = {
        {"policy", [&c](auto&, auto& v) { c.policy = parse_policy(v); }},
        {"horizon", d(w.horizon)},
        {"drain_limit", d(c.drain_limit)},
        {"interval", d(c.interval)},
        {"k", [&c](auto& k, auto& v) { c.k = static_cast<int>(to_int(k, v)); }},
        {"seeds",
         [&c](auto& k, auto& v) {
           c.seeds.clear();
           for (const auto& s : split(v, ',')) c.seeds.push_back(static_cast<std::uint64_t>(to_int(k, s)));
         }},
        {"output_dir", [this](auto&, auto& v) { cfg.output_dir = v; }},
        {"per_hop", d(c.per_hop)},
        {"ran_packet_delay", d(c.ran_packet_delay)},
        {"floors", [&c](auto& k, auto& v) { c.floors_enabled = to_bool(k, v); }},
        {"rho", [&w](auto& k, auto& v) { w.rho_target = v == "none" ? std::nullopt : std::optional(to_double(k, v)); }},
        {"rho_capacity",
         [&c](auto& k, auto& v) {
           if (v == "ai-hosts") c.rho_capacity = RhoCapacity::AiHosts;
           else if (v == "cluster") c.rho_capacity = RhoCapacity::Cluster;
           else throw ConfigError("'" + k + "' expects ai-hosts or cluster");
         }},
        {"warmup_fraction", d(c.warmup_fraction)},
        {"trace_path", [this](auto&, auto& v) {
           if (v == "none") cfg.workload.trace_path.reset();
           else cfg.workload.trace_path = std::filesystem::path(v).is_absolute() ? std::filesystem::path(v) : base / v;
         }},
        {"ai.rate", d(w.synthetic_ai.rate)},
        {"ai.prompt_median", d(w.synthetic_ai.prompt_median)},
        {"ai.prompt_sigma", d(w.synthetic_ai.prompt_sigma)},
        {"ai.output_median", d(w.synthetic_ai.output_median)},
        {"ai.output_sigma", d(w.synthetic_ai.output_sigma)},
        {"map.split_quantile", d(w.mapping.split_quantile)},
        {"map.large_flops_per_token", d(w.mapping.large_flops_per_token)},
        {"map.small_flops_per_token", d(w.mapping.small_flops_per_token)},
        {"map.kv_gb_per_output_token", d(w.mapping.kv_gb_per_output_token)},
        {"map.large_deadline", [&w](auto& k, auto& v) { w.mapping.large_deadline = to_range(k, v); }},
        {"map.small_deadline", [&w](auto& k, auto& v) { w.mapping.small_deadline = to_range(k, v); }},
        {"map.large_group", [&w](auto& k, auto& v) { w.mapping.large_group = static_cast<int>(to_int(k, v)); }},
        {"map.small_group", [&w](auto& k, auto& v) { w.mapping.small_group = static_cast<int>(to_int(k, v)); }},
        {"ran.rate_per_cell", d(w.ran.rate_per_cell)},
        {"ran.urllc_fraction", d(w.ran.urllc_fraction)},
        {"ran.urllc_deadline", d(w.ran.urllc_deadline)},
        {"ran.embb_deadline", d(w.ran.embb_deadline)},
        {"ran.du_gpu_work", d(w.ran.du_gpu_work_mean)},
        {"ran.du_gpu_work_cv", d(w.ran.du_gpu_work_cv)},
        {"ran.cu_cpu_work", d(w.ran.cu_cpu_work_mean)},
        {"ran.cu_cpu_work_cv", d(w.ran.cu_cpu_work_cv)},
        {"agent", [&c](auto&, auto& v) { c.agent.endpoint = v; }},
        {"agent.model", [&c](auto&, auto& v) { c.agent.model = v; }},
        {"agent.timeout", [&c](auto& k, auto& v) { c.agent.timeout = to_double(k, v); }},
        {"agent.retries", [&c](auto& k, auto& v) { c.agent.retries = static_cast<int>(to_int(k, v)); }},
        {"agent.stub_penalty", d(c.agent.stub_penalty)},
        {"critic.weights",
         [&c](auto& k, auto& v) {
           auto p = split(v, ',');
           if (p.size() != 3) throw ConfigError("'" + k + "' expects three weights");
           c.critic_weights = {to_double(k, p[0]), to_double(k, p[1]), to_double(k, p[2])};
         }},
        {"critic.hidden", [&c](auto& k, auto& v) { c.train.hidden = static_cast<std::size_t>(to_int(k, v)); }},
        {"critic.learning_rate", d(c.train.learning_rate)},
        {"critic.batch", [&c](auto& k, auto& v) { c.train.batch_size = static_cast<std::size_t>(to_int(k, v)); }},
        {"critic.epochs", [&c](auto& k, auto& v) { c.train.epochs = static_cast<std::size_t>(to_int(k, v)); }},
        {"critic.validation_fraction", d(c.train.validation_fraction)},
        {"critic.min_samples", [&c](auto& k, auto& v) { c.train.min_samples = static_cast<std::size_t>(to_int(k, v)); }},
        {"critic.seed", [&c](auto& k, auto& v) { c.train.seed = static_cast<std::uint64_t>(to_int(k, v)); }},
        {"critic.model", [this](auto&, auto& v) {
           if (v == "none") cfg.critic_model.reset();
           else cfg.critic_model = std::filesystem::path(v).is_absolute() ? std::filesystem::path(v) : base / v;
         }},
        {"collect.epsilon", d(c.collect_epsilon)},
        {"lyapunov.v", d(c.lyapunov.v)},
        {"game.iteration_cap", [&c](auto& k, auto& v) { c.game.iteration_cap = static_cast<int>(to_int(k, v)); }},
        {"game.switch_cost", d(c.game.switch_cost_weight)},
        {"alpha", d(c.alpha)},
        {"haf.movable", [&c](auto& k, auto& v) { c.haf_movable = to_movable(k, v); }},
        {"baseline.movable", [&c](auto& k, auto& v) { c.baseline_movable = to_movable(k, v); }},
    };
  }

  void parse(const std::string& text, const std::filesystem::path& dir, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
      const auto key = trim(line.substr(0, eq));
      const auto value = trim(line.substr(eq + 1));
      try {
        apply(key, value, dir);
      } catch (const ConfigError& e) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
  }

  void apply(const std::string& key, const std::string& value, const std::filesystem::path& dir) {
    if (key == "include") {
      auto path = std::filesystem::path(value).is_absolute() ? std::filesystem::path(value) : dir / value;
      include(path);
      return;
    }
    if (key == "node") {
      nodes.push_back(to_record(key, value));
      return;
    }
    if (key == "instance") {
      instances.push_back(to_record(key, value));
      return;
    }
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown key '" + key + "'");
    const auto saved = base;
    base = dir;
    it->second(key, value);
    base = saved;
  }

  void include(const std::filesystem::path& path) {
    auto canon = std::filesystem::weakly_canonical(path);
    if (!active.insert(canon).second) throw ConfigError("include cycle at " + path.string());
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    parse(buf.str(), path.parent_path(), path.string());
    active.erase(canon);
  }

  ExperimentConfig finish() {
    std::map<std::string, NodeId> node_ids;
    cfg.cluster.nodes.clear();
    cfg.cluster.instances.clear();
    for (auto& r : nodes) {
      NodeSpec n;
      n.node_id = static_cast<NodeId>(cfg.cluster.nodes.size());
      n.name = r.name;
      n.gpu_capacity = to_double("gpu", take(r, "node", "gpu"));
      n.cpu_capacity = to_double("cpu", take(r, "node", "cpu"));
      n.vram_capacity = to_double("vram", take(r, "node", "vram"));
      no_leftovers(r, "node");
      if (!node_ids.emplace(n.name, n.node_id).second) throw ConfigError("duplicate node '" + n.name + "'");
      cfg.cluster.nodes.push_back(n);
    }
    std::vector<NodeId> hosts;
    for (auto& r : instances) {
      InstanceSpec s;
      s.instance_id = static_cast<InstanceId>(cfg.cluster.instances.size());
      s.name = r.name;
      s.category = parse_category(take(r, "instance", "category"));
      const auto node = take(r, "instance", "node");
      auto it = node_ids.find(node);
      if (it == node_ids.end()) throw ConfigError("instance '" + r.name + "' names unknown node '" + node + "'");
      hosts.push_back(it->second);
      s.weight_footprint = to_double("weights", take(r, "instance", "weights"));
      s.reconfig_delay = to_double("reconfig", take(r, "instance", "reconfig"));
      if (r.attrs.count("cell")) s.cell_id = static_cast<int>(to_int("cell", take(r, "instance", "cell")));
      if (r.attrs.count("group")) s.service_group = static_cast<int>(to_int("group", take(r, "instance", "group")));
      else if (is_ran(s.category)) s.service_group = -1 - s.instance_id;
      else throw ConfigError("AI instance '" + r.name + "' needs group=");
      no_leftovers(r, "instance");
      cfg.cluster.instances.push_back(s);
    }
    cfg.cluster.validate();
    cfg.initial_placement = Placement(hosts);
    for (const auto& n : cfg.cluster.nodes)
      if (cfg.initial_placement.resident_weights(cfg.cluster, n.node_id) > n.vram_capacity)
        throw ConfigError("initial placement overfills VRAM on node '" + n.name + "'");
    if (!(cfg.interval > 0)) throw ConfigError("interval must be positive");
    if (cfg.k < 1) throw ConfigError("k must be at least 1");
    if (cfg.seeds.empty()) throw ConfigError("at least one seed is required");
    if (!(cfg.workload.horizon > 0)) throw ConfigError("horizon must be positive");
    if (cfg.workload.rho_target && !(*cfg.workload.rho_target > 0)) throw ConfigError("rho must be positive");
    if (cfg.workload.trace_path && !std::filesystem::exists(*cfg.workload.trace_path))
      throw ConfigError("trace file " + cfg.workload.trace_path->string() + " does not exist");
    if (cfg.alpha < 0 || cfg.alpha > 1) throw ConfigError("alpha must lie in [0, 1]");
    cfg.workload.seed = cfg.seeds.front();
    return cfg;
  }
};

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  Builder b;
  b.base = base_dir;
  b.parse(text, base_dir, "<config>");
  return b.finish();
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  Builder b;
  b.base = path.parent_path();
  b.include(path);
  return b.finish();
}

const std::string& default_config_text() {
  static const std::string text = R"(# Default preset: 6 nodes (2 GPU-heavy, 2 balanced, 2 CPU-heavy),
# 6 cells (DU + CU-UP each), 2 large-AI and 4 small-AI replicas.

policy = haf
horizon = 60
drain_limit = 60
interval = 5
k = 3
seeds = 1
output_dir = out
per_hop = 0.0002
ran_packet_delay = 0.0001
floors = on
rho = 1.0
rho_capacity = ai-hosts
warmup_fraction = 0.05

ai.rate = 21
ai.prompt_median = 600
ai.prompt_sigma = 0.8
ai.output_median = 250
ai.output_sigma = 0.6
map.split_quantile = 0.5
map.large_flops_per_token = 1.25e10
map.small_flops_per_token = 2.4e9
map.kv_gb_per_output_token = 0.0014
map.large_deadline = 1, 5
map.small_deadline = 0.1, 0.5
map.large_group = 0
map.small_group = 1

ran.rate_per_cell = 2
ran.urllc_fraction = 0.5
ran.urllc_deadline = 0.001
ran.embb_deadline = 0.004
ran.du_gpu_work = 2e9
ran.du_gpu_work_cv = 0.3
ran.cu_cpu_work = 0.0002
ran.cu_cpu_work_cv = 0.3

agent = stub
agent.model = default
agent.retries = 1
agent.stub_penalty = 1
critic.weights = 1, 1, 2
critic.hidden = 64
critic.learning_rate = 0.001
critic.batch = 32
critic.epochs = 200
critic.validation_fraction = 0.2
critic.min_samples = 200
critic.seed = 7
collect.epsilon = 0.3

lyapunov.v = 1
game.iteration_cap = 100
game.switch_cost = 1
alpha = 0.5
haf.movable = DU,CU_UP,LARGE_AI,SMALL_AI
baseline.movable = DU,CU_UP,SMALL_AI

node = gpu0 gpu=1e14 cpu=16 vram=80
node = gpu1 gpu=1e14 cpu=16 vram=80
node = bal0 gpu=5e13 cpu=32 vram=24
node = bal1 gpu=5e13 cpu=32 vram=24
node = cpu0 gpu=1e13 cpu=64 vram=16
node = cpu1 gpu=1e13 cpu=64 vram=16

instance = large0 category=LARGE_AI node=gpu0 weights=28 reconfig=8 group=0
instance = large1 category=LARGE_AI node=gpu0 weights=28 reconfig=8 group=0
instance = small0 category=SMALL_AI node=bal0 weights=4 reconfig=0.5 group=1
instance = small1 category=SMALL_AI node=bal0 weights=4 reconfig=0.5 group=1
instance = small2 category=SMALL_AI node=bal1 weights=4 reconfig=0.5 group=1
instance = small3 category=SMALL_AI node=bal1 weights=4 reconfig=0.5 group=1
instance = du0 category=DU node=gpu0 weights=2 reconfig=0.05 cell=0
instance = du1 category=DU node=gpu0 weights=2 reconfig=0.05 cell=1
instance = du2 category=DU node=gpu1 weights=2 reconfig=0.05 cell=2
instance = du3 category=DU node=gpu1 weights=2 reconfig=0.05 cell=3
instance = du4 category=DU node=bal0 weights=2 reconfig=0.05 cell=4
instance = du5 category=DU node=bal1 weights=2 reconfig=0.05 cell=5
instance = cuup0 category=CU_UP node=cpu0 weights=0 reconfig=0.05 cell=0
instance = cuup1 category=CU_UP node=cpu0 weights=0 reconfig=0.05 cell=1
instance = cuup2 category=CU_UP node=cpu0 weights=0 reconfig=0.05 cell=2
instance = cuup3 category=CU_UP node=cpu1 weights=0 reconfig=0.05 cell=3
instance = cuup4 category=CU_UP node=cpu1 weights=0 reconfig=0.05 cell=4
instance = cuup5 category=CU_UP node=cpu1 weights=0 reconfig=0.05 cell=5
)";
  return text;
}

ExperimentConfig default_config() { return parse_config(default_config_text(), "."); }

std::string render_config(const ExperimentConfig& c) {
  std::ostringstream o;
  const auto& w = c.workload;
  o << "policy = " << to_string(c.policy) << "\n"
    << "horizon = " << num(w.horizon) << "\n"
    << "drain_limit = " << num(c.drain_limit) << "\n"
    << "interval = " << num(c.interval) << "\n"
    << "k = " << c.k << "\n"
    << "seeds = ";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) o << (i ? "," : "") << c.seeds[i];
  o << "\n"
    << "output_dir = " << c.output_dir.string() << "\n"
    << "per_hop = " << num(c.per_hop) << "\n"
    << "ran_packet_delay = " << num(c.ran_packet_delay) << "\n"
    << "floors = " << (c.floors_enabled ? "on" : "off") << "\n"
    << "rho = " << (w.rho_target ? num(*w.rho_target) : "none") << "\n"
    << "rho_capacity = " << (c.rho_capacity == RhoCapacity::AiHosts ? "ai-hosts" : "cluster") << "\n"
    << "warmup_fraction = " << num(c.warmup_fraction) << "\n"
    << "trace_path = " << (w.trace_path ? w.trace_path->string() : "none") << "\n"
    << "ai.rate = " << num(w.synthetic_ai.rate) << "\n"
    << "ai.prompt_median = " << num(w.synthetic_ai.prompt_median) << "\n"
    << "ai.prompt_sigma = " << num(w.synthetic_ai.prompt_sigma) << "\n"
    << "ai.output_median = " << num(w.synthetic_ai.output_median) << "\n"
    << "ai.output_sigma = " << num(w.synthetic_ai.output_sigma) << "\n"
    << "map.split_quantile = " << num(w.mapping.split_quantile) << "\n"
    << "map.large_flops_per_token = " << num(w.mapping.large_flops_per_token) << "\n"
    << "map.small_flops_per_token = " << num(w.mapping.small_flops_per_token) << "\n"
    << "map.kv_gb_per_output_token = " << num(w.mapping.kv_gb_per_output_token) << "\n"
    << "map.large_deadline = " << num(w.mapping.large_deadline.lo) << ", " << num(w.mapping.large_deadline.hi) << "\n"
    << "map.small_deadline = " << num(w.mapping.small_deadline.lo) << ", " << num(w.mapping.small_deadline.hi) << "\n"
    << "map.large_group = " << w.mapping.large_group << "\n"
    << "map.small_group = " << w.mapping.small_group << "\n"
    << "ran.rate_per_cell = " << num(w.ran.rate_per_cell) << "\n"
    << "ran.urllc_fraction = " << num(w.ran.urllc_fraction) << "\n"
    << "ran.urllc_deadline = " << num(w.ran.urllc_deadline) << "\n"
    << "ran.embb_deadline = " << num(w.ran.embb_deadline) << "\n"
    << "ran.du_gpu_work = " << num(w.ran.du_gpu_work_mean) << "\n"
    << "ran.du_gpu_work_cv = " << num(w.ran.du_gpu_work_cv) << "\n"
    << "ran.cu_cpu_work = " << num(w.ran.cu_cpu_work_mean) << "\n"
    << "ran.cu_cpu_work_cv = " << num(w.ran.cu_cpu_work_cv) << "\n"
    << "agent = " << c.agent.endpoint << "\n"
    << "agent.model = " << c.agent.model << "\n";
  if (c.agent.timeout) o << "agent.timeout = " << num(*c.agent.timeout) << "\n";
  o << "agent.retries = " << c.agent.retries << "\n"
    << "agent.stub_penalty = " << num(c.agent.stub_penalty) << "\n"
    << "critic.weights = " << num(c.critic_weights.large) << ", " << num(c.critic_weights.small) << ", "
    << num(c.critic_weights.ran) << "\n"
    << "critic.hidden = " << c.train.hidden << "\n"
    << "critic.learning_rate = " << num(c.train.learning_rate) << "\n"
    << "critic.batch = " << c.train.batch_size << "\n"
    << "critic.epochs = " << c.train.epochs << "\n"
    << "critic.validation_fraction = " << num(c.train.validation_fraction) << "\n"
    << "critic.min_samples = " << c.train.min_samples << "\n"
    << "critic.seed = " << c.train.seed << "\n"
    << "critic.model = " << (c.critic_model ? c.critic_model->string() : "none") << "\n"
    << "collect.epsilon = " << num(c.collect_epsilon) << "\n"
    << "lyapunov.v = " << num(c.lyapunov.v) << "\n"
    << "game.iteration_cap = " << c.game.iteration_cap << "\n"
    << "game.switch_cost = " << num(c.game.switch_cost_weight) << "\n"
    << "alpha = " << num(c.alpha) << "\n"
    << "haf.movable = " << movable_text(c.haf_movable) << "\n"
    << "baseline.movable = " << movable_text(c.baseline_movable) << "\n";
  for (const auto& n : c.cluster.nodes)
    o << "node = " << n.name << " gpu=" << num(n.gpu_capacity) << " cpu=" << num(n.cpu_capacity)
      << " vram=" << num(n.vram_capacity) << "\n";
  for (const auto& s : c.cluster.instances) {
    o << "instance = " << s.name << " category=" << to_string(s.category)
      << " node=" << c.cluster.node(c.initial_placement.host(s.instance_id)).name
      << " weights=" << num(s.weight_footprint) << " reconfig=" << num(s.reconfig_delay);
    if (s.cell_id) o << " cell=" << *s.cell_id;
    if (is_ai(s.category)) o << " group=" << s.service_group;
    o << "\n";
  }
  return o.str();
}

}  // namespace airan
