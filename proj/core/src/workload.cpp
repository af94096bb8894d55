#include "airan/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

namespace airan {

namespace {

using Rng = std::mt19937_64;

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n\"");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n\"");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    else if (c == ',' && !quoted) {
      out.push_back(trim(cur));
      cur.clear();
    } else cur.push_back(c);
  }
  out.push_back(trim(cur));
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Days from civil date (proleptic Gregorian), for datetime timestamps.
long long days_from_civil(long long y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long long>(doe) - 719468;
}

std::optional<double> parse_timestamp(const std::string& s) {
  if (auto v = parse_number(s)) return v;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0;
  double sec = 0.0;
  char sep = 0;
  std::istringstream in(s);
  char dash1 = 0, dash2 = 0, c1 = 0, c2 = 0;
  if (!(in >> y >> dash1 >> mo >> dash2 >> d)) return std::nullopt;
  if (dash1 != '-' || dash2 != '-') return std::nullopt;
  if (!in.get(sep) || (sep != ' ' && sep != 'T')) return std::nullopt;
  if (!(in >> h >> c1 >> mi >> c2 >> sec) || c1 != ':' || c2 != ':') return std::nullopt;
  if (mo < 1 || mo > 12 || d < 1 || d > 31) return std::nullopt;
  double days = static_cast<double>(days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)));
  return days * 86400.0 + h * 3600.0 + mi * 60.0 + sec;
}

double lognormal_by_mean(Rng& rng, double mean, double cv) {
  if (mean <= 0.0) return 0.0;
  if (cv <= 0.0) return mean;
  const double s2 = std::log1p(cv * cv);
  std::lognormal_distribution<double> dist(std::log(mean) - 0.5 * s2, std::sqrt(s2));
  return dist(rng);
}

double uniform(Rng& rng, UniformRange r) {
  if (r.hi <= r.lo) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

}  // namespace

std::vector<TraceRow> parse_trace_csv(std::istream& in, std::size_t& skipped) {
  std::vector<TraceRow> rows;
  std::string line;
  int col_ts = 0, col_prompt = 1, col_out = 2;
  bool first = true;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split_csv(line);
    if (first) {
      first = false;
      if (!parse_timestamp(cells[0])) {
        // Header row: locate columns by name.
        for (std::size_t i = 0; i < cells.size(); ++i) {
          auto name = lower(cells[i]);
          if (name == "timestamp" || name == "time") col_ts = static_cast<int>(i);
          else if (name == "prompt_tokens" || name == "contexttokens" || name == "context_tokens")
            col_prompt = static_cast<int>(i);
          else if (name == "output_tokens" || name == "generatedtokens" || name == "generated_tokens")
            col_out = static_cast<int>(i);
        }
        continue;
      }
    }
    const int need = std::max({col_ts, col_prompt, col_out});
    if (static_cast<int>(cells.size()) <= need) {
      ++skipped;
      continue;
    }
    auto ts = parse_timestamp(cells[static_cast<std::size_t>(col_ts)]);
    auto pt = parse_number(cells[static_cast<std::size_t>(col_prompt)]);
    auto ot = parse_number(cells[static_cast<std::size_t>(col_out)]);
    if (!ts || !pt || !ot || *pt < 0 || *ot < 0) {
      ++skipped;
      continue;
    }
    rows.push_back({*ts, *pt, *ot});
  }
  if (!rows.empty()) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const TraceRow& a, const TraceRow& b) { return a.timestamp < b.timestamp; });
    const double t0 = rows.front().timestamp;
    for (auto& r : rows) r.timestamp -= t0;
  }
  return rows;
}

std::vector<Request> map_trace_rows(const std::vector<TraceRow>& rows, const AiMapping& mapping,
                                    const Cluster& cluster, std::uint64_t seed) {
  std::vector<Request> out;
  if (rows.empty()) return out;
  std::vector<double> outputs;
  outputs.reserve(rows.size());
  for (const auto& r : rows) outputs.push_back(r.output_tokens);
  std::sort(outputs.begin(), outputs.end());
  const double q = std::clamp(mapping.split_quantile, 0.0, 1.0);
  const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(outputs.size() - 1)));
  const double threshold = outputs[idx];

  auto cells = cluster.cells();
  if (cells.empty()) throw ConfigError("AI requests need at least one cell");
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick_cell(0, cells.size() - 1);
  for (const auto& r : rows) {
    Request req;
    const bool large = r.output_tokens > threshold;
    req.cls = large ? RequestClass::LARGE_AI : RequestClass::SMALL_AI;
    req.arrival = r.timestamp;
    req.deadline_budget = uniform(rng, large ? mapping.large_deadline : mapping.small_deadline);
    req.cell_id = cells[pick_cell(rng)];
    req.target_service = large ? mapping.large_group : mapping.small_group;
    const double tokens = r.prompt_tokens + r.output_tokens;
    StageWork stage;
    stage.gpu_work = (large ? mapping.large_flops_per_token : mapping.small_flops_per_token) * tokens;
    stage.cpu_work = mapping.cpu_core_s_per_request;
    req.stages.push_back(stage);
    req.kv_cache = (large ? mapping.kv_gb_per_output_token : mapping.small_kv_gb_per_output_token) *
                   r.output_tokens;
    out.push_back(std::move(req));
  }
  return out;
}

IngestResult ingest_trace(const std::filesystem::path& path, const AiMapping& mapping,
                          const Cluster& cluster, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace " + path.string());
  if (in.peek() == std::ifstream::traits_type::eof())
    throw ConfigError("trace file " + path.string() + " is empty");
  IngestResult result;
  auto rows = parse_trace_csv(in, result.skipped_rows);
  result.requests = map_trace_rows(rows, mapping, cluster, seed);
  return result;
}

std::vector<TraceRow> synth_ai_rows(const SyntheticAiConfig& config, double horizon,
                                    std::uint64_t seed) {
  std::vector<TraceRow> rows;
  if (config.rate <= 0.0 || horizon <= 0.0) return rows;
  Rng rng(seed);
  std::exponential_distribution<double> gap(config.rate);
  std::lognormal_distribution<double> prompt(std::log(config.prompt_median), config.prompt_sigma);
  std::lognormal_distribution<double> output(std::log(config.output_median), config.output_sigma);
  for (double t = gap(rng); t < horizon; t += gap(rng))
    rows.push_back({t, std::round(prompt(rng)), std::max(1.0, std::round(output(rng)))});
  return rows;
}

std::vector<Request> synth_ran(const RanConfig& config, const Cluster& cluster, double horizon,
                               std::uint64_t seed) {
  std::vector<Request> out;
  if (config.rate_per_cell <= 0.0 || horizon <= 0.0) return out;
  Rng rng(seed);
  std::exponential_distribution<double> gap(config.rate_per_cell);
  std::bernoulli_distribution urllc(config.urllc_fraction);
  for (int cell : cluster.cells()) {
    const InstanceId du = cluster.du_of_cell(cell);
    const InstanceId cu = cluster.cu_up_of_cell(cell);
    for (double t = gap(rng); t < horizon; t += gap(rng)) {
      Request req;
      const bool is_urllc = urllc(rng);
      req.cls = is_urllc ? RequestClass::RAN_URLLC : RequestClass::RAN_EMBB;
      req.arrival = t;
      req.deadline_budget = is_urllc ? config.urllc_deadline : config.embb_deadline;
      req.cell_id = cell;
      req.stages.push_back({du, lognormal_by_mean(rng, config.du_gpu_work_mean, config.du_gpu_work_cv), 0.0});
      req.stages.push_back({cu, 0.0, lognormal_by_mean(rng, config.cu_cpu_work_mean, config.cu_cpu_work_cv)});
      out.push_back(std::move(req));
    }
  }
  return out;
}

void finalize_requests(std::vector<Request>& requests) {
  std::stable_sort(requests.begin(), requests.end(),
                   [](const Request& a, const Request& b) { return a.arrival < b.arrival; });
  for (std::size_t i = 0; i < requests.size(); ++i) requests[i].request_id = static_cast<RequestId>(i);
}

double ai_serving_capacity(const Cluster& cluster, const Placement& placement) {
  double gpu = 0.0;
  for (const auto& n : cluster.nodes) {
    for (auto s : placement.residents(n.node_id)) {
      if (is_ai(cluster.instance(s).category)) {
        gpu += n.gpu_capacity;
        break;
      }
    }
  }
  return gpu;
}

double cluster_gpu_capacity(const Cluster& cluster) {
  double gpu = 0.0;
  for (const auto& n : cluster.nodes) gpu += n.gpu_capacity;
  return gpu;
}

double measure_rho(const std::vector<Request>& requests, double horizon, double gpu_capacity,
                   double floors_estimate) {
  const double available = gpu_capacity - floors_estimate;
  if (available <= 0.0) throw ConfigError("RAN floors consume the whole AI-serving GPU capacity");
  double work = 0.0;
  std::size_t count = 0;
  for (const auto& r : requests) {
    if (!is_ai(r.cls)) continue;
    ++count;
    for (const auto& s : r.stages) work += s.gpu_work;
  }
  if (count == 0 || horizon <= 0.0) return 0.0;
  const double lambda = static_cast<double>(count) / horizon;
  const double mean_work = work / static_cast<double>(count);
  return lambda * mean_work / available;
}

namespace {

std::vector<Request> resample(const std::vector<Request>& src, double factor, double horizon, Rng& rng) {
  std::vector<Request> out;
  if (src.empty()) return out;
  const auto target = static_cast<std::size_t>(std::llround(factor * static_cast<double>(src.size())));
  const std::size_t whole = target / src.size();
  const std::size_t extra = target % src.size();
  std::uniform_real_distribution<double> when(0.0, horizon);
  for (std::size_t copy = 0; copy < whole; ++copy) {
    for (const auto& r : src) {
      out.push_back(r);
      if (copy > 0) out.back().arrival = when(rng);
    }
  }
  std::vector<std::size_t> idx(src.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(extra);
  std::sort(idx.begin(), idx.end());
  for (auto i : idx) {
    out.push_back(src[i]);
    if (whole > 0) out.back().arrival = when(rng);
  }
  return out;
}

}  // namespace

ScaledWorkload scale_to_rho(const std::vector<Request>& requests, double gpu_capacity,
                            double floors_estimate, double rho_target, double horizon,
                            std::uint64_t seed) {
  if (!(rho_target > 0.0)) throw ConfigError("rho target must be positive");
  const double gpu = gpu_capacity;
  const double measured = measure_rho(requests, horizon, gpu, floors_estimate);
  if (measured <= 0.0) throw ConfigError("cannot scale a workload with no AI demand to rho");
  // measured = lambda W / (G - F)  =>  lambda W = measured * (G - F)
  const double demand = measured * (gpu - floors_estimate);
  const double factor = rho_target * gpu / (demand + rho_target * floors_estimate);

  std::vector<Request> ai, ran;
  for (const auto& r : requests) (is_ai(r.cls) ? ai : ran).push_back(r);
  const double expected_ai = factor * static_cast<double>(ai.size());
  if (expected_ai < 1.0 || gpu - factor * floors_estimate <= 0.0)
    throw ConfigError("rho " + std::to_string(rho_target) + " is unreachable over a " +
                      std::to_string(horizon) + " s horizon");

  ScaledWorkload result;
  result.factor = factor;
  if (std::abs(factor - 1.0) < 1e-12) {
    result.requests = requests;
  } else {
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    result.requests = resample(ai, factor, horizon, rng);
    auto scaled_ran = resample(ran, factor, horizon, rng);
    result.requests.insert(result.requests.end(), scaled_ran.begin(), scaled_ran.end());
    finalize_requests(result.requests);
  }
  result.realized_rho = measure_rho(result.requests, horizon, gpu, factor * floors_estimate);
  return result;
}

std::vector<Request> build_base_workload(const WorkloadConfig& config, const Cluster& cluster) {
  std::vector<Request> requests;
  if (config.trace_path) {
    auto ingested = ingest_trace(*config.trace_path, config.mapping, cluster, config.seed);
    for (auto& r : ingested.requests)
      if (r.arrival < config.horizon) requests.push_back(std::move(r));
  } else {
    auto rows = synth_ai_rows(config.synthetic_ai, config.horizon, config.seed);
    requests = map_trace_rows(rows, config.mapping, cluster, config.seed + 1);
  }
  auto ran = synth_ran(config.ran, cluster, config.horizon, config.seed + 2);
  requests.insert(requests.end(), ran.begin(), ran.end());
  finalize_requests(requests);
  return requests;
}

void write_requests_jsonl(std::ostream& out, const std::vector<Request>& requests) {
  for (const auto& r : requests) {
    nlohmann::json j;
    j["id"] = r.request_id;
    j["class"] = to_string(r.cls);
    j["arrival"] = r.arrival;
    j["deadline"] = r.deadline_budget;
    j["cell"] = r.cell_id;
    if (r.target_service) j["target"] = *r.target_service;
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : r.stages)
      stages.push_back({{"instance", s.instance_id}, {"gpu", s.gpu_work}, {"cpu", s.cpu_work}});
    j["stages"] = std::move(stages);
    j["kv"] = r.kv_cache;
    out << j.dump() << '\n';
  }
}

std::vector<Request> read_requests_jsonl(std::istream& in) {
  std::vector<Request> out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line);
    Request r;
    r.request_id = j.at("id").get<RequestId>();
    r.cls = parse_request_class(j.at("class").get<std::string>());
    r.arrival = j.at("arrival").get<double>();
    r.deadline_budget = j.at("deadline").get<double>();
    r.cell_id = j.at("cell").get<int>();
    if (j.contains("target")) r.target_service = j["target"].get<int>();
    for (const auto& s : j.at("stages"))
      r.stages.push_back({s.at("instance").get<int>(), s.at("gpu").get<double>(), s.at("cpu").get<double>()});
    r.kv_cache = j.at("kv").get<double>();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace airan
