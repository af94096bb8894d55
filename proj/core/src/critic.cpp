#include "airan/critic.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace airan {

std::size_t feature_length(std::size_t nodes) { return 6 * nodes + 12 + 3 + kActionBlock; }

std::vector<double> encode_features(const EpochSnapshot& snapshot, const MigrationAction& action,
                                    const Cluster& cluster) {
  const std::size_t n = cluster.node_count();
  if (snapshot.nodes.size() != n || snapshot.instances.size() != cluster.instance_count())
    throw Error("snapshot shape does not match the cluster");
  std::vector<double> f;
  f.reserve(feature_length(n));
  for (const auto& node : snapshot.nodes) {
    const auto& spec = cluster.node(node.node_id);
    f.push_back(node.gpu_util);
    f.push_back(node.cpu_util);
    f.push_back(node.floor_util);
    f.push_back(node.vram_headroom / spec.vram_capacity);
    f.push_back(node.gpu_load);
    f.push_back(node.cpu_load);
  }
  std::array<double, kNumCategories> backlog{}, active{}, load{};
  for (const auto& inst : snapshot.instances) {
    const auto c = static_cast<std::size_t>(inst.category);
    backlog[c] += inst.backlog_seconds;
    active[c] += inst.active_requests;
    load[c] += instance_load(inst, cluster.node(inst.host), snapshot.interval);
  }
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    f.push_back(std::log1p(backlog[c]));
    f.push_back(std::log1p(active[c]));
    f.push_back(load[c]);
  }
  f.push_back(snapshot.recent_large);
  f.push_back(snapshot.recent_small);
  f.push_back(snapshot.recent_ran);

  std::array<double, kActionBlock> act{};
  if (action.is_move()) {
    const auto& spec = cluster.instance(action.instance_id);
    const auto& inst = snapshot.instances.at(static_cast<std::size_t>(action.instance_id));
    const auto& src_spec = cluster.node(action.from_node);
    const auto& dst_spec = cluster.node(action.to_node);
    const auto& src = snapshot.nodes.at(static_cast<std::size_t>(action.from_node));
    const auto& dst = snapshot.nodes.at(static_cast<std::size_t>(action.to_node));
    const bool gpu = dominant_resource(spec.category) == Resource::GPU;
    const double share_src = instance_load(inst, src_spec, snapshot.interval);
    const double share_dst =
        share_src * (gpu ? src_spec.gpu_capacity / dst_spec.gpu_capacity
                         : src_spec.cpu_capacity / dst_spec.cpu_capacity);
    const double src_load = gpu ? src.gpu_load : src.cpu_load;
    const double dst_load = gpu ? dst.gpu_load : dst.cpu_load;
    act[0] = 1.0;
    act[1 + static_cast<std::size_t>(spec.category)] = 1.0;
    act[5] = src_load;
    act[6] = dst_load;
    act[7] = src_load - share_src;
    act[8] = dst_load + share_dst;
    act[9] = share_src;
    act[10] = (dst.vram_headroom - spec.weight_footprint) / dst_spec.vram_capacity;
    act[11] = spec.reconfig_delay / snapshot.interval;
  }
  f.insert(f.end(), act.begin(), act.end());
  return f;
}

double weighted_mean(const CriticForecast& f, const CriticWeights& w) {
  return (w.large * f.r_large + w.small * f.r_small + w.ran * f.r_ran) / (w.large + w.small + w.ran);
}

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

constexpr char kMagic[8] = {'A', 'I', 'R', 'C', 'R', 'I', 'T', '\0'};

}  // namespace

CriticModel::CriticModel(std::size_t inputs, std::size_t hidden, std::size_t node_count,
                         std::uint64_t seed)
    : inputs_(inputs),
      hidden_(hidden),
      node_count_(node_count),
      w1_(hidden * inputs),
      b1_(hidden, 0.0),
      w2_(3 * hidden),
      b2_(3, 0.0),
      mean_(inputs, 0.0),
      std_(inputs, 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d1(0.0, std::sqrt(2.0 / static_cast<double>(std::max<std::size_t>(inputs, 1))));
  std::normal_distribution<double> d2(0.0, 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(hidden, 1))));
  for (auto& w : w1_) w = d1(rng);
  for (auto& w : w2_) w = d2(rng);
}

void CriticModel::set_standardization(std::vector<double> mean, std::vector<double> stddev) {
  if (mean.size() != inputs_ || stddev.size() != inputs_) throw Error("standardization shape mismatch");
  mean_ = std::move(mean);
  std_ = std::move(stddev);
}

std::vector<double> CriticModel::standardize(const std::vector<double>& raw) const {
  if (raw.size() != inputs_)
    throw Error("feature length " + std::to_string(raw.size()) + " does not match model input " +
                std::to_string(inputs_));
  std::vector<double> x(inputs_);
  for (std::size_t i = 0; i < inputs_; ++i) x[i] = (raw[i] - mean_[i]) / std_[i];
  return x;
}

CriticForecast CriticModel::forward(const std::vector<double>& raw_features) const {
  const auto x = standardize(raw_features);
  std::vector<double> a(hidden_);
  for (std::size_t j = 0; j < hidden_; ++j) {
    double h = b1_[j];
    const double* row = &w1_[j * inputs_];
    for (std::size_t i = 0; i < inputs_; ++i) h += row[i] * x[i];
    a[j] = h > 0.0 ? h : 0.0;
  }
  std::array<double, 3> p{};
  for (std::size_t k = 0; k < 3; ++k) {
    double z = b2_[k];
    for (std::size_t j = 0; j < hidden_; ++j) z += w2_[k * hidden_ + j] * a[j];
    p[k] = sigmoid(z);
  }
  return {p[0], p[1], p[2]};
}

std::size_t CriticModel::parameter_count() const { return w1_.size() + b1_.size() + w2_.size() + b2_.size(); }

std::vector<double> CriticModel::parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  out.insert(out.end(), w1_.begin(), w1_.end());
  out.insert(out.end(), b1_.begin(), b1_.end());
  out.insert(out.end(), w2_.begin(), w2_.end());
  out.insert(out.end(), b2_.begin(), b2_.end());
  return out;
}

void CriticModel::set_parameters(const std::vector<double>& flat) {
  if (flat.size() != parameter_count()) throw Error("parameter vector has the wrong length");
  auto it = flat.begin();
  auto take = [&it](std::vector<double>& dst) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(dst.size()), dst.begin());
    it += static_cast<std::ptrdiff_t>(dst.size());
  };
  take(w1_);
  take(b1_);
  take(w2_);
  take(b2_);
}

double CriticModel::loss(const std::vector<TrainingSample>& samples) const {
  if (samples.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : samples) {
    auto f = forward(s.features);
    const double d0 = f.r_large - s.label[0], d1 = f.r_small - s.label[1], d2 = f.r_ran - s.label[2];
    total += d0 * d0 + d1 * d1 + d2 * d2;
  }
  return total / static_cast<double>(samples.size());
}

double CriticModel::loss_and_gradient(const std::vector<TrainingSample>& samples,
                                      std::vector<double>& grad) const {
  grad.assign(parameter_count(), 0.0);
  if (samples.empty()) return 0.0;
  double* gw1 = grad.data();
  double* gb1 = gw1 + w1_.size();
  double* gw2 = gb1 + b1_.size();
  double* gb2 = gw2 + w2_.size();
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  std::vector<double> h(hidden_), a(hidden_), da(hidden_);
  double total = 0.0;
  for (const auto& s : samples) {
    const auto x = standardize(s.features);
    for (std::size_t j = 0; j < hidden_; ++j) {
      double v = b1_[j];
      const double* row = &w1_[j * inputs_];
      for (std::size_t i = 0; i < inputs_; ++i) v += row[i] * x[i];
      h[j] = v;
      a[j] = v > 0.0 ? v : 0.0;
    }
    std::array<double, 3> dz{};
    for (std::size_t k = 0; k < 3; ++k) {
      double z = b2_[k];
      for (std::size_t j = 0; j < hidden_; ++j) z += w2_[k * hidden_ + j] * a[j];
      const double p = sigmoid(z);
      const double diff = p - s.label[k];
      total += diff * diff;
      dz[k] = 2.0 * diff * p * (1.0 - p) * inv_n;
    }
    std::fill(da.begin(), da.end(), 0.0);
    for (std::size_t k = 0; k < 3; ++k) {
      gb2[k] += dz[k];
      for (std::size_t j = 0; j < hidden_; ++j) {
        gw2[k * hidden_ + j] += dz[k] * a[j];
        da[j] += w2_[k * hidden_ + j] * dz[k];
      }
    }
    for (std::size_t j = 0; j < hidden_; ++j) {
      if (h[j] <= 0.0) continue;
      gb1[j] += da[j];
      double* row = gw1 + j * inputs_;
      for (std::size_t i = 0; i < inputs_; ++i) row[i] += da[j] * x[i];
    }
  }
  return total * inv_n;
}

std::string CriticModel::serialize() const {
  std::string out(kMagic, sizeof kMagic);
  auto put_u32 = [&out](std::uint32_t v) { out.append(reinterpret_cast<const char*>(&v), sizeof v); };
  auto put_vec = [&out](const std::vector<double>& v) {
    out.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
  };
  put_u32(kFormatVersion);
  put_u32(static_cast<std::uint32_t>(inputs_));
  put_u32(static_cast<std::uint32_t>(hidden_));
  put_u32(3);
  put_u32(static_cast<std::uint32_t>(node_count_));
  put_vec(w1_);
  put_vec(b1_);
  put_vec(w2_);
  put_vec(b2_);
  put_vec(mean_);
  put_vec(std_);
  return out;
}

CriticModel CriticModel::deserialize(const std::string& bytes) {
  std::size_t pos = 0;
  auto need = [&](std::size_t n) {
    if (pos + n > bytes.size()) throw Error("critic model file is truncated");
  };
  need(sizeof kMagic);
  if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) throw Error("not a critic model file");
  pos += sizeof kMagic;
  auto get_u32 = [&]() {
    need(4);
    std::uint32_t v;
    std::memcpy(&v, bytes.data() + pos, 4);
    pos += 4;
    return v;
  };
  auto get_vec = [&](std::vector<double>& v, std::size_t n) {
    need(n * sizeof(double));
    v.resize(n);
    std::memcpy(v.data(), bytes.data() + pos, n * sizeof(double));
    pos += n * sizeof(double);
  };
  const auto version = get_u32();
  if (version != kFormatVersion) throw Error("unsupported critic model version " + std::to_string(version));
  CriticModel m;
  m.inputs_ = get_u32();
  m.hidden_ = get_u32();
  if (get_u32() != 3) throw Error("critic model must have three outputs");
  m.node_count_ = get_u32();
  get_vec(m.w1_, m.hidden_ * m.inputs_);
  get_vec(m.b1_, m.hidden_);
  get_vec(m.w2_, 3 * m.hidden_);
  get_vec(m.b2_, 3);
  get_vec(m.mean_, m.inputs_);
  get_vec(m.std_, m.inputs_);
  if (pos != bytes.size()) throw Error("trailing bytes in critic model file");
  if (m.inputs_ != feature_length(m.node_count_))
    throw Error("critic model input size does not match its node count");
  return m;
}

void CriticModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const auto bytes = serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

CriticModel CriticModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

std::uint64_t CriticModel::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : serialize()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

TrainResult train_critic(const std::vector<TrainingSample>& samples, std::size_t node_count,
                         const TrainConfig& config) {
  if (samples.size() < config.min_samples)
    throw Error("critic training needs at least " + std::to_string(config.min_samples) + " samples, got " +
                std::to_string(samples.size()));
  const std::size_t inputs = samples.front().features.size();
  if (inputs != feature_length(node_count))
    throw Error("sample feature length does not match a " + std::to_string(node_count) + "-node cluster");
  for (const auto& s : samples)
    if (s.features.size() != inputs) throw Error("inconsistent feature lengths in training samples");

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto val_count = static_cast<std::size_t>(
      std::floor(config.validation_fraction * static_cast<double>(samples.size())));
  TrainResult result;
  std::vector<TrainingSample> train, val;
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < val_count ? val : train).push_back(samples[order[i]]);
  result.train_count = train.size();
  result.val_count = val.size();

  std::vector<double> mean(inputs, 0.0), sd(inputs, 0.0);
  for (const auto& s : train)
    for (std::size_t i = 0; i < inputs; ++i) mean[i] += s.features[i];
  for (auto& m : mean) m /= static_cast<double>(train.size());
  for (const auto& s : train)
    for (std::size_t i = 0; i < inputs; ++i) sd[i] += (s.features[i] - mean[i]) * (s.features[i] - mean[i]);
  for (auto& v : sd) {
    v = std::sqrt(v / static_cast<double>(train.size()));
    if (v < 1e-9) v = 1.0;
  }

  CriticModel model(inputs, config.hidden, node_count, config.seed + 1);
  model.set_standardization(mean, sd);
  result.untrained_val_loss = model.loss(val.empty() ? train : val);

  auto params = model.parameters();
  std::vector<double> m1(params.size(), 0.0), m2(params.size(), 0.0), grad;
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::size_t step = 0;
  const std::size_t batch = std::max<std::size_t>(config.batch_size, 1);
  std::vector<std::size_t> idx(train.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<TrainingSample> mb;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t start = 0; start < idx.size(); start += batch) {
      mb.clear();
      for (std::size_t i = start; i < std::min(idx.size(), start + batch); ++i) mb.push_back(train[idx[i]]);
      const double l = model.loss_and_gradient(mb, grad);
      if (!std::isfinite(l))
        throw Error("critic training diverged (lr=" + std::to_string(config.learning_rate) +
                    ", batch=" + std::to_string(config.batch_size) + ", hidden=" +
                    std::to_string(config.hidden) + ")");
      ++step;
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      for (std::size_t p = 0; p < params.size(); ++p) {
        m1[p] = beta1 * m1[p] + (1 - beta1) * grad[p];
        m2[p] = beta2 * m2[p] + (1 - beta2) * grad[p] * grad[p];
        params[p] -= config.learning_rate * (m1[p] / c1) / (std::sqrt(m2[p] / c2) + eps);
      }
      model.set_parameters(params);
    }
    const double tl = model.loss(train);
    if (!std::isfinite(tl))
      throw Error("critic training produced a non-finite loss (lr=" + std::to_string(config.learning_rate) + ")");
    result.train_loss.push_back(tl);
    result.val_loss.push_back(val.empty() ? tl : model.loss(val));
  }
  result.model = std::move(model);
  return result;
}

std::size_t select_index(const std::vector<CriticForecast>& forecasts, const CriticWeights& weights) {
  if (forecasts.empty()) throw Error("critic selection needs a non-empty shortlist");
  std::size_t best = 0;
  double best_value = weighted_mean(forecasts[0], weights);
  for (std::size_t j = 1; j < forecasts.size(); ++j) {
    const double v = weighted_mean(forecasts[j], weights);
    if (v > best_value) {
      best_value = v;
      best = j;
    }
  }
  return best;
}

MigrationAction select(const std::vector<MigrationAction>& shortlist, const EpochSnapshot& snapshot,
                       const Cluster& cluster, const CriticModel& model, const CriticWeights& weights,
                       std::vector<CriticForecast>* forecasts_out) {
  std::vector<CriticForecast> forecasts;
  forecasts.reserve(shortlist.size());
  for (const auto& a : shortlist) forecasts.push_back(model.forward(encode_features(snapshot, a, cluster)));
  const auto j = select_index(forecasts, weights);
  if (forecasts_out) *forecasts_out = std::move(forecasts);
  return shortlist.at(j);
}

}  // namespace airan
