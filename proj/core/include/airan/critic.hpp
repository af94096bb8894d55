#pragma once

// Predictive critic: a two-layer MLP mapping (snapshot, action) features to
// class-resolved fulfillment forecasts, trained offline by regression and
// used frozen to pick among the agent's shortlist.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "airan/placement.hpp"

namespace airan {

// Raw feature layout for a cluster with N nodes:
//   6 per node   gpu_util, cpu_util, floor_util, vram_headroom/V, gpu_load, cpu_load
//   12           per category: log1p(backlog s), log1p(active), summed load
//   3            recent fulfillment (large, small, RAN)
//   5            is_move, category one-hot
//   7            src load, dst load, src load after, dst load after,
//                instance share of src, dst vram headroom after / V, R_s / interval
// NoOp leaves the last 12 entries at zero.
std::size_t feature_length(std::size_t nodes);
constexpr std::size_t kActionBlock = 12;

std::vector<double> encode_features(const EpochSnapshot& snapshot, const MigrationAction& action,
                                    const Cluster& cluster);

using Label = std::array<double, 3>;  // (large, small, RAN)

struct TrainingSample {
  std::vector<double> features;  // raw, unstandardized
  Label label{};
};

struct CriticWeights {
  double large = 1.0;
  double small = 1.0;
  double ran = 2.0;
};

double weighted_mean(const CriticForecast& f, const CriticWeights& w);

class CriticModel {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  CriticModel() = default;
  // He-style random init for the hidden layer, small output weights.
  CriticModel(std::size_t inputs, std::size_t hidden, std::size_t node_count, std::uint64_t seed);

  std::size_t inputs() const { return inputs_; }
  std::size_t hidden() const { return hidden_; }
  std::size_t node_count() const { return node_count_; }

  // Standardizes raw features with the stored statistics, then
  // linear -> ReLU -> linear -> sigmoid. Throws on length mismatch.
  CriticForecast forward(const std::vector<double>& raw_features) const;

  void set_standardization(std::vector<double> mean, std::vector<double> stddev);
  const std::vector<double>& feature_mean() const { return mean_; }
  const std::vector<double>& feature_std() const { return std_; }

  // Parameters in one flat vector: W1 (hidden x inputs, row-major), b1,
  // W2 (3 x hidden), b2.
  std::vector<double> parameters() const;
  void set_parameters(const std::vector<double>& flat);
  std::size_t parameter_count() const;

  // Mean over samples of ||forecast - label||^2 and its gradient with respect
  // to parameters(). Features are standardized internally.
  double loss(const std::vector<TrainingSample>& samples) const;
  double loss_and_gradient(const std::vector<TrainingSample>& samples, std::vector<double>& grad) const;

  void save(const std::filesystem::path& path) const;
  static CriticModel load(const std::filesystem::path& path);
  std::string serialize() const;
  static CriticModel deserialize(const std::string& bytes);

  // FNV-1a over the serialized bytes; unchanged while the model is frozen.
  std::uint64_t hash() const;

 private:
  std::vector<double> standardize(const std::vector<double>& raw) const;

  std::size_t inputs_ = 0;
  std::size_t hidden_ = 0;
  std::size_t node_count_ = 0;
  std::vector<double> w1_, b1_, w2_, b2_;
  std::vector<double> mean_, std_;
};

struct TrainConfig {
  std::size_t hidden = 64;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t epochs = 200;
  double validation_fraction = 0.2;
  std::size_t min_samples = 200;
  std::uint64_t seed = 7;
};

struct TrainResult {
  CriticModel model;
  std::vector<double> train_loss;  // full training-set MSE after each epoch
  std::vector<double> val_loss;
  double untrained_val_loss = 0.0;
  std::size_t train_count = 0;
  std::size_t val_count = 0;
};

// Mini-batch gradient descent (Adam update) on the squared error. Holds out
// the validation fraction after a seeded shuffle. Throws on too few samples
// or a non-finite loss.
TrainResult train_critic(const std::vector<TrainingSample>& samples, std::size_t node_count,
                         const TrainConfig& config);

// argmax of the weighted mean; ties keep the earlier shortlist position.
std::size_t select_index(const std::vector<CriticForecast>& forecasts, const CriticWeights& weights);

MigrationAction select(const std::vector<MigrationAction>& shortlist, const EpochSnapshot& snapshot,
                       const Cluster& cluster, const CriticModel& model, const CriticWeights& weights,
                       std::vector<CriticForecast>* forecasts_out = nullptr);

}  // namespace airan
