#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "airan/config.hpp"
#include "airan/critic.hpp"
#include "airan/workload.hpp"
#include "fixtures.hpp"

using namespace airan;

TEST_SUITE("workload") {

TEST_CASE("empty and zero-rate inputs") {
  std::size_t skipped = 0;
  std::istringstream header_only("timestamp,prompt_tokens,output_tokens\n");
  CHECK(parse_trace_csv(header_only, skipped).empty());
  auto c = testing::tiny_cluster();
  CHECK(map_trace_rows({}, AiMapping{}, c, 1).empty());
  CHECK(synth_ai_rows(SyntheticAiConfig{}, 60.0, 1).empty());
  CHECK(synth_ran(RanConfig{}, c, 60.0, 1).empty());
}

TEST_CASE("trace parsing skips malformed rows") {
  std::size_t skipped = 0;
  std::istringstream in(
      "timestamp,prompt_tokens,output_tokens\n"
      "2023-11-16 18:15:46.6805900,374,44\n"
      "garbage\n"
      "2023-11-16 18:15:47.0000000,100,-3\n"
      "2023-11-16 18:15:48.1805900,10,20\n");
  auto rows = parse_trace_csv(in, skipped);
  CHECK(rows.size() == 2);
  CHECK(skipped == 2);
}

TEST_CASE("class split and KV sizing") {
  auto cfg = default_config();
  std::vector<TraceRow> rows;
  for (int i = 1; i <= 100; ++i) rows.push_back({i * 0.1, 500.0, static_cast<double>(i * 5)});
  auto reqs = map_trace_rows(rows, cfg.workload.mapping, cfg.cluster, 3);
  REQUIRE(reqs.size() == 100);
  std::size_t large = 0;
  for (const auto& r : reqs) {
    if (r.cls == RequestClass::LARGE_AI) ++large;
    CHECK(r.target_service.has_value());
  }
  CHECK(large == 50);
  // The 99th-percentile output row is large.
  CHECK(reqs[98].cls == RequestClass::LARGE_AI);

  // Median large-class row of the synthetic distribution.
  const auto& s = cfg.workload.synthetic_ai;
  const double large_median_tokens = s.output_median * std::exp(s.output_sigma * 0.6745);
  const double kv = large_median_tokens * cfg.workload.mapping.kv_gb_per_output_token;
  CHECK(kv >= 0.4);
  CHECK(kv <= 0.6);
}

TEST_CASE("synthetic mix and RAN binding") {
  auto cfg = default_config();
  SyntheticAiConfig ai{200.0, 600.0, 0.8, 250.0, 0.6};
  auto rows = synth_ai_rows(ai, 50.0, 9);
  auto reqs = map_trace_rows(rows, cfg.workload.mapping, cfg.cluster, 9);
  REQUIRE(reqs.size() > 9000);
  double large = 0;
  for (const auto& r : reqs) large += r.cls == RequestClass::LARGE_AI;
  const double n = static_cast<double>(reqs.size());
  CHECK(std::abs(large / n - 0.5) <= 2.0 * std::sqrt(0.25 / n) + 1.0 / n);

  auto ran = synth_ran(cfg.workload.ran, cfg.cluster, 30.0, 4);
  REQUIRE(!ran.empty());
  for (const auto& r : ran) {
    CHECK(r.stages[0].instance_id == cfg.cluster.du_of_cell(r.cell_id));
    CHECK(r.stages[1].instance_id == cfg.cluster.cu_up_of_cell(r.cell_id));
  }
}

TEST_CASE("rho scaling arithmetic") {
  auto cfg = default_config();
  cfg.workload.seed = 5;
  auto base = build_base_workload(cfg.workload, cfg.cluster);
  const double g = ai_serving_capacity(cfg.cluster, cfg.initial_placement);
  CHECK(g < cluster_gpu_capacity(cfg.cluster));
  const double rho = measure_rho(base, cfg.workload.horizon, g, 0.0);

  auto same = scale_to_rho(base, g, 0.0, rho, cfg.workload.horizon, 1);
  CHECK(same.factor == doctest::Approx(1.0));
  CHECK(same.requests.size() == base.size());

  auto twice = scale_to_rho(base, g, 0.0, 2.0 * rho, cfg.workload.horizon, 1);
  CHECK(twice.factor == doctest::Approx(2.0));
  CHECK(std::abs(static_cast<double>(twice.requests.size()) - 2.0 * static_cast<double>(base.size())) <= 1.0);

  std::vector<double> counts;
  for (double r : {0.75, 1.0, 1.25})
    counts.push_back(static_cast<double>(scale_to_rho(base, g, 0.0, r, cfg.workload.horizon, 1).requests.size()));
  CHECK(counts[0] / counts[1] == doctest::Approx(0.75).epsilon(0.01));
  CHECK(counts[2] / counts[1] == doctest::Approx(1.25).epsilon(0.01));
}

TEST_CASE("request replay round-trips") {
  auto cfg = default_config();
  cfg.workload.horizon = 5.0;
  auto reqs = build_base_workload(cfg.workload, cfg.cluster);
  std::stringstream buf;
  write_requests_jsonl(buf, reqs);
  auto back = read_requests_jsonl(buf);
  REQUIRE(back.size() == reqs.size());
  for (std::size_t i = 0; i < reqs.size(); ++i) {
    CHECK(back[i].request_id == reqs[i].request_id);
    CHECK(back[i].arrival == reqs[i].arrival);
    CHECK(back[i].stages.size() == reqs[i].stages.size());
  }
}

}

TEST_SUITE("critic") {

TEST_CASE("feature encoding") {
  auto c = testing::tiny_cluster();
  auto p = testing::tiny_placement();
  auto snap = testing::blank_snapshot(c, p);
  auto noop = encode_features(snap, MigrationAction::noop(), c);
  CHECK(noop.size() == feature_length(c.node_count()));
  CHECK(feature_length(6) == 6 * 6 + 12 + 3 + 12);
  for (std::size_t i = noop.size() - kActionBlock; i < noop.size(); ++i) CHECK(noop[i] == 0.0);
  auto mv = MigrationAction::move(3, 0, 1);
  CHECK(encode_features(snap, mv, c) == encode_features(snap, mv, c));
  CHECK(encode_features(snap, mv, c) != noop);
}

TEST_CASE("forward pass") {
  CriticModel zero(2, 2, 1, 1);
  zero.set_parameters(std::vector<double>(zero.parameter_count(), 0.0));
  zero.set_standardization({0.0, 0.0}, {1.0, 1.0});
  auto f = zero.forward({3.0, -4.0});
  CHECK(f.r_large == doctest::Approx(0.5));
  CHECK(f.r_small == doctest::Approx(0.5));
  CHECK(f.r_ran == doctest::Approx(0.5));

  // W1 = [[1, 2], [-1, 1]], b1 = [0.5, 0], W2 = [[1, -1], [0.5, 0.5], [0, 2]], b2 = [0, -1, 0.25]
  CriticModel toy(2, 2, 1, 1);
  toy.set_parameters({1, 2, -1, 1, 0.5, 0, 1, -1, 0.5, 0.5, 0, 2, 0, -1, 0.25});
  toy.set_standardization({0.0, 0.0}, {1.0, 1.0});
  const double x0 = 0.3, x1 = 0.7;
  const double h0 = std::max(0.0, 1 * x0 + 2 * x1 + 0.5);
  const double h1 = std::max(0.0, -1 * x0 + 1 * x1 + 0.0);
  auto sig = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
  auto t = toy.forward({x0, x1});
  CHECK(std::abs(t.r_large - sig(h0 - h1)) < 1e-9);
  CHECK(std::abs(t.r_small - sig(0.5 * h0 + 0.5 * h1 - 1.0)) < 1e-9);
  CHECK(std::abs(t.r_ran - sig(2 * h1 + 0.25)) < 1e-9);
  CHECK_THROWS(toy.forward({1.0}));

  CriticModel rnd(2, 8, 1, 4);
  rnd.set_standardization({0.0, 0.0}, {1.0, 1.0});
  for (double v : {-100.0, 0.0, 100.0}) {
    auto o = rnd.forward({v, -v});
    CHECK(o.r_large > 0.0);
    CHECK(o.r_large < 1.0);
  }
}

TEST_CASE("analytic gradient matches finite differences") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n01;
  std::vector<TrainingSample> samples;
  for (int i = 0; i < 20; ++i) {
    TrainingSample s;
    for (int j = 0; j < 5; ++j) s.features.push_back(n01(rng));
    s.label = {0.2 + 0.03 * i, 0.9, 0.5};
    samples.push_back(s);
  }
  CriticModel m(5, 6, 1, 3);
  m.set_standardization(std::vector<double>(5, 0.0), std::vector<double>(5, 1.0));
  std::vector<double> grad;
  m.loss_and_gradient(samples, grad);
  auto theta = m.parameters();
  int bad = 0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double h = 1e-6;
    auto plus = theta, minus = theta;
    plus[k] += h;
    minus[k] -= h;
    CriticModel a = m, b = m;
    a.set_parameters(plus);
    b.set_parameters(minus);
    const double fd = (a.loss(samples) - b.loss(samples)) / (2 * h);
    const double scale = std::max({std::abs(fd), std::abs(grad[k]), 1e-7});
    if (std::abs(fd - grad[k]) / scale > 1e-4) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("training fits constant labels and persists") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  std::vector<TrainingSample> samples;
  for (int i = 0; i < 300; ++i) {
    TrainingSample s;
    s.features.assign(feature_length(1), 0.0);
    for (int j = 0; j < 4; ++j) s.features[j] = n01(rng);
    s.label = {0.7, 0.7, 0.7};
    samples.push_back(s);
  }
  TrainConfig tc;
  tc.hidden = 8;
  tc.epochs = 150;
  tc.learning_rate = 5e-3;
  auto res = train_critic(samples, 1, tc);
  CHECK(res.val_loss.back() < 1e-3);
  auto f = res.model.forward(samples[0].features);
  CHECK(f.r_ran == doctest::Approx(0.7).epsilon(0.05));

  auto bytes = res.model.serialize();
  auto back = CriticModel::deserialize(bytes);
  CHECK(back.hash() == res.model.hash());
  CHECK(back.forward(samples[3].features).r_small == res.model.forward(samples[3].features).r_small);
  CHECK_THROWS(CriticModel::deserialize(bytes.substr(0, bytes.size() / 2)));
  CHECK_THROWS(CriticModel::deserialize("NOTACRITIC"));

  samples.resize(10);
  CHECK_THROWS(train_critic(samples, 1, tc));
}

TEST_CASE("training loss does not increase on a separable set") {
  std::vector<TrainingSample> samples;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 400; ++i) {
    TrainingSample s;
    s.features.assign(feature_length(1), 0.0);
    for (int j = 0; j < 3; ++j) s.features[j] = u(rng);
    const double y = s.features[0] + 0.5 * s.features[1] > 0.0 ? 0.9 : 0.1;
    s.label = {y, 1.0 - y, y};
    samples.push_back(s);
  }
  TrainConfig tc;
  tc.hidden = 16;
  tc.epochs = 30;
  auto res = train_critic(samples, 1, tc);
  int rises = 0;
  for (std::size_t e = 1; e < res.train_loss.size(); ++e) rises += res.train_loss[e] > res.train_loss[e - 1];
  CHECK(rises == 0);
  CHECK(res.val_loss.back() < res.untrained_val_loss);
}

TEST_CASE("selection") {
  CriticWeights w{1, 1, 2};
  CHECK(weighted_mean({0.9, 0.9, 0.9}, w) == doctest::Approx(0.9));
  CHECK(weighted_mean({1.0, 1.0, 0.5}, w) == doctest::Approx(0.75));
  CHECK(select_index({{0.9, 0.9, 0.9}, {1.0, 1.0, 0.5}}, w) == 0);
  CHECK(select_index({{1.0, 1.0, 0.5}, {0.9, 0.9, 0.9}}, w) == 1);
  CHECK(select_index({{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}}, w) == 0);
  CHECK(select_index({{0.1, 0.1, 0.1}}, w) == 0);
}

}
