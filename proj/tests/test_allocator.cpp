#include <doctest.h>

#include <random>

#include "airan/allocator.hpp"
#include "oracle.hpp"

using namespace airan;

namespace {

std::vector<double> solve(std::vector<double> w, std::vector<double> f, double cap) {
  std::vector<ResourceDemand> d;
  for (std::size_t i = 0; i < w.size(); ++i) d.push_back({static_cast<InstanceId>(i), w[i], f[i]});
  return solve_resource(d, cap);
}

}  // namespace

TEST_SUITE("allocator") {

TEST_CASE("aggregate load sums residual work and inverse slack") {
  std::vector<ActiveWork> active{{1, 0.0, 1.0, 2e9, 0.1}, {2, 0.5, 0.25, 1e9, 0.0}};
  auto load = aggregate_load(3, active, 0.5, 1e-6);
  CHECK(load.instance_id == 3);
  CHECK(load.resid_gpu_work == doctest::Approx(3e9));
  CHECK(load.resid_cpu_work == doctest::Approx(0.1));
  CHECK(load.urgency == doctest::Approx(2.0 + 4.0));
}

TEST_CASE("urgency saturates at 1/epsilon for expired requests") {
  std::vector<ActiveWork> active{{1, 0.0, 0.1, 1.0, 0.0}};
  CHECK(aggregate_load(0, active, 5.0, 1e-6).urgency == doctest::Approx(1e6));
  CHECK(aggregate_load(0, {}, 5.0, 1e-6).urgency == 0.0);
}

TEST_CASE("RAN floor") {
  CHECK(compute_ran_floor({}, Category::DU, 0.0, 200e-6, 0.0) == 0.0);

  // 1e9 FLOPs with 2 ms left after overheads.
  std::vector<ActiveWork> one{{7, 0.0, 0.0025, 1e9, 0.0}};
  CHECK(compute_ran_floor(one, Category::DU, 0.0, 300e-6, 200e-6) == doctest::Approx(5e11));

  std::vector<ActiveWork> tight{{9, 0.0, 0.001, 1e9, 0.0}};
  CHECK_THROWS_AS(compute_ran_floor(tight, Category::DU, 0.0008, 200e-6, 0.0), InfeasibleFloor);
  CHECK_THROWS_AS(compute_ran_floor(one, Category::LARGE_AI, 0.0, 0.0, 0.0), Error);

  // CU-UP uses CPU work and ignores the downstream estimate.
  std::vector<ActiveWork> cu{{1, 0.0, 0.004, 0.0, 1e-3}};
  CHECK(compute_ran_floor(cu, Category::CU_UP, 0.0, 0.0, 1.0) == doctest::Approx(1e-3 / 0.004));
}

TEST_CASE("solve_resource worked examples") {
  auto a = solve({5.0}, {0.0}, 7.0);
  CHECK(a[0] == doctest::Approx(7.0));

  auto b = solve({4.0, 1.0}, {0.0, 0.0}, 3.0);
  CHECK(b[0] == doctest::Approx(2.0));
  CHECK(b[1] == doctest::Approx(1.0));

  auto c = solve({1.0, 1.0}, {2.5, 0.0}, 4.0);
  CHECK(c[0] == doctest::Approx(2.5));
  CHECK(c[1] == doctest::Approx(1.5));

  auto idle = solve({0.0, 3.0}, {0.0, 0.0}, 4.0);
  CHECK(idle[0] == 0.0);
  CHECK(idle[1] == doctest::Approx(4.0));

  auto floors_only = solve({0.0, 0.0}, {1.0, 0.5}, 4.0);
  CHECK(floors_only[0] == 1.0);
  CHECK(floors_only[1] == 0.5);

  CHECK_THROWS_AS(solve({1.0, 1.0}, {3.0, 2.0}, 4.0), FloorOverflow);
}

TEST_CASE("monotonicity, scale invariance and round bound") {
  auto base = solve({1.0, 1.0}, {0.0, 0.0}, 10.0);
  auto more = solve({2.0, 1.0}, {0.0, 0.0}, 10.0);
  CHECK(more[0] > base[0]);
  CHECK(more[1] < base[1]);

  auto scaled = solve({3e6, 7e6, 1e6}, {0, 0, 0}, 5.0);
  auto unit = solve({3.0, 7.0, 1.0}, {0, 0, 0}, 5.0);
  for (int i = 0; i < 3; ++i) CHECK(scaled[i] == doctest::Approx(unit[i]));

  solve({1, 1, 1, 1}, {0.2, 0.4, 0.6, 0.0}, 1.5);
  CHECK(last_solve_rounds() <= 5);
}

TEST_CASE("closed form matches the projected-gradient reference") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> count(2, 8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = count(rng);
    const double cap = 1.0 + 99.0 * u(rng);
    std::vector<double> w(n), f(n);
    double fsum = 0.0;
    for (int i = 0; i < n; ++i) {
      w[i] = std::pow(10.0, 6.0 * u(rng));
      f[i] = u(rng) < 0.5 ? u(rng) : 0.0;
      fsum += f[i];
    }
    const double limit = 0.9 * cap * u(rng);
    for (auto& x : f) x *= fsum > 0.0 ? limit / fsum : 0.0;
    auto closed = solve(w, f, cap);
    auto ref = testing::projected_gradient_solve(w, f, cap);
    const double oc = testing::allocation_objective(w, closed);
    const double orf = testing::allocation_objective(w, ref);
    CHECK((oc - orf) / orf <= 1e-6);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      CHECK(closed[i] >= f[i] * (1.0 - 1e-12));
      CHECK(std::abs(closed[i] - ref[i]) <= 1e-5 * cap);
      total += closed[i];
    }
    CHECK(total <= cap * (1.0 + 1e-12));
  }
}

TEST_CASE("allocate_node honors floors and capacity") {
  NodeState st;
  st.gpu_capacity = 10.0;
  st.cpu_capacity = 4.0;
  st.now = 0.0;
  NodeInstanceState du;
  du.instance_id = 0;
  du.category = Category::DU;
  du.work = {{1, 0.0, 0.01, 0.03, 0.0}};  // floor = 0.03 / 0.01 = 3
  NodeInstanceState ai;
  ai.instance_id = 1;
  ai.category = Category::LARGE_AI;
  ai.work = {{2, 0.0, 5.0, 1e6, 0.0}};
  st.instances = {du, ai};
  AllocatorConfig cfg;
  cfg.per_hop = 0.0;
  auto a = allocate_node(st, cfg);
  CHECK(a.gpu[0] >= doctest::Approx(3.0));
  CHECK(a.gpu[0] + a.gpu[1] == doctest::Approx(10.0));
  CHECK(a.gpu_floor[0] == doctest::Approx(3.0));

  cfg.floors_enabled = false;
  auto nf = allocate_node(st, cfg);
  CHECK(nf.gpu_floor[0] == 0.0);
  CHECK(nf.gpu[0] < 3.0);
}

TEST_CASE("floor overflow scales floors to capacity and flags it") {
  NodeState st;
  st.gpu_capacity = 1.0;
  st.cpu_capacity = 1.0;
  for (int i = 0; i < 2; ++i) {
    NodeInstanceState du;
    du.instance_id = i;
    du.category = Category::DU;
    du.work = {{static_cast<RequestId>(i), 0.0, 0.01, 0.02, 0.0}};  // floor 2 each
    st.instances.push_back(du);
  }
  AllocatorConfig cfg;
  cfg.per_hop = 0.0;
  auto a = allocate_node(st, cfg);
  CHECK(a.gpu_floor_overflow);
  CHECK(a.gpu[0] + a.gpu[1] <= 1.0 + 1e-12);
  CHECK(a.gpu[0] == doctest::Approx(0.5));
}

TEST_CASE("unavailable instances receive nothing") {
  NodeState st;
  st.gpu_capacity = 8.0;
  st.cpu_capacity = 8.0;
  NodeInstanceState a;
  a.instance_id = 0;
  a.category = Category::SMALL_AI;
  a.available = false;
  a.work = {{1, 0.0, 1.0, 5.0, 0.0}};
  NodeInstanceState b = a;
  b.instance_id = 1;
  b.available = true;
  st.instances = {a, b};
  auto r = allocate_node(st, AllocatorConfig{});
  CHECK(r.gpu[0] == 0.0);
  CHECK(r.gpu[1] == doctest::Approx(8.0));
}

TEST_CASE("baseline share rules") {
  std::vector<ResourceDemand> d{{0, 4.0, 1.0}, {1, 1.0, 0.0}, {2, 0.0, 0.0}};
  std::vector<Category> cats{Category::DU, Category::SMALL_AI, Category::LARGE_AI};
  auto eq = share_residual(d, cats, 7.0, ShareRule::EqualShare, 0.5);
  CHECK(eq[0] == doctest::Approx(4.0));
  CHECK(eq[1] == doctest::Approx(3.0));
  CHECK(eq[2] == 0.0);
  auto mw = share_residual(d, cats, 7.0, ShareRule::MaxWeight, 0.5);
  CHECK(mw[0] == doctest::Approx(7.0));
  auto bid = share_residual(d, cats, 6.0, ShareRule::BidProportional, 0.5);
  CHECK(bid[0] == doctest::Approx(1.0 + 4.0));
  CHECK(bid[1] == doctest::Approx(1.0));
  auto alpha = share_residual(d, cats, 5.0, ShareRule::AlphaSplit, 0.25);
  CHECK(alpha[0] == doctest::Approx(2.0));
  CHECK(alpha[1] == doctest::Approx(3.0));
}

TEST_CASE("downstream estimator") {
  DownstreamEstimator e(1e-3);
  CHECK(e.update(1e-3) == doctest::Approx(1e-3));
  DownstreamEstimator f(1e-3);
  CHECK(f.update(2e-3) == doctest::Approx(1.2e-3));
  CHECK(f.bound() > f.value());
  DownstreamEstimator z(0.0);
  CHECK(z.update(0.0) == 0.0);
  CHECK(z.bound() == 0.0);
}

}
