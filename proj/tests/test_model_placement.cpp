#include <doctest.h>

#include <algorithm>

#include "airan/baselines.hpp"
#include "fixtures.hpp"

using namespace airan;
using airan::testing::blank_snapshot;
using airan::testing::tiny_cluster;
using airan::testing::tiny_placement;

TEST_SUITE("model") {

TEST_CASE("cluster validation") {
  auto c = tiny_cluster();
  CHECK_NOTHROW(c.validate());

  auto bad = c;
  bad.instances[1].weight_footprint = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = c;
  bad.instances[2].reconfig_delay = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = c;
  bad.instances[2].cell_id = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = c;
  bad.nodes[1].node_id = 5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = c;
  bad.instances.pop_back();
  bad.instances[1].cell_id = 3;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("cell lookups") {
  auto c = tiny_cluster();
  CHECK(c.du_of_cell(0) == 0);
  CHECK(c.cu_up_of_cell(0) == 1);
  CHECK(c.cells() == std::vector<int>{0});
  CHECK(c.group_members(1) == std::vector<InstanceId>{3});
}

TEST_CASE("transport delay") {
  auto c = tiny_cluster();
  auto p = tiny_placement();
  Request ran;
  ran.request_id = 1;
  ran.cls = RequestClass::RAN_URLLC;
  ran.deadline_budget = 1e-3;
  ran.stages = {{0, 1e9, 0}, {1, 0, 1e-4}};
  CHECK(compute_transport_delay(ran, c, p, 200e-6, 100e-6) == doctest::Approx(200e-6));
  p.move(1, 0);
  CHECK(compute_transport_delay(ran, c, p, 200e-6, 100e-6) == 0.0);

  Request ai;
  ai.request_id = 2;
  ai.cls = RequestClass::SMALL_AI;
  ai.deadline_budget = 0.5;
  ai.target_service = 1;
  ai.stages = {{3, 1e12, 0}};
  CHECK(compute_transport_delay(ai, c, p, 200e-6, 100e-6) == doctest::Approx(100e-6));
  p.move(3, 1);
  CHECK(compute_transport_delay(ai, c, p, 200e-6, 100e-6) == doctest::Approx(300e-6));
}

TEST_CASE("memory predicate is inclusive") {
  auto c = tiny_cluster();
  auto p = tiny_placement();
  // Node 0 holds 2 + 28 + 4 = 34 GB of weights out of 80.
  CHECK(p.resident_weights(c, 0) == doctest::Approx(34.0));
  auto ok = check_memory_feasible(p, {46.0, 0.0, 0.0}, c);
  CHECK(ok[0]);
  ok = check_memory_feasible(p, {46.0 + 1e-9, 0.0, 0.0}, c);
  CHECK_FALSE(ok[0]);
}

TEST_CASE("capacity predicate") {
  auto c = tiny_cluster();
  auto p = tiny_placement();
  AllocationVector a(c.instance_count());
  a.gpu[0] = 5e13;
  a.gpu[2] = 5e13;
  CHECK(a.node_gpu(p, 0) == doctest::Approx(1e14));
  CHECK(check_capacity(a, p, c));
  a.gpu[3] = 1e12;
  CHECK_FALSE(check_capacity(a, p, c));
}

TEST_CASE("deadline met is inclusive") {
  Request r;
  r.request_id = 4;
  r.cls = RequestClass::RAN_EMBB;
  r.deadline_budget = 4e-3;
  CHECK(make_completion(r, 4e-3, 0.0).met_deadline);
  CHECK_FALSE(make_completion(r, 4e-3 + 1e-12, 0.0).met_deadline);
}

TEST_CASE("reconfiguration window") {
  Placement p({0, 0});
  p.set_reconfig_until(1, 3.0);
  CHECK(p.reconfiguring(1, 2.9));
  CHECK_FALSE(p.reconfiguring(1, 3.0));
  CHECK_FALSE(p.reconfiguring(0, 1.0));
}

}

TEST_SUITE("placement") {

TEST_CASE("candidate set respects memory, movability and the size bound") {
  auto c = tiny_cluster();
  auto p = tiny_placement();
  auto snap = blank_snapshot(c, p);
  auto all = generate_candidates(snap, p, c, kAllMovable);
  REQUIRE(!all.empty());
  CHECK(all.front() == MigrationAction::noop());
  const std::size_t bound = c.instance_count() * (c.node_count() - 1) + 1;
  CHECK(all.size() <= bound);
  // The large replica (28 GB) fits on neither of the other nodes.
  CHECK(std::none_of(all.begin(), all.end(), [](const MigrationAction& a) { return a.instance_id == 2; }));

  auto no_large = generate_candidates(snap, p, c, kNoLargeMovable);
  CHECK(no_large.size() == all.size());

  p.set_reconfig_until(3, 10.0);
  auto blocked = generate_candidates(snap, p, c, kAllMovable);
  CHECK(std::none_of(blocked.begin(), blocked.end(), [](const MigrationAction& a) { return a.instance_id == 3; }));
}

TEST_CASE("apply_action changes residency only") {
  auto p = tiny_placement();
  auto q = apply_action(p, MigrationAction::move(3, 0, 1));
  CHECK(q.host(3) == 1);
  CHECK(p.host(3) == 0);
  CHECK(apply_action(p, MigrationAction::noop()) == p);
}

TEST_CASE("shortlist parsing") {
  std::vector<MigrationAction> cand{MigrationAction::noop(), MigrationAction::move(3, 0, 1),
                                    MigrationAction::move(3, 0, 2)};
  auto a = parse_shortlist("Ranking:\n```ids\n2, 1, 0\n```", cand, 3);
  REQUIRE(a);
  CHECK(a->size() == 3);
  CHECK((*a)[0] == cand[2]);

  auto b = parse_shortlist("```ids\n7, 1, 1, 0\n```", cand, 2);
  REQUIRE(b);
  CHECK(b->size() == 2);
  CHECK((*b)[0] == cand[1]);
  CHECK((*b)[1] == cand[0]);

  CHECK(parse_shortlist("[2]", cand, 3)->front() == cand[2]);
  CHECK_FALSE(parse_shortlist("I would rather not.", cand, 3));
}

TEST_CASE("prompt is deterministic and lists candidate ids") {
  auto c = tiny_cluster();
  auto p = tiny_placement();
  auto snap = blank_snapshot(c, p);
  auto cand = generate_candidates(snap, p, c, kAllMovable);
  auto a = build_prompt(snap, cand, c, 3);
  CHECK(a == build_prompt(snap, cand, c, 3));
  CHECK(a.find("```ids") != std::string::npos);
  CHECK(!system_policy_text(5.0, 3).empty());
}

TEST_CASE("stub prefers relieving an overloaded node and ends with NoOp") {
  auto c = tiny_cluster();
  auto p = tiny_placement();
  auto snap = blank_snapshot(c, p);
  snap.nodes[0].gpu_load = 1.6;
  snap.instances[3].demand_gpu = 4e13;  // 0.4 of node 0
  auto cand = generate_candidates(snap, p, c, kAllMovable);
  auto sl = stub_shortlist(snap, cand, c, StubConfig{3, 1.0});
  REQUIRE(sl.size() >= 2);
  CHECK(sl.front().instance_id == 3);
  CHECK(sl.front().to_node == 1);
  CHECK(sl.back() == MigrationAction::noop());
  CHECK(stub_shortlist(snap, cand, c, StubConfig{3, 1.0}) == sl);

  auto idle = blank_snapshot(c, p);
  auto none = stub_shortlist(idle, cand, c, StubConfig{3, 1.0});
  CHECK(none == std::vector<MigrationAction>{MigrationAction::noop()});
}

}

TEST_SUITE("baselines") {

TEST_CASE("lyapunov keeps NoOp on a balanced cluster and relieves overload") {
  auto c = tiny_cluster();
  auto p = tiny_placement();
  auto snap = blank_snapshot(c, p);
  auto cand = generate_candidates(snap, p, c, kNoLargeMovable);
  LyapunovPolicy pol({1.0});
  EpochContext ctx{snap, cand, c, p};
  CHECK(pol.decide(ctx).action == MigrationAction::noop());

  snap.nodes[0].gpu_load = 1.6;
  snap.instances[3].demand_gpu = 4e13;
  auto d = pol.decide(ctx);
  CHECK(d.action.is_move());
  CHECK(lyapunov_objective(d.action, snap, c, {1.0}) < 0.0);
}

TEST_CASE("best-response dynamics converge") {
  auto c = tiny_cluster();
  auto p = tiny_placement();
  auto snap = blank_snapshot(c, p);
  snap.nodes[0].gpu_load = 1.6;
  snap.instances[3].demand_gpu = 4e13;
  auto r = best_response(snap, p, c, kNoLargeMovable, {100, 1.0});
  CHECK(r.converged);
  CHECK(!r.moves.empty());
  auto capped = best_response(snap, p, c, kNoLargeMovable, {1, 1.0});
  CHECK(capped.moves.size() == 1);
  CHECK_FALSE(capped.converged);
}

TEST_CASE("round-robin router cycles per group") {
  RoundRobinRouter rr;
  std::vector<InstanceId> g{4, 5, 6};
  CHECK(rr.next(0, g) == 4);
  CHECK(rr.next(0, g) == 5);
  CHECK(rr.next(1, {9}) == 9);
  CHECK(rr.next(0, g) == 6);
  CHECK(rr.next(0, g) == 4);
}

TEST_CASE("static policy never moves") {
  auto c = tiny_cluster();
  auto p = tiny_placement();
  auto snap = blank_snapshot(c, p);
  auto cand = generate_candidates(snap, p, c, kAllMovable);
  StaticPolicy pol;
  CHECK(pol.decide({snap, cand, c, p}).action == MigrationAction::noop());
}

}
