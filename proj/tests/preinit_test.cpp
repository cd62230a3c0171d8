// SPDX-License-Identifier: Apache-2.0
#include "migsim/preinit.hpp"

#include <catch_amalgamated.hpp>
#include <random>

#include "test_util.hpp"

using namespace migsim;

namespace {

// The two-task growth example: step 0 leaves two 2-GPC instances unused, and
// step 1 combines their slices into a 4-GPC instance.
Scenario growth_scenario(double psi) {
  Catalog cat = load_catalog_text(
      "config 2_2_2_1 2@0 2@2 2@4 1@6\n"
      "config 4_2_1 4@0 2@4 1@6\n");
  std::vector<ModelEntry> models;
  for (int m = 0; m < 2; ++m) {
    ModelEntry e;
    e.profile.name = m == 0 ? "task1" : "task2";
    e.profile.gflops = 5.0;
    e.profile.min_deploy_gpcs = 1;
    e.profile.latency_full = 0.01;
    e.profile.reconfig_overhead = psi;
    for (int k = 1; k <= 7; ++k) e.profile.capability[k] = 10.0 * k;
    e.retraining.rt_table = {{1, 1}, {2, 1}, {4, 1}};
    e.retraining.accuracy_pre = {1.0};
    e.retraining.accuracy_post = {1.0};
    models.push_back(std::move(e));
  }
  return finalize_scenario(std::move(cat), std::move(models), make_uniform_trace({50, 50}, 3, 1), 3, 1, 1.0);
}

AllocationSequence growth_plan() {
  AllocationSequence seq;
  // step 0: task1 on 2@4, task2 on 1@6; retraining parked to satisfy
  // completion (both finish in one step on the unused-at-step-2 slots)
  Allocation a0{0, "2_2_2_1", {{inference_task("task1"), {"2@4"}}, {inference_task("task2"), {"1@6"}}}};
  Allocation a1{1, "4_2_1", {{inference_task("task1"), {"4@0"}}, {inference_task("task2"), {"2@4", "1@6"}}}};
  Allocation a2{2, "4_2_1",
                {{inference_task("task1"), {"4@0"}},
                 {inference_task("task2"), {"1@6"}},
                 {retraining_task("task1"), {"2@4"}}}};
  seq.allocations = {a0, a1, a2};
  return seq;
}

}  // namespace

TEST_CASE("the growth example yields exactly one action: the 4-GPC instance") {
  // step 0 leaves the two low 2-GPC instances unused; step 1 combines their
  // slices into task1's 4-GPC instance while task2 grows to {2-GPC, 1-GPC}
  Scenario sc = growth_scenario(0.8);
  AllocationSequence seq = growth_plan();
  auto actions = plan_preinit(sc.catalog, seq);
  REQUIRE(actions.size() == 1);
  CHECK(actions[0].fire_second == 0);
  CHECK(actions[0].target.size == 4);
  CHECK(actions[0].target.slice_start == 0);
  REQUIRE(actions[0].covers_tasks.size() == 1);
  CHECK(actions[0].covers_tasks[0] == inference_task("task1"));
}

TEST_CASE("identical consecutive allocations produce no actions") {
  Scenario sc = growth_scenario(0.8);
  AllocationSequence seq;
  for (int s = 0; s < 3; ++s)
    seq.allocations.push_back(
        Allocation{s, "2_2_2_1", {{inference_task("task1"), {"2@0"}}, {inference_task("task2"), {"1@6"}}}});
  CHECK(plan_preinit(sc.catalog, seq).empty());
}

TEST_CASE("a new slot overlapping occupied slices is not pre-created") {
  Scenario sc = growth_scenario(0.8);
  AllocationSequence seq;
  seq.allocations = {
      Allocation{0, "2_2_2_1", {{inference_task("task1"), {"2@0"}}, {inference_task("task2"), {"1@6"}}}},
      Allocation{1, "4_2_1", {{inference_task("task1"), {"4@0"}}, {inference_task("task2"), {"1@6"}}}},
  };
  // 4@0 needs slices 0-3 but 2@0 occupies 0-1 at step 0
  CHECK(plan_preinit(sc.catalog, seq).empty());
}

TEST_CASE("apply_preinit zeroes covered transitions and raises the score") {
  Scenario sc = growth_scenario(0.8);
  PlanContext ctx{&sc, 0, std::nullopt};
  AllocationSequence seq = growth_plan();

  auto actions = plan_preinit(sc.catalog, seq);
  bool has_4gpc = false;
  for (const auto& a : actions) has_4gpc = has_4gpc || (a.target.size == 4 && a.fire_second == 0);
  REQUIRE(has_4gpc);

  EffectivePlan eff = apply_preinit(ctx, seq, actions);
  REQUIRE(eff.overrides.count({0, 1}) == 1);  // task1 at step 1
  CHECK(eff.overrides.at({0, 1}) == 0.0);
  // task2 acquired 2@4 at step 1, which persisted from step 0 (not created),
  // so its overhead stays
  CHECK(eff.overrides.count({1, 1}) == 0);

  double before = evaluate_plan(ctx, seq, sc.trace.counts, nullptr, false).total;
  double after = evaluate_plan(ctx, seq, sc.trace.counts, &eff.overrides, false).total;
  CHECK(after > before);  // arrivals at the transition are nonzero
}

TEST_CASE("no actions leave the scores identical") {
  Scenario sc = growth_scenario(0.8);
  PlanContext ctx{&sc, 0, std::nullopt};
  AllocationSequence seq = growth_plan();
  EffectivePlan eff = apply_preinit(ctx, seq, {});
  CHECK(eff.overrides.empty());
  double a = evaluate_plan(ctx, seq, sc.trace.counts, nullptr, false).total;
  double b = evaluate_plan(ctx, seq, sc.trace.counts, &eff.overrides, false).total;
  CHECK(a == b);
}

TEST_CASE("all-or-nothing: a task with one uncovered acquisition keeps psi") {
  Scenario sc = growth_scenario(0.8);
  PlanContext ctx{&sc, 0, std::nullopt};
  AllocationSequence seq;
  // task1 acquires both 4@0 (fresh, free slices) and 2@4 (persisting from
  // task2) at step 1; only 4@0 can be pre-created
  seq.allocations = {
      Allocation{0, "2_2_2_1", {{inference_task("task1"), {"1@6"}}, {inference_task("task2"), {"2@4"}}}},
      Allocation{1, "4_2_1",
                 {{inference_task("task1"), {"4@0", "2@4"}}, {inference_task("task2"), {"1@6"}}}},
  };
  auto actions = plan_preinit(sc.catalog, seq);
  REQUIRE(actions.size() == 1);
  CHECK(actions[0].target.size == 4);
  EffectivePlan eff = apply_preinit(ctx, seq, actions);
  CHECK(eff.overrides.count({0, 1}) == 0);  // task1 not fully covered
}

TEST_CASE("inconsistent actions are rejected") {
  Scenario sc = growth_scenario(0.8);
  PlanContext ctx{&sc, 0, std::nullopt};
  AllocationSequence seq = growth_plan();
  PreinitAction bogus;
  bogus.fire_second = 0;
  bogus.target = {"3@0", 3, 0};  // never assigned at step 1
  CHECK_THROWS_AS(apply_preinit(ctx, seq, {bogus}), Error);
}

TEST_CASE("preinit never hurts and stays consistent on random plans") {
  std::mt19937 rng(90210u);
  int with_actions = 0;
  for (int iter = 0; iter < 40; ++iter) {
    Scenario sc = testutil::random_oracle_scenario(rng);
    PlanContext ctx{&sc, 0, std::nullopt};
    AllocationSequence seq = testutil::random_feasible_plan(sc, rng, /*prefer_sparse=*/true);
    auto actions = plan_preinit(sc.catalog, seq);
    // idempotence
    auto again = plan_preinit(sc.catalog, seq);
    REQUIRE(actions.size() == again.size());
    for (size_t i = 0; i < actions.size(); ++i) {
      CHECK(actions[i].fire_second == again[i].fire_second);
      CHECK(actions[i].target.same_range(again[i].target));
      // never referencing occupied slices
      uint32_t occ = detail_preinit::occupied_slices(sc.catalog, seq.allocations[actions[i].fire_second]);
      CHECK((detail_preinit::range_mask({actions[i].target.slice_start, actions[i].target.size}) & occ) == 0);
    }
    if (!actions.empty()) ++with_actions;
    EffectivePlan eff = apply_preinit(ctx, seq, actions);
    double before = evaluate_plan(ctx, seq, sc.trace.counts, nullptr, false).total;
    double after = evaluate_plan(ctx, seq, sc.trace.counts, &eff.overrides, false).total;
    CHECK(after >= before - 1e-12);
  }
  CHECK(with_actions > 5);
}
