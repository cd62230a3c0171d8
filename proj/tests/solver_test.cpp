// SPDX-License-Identifier: Apache-2.0
#include "migsim/solvers.hpp"

#include <catch_amalgamated.hpp>
#include <random>

#include "test_util.hpp"

using namespace migsim;

namespace {

ArrivalForecast oracle_forecast(const Scenario& sc, int window = 0) {
  ArrivalForecast fc;
  for (size_t m = 0; m < sc.models.size(); ++m) fc.counts.push_back(sc.window_arrivals(static_cast<int>(m), window));
  return fc;
}

std::string plan_string(const AllocationSequence& seq) {
  std::string out;
  for (const auto& a : seq.allocations) {
    out += std::to_string(a.second) + "|" + a.configuration_id;
    for (const auto& [task, slots] : a.assignments) {
      out += "|" + task.str() + ":";
      for (const auto& s : slots) out += s + ",";
    }
    out += "\n";
  }
  return out;
}

}  // namespace

TEST_CASE("both solvers find the 12.5 optimum on the worked example") {
  Scenario sc = testutil::worked_example_scenario();
  PlanContext ctx{&sc, 0, std::nullopt};
  ArrivalForecast fc = oracle_forecast(sc);

  AllocationSequence dp = solve_dp(ctx, fc);
  AllocationSequence bf = solve_bruteforce(ctx, fc);
  CHECK(check_feasible(ctx, dp).empty());
  CHECK(check_feasible(ctx, bf).empty());
  double vdp = evaluate_plan(ctx, dp, fc.counts).total;
  double vbf = evaluate_plan(ctx, bf, fc.counts).total;
  CHECK(vdp == Catch::Approx(12.5).margin(1e-12));
  CHECK(vbf == Catch::Approx(12.5).margin(1e-12));
}

TEST_CASE("forced scenario: the single legal assignment per step is returned") {
  // L=4 pins inference to the 4-GPC instance; only the 3-GPC slot can retrain
  // and needs the whole window.
  Catalog cat = load_catalog_text("config 4_3 4@0 3@4\n");
  ModelEntry m;
  m.profile = {"m0", 1.0, 4, {{4, 40}}, 0.01, 0.0};
  m.retraining.rt_table = {{3, 4}};
  m.retraining.accuracy_pre = {0.5};
  m.retraining.accuracy_post = {1.0};
  Scenario sc = finalize_scenario(std::move(cat), {m}, make_uniform_trace({10}, 4, 1), 4, 1, 1.0);
  PlanContext ctx{&sc, 0, std::nullopt};
  ArrivalForecast fc = oracle_forecast(sc);

  AllocationSequence dp = solve_dp(ctx, fc);
  AllocationSequence bf = solve_bruteforce(ctx, fc);
  REQUIRE(dp.allocations.size() == 4);
  for (int s = 0; s < 4; ++s) {
    CHECK(dp.allocations[s].assignments.at(inference_task("m0")) == std::set<std::string>{"4@0"});
    CHECK(dp.allocations[s].assignments.at(retraining_task("m0")) == std::set<std::string>{"3@4"});
  }
  CHECK(plan_string(dp) == plan_string(bf));
}

TEST_CASE("zero arrivals score zero under both solvers") {
  Scenario sc = testutil::worked_example_scenario();
  for (auto& per_model : sc.trace.counts) std::fill(per_model.begin(), per_model.end(), 0);
  PlanContext ctx{&sc, 0, std::nullopt};
  ArrivalForecast fc = oracle_forecast(sc);
  CHECK(evaluate_plan(ctx, solve_dp(ctx, fc), fc.counts).total == 0.0);
  CHECK(evaluate_plan(ctx, solve_bruteforce(ctx, fc), fc.counts).total == 0.0);
}

TEST_CASE("single-configuration single-slot catalog cannot co-locate retraining") {
  Catalog cat = load_catalog_text("config 7 7@0\n");
  ModelEntry m;
  m.profile = {"m0", 1.0, 1, {{7, 70}}, 0.01, 0.0};
  m.retraining.rt_table = {{7, 1}};
  m.retraining.accuracy_pre = {0.5};
  m.retraining.accuracy_post = {1.0};
  Scenario sc = finalize_scenario(std::move(cat), {m}, make_uniform_trace({10}, 3, 1), 3, 1, 1.0);
  PlanContext ctx{&sc, 0, std::nullopt};
  auto violations = precheck_scenario(ctx);
  REQUIRE_FALSE(violations.empty());
  CHECK(violations[0].code == "no-coexistence-configuration");
  CHECK_THROWS_AS(solve_dp(ctx, oracle_forecast(sc)), Error);
}

TEST_CASE("deployment floor above the largest instance is reported") {
  Catalog cat = load_catalog_text("config 4_3 4@0 3@4\n");
  ModelEntry m;
  m.profile = {"m0", 1.0, 5, {{5, 50}, {6, 60}, {7, 70}}, 0.01, 0.0};
  m.retraining.rt_table = {{3, 1}};
  m.retraining.accuracy_pre = {0.5};
  m.retraining.accuracy_post = {1.0};
  Scenario sc = finalize_scenario(std::move(cat), {m}, make_uniform_trace({10}, 3, 1), 3, 1, 1.0);
  PlanContext ctx{&sc, 0, std::nullopt};
  auto violations = precheck_scenario(ctx);
  REQUIRE_FALSE(violations.empty());
  CHECK(violations[0].code == "deployment-floor");
}

TEST_CASE("oracle equivalence on randomized scenarios") {
  std::mt19937 rng(20250101u);
  int strictly_positive = 0;
  for (int iter = 0; iter < 25; ++iter) {
    Scenario sc = testutil::random_oracle_scenario(rng);
    PlanContext ctx{&sc, 0, std::nullopt};
    ArrivalForecast fc = oracle_forecast(sc);
    AllocationSequence dp = solve_dp(ctx, fc);
    AllocationSequence bf = solve_bruteforce(ctx, fc);
    INFO("iteration " << iter);
    CHECK(check_feasible(ctx, dp).empty());
    CHECK(check_feasible(ctx, bf).empty());
    double vdp = evaluate_plan(ctx, dp, fc.counts).total;
    double vbf = evaluate_plan(ctx, bf, fc.counts).total;
    CHECK(vdp == Catch::Approx(vbf).margin(1e-9));
    if (vdp > 0) ++strictly_positive;
  }
  CHECK(strictly_positive > 10);
}

TEST_CASE("oracle equivalence with carried-over initial slots") {
  std::mt19937 rng(424242u);
  for (int iter = 0; iter < 10; ++iter) {
    Scenario sc = testutil::random_oracle_scenario(rng);
    PlanContext ctx{&sc, 0, std::nullopt};
    ArrivalForecast fc = oracle_forecast(sc);
    // plan once cold, then replan with the final allocation as the initial state
    AllocationSequence first = solve_dp(ctx, fc);
    PlanContext chained = ctx;
    chained.initial = final_ranges(sc, first);
    AllocationSequence dp = solve_dp(chained, fc);
    AllocationSequence bf = solve_bruteforce(chained, fc);
    double vdp = evaluate_plan(chained, dp, fc.counts).total;
    double vbf = evaluate_plan(chained, bf, fc.counts).total;
    INFO("iteration " << iter);
    CHECK(vdp == Catch::Approx(vbf).margin(1e-9));
  }
}

TEST_CASE("DP is deterministic and worker-count independent") {
  std::mt19937 rng(777u);
  Scenario sc = testutil::random_oracle_scenario(rng);
  PlanContext ctx{&sc, 0, std::nullopt};
  ArrivalForecast fc = oracle_forecast(sc);
  SolveOptions one, four;
  one.workers = 1;
  four.workers = 4;
  std::string a = plan_string(solve_dp(ctx, fc, one));
  std::string b = plan_string(solve_dp(ctx, fc, one));
  std::string c = plan_string(solve_dp(ctx, fc, four));
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("raising accuracy_post never lowers the DP optimum") {
  std::mt19937 rng(1312u);
  for (int iter = 0; iter < 8; ++iter) {
    Scenario sc = testutil::random_oracle_scenario(rng, /*allow_accuracy_drop=*/false);
    PlanContext ctx{&sc, 0, std::nullopt};
    ArrivalForecast fc = oracle_forecast(sc);
    double base = evaluate_plan(ctx, solve_dp(ctx, fc), fc.counts).total;
    Scenario bumped = sc;
    for (auto& e : bumped.models)
      e.retraining.accuracy_post[0] = std::min(1.0, e.retraining.accuracy_post[0] + 0.07);
    PlanContext ctx2{&bumped, 0, std::nullopt};
    double better = evaluate_plan(ctx2, solve_dp(ctx2, fc), fc.counts).total;
    CHECK(better >= base - 1e-9);
  }
}

TEST_CASE("brute force refuses oversized search spaces") {
  Scenario sc = testutil::small_two_model_scenario(6, 1);
  PlanContext ctx{&sc, 0, std::nullopt};
  ArrivalForecast fc = oracle_forecast(sc);
  SolveOptions opt;
  opt.bruteforce_cap = 10.0;
  try {
    solve_bruteforce(ctx, fc, opt);
    FAIL("expected cap error");
  } catch (const Error& e) {
    CHECK(e.code() == "planner.bruteforce-cap");
  }
}

TEST_CASE("DP state budget errors report the frontier size") {
  Scenario sc = testutil::small_two_model_scenario(6, 1);
  PlanContext ctx{&sc, 0, std::nullopt};
  ArrivalForecast fc = oracle_forecast(sc);
  SolveOptions opt;
  opt.state_budget = 1;
  try {
    solve_dp(ctx, fc, opt);
    FAIL("expected budget error");
  } catch (const Error& e) {
    CHECK(e.code() == "planner.state-budget");
    CHECK(std::string(e.what()).find("states") != std::string::npos);
  }
}
