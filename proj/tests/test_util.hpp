// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "migsim/solvers.hpp"

namespace testutil {

inline std::string data_path(const std::string& name) {
  return std::string(MIGSIM_DATA_DIR) + "/" + name;
}

// Fresh scratch directory per call, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = std::filesystem::temp_directory_path() /
           ("migsim_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name, const std::string& contents) const {
    auto p = path / name;
    std::ofstream f(p);
    f << contents;
    return p.string();
  }
  std::string str() const { return path.string(); }
};

// A compact two-model scenario used across the suites. Capabilities are
// linear-ish in size, retraining tables explicit.
inline migsim::Scenario small_two_model_scenario(int window_size = 6, int window_count = 1) {
  using namespace migsim;
  Catalog cat = load_catalog_text(
      "config 4_3 4@0 3@4\n"
      "config 4_2_1 4@0 2@4 1@6\n"
      "config 2_2_2_1 2@0 2@2 2@4 1@6\n");
  ModelEntry a;
  a.profile = {"alpha", 10.0, 1, {{1, 10}, {2, 20}, {3, 30}, {4, 40}, {7, 70}}, 0.02, 0.5};
  a.retraining.data_volume = 10;
  a.retraining.rt_table = {{1, 3}, {2, 2}, {3, 2}, {4, 1}, {7, 1}};
  a.retraining.accuracy_pre = {0.5};
  a.retraining.accuracy_post = {0.9};
  ModelEntry b;
  b.profile = {"beta", 5.0, 1, {{1, 8}, {2, 16}, {3, 24}, {4, 32}, {7, 56}}, 0.05, 0.5};
  b.retraining.data_volume = 8;
  b.retraining.rt_table = {{1, 3}, {2, 2}, {3, 1}, {4, 1}, {7, 1}};
  b.retraining.accuracy_pre = {0.6};
  b.retraining.accuracy_post = {0.8};
  InferenceTrace trace = make_uniform_trace({12, 9}, window_size, window_count);
  for (int w = 1; w < window_count; ++w) {
    a.retraining.accuracy_pre.push_back(a.retraining.accuracy_post.back());
    a.retraining.accuracy_post.push_back(a.retraining.accuracy_post.back());
    b.retraining.accuracy_pre.push_back(b.retraining.accuracy_post.back());
    b.retraining.accuracy_post.push_back(b.retraining.accuracy_post.back());
  }
  return finalize_scenario(std::move(cat), {a, b}, std::move(trace), window_size, window_count, 1.0);
}

// The S=3 single-model scenario with catalog {[4,3]}: arrivals [5,5,5],
// capability {4:8, 3:6}, RT {4:1, 3:2}, psi 0, accuracy 0.5 -> 1.0. Its
// optimum is exactly 12.5.
inline migsim::Scenario worked_example_scenario() {
  using namespace migsim;
  Catalog cat = load_catalog_text("config 4_3 4@0 3@4\n");
  ModelEntry m;
  m.profile = {"m0", 1.0, 1, {{3, 6}, {4, 8}}, 0.01, 0.0};
  m.retraining.data_volume = 1;
  m.retraining.rt_table = {{3, 2}, {4, 1}};
  m.retraining.accuracy_pre = {0.5};
  m.retraining.accuracy_post = {1.0};
  InferenceTrace trace = make_uniform_trace({5}, 3, 1);
  return finalize_scenario(std::move(cat), {m}, std::move(trace), 3, 1, 1.0);
}

// The plan from the worked example: retrain on the 4-GPC instance in step 0
// while inference runs on the 3-GPC instance, then inference takes the
// 4-GPC instance.
inline migsim::AllocationSequence worked_example_plan() {
  using namespace migsim;
  AllocationSequence seq;
  seq.window_index = 0;
  Allocation s0{0, "4_3", {{inference_task("m0"), {"3@4"}}, {retraining_task("m0"), {"4@0"}}}};
  Allocation s1{1, "4_3", {{inference_task("m0"), {"4@0"}}}};
  Allocation s2{2, "4_3", {{inference_task("m0"), {"4@0"}}}};
  seq.allocations = {s0, s1, s2};
  return seq;
}

// Random small scenarios sized for the brute-force oracle: S in 3..6, 1-2
// models, at most 3 configurations. `allow_accuracy_drop` lets accuracy_post
// fall below accuracy_pre to exercise the solvers without status dominance.
inline migsim::Scenario random_oracle_scenario(std::mt19937& rng, bool allow_accuracy_drop = true) {
  using namespace migsim;
  static const std::vector<std::string> pool = {
      "config a 4@0 3@4\n",
      "config b 7@0\n",
      "config c 4@0 2@4 1@6\n",
      "config d 3@0 3@4\n",
      "config e 2@0 2@2 3@4\n",
      "config f 2@0 1@2 1@3 3@4\n",
  };
  auto pick_real = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() % 10000) / 10000.0);
  };
  for (int attempt = 0; attempt < 100; ++attempt) {
    bool two_models = rng() % 2 == 0;
    int S = two_models ? 3 + static_cast<int>(rng() % 2) : 3 + static_cast<int>(rng() % 4);
    int nconfigs = 1 + static_cast<int>(rng() % (two_models ? 2 : 3));
    std::set<int> chosen;
    while (static_cast<int>(chosen.size()) < nconfigs) chosen.insert(rng() % pool.size());
    std::string text;
    for (int i : chosen) text += pool[i];
    Catalog cat = load_catalog_text(text);

    std::vector<ModelEntry> models;
    int M = two_models ? 2 : 1;
    for (int m = 0; m < M; ++m) {
      ModelEntry e;
      e.profile.name = m == 0 ? "m0" : "m1";
      e.profile.gflops = pick_real(1.0, 20.0);
      e.profile.min_deploy_gpcs = 1 + static_cast<int>(rng() % 2);
      e.profile.latency_full = 0.01;
      e.profile.reconfig_overhead = std::vector<double>{0.0, 0.3, 0.7, 1.0}[rng() % 4];
      double cap = 4.0 + rng() % 8;
      for (int k = 1; k <= 7; ++k) {
        e.profile.capability[k] = cap;
        cap += rng() % 10;
      }
      long long rt1 = 1 + static_cast<long long>(rng() % (S + 2));
      long long drop = rng() % 2;
      for (int k = 1; k <= 7; ++k)
        e.retraining.rt_table[k] = std::max<long long>(1, rt1 - drop * (k - 1));
      double pre = pick_real(0.2, 0.9);
      double post = allow_accuracy_drop && rng() % 4 == 0 ? pick_real(0.1, pre) : pick_real(pre, 1.0);
      e.retraining.accuracy_pre = {pre};
      e.retraining.accuracy_post = {post};
      models.push_back(std::move(e));
    }
    InferenceTrace trace;
    for (int m = 0; m < M; ++m) {
      std::vector<long long> counts;
      bool zero = rng() % 12 == 0;
      for (int s = 0; s < S; ++s) counts.push_back(zero ? 0 : rng() % 30);
      trace.counts.push_back(std::move(counts));
    }
    Scenario sc;
    try {
      sc = finalize_scenario(std::move(cat), std::move(models), std::move(trace), S, 1, 1.0);
    } catch (const Error&) {
      continue;
    }
    PlanContext ctx{&sc, 0, std::nullopt};
    if (!migsim::precheck_scenario(ctx).empty()) continue;
    auto space = migsim::engine::Space::build(ctx);
    double estimate = std::pow(static_cast<double>(space.options.size()), S);
    if (estimate > 2e6) continue;
    // the precheck is necessary-only; staggered retrainings may still be
    // jointly unschedulable, so verify solvability
    try {
      ArrivalForecast fc;
      for (int m = 0; m < M; ++m) fc.counts.push_back(sc.window_arrivals(m, 0));
      (void)solve_dp(ctx, fc);
    } catch (const Error&) {
      continue;
    }
    return sc;
  }
  throw std::runtime_error("random_oracle_scenario: no scenario found");
}

// Random feasible plan via a status-respecting random walk over the
// allocation space. `prefer_sparse` biases toward allocations leaving slices
// unused, which gives pre-initialization room to act.
inline migsim::AllocationSequence random_feasible_plan(const migsim::Scenario& sc, std::mt19937& rng,
                                                       bool prefer_sparse = false) {
  using namespace migsim;
  using namespace migsim::engine;
  PlanContext ctx{&sc, 0, std::nullopt};
  Space sp = Space::build(ctx);
  const Tables& t = sp.tables;
  StatusCodec codec{t.steps, t.models};
  for (int attempt = 0; attempt < 500; ++attempt) {
    std::array<int, kMaxModels> st{};
    AllocationSequence seq;
    seq.window_index = 0;
    bool dead = false;
    for (int s = 0; s < t.steps && !dead; ++s) {
      std::vector<std::pair<int, std::array<int, kMaxModels>>> compatible, sparse;
      for (size_t oi = 0; oi < sp.options.size(); ++oi) {
        const Option& o = sp.options[oi];
        std::array<int, kMaxModels> ns{};
        bool ok = true;
        for (int m = 0; m < t.models && ok; ++m) {
          ns[m] = codec.advance(t, m, st[m], o.retrain_size[m], s);
          ok = ns[m] >= 0 && !(ns[m] == codec.ns() && (t.min_rt[m] < 0 || s + 1 + t.min_rt[m] > t.steps));
        }
        if (!ok) continue;
        compatible.emplace_back(static_cast<int>(oi), ns);
        if (std::popcount(o.occupied_slices) <= 5) sparse.emplace_back(static_cast<int>(oi), ns);
      }
      if (prefer_sparse && !sparse.empty() && rng() % 4 != 0) compatible.swap(sparse);
      if (compatible.empty()) {
        dead = true;
        break;
      }
      auto& [oi, ns] = compatible[rng() % compatible.size()];
      st = ns;
      seq.allocations.push_back(sp.to_allocation(sp.options[oi], s));
    }
    if (dead) continue;
    bool all_done = true;
    for (int m = 0; m < t.models; ++m) all_done = all_done && st[m] == codec.done();
    if (!all_done) continue;
    return seq;
  }
  throw std::runtime_error("random_feasible_plan: no plan found");
}

}  // namespace testutil
