// SPDX-License-Identifier: Apache-2.0
//
// Comparison planners: a static compute-proportional split (PARIS-style) and
// a restricted optimum that may reconfigure only at the window start and at
// retraining completions (Ekya-style).
#pragma once

#include <cmath>
#include <limits>

#include "migsim/evaluate.hpp"
#include "migsim/predictor.hpp"
#include "migsim/solvers.hpp"

namespace migsim {

// ---------------------------------------------------------------------------
// Static proportional split. The device is divided by the models' gflops
// ratio and snapped to the nearest realizable share vector (Euclidean
// distance on per-model GPC sums). Within each share the inference task
// permanently keeps every slot except one, on which retraining runs once from
// step 0; that slot idles after completion, so the allocation is constant
// except at the retraining stop.
//
// Tie-breaks, in order: share vector with more GPCs for earlier models, fewer
// instances in the configuration, catalog order, lexicographic labeling.
inline AllocationSequence plan_static_proportional(const PlanContext& ctx) {
  using namespace engine;
  Tables t = Tables::build(ctx);
  const Catalog& cat = ctx.scenario->catalog;
  const int M = t.models;
  const int S = t.steps;

  double total_gflops = 0.0;
  for (int m = 0; m < M; ++m) total_gflops += ctx.scenario->models[m].profile.gflops;
  std::vector<double> ideal(M);
  for (int m = 0; m < M; ++m)
    ideal[m] = cat.gpc_count * ctx.scenario->models[m].profile.gflops / total_gflops;

  struct Candidate {
    double dist2 = std::numeric_limits<double>::infinity();
    std::vector<int> shares;
    int instances = 0;
    int config = -1;
    std::vector<int> labels;        // slot -> model
    std::vector<int> anchor;        // per model: config slot index
    std::vector<int> retrain_slot;  // per model: config slot index
  };
  Candidate best;

  for (size_t ci = 0; ci < cat.configurations.size(); ++ci) {
    const auto& cfg = cat.configurations[ci];
    int n = static_cast<int>(cfg.slots.size());
    std::vector<int> labels(n, 0);
    while (true) {
      // evaluate this labeling
      Candidate cand;
      cand.config = static_cast<int>(ci);
      cand.labels = labels;
      cand.instances = n;
      cand.shares.assign(M, 0);
      cand.anchor.assign(M, -1);
      cand.retrain_slot.assign(M, -1);
      bool feasible = true;
      for (int m = 0; m < M && feasible; ++m) {
        int anchor = -1;
        for (int i = 0; i < n; ++i) {
          if (labels[i] != m) continue;
          cand.shares[m] += cfg.slots[i].size;
          if (anchor < 0 || cfg.slots[i].size > cfg.slots[anchor].size) anchor = i;
        }
        if (anchor < 0 || cfg.slots[anchor].size < t.floor_gpcs[m]) {
          feasible = false;
          break;
        }
        cand.anchor[m] = anchor;
        long long best_rt = -1;
        for (int i = 0; i < n; ++i) {
          if (labels[i] != m || i == anchor) continue;
          long long rt = t.rt_by_size[m][cfg.slots[i].size];
          if (rt >= 1 && rt <= S && (best_rt < 0 || rt < best_rt)) {
            best_rt = rt;
            cand.retrain_slot[m] = i;
          }
        }
        if (cand.retrain_slot[m] < 0) feasible = false;
      }
      if (feasible) {
        cand.dist2 = 0.0;
        for (int m = 0; m < M; ++m) cand.dist2 += (cand.shares[m] - ideal[m]) * (cand.shares[m] - ideal[m]);
        bool better = false;
        if (best.config < 0) better = true;
        else if (cand.dist2 != best.dist2) better = cand.dist2 < best.dist2;
        else if (cand.shares != best.shares) better = cand.shares > best.shares;  // earlier models get more
        else if (cand.instances != best.instances) better = cand.instances < best.instances;
        else if (cand.config != best.config) better = cand.config < best.config;
        else better = cand.labels < best.labels;
        if (better) best = std::move(cand);
      }
      // next labeling
      int i = n - 1;
      while (i >= 0 && labels[i] == M - 1) labels[i--] = 0;
      if (i < 0) break;
      ++labels[i];
    }
  }
  if (best.config < 0)
    fail("infeasible.deployment-floor", "static split: no configuration satisfies all deployment floors");

  const auto& cfg = cat.configurations[best.config];
  AllocationSequence seq;
  seq.window_index = ctx.window;
  for (int s = 0; s < S; ++s) {
    Allocation a;
    a.second = s;
    a.configuration_id = cfg.id;
    for (int m = 0; m < M; ++m) {
      const std::string& name = ctx.scenario->models[m].profile.name;
      long long rt = t.rt_by_size[m][cfg.slots[best.retrain_slot[m]].size];
      for (int i = 0; i < static_cast<int>(cfg.slots.size()); ++i) {
        if (best.labels[i] != m) continue;
        if (i == best.retrain_slot[m]) {
          if (s < rt) a.assignments[retraining_task(name)].insert(cfg.slots[i].id);
        } else {
          a.assignments[inference_task(name)].insert(cfg.slots[i].id);
        }
      }
    }
    seq.allocations.push_back(std::move(a));
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Window-boundary planner: every retraining starts at step 0 on a chosen GPC
// count; the allocation may change only at step 0 and at each retraining
// completion. Exhaustive over (per-model GPC counts, per-phase allocations).

inline AllocationSequence plan_window_boundary(const PlanContext& ctx, const ArrivalForecast& forecast) {
  using namespace engine;
  throw_if_infeasible(precheck_scenario(ctx));
  Space sp = Space::build(ctx);
  const Tables& t = sp.tables;
  const int S = t.steps;
  const int M = t.models;
  for (int m = 0; m < M; ++m)
    if (static_cast<int>(forecast.counts.at(m).size()) != S)
      fail("input.forecast", "forecast horizon != window size");

  bool has_initial = false;
  auto init_mask = initial_masks(t, ctx, &has_initial);

  double best_value = -std::numeric_limits<double>::infinity();
  std::vector<int> best_encoding;
  std::vector<std::pair<int, int>> best_phase_opts;  // (first step, option)
  std::vector<int> best_bounds;

  // enumerate per-model GPC counts
  std::vector<std::vector<int>> k_choices(M);
  for (int m = 0; m < M; ++m)
    for (int k = 1; k <= 7; ++k)
      if (t.rt_by_size[m][k] >= 1 && t.rt_by_size[m][k] <= S) k_choices[m].push_back(k);

  std::vector<int> ks(M, 0);
  auto for_each_kvec = [&](auto&& body) {
    std::vector<size_t> idx(M, 0);
    while (true) {
      for (int m = 0; m < M; ++m) ks[m] = k_choices[m][idx[m]];
      body();
      int m = M - 1;
      while (m >= 0 && ++idx[m] == k_choices[m].size()) idx[m--] = 0;
      if (m < 0) break;
    }
  };

  for_each_kvec([&]() {
    std::vector<long long> done_at(M);
    std::vector<int> bounds{0};
    for (int m = 0; m < M; ++m) {
      done_at[m] = t.rt_by_size[m][ks[m]];
      if (done_at[m] < S) bounds.push_back(static_cast<int>(done_at[m]));
    }
    bounds.push_back(S);
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
    int phases = static_cast<int>(bounds.size()) - 1;

    // options per phase
    std::vector<const std::vector<int>*> phase_opts(phases, nullptr);
    for (int p = 0; p < phases; ++p) {
      int sig = 0;
      for (int m = M - 1; m >= 0; --m) sig = sig * 8 + (done_at[m] > bounds[p] ? ks[m] : 0);
      auto it = sp.by_signature.find(sig);
      if (it == sp.by_signature.end() || it->second.empty()) return;  // this k-vector is unrealizable
      phase_opts[p] = &it->second;
    }

    // tail score of an option within a phase (steps after the first)
    auto tail_score = [&](int p, const Option& o) {
      double v = 0.0;
      for (int s = bounds[p] + 1; s < bounds[p + 1]; ++s)
        for (int m = 0; m < M; ++m) {
          double acc = s >= done_at[m] ? t.acc_post[m] : t.acc_pre[m];
          v += step_throughput(static_cast<double>(forecast.counts[m][s]), o.infer_cap[m]) * acc;
        }
      return v;
    };
    auto first_step_score = [&](int p, const Option& o, const std::array<uint32_t, kMaxModels>& prev_mask,
                                bool charge) {
      double v = 0.0;
      int s = bounds[p];
      for (int m = 0; m < M; ++m) {
        double acc = s >= done_at[m] ? t.acc_post[m] : t.acc_pre[m];
        bool changed = charge && prev_mask[m] != o.infer_mask[m];
        double eff = effective_capability(o.infer_cap[m], changed ? t.loss_frac[m] : 0.0);
        v += step_throughput(static_cast<double>(forecast.counts[m][s]), eff) * acc;
      }
      return v;
    };

    struct Entry {
      double value;
      int parent;  // index into previous phase's entry list
    };
    std::vector<std::vector<Entry>> table(phases);
    for (int p = 0; p < phases; ++p) {
      const auto& opts = *phase_opts[p];
      table[p].assign(opts.size(), {-std::numeric_limits<double>::infinity(), -1});
      for (size_t i = 0; i < opts.size(); ++i) {
        const Option& o = sp.options[opts[i]];
        double tail = tail_score(p, o);
        if (p == 0) {
          table[0][i] = {first_step_score(0, o, init_mask, has_initial) + tail, -1};
        } else {
          const auto& prev_opts = *phase_opts[p - 1];
          for (size_t j = 0; j < prev_opts.size(); ++j) {
            double v = table[p - 1][j].value +
                       first_step_score(p, o, sp.options[prev_opts[j]].infer_mask, true) + tail;
            if (v > table[p][i].value) table[p][i] = {v, static_cast<int>(j)};
          }
        }
      }
    }

    // best last-phase entry; reconstruct the per-phase option choice
    const auto& last_opts = *phase_opts[phases - 1];
    int best_i = -1;
    for (size_t i = 0; i < last_opts.size(); ++i)
      if (best_i < 0 || table[phases - 1][i].value > table[phases - 1][best_i].value)
        best_i = static_cast<int>(i);
    if (best_i < 0) return;
    double value = table[phases - 1][best_i].value;

    std::vector<int> chosen(phases);
    for (int p = phases - 1, i = best_i; p >= 0; --p) {
      chosen[p] = (*phase_opts[p])[i];
      i = table[p][i].parent;
    }
    std::vector<int> encoding;
    for (int p = 0; p < phases; ++p) {
      const Option& o = sp.options[chosen[p]];
      for (int s = bounds[p]; s < bounds[p + 1]; ++s) {
        encoding.push_back(o.config);
        for (int8_t lab : o.labels) encoding.push_back(lab);
      }
    }
    bool better = value > best_value + 1e-12 ||
                  (std::abs(value - best_value) <= 1e-12 && encoding < best_encoding);
    if (best_encoding.empty() || better) {
      best_value = value;
      best_encoding = std::move(encoding);
      best_phase_opts.clear();
      for (int p = 0; p < phases; ++p) best_phase_opts.emplace_back(bounds[p], chosen[p]);
      best_bounds = bounds;
    }
  });

  if (best_phase_opts.empty())
    fail("infeasible.window-boundary", "no window-boundary plan can complete every retraining");

  AllocationSequence seq;
  seq.window_index = ctx.window;
  for (size_t p = 0; p < best_phase_opts.size(); ++p) {
    int from = best_bounds[p], to = best_bounds[p + 1];
    for (int s = from; s < to; ++s)
      seq.allocations.push_back(sp.to_allocation(sp.options[best_phase_opts[p].second], s));
  }
  return seq;
}

}  // namespace migsim
