// SPDX-License-Identifier: Apache-2.0
//
// Plan scoring (the objective the solvers maximize) and the feasibility
// checker covering the five constraint families.
#pragma once

#include <algorithm>
#include <climits>

#include "migsim/space.hpp"

namespace migsim {

namespace engine {

// Per-step resolved view of one allocation.
struct StepView {
  std::array<uint32_t, kMaxModels> infer_mask{};
  std::array<double, kMaxModels> infer_cap{};
  std::array<int, kMaxModels> retrain_size{};        // 0 = none
  std::array<int, kMaxModels> retrain_slot_count{};  // for validation
  uint32_t occupied_slices = 0;
};

inline StepView resolve_step(const Tables& t, const Allocation& a) {
  StepView v{};
  const MigConfiguration* cfg = t.config(a.configuration_id);
  if (!cfg) fail("plan.unknown-configuration", "allocation names unknown configuration '" + a.configuration_id + "'");
  // slots ascend by slice_start within a configuration; iterate in that order
  // so capability sums fold identically everywhere
  for (const auto& slot : cfg->slots) {
    for (const auto& [task, slots] : a.assignments) {
      if (!slots.count(slot.id)) continue;
      int m = t.model_of(task);
      if (m < 0) fail("plan.unknown-model", "allocation names unknown model '" + task.model + "'");
      for (int b = 0; b < slot.size; ++b) v.occupied_slices |= 1u << (slot.slice_start + b);
      if (task.kind == TaskKind::Inference) {
        v.infer_mask[m] |= 1u << t.universe.find({slot.slice_start, slot.size});
        v.infer_cap[m] += t.cap_by_size[m][slot.size];
      } else {
        v.retrain_size[m] = slot.size;
        v.retrain_slot_count[m] += 1;
      }
    }
  }
  return v;
}

}  // namespace engine

// ---------------------------------------------------------------------------
// check_feasible: empty result iff the sequence satisfies every constraint
// family. Violations name the family, step, and task.

inline std::vector<Violation> check_feasible(const PlanContext& ctx, const AllocationSequence& seq) {
  using namespace engine;
  Tables t = Tables::build(ctx);
  std::vector<Violation> out;
  const int S = t.steps;
  if (static_cast<int>(seq.allocations.size()) != S) {
    out.push_back({"window-length", "plan has " + std::to_string(seq.allocations.size()) +
                                        " steps, window needs " + std::to_string(S), -1, ""});
    return out;
  }

  std::vector<StepView> views;
  for (int s = 0; s < S; ++s) {
    const Allocation& a = seq.allocations[s];
    if (a.second != s)
      out.push_back({"second-index", "allocation at position " + std::to_string(s) + " is labeled second " +
                                         std::to_string(a.second), s, ""});
    for (const auto& v : validate_allocation(ctx.scenario->catalog, a))
      out.push_back({v.code, v.message, s, ""});
    if (!t.config(a.configuration_id)) return out;  // cannot resolve further
    views.push_back(resolve_step(t, a));
  }

  for (int s = 0; s < S; ++s) {
    for (int m = 0; m < t.models; ++m) {
      const std::string name = t.sc->models[m].profile.name;
      // strengthened deployment floor: one slot of size >= L; the weaker
      // GPC-sum form is reported alongside for reference
      bool anchored = false;
      int total_gpcs = 0;
      const Allocation& a = seq.allocations[s];
      auto it = a.assignments.find(inference_task(name));
      if (it != a.assignments.end()) {
        const MigConfiguration* cfg = t.config(a.configuration_id);
        for (const auto& sid : it->second) {
          if (const InstanceSlot* slot = cfg->find_slot(sid)) {
            total_gpcs += slot->size;
            if (slot->size >= t.floor_gpcs[m]) anchored = true;
          }
        }
      }
      if (!anchored) {
        out.push_back({"deployment-floor",
                       "step " + std::to_string(s) + ": inference task " + name + ":i holds no single instance of size >= " +
                           std::to_string(t.floor_gpcs[m]) + " (weaker GPC-sum check: " +
                           (total_gpcs >= t.floor_gpcs[m] ? "satisfied" : "also violated") + ")",
                       s, name + ":i"});
      }
    }
  }

  for (int m = 0; m < t.models; ++m) {
    const std::string name = t.sc->models[m].profile.name;
    std::vector<int> run;
    for (int s = 0; s < S; ++s)
      if (views[s].retrain_size[m] > 0) run.push_back(s);
    if (run.empty()) {
      out.push_back({"retraining-not-launched", "retraining task " + name + ":r is never launched within the window",
                     -1, name + ":r"});
      continue;
    }
    bool contiguous = run.back() - run.front() + 1 == static_cast<int>(run.size());
    int k = views[run.front()].retrain_size[m];
    bool constant = true;
    for (int s : run)
      if (views[s].retrain_size[m] != k) constant = false;
    if (!contiguous || !constant) {
      out.push_back({"retraining-interrupted",
                     "retraining task " + name + ":r must keep a constant GPC count from start to finish (" +
                         (contiguous ? "GPC count changed mid-run" : "run has gaps") + ")",
                     run.front(), name + ":r"});
      continue;
    }
    long long rt = t.rt_by_size[m][k];
    if (rt < 1) {
      out.push_back({"retraining-size", "retraining task " + name + ":r runs on " + std::to_string(k) +
                                            " GPCs but no retraining time is defined for that size",
                     run.front(), name + ":r"});
    } else if (static_cast<long long>(run.size()) < rt) {
      out.push_back({"retraining-incomplete", "retraining task " + name + ":r runs " + std::to_string(run.size()) +
                                                  " steps but needs " + std::to_string(rt) +
                                                  " on " + std::to_string(k) + " GPCs to complete within the window",
                     run.front(), name + ":r"});
    } else if (static_cast<long long>(run.size()) > rt) {
      out.push_back({"retraining-overrun", "retraining task " + name + ":r holds its instance for " +
                                               std::to_string(run.size()) + " steps but completes after " +
                                               std::to_string(rt),
                     run.front(), name + ":r"});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// evaluate_plan: expected valid-request count of a feasible sequence against
// the given arrivals, with the Eq-style per-step arithmetic. The breakdown
// fold order (step-major, model-minor) is the definition of `total`.

inline PlanScore evaluate_plan(const PlanContext& ctx, const AllocationSequence& seq,
                               const std::vector<std::vector<long long>>& arrivals,
                               const OverheadOverrides* overhead = nullptr,
                               bool verify_feasibility = true) {
  using namespace engine;
  if (verify_feasibility) {
    auto violations = check_feasible(ctx, seq);
    if (!violations.empty())
      fail("plan.infeasible", "evaluate_plan: infeasible plan: " + violations.front().code + ": " + violations.front().message);
  }
  Tables t = Tables::build(ctx);
  const int S = t.steps;
  if (static_cast<int>(seq.allocations.size()) != S) fail("plan.infeasible", "plan length != window size");
  for (int m = 0; m < t.models; ++m)
    if (static_cast<int>(arrivals.at(m).size()) < S) fail("input.arrivals", "arrivals shorter than the window");

  std::vector<StepView> views;
  views.reserve(S);
  for (const auto& a : seq.allocations) views.push_back(resolve_step(t, a));

  // completion per Eq-12 semantics: finished strictly before step s
  std::array<int, kMaxModels> finish_after{};
  for (int m = 0; m < t.models; ++m) {
    finish_after[m] = INT_MAX;
    for (int s = S - 1; s >= 0; --s)
      if (views[s].retrain_size[m] > 0) { finish_after[m] = s + 1; break; }
  }

  bool has_initial = false;
  auto prev_mask = initial_masks(t, ctx, &has_initial);

  PlanScore score;
  score.breakdown.reserve(static_cast<size_t>(S) * t.models);
  for (int s = 0; s < S; ++s) {
    for (int m = 0; m < t.models; ++m) {
      double raw = views[s].infer_cap[m];
      bool changed = s == 0 ? (has_initial && views[0].infer_mask[m] != prev_mask[m])
                            : (views[s].infer_mask[m] != views[s - 1].infer_mask[m]);
      double loss_frac = 0.0;
      if (changed) {
        double psi = t.psi[m];
        if (overhead) {
          auto it = overhead->find({m, s});
          if (it != overhead->end()) psi = it->second;
        }
        loss_frac = reconfig_loss_fraction(psi);
      }
      double eff = effective_capability(raw, loss_frac);
      double thr = step_throughput(static_cast<double>(arrivals[m][s]), eff);
      bool completion = s >= finish_after[m];
      double acc = completion ? t.acc_post[m] : t.acc_pre[m];
      double good = thr * acc;
      score.total += good;
      score.breakdown.push_back({s, m, thr, completion, loss_frac * raw, good});
    }
  }
  return score;
}

// Final slot sets of a sequence, for carrying into the next window's context.
inline std::map<TaskId, std::set<SlotRange>> final_ranges(const Scenario& sc, const AllocationSequence& seq) {
  std::map<TaskId, std::set<SlotRange>> out;
  if (seq.allocations.empty()) return out;
  const Allocation& last = seq.allocations.back();
  const MigConfiguration* cfg = sc.catalog.find(last.configuration_id);
  if (!cfg) fail("plan.unknown-configuration", "unknown configuration '" + last.configuration_id + "'");
  for (const auto& [task, slots] : last.assignments) {
    for (const auto& sid : slots) {
      const InstanceSlot* slot = cfg->find_slot(sid);
      if (slot) out[task].insert({slot->slice_start, slot->size});
    }
  }
  return out;
}

}  // namespace migsim
