// SPDX-License-Identifier: Apache-2.0
//
// Pre-initialization: instances appearing in the next step's allocation are
// created one step early whenever their slice range is entirely unused,
// overlapping the reconfiguration with computation. A task's overhead is
// hidden only when every instance it newly acquires was pre-created
// (model redeployment is not divisible).
#pragma once

#include "migsim/evaluate.hpp"

namespace migsim {

struct PreinitAction {
  int fire_second = 0;            // step during which the instance is created early
  InstanceSlot target;            // as it appears in the allocation at fire_second + 1
  std::vector<TaskId> covers_tasks;
};

struct EffectivePlan {
  AllocationSequence seq;
  OverheadOverrides overrides;  // (model, step) -> effective overhead (only entries < psi)
};

namespace detail_preinit {
inline uint32_t occupied_slices(const Catalog& cat, const Allocation& a) {
  uint32_t occ = 0;
  for (const auto& [start, size] : detail::assigned_ranges(cat, a))
    for (int b = 0; b < size; ++b) occ |= 1u << (start + b);
  return occ;
}
inline uint32_t range_mask(const SlotRange& r) {
  uint32_t m = 0;
  for (int b = 0; b < r.second; ++b) m |= 1u << (r.first + b);
  return m;
}
}  // namespace detail_preinit

// Single linear traversal over consecutive pairs: one action per instance
// that is newly assigned in the next step and whose slices are unused now.
inline std::vector<PreinitAction> plan_preinit(const Catalog& cat, const AllocationSequence& seq) {
  std::vector<PreinitAction> actions;
  for (size_t s = 0; s + 1 < seq.allocations.size(); ++s) {
    const Allocation& cur = seq.allocations[s];
    const Allocation& next = seq.allocations[s + 1];
    uint32_t occupied = detail_preinit::occupied_slices(cat, cur);
    DiffReport diff = reconfiguration_diff(cat, cur, next);
    for (const auto& slot : diff.created) {
      uint32_t needed = detail_preinit::range_mask({slot.slice_start, slot.size});
      if (needed & occupied) continue;  // only unused slices are touched
      PreinitAction action;
      action.fire_second = static_cast<int>(s);
      action.target = slot;
      const MigConfiguration* cfg = cat.find(next.configuration_id);
      for (const auto& [task, slots] : next.assignments)
        for (const auto& sid : slots) {
          const InstanceSlot* owned = cfg->find_slot(sid);
          if (owned && owned->same_range(slot)) action.covers_tasks.push_back(task);
        }
      actions.push_back(std::move(action));
    }
  }
  return actions;
}

// Applies a pre-initialization schedule: the effective overhead of (task,
// step) drops to zero when the task acquires at least one instance and every
// acquired instance was pre-created at the preceding step.
inline EffectivePlan apply_preinit(const PlanContext& ctx, const AllocationSequence& seq,
                                   const std::vector<PreinitAction>& actions) {
  const Catalog& cat = ctx.scenario->catalog;
  // validate actions against the plan
  std::map<int, std::set<SlotRange>> created_at;  // fire_second -> ranges
  for (const auto& a : actions) {
    if (a.fire_second < 0 || a.fire_second + 1 >= static_cast<int>(seq.allocations.size()))
      fail("preinit.inconsistent", "action fires outside the plan");
    const Allocation& cur = seq.allocations[a.fire_second];
    const Allocation& next = seq.allocations[a.fire_second + 1];
    SlotRange r{a.target.slice_start, a.target.size};
    auto next_ranges = detail::assigned_ranges(cat, next);
    if (!next_ranges.count(r))
      fail("preinit.inconsistent", "action target " + a.target.id + " is not assigned at step " +
                                       std::to_string(a.fire_second + 1));
    if (detail_preinit::range_mask(r) & detail_preinit::occupied_slices(cat, cur))
      fail("preinit.inconsistent", "action target " + a.target.id + " overlaps occupied slices at step " +
                                       std::to_string(a.fire_second));
    created_at[a.fire_second].insert(r);
  }

  EffectivePlan plan;
  plan.seq = seq;
  for (size_t s = 1; s < seq.allocations.size(); ++s) {
    const auto& pre_created = created_at.count(static_cast<int>(s) - 1)
                                  ? created_at[static_cast<int>(s) - 1]
                                  : std::set<SlotRange>{};
    if (pre_created.empty()) continue;
    for (const auto& [task, _] : seq.allocations[s].assignments) {
      if (task.kind != TaskKind::Inference) continue;
      auto before = detail::assigned_ranges(cat, seq.allocations[s - 1], &task);
      auto after = detail::assigned_ranges(cat, seq.allocations[s], &task);
      std::vector<SlotRange> acquired;
      for (const auto& r : after)
        if (!before.count(r)) acquired.push_back(r);
      if (acquired.empty()) continue;
      bool all_covered = true;
      for (const auto& r : acquired) all_covered = all_covered && pre_created.count(r) > 0;
      if (all_covered) {
        int m = ctx.scenario->model_index(task.model);
        if (m >= 0) plan.overrides[{m, static_cast<int>(s)}] = 0.0;
      }
    }
  }
  return plan;
}

// Reconfiguration accounting for a plan: the number of (task, step) pairs
// whose slot set changed, and the summed effective overhead.
struct OverheadSummary {
  int reconfigurations = 0;
  double total_overhead = 0.0;  // sum of effective psi over reconfigured pairs
};

inline OverheadSummary overhead_summary(const PlanContext& ctx, const AllocationSequence& seq,
                                        const OverheadOverrides* overrides = nullptr) {
  const Catalog& cat = ctx.scenario->catalog;
  OverheadSummary out;
  for (size_t s = 0; s < seq.allocations.size(); ++s) {
    std::optional<DiffReport> diff;
    if (s > 0) {
      diff = reconfiguration_diff(cat, seq.allocations[s - 1], seq.allocations[s]);
    } else if (ctx.initial) {
      Allocation pseudo_prev;  // compare against carried-over ranges directly
      for (int m = 0; m < static_cast<int>(ctx.scenario->models.size()); ++m) {
        const auto& name = ctx.scenario->models[m].profile.name;
        TaskId task = inference_task(name);
        auto before_it = ctx.initial->find(task);
        std::set<SlotRange> before = before_it == ctx.initial->end() ? std::set<SlotRange>{} : before_it->second;
        auto after = detail::assigned_ranges(cat, seq.allocations[0], &task);
        if (before != after) {
          out.reconfigurations += 1;
          double psi = ctx.scenario->models[m].profile.reconfig_overhead;
          if (overrides) {
            auto it = overrides->find({m, 0});
            if (it != overrides->end()) psi = it->second;
          }
          out.total_overhead += psi;
        }
      }
      continue;
    } else {
      continue;
    }
    for (const auto& [task, changed] : diff->reconfigured) {
      if (!changed || task.kind != TaskKind::Inference) continue;
      int m = ctx.scenario->model_index(task.model);
      if (m < 0) continue;
      out.reconfigurations += 1;
      double psi = ctx.scenario->models[m].profile.reconfig_overhead;
      if (overrides) {
        auto it = overrides->find({m, static_cast<int>(s)});
        if (it != overrides->end()) psi = it->second;
      }
      out.total_overhead += psi;
    }
  }
  return out;
}

}  // namespace migsim
