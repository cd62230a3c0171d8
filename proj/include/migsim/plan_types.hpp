// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "migsim/catalog.hpp"
#include "migsim/workload.hpp"

namespace migsim {

// The per-window plan: one Allocation per step, steps consecutive from 0.
struct AllocationSequence {
  int window_index = 0;
  std::vector<Allocation> allocations;
};

// (slice_start, size), the identity of a placed instance.
using SlotRange = std::pair<int, int>;

// Planning context for one retraining window. `initial` carries the slot sets
// each task held when the window began (the previous window's final
// allocation); absent means a cold start and step 0 incurs no
// reconfiguration overhead.
struct PlanContext {
  const Scenario* scenario = nullptr;
  int window = 0;
  std::optional<std::map<TaskId, std::set<SlotRange>>> initial;

  int steps() const { return scenario->window_size; }
  double accuracy_pre(int model) const { return scenario->models[model].retraining.accuracy_pre[window]; }
  double accuracy_post(int model) const { return scenario->models[model].retraining.accuracy_post[window]; }
};

struct ScoreEntry {
  int second = 0;
  int model = 0;
  double throughput = 0.0;
  bool completion = false;     // retraining finished strictly before this step
  double overhead_loss = 0.0;  // capability subtracted by reconfiguration this step
  double goodput = 0.0;
};

struct PlanScore {
  double total = 0.0;
  std::vector<ScoreEntry> breakdown;  // (step, model) in step-major, model-minor order
};

// Feasibility violation, named by constraint family.
struct Violation {
  std::string code;
  std::string message;
  int second = -1;
  std::string task;
};

// Per-(model, step) effective reconfiguration overhead after
// pre-initialization; entries only where it differs from the profile psi.
using OverheadOverrides = std::map<std::pair<int, int>, double>;

// Shared arithmetic: capability lost to a reconfiguration is a fraction
// min(psi, 1) of that step's aggregate capability. Every scorer (planner,
// evaluator, fluid simulator) goes through these helpers so their totals
// agree bit-for-bit.
inline double reconfig_loss_fraction(double psi_steps) { return psi_steps < 1.0 ? psi_steps : 1.0; }
inline double effective_capability(double raw, double loss_frac) { return raw - loss_frac * raw; }
inline double step_throughput(double received, double capability) {
  return received < capability ? received : capability;
}

}  // namespace migsim
