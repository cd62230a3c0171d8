// SPDX-License-Identifier: Apache-2.0
//
// Internal allocation-space machinery shared by the evaluator, the exact
// solvers, and the baselines: the slot universe, per-model parameter tables,
// and the enumeration of every legal (configuration, task labeling) pair.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "migsim/plan_types.hpp"

namespace migsim::engine {

constexpr int kMaxModels = 4;  // status/mask packing limit; suites use 1-2

// Distinct (slice_start, size) instances across all catalog configurations.
// Slot sets are bitmasks over this universe.
struct Universe {
  std::vector<SlotRange> slots;          // uid -> (start, size)
  std::map<SlotRange, int> index;

  int find(const SlotRange& r) const {
    auto it = index.find(r);
    return it == index.end() ? -1 : it->second;
  }
};

// Scenario-derived lookup tables for one planning window.
struct Tables {
  const Scenario* sc = nullptr;
  int window = 0;
  int steps = 0;       // S
  int models = 0;      // M
  Universe universe;
  // per model, indexed by instance size 0..7
  std::array<std::array<double, 8>, kMaxModels> cap_by_size{};
  std::array<std::array<long long, 8>, kMaxModels> rt_by_size{};  // -1 when undefined
  std::array<int, kMaxModels> floor_gpcs{};                        // L
  std::array<double, kMaxModels> psi{};                            // overhead, steps
  std::array<double, kMaxModels> loss_frac{};                      // min(psi, 1)
  std::array<double, kMaxModels> acc_pre{}, acc_post{};
  std::array<long long, kMaxModels> min_rt{};  // min RT over startable sizes; LLONG_MAX if none

  static Tables build(const PlanContext& ctx) {
    const Scenario& sc = *ctx.scenario;
    if (static_cast<int>(sc.models.size()) > kMaxModels)
      fail("input.scenario", "at most " + std::to_string(kMaxModels) + " models are supported");
    Tables t;
    t.sc = &sc;
    t.window = ctx.window;
    t.steps = sc.window_size;
    t.models = static_cast<int>(sc.models.size());
    for (const auto& cfg : sc.catalog.configurations) {
      for (const auto& s : cfg.slots) {
        SlotRange r{s.slice_start, s.size};
        if (!t.universe.index.count(r)) {
          t.universe.index[r] = static_cast<int>(t.universe.slots.size());
          t.universe.slots.push_back(r);
        }
      }
    }
    if (t.universe.slots.size() > 30) fail("input.catalog", "catalog has more than 30 distinct instances");
    for (int m = 0; m < t.models; ++m) {
      const auto& e = sc.models[m];
      t.cap_by_size[m].fill(0.0);
      t.rt_by_size[m].fill(-1);
      for (const auto& [k, v] : e.profile.capability)
        if (k >= 1 && k <= 7) t.cap_by_size[m][k] = v;
      for (const auto& [k, v] : e.retraining.rt_table)
        if (k >= 1 && k <= 7) t.rt_by_size[m][k] = v;
      t.floor_gpcs[m] = e.profile.min_deploy_gpcs;
      t.psi[m] = e.profile.reconfig_overhead;
      t.loss_frac[m] = reconfig_loss_fraction(t.psi[m]);
      t.acc_pre[m] = ctx.accuracy_pre(m);
      t.acc_post[m] = ctx.accuracy_post(m);
      t.min_rt[m] = -1;
      for (int k = 1; k <= 7; ++k) {
        long long rt = t.rt_by_size[m][k];
        if (rt >= 1 && rt <= t.steps && (t.min_rt[m] < 0 || rt < t.min_rt[m])) t.min_rt[m] = rt;
      }
    }
    return t;
  }

  int model_of(const TaskId& task) const {
    for (int m = 0; m < models; ++m)
      if (sc->models[m].profile.name == task.model) return m;
    return -1;
  }
  const MigConfiguration* config(const std::string& id) const { return sc->catalog.find(id); }
};

// One legal per-step allocation: a configuration plus a task label per slot.
// Labels: 0 = unused, 1 + 2m = inference task of model m, 2 + 2m = retraining
// task of model m. The lexicographic order of (config_index, labels) is the
// documented deterministic tie-break for all solvers.
struct Option {
  int config = 0;
  std::vector<int8_t> labels;
  std::array<uint32_t, kMaxModels> infer_mask{};
  std::array<double, kMaxModels> infer_cap{};
  std::array<int8_t, kMaxModels> retrain_size{};
  std::array<int8_t, kMaxModels> retrain_slot{};  // config slot index, -1 if none
  uint32_t occupied_slices = 0;  // gpc_count-bit mask of slices held by any task

  int signature(int models) const {
    int sig = 0;
    for (int m = models - 1; m >= 0; --m) sig = sig * 8 + retrain_size[m];
    return sig;
  }
};

// The full enumerated allocation space. Options exclude assignments that can
// never appear in an optimal or even completing plan: inference slots whose
// size has zero capability for the task, and retraining slots whose size
// cannot finish within the window. Every inference task always gets a slot of
// size >= L (the strengthened deployment floor).
struct Space {
  Tables tables;
  std::vector<Option> options;                 // lex order
  std::map<int, std::vector<int>> by_signature;  // signature -> option indices (lex order)

  static Space build(const PlanContext& ctx) {
    Space sp;
    sp.tables = Tables::build(ctx);
    const Tables& t = sp.tables;
    const Catalog& cat = ctx.scenario->catalog;

    for (size_t ci = 0; ci < cat.configurations.size(); ++ci) {
      const auto& cfg = cat.configurations[ci];
      int n = static_cast<int>(cfg.slots.size());
      std::vector<int8_t> labels(n, 0);
      std::vector<int> uid(n);
      for (int i = 0; i < n; ++i) uid[i] = t.universe.find({cfg.slots[i].slice_start, cfg.slots[i].size});

      // depth-first over per-slot labels in ascending label order so the
      // emitted options are already lexicographic within the configuration
      auto emit = [&]() {
        Option opt;
        opt.config = static_cast<int>(ci);
        opt.labels = labels;
        opt.retrain_slot.fill(-1);
        std::array<bool, kMaxModels> anchored{};
        for (int i = 0; i < n; ++i) {
          int lab = labels[i];
          if (lab == 0) continue;
          int m = (lab - 1) / 2;
          int size = cfg.slots[i].size;
          for (int b = 0; b < size; ++b) opt.occupied_slices |= 1u << (cfg.slots[i].slice_start + b);
          if ((lab - 1) % 2 == 0) {
            opt.infer_mask[m] |= 1u << uid[i];
            opt.infer_cap[m] += t.cap_by_size[m][size];
            if (size >= t.floor_gpcs[m]) anchored[m] = true;
          } else {
            opt.retrain_size[m] = static_cast<int8_t>(size);
            opt.retrain_slot[m] = static_cast<int8_t>(i);
          }
        }
        for (int m = 0; m < t.models; ++m)
          if (!anchored[m]) return;
        sp.options.push_back(std::move(opt));
      };

      // iterative product over labels with per-slot admissibility
      std::vector<int> stack{0};
      while (!stack.empty()) {
        int depth = static_cast<int>(stack.size()) - 1;
        int lab = stack.back();
        int max_label = 2 * t.models;
        if (lab > max_label) {
          stack.pop_back();
          if (!stack.empty()) ++stack.back();
          continue;
        }
        bool ok = true;
        if (lab > 0) {
          int m = (lab - 1) / 2;
          int size = cfg.slots[depth].size;
          if ((lab - 1) % 2 == 0) {
            ok = t.cap_by_size[m][size] > 0.0;  // zero-capability slots never help
          } else {
            long long rt = t.rt_by_size[m][size];
            ok = rt >= 1 && rt <= t.steps;  // must be able to finish in-window
            if (ok) {
              for (int i = 0; i < depth; ++i)
                if (labels[i] == lab) { ok = false; break; }  // one instance per retraining task
            }
          }
        }
        if (!ok) {
          ++stack.back();
          continue;
        }
        labels[depth] = static_cast<int8_t>(lab);
        if (depth + 1 == n) {
          emit();
          ++stack.back();
        } else {
          stack.push_back(0);
        }
      }
    }

    for (size_t i = 0; i < sp.options.size(); ++i)
      sp.by_signature[sp.options[i].signature(t.models)].push_back(static_cast<int>(i));
    return sp;
  }

  // Conversion to the public allocation type.
  Allocation to_allocation(const Option& opt, int second) const {
    const auto& cfg = tables.sc->catalog.configurations[opt.config];
    Allocation a;
    a.second = second;
    a.configuration_id = cfg.id;
    for (size_t i = 0; i < opt.labels.size(); ++i) {
      int lab = opt.labels[i];
      if (lab == 0) continue;
      int m = (lab - 1) / 2;
      const std::string& name = tables.sc->models[m].profile.name;
      TaskId task = (lab - 1) % 2 == 0 ? inference_task(name) : retraining_task(name);
      a.assignments[task].insert(cfg.slots[i].id);
    }
    return a;
  }

  // Deterministic sequence encoding used for tie-breaks: per step the
  // configuration index followed by the per-slot labels.
  std::vector<int> encode(const AllocationSequence& seq) const {
    std::vector<int> out;
    for (const auto& a : seq.allocations) {
      const MigConfiguration* cfg = tables.config(a.configuration_id);
      if (!cfg) fail("input.allocation", "unknown configuration '" + a.configuration_id + "'");
      int ci = 0;
      for (size_t i = 0; i < tables.sc->catalog.configurations.size(); ++i)
        if (&tables.sc->catalog.configurations[i] == cfg) ci = static_cast<int>(i);
      out.push_back(ci);
      for (const auto& slot : cfg->slots) {
        int lab = 0;
        for (const auto& [task, slots] : a.assignments) {
          if (!slots.count(slot.id)) continue;
          int m = tables.model_of(task);
          lab = 1 + 2 * m + (task.kind == TaskKind::Retraining ? 1 : 0);
        }
        out.push_back(lab);
      }
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Retraining status machinery. Status of one model entering a step:
//   0                      not started
//   1                      done (finished strictly before this step)
//   2 + (k-1)*S + (rem-1)  running on k GPCs, `rem` more steps including this one
struct StatusCodec {
  int steps = 0;
  int models = 0;

  int ns() const { return 0; }
  int done() const { return 1; }
  int running(int k, long long rem) const { return 2 + (k - 1) * steps + static_cast<int>(rem - 1); }
  bool is_running(int code) const { return code >= 2; }
  int run_size(int code) const { return (code - 2) / steps + 1; }
  long long run_rem(int code) const { return (code - 2) % steps + 1; }

  uint64_t pack(const std::array<int, kMaxModels>& st) const {
    uint64_t key = 0;
    for (int m = models - 1; m >= 0; --m) key = (key << 16) | static_cast<uint64_t>(st[m]);
    return key;
  }
  std::array<int, kMaxModels> unpack(uint64_t key) const {
    std::array<int, kMaxModels> st{};
    for (int m = 0; m < models; ++m) {
      st[m] = static_cast<int>(key & 0xffff);
      key >>= 16;
    }
    return st;
  }

  // Transition of model m's status across step `s` when its retraining task
  // holds a slot of `size` (0 = none). Returns -1 when incompatible.
  int advance(const Tables& t, int m, int status, int size, int s) const {
    if (is_running(status)) {
      if (size != run_size(status)) return -1;
      return run_rem(status) == 1 ? done() : running(size, run_rem(status) - 1);
    }
    if (status == done()) return size == 0 ? done() : -1;
    // not started
    if (size == 0) return ns();
    long long rt = t.rt_by_size[m][size];
    if (rt < 1 || s + rt > t.steps) return -1;  // must complete within the window
    return rt == 1 ? done() : running(size, rt - 1);
  }
};

// Initial per-task masks from the context's carried-over slot sets. A range
// that does not exist in this catalog can never equal any option's mask; the
// sentinel forces "changed".
constexpr uint32_t kForeignMask = 0xffffffffu;

inline std::array<uint32_t, kMaxModels> initial_masks(const Tables& t, const PlanContext& ctx, bool* has_initial) {
  std::array<uint32_t, kMaxModels> masks{};
  *has_initial = ctx.initial.has_value();
  if (!ctx.initial) return masks;
  for (const auto& [task, ranges] : *ctx.initial) {
    if (task.kind != TaskKind::Inference) continue;
    int m = t.model_of(task);
    if (m < 0) continue;
    uint32_t mask = 0;
    bool foreign = false;
    for (const auto& r : ranges) {
      int uid = t.universe.find(r);
      if (uid < 0) foreign = true;
      else mask |= 1u << uid;
    }
    masks[m] = foreign ? kForeignMask : mask;
  }
  return masks;
}

}  // namespace migsim::engine
