// SPDX-License-Identifier: Apache-2.0
//
// Exact solvers over one retraining window: a step-indexed dynamic program
// with dominance pruning, and the exhaustive brute-force used as its oracle.
// Both maximize evaluate_plan's objective and break ties toward the
// lexicographically smallest sequence encoding.
#pragma once

#include <cmath>
#include <limits>
#include <thread>
#include <unordered_map>

#include "migsim/evaluate.hpp"
#include "migsim/predictor.hpp"
#include "migsim/space.hpp"

namespace migsim {

struct SolveOptions {
  int workers = 1;                  // DP transition parallelism; results identical for any value
  size_t state_budget = 4000000;    // max DP frontier states per step
  double bruteforce_cap = 5e7;      // gate on |options|^S
};

// Necessary feasibility conditions, checkable before any search.
inline std::vector<Violation> precheck_scenario(const PlanContext& ctx) {
  engine::Space sp = engine::Space::build(ctx);
  const engine::Tables& t = sp.tables;
  std::vector<Violation> out;
  for (int m = 0; m < t.models; ++m) {
    const std::string& name = t.sc->models[m].profile.name;
    bool anchor_exists = false;
    for (const auto& cfg : t.sc->catalog.configurations)
      for (const auto& slot : cfg.slots)
        if (slot.size >= t.floor_gpcs[m]) anchor_exists = true;
    if (!anchor_exists) {
      out.push_back({"deployment-floor", "deployment-floor unsatisfiable: no catalog instance reaches " +
                                             std::to_string(t.floor_gpcs[m]) + " GPCs for model " + name,
                     -1, name + ":i"});
      continue;
    }
    if (t.min_rt[m] < 0) {
      out.push_back({"retraining-window", "model " + name + ": every retraining time exceeds the window (" +
                                              std::to_string(t.steps) + " steps)",
                     -1, name + ":r"});
    }
  }
  if (!out.empty()) return out;
  if (!sp.by_signature.count(0) || sp.by_signature.at(0).empty()) {
    out.push_back({"deployment-floor",
                   "deployment-floor unsatisfiable: no configuration deploys every inference task simultaneously", -1, ""});
    return out;
  }
  for (int m = 0; m < t.models; ++m) {
    bool coexists = false;
    for (const auto& [sig, opts] : sp.by_signature) {
      if (opts.empty()) continue;
      if ((sig >> (3 * m)) & 7) coexists = true;
    }
    if (!coexists) {
      out.push_back({"no-coexistence-configuration",
                     "no-coexistence-configuration: no configuration runs " + t.sc->models[m].profile.name +
                         ":r alongside every inference task",
                     -1, t.sc->models[m].profile.name + ":r"});
    }
  }
  return out;
}

inline void throw_if_infeasible(const std::vector<Violation>& v) {
  if (!v.empty()) fail("infeasible." + v.front().code, v.front().message);
}

namespace engine {

// Per-model status codes a signature must carry at step s, given statuses
// entering s. Empty = state is dead.
inline bool allowed_sizes(const Tables& t, const StatusCodec& codec, int m, int status, int s,
                          std::array<int8_t, 9>* sizes, int* count) {
  *count = 0;
  if (codec.is_running(status)) {
    sizes->at((*count)++) = static_cast<int8_t>(codec.run_size(status));
    return true;
  }
  if (status == codec.done()) {
    sizes->at((*count)++) = 0;
    return true;
  }
  // not started: may stay idle only while a later start can still finish
  if (t.min_rt[m] >= 0 && s + 1 + t.min_rt[m] <= t.steps) sizes->at((*count)++) = 0;
  for (int k = 1; k <= 7; ++k) {
    long long rt = t.rt_by_size[m][k];
    if (rt >= 1 && s + rt <= t.steps) sizes->at((*count)++) = static_cast<int8_t>(k);
  }
  return *count > 0;
}

struct FrontKey {
  uint64_t status = 0;
  std::array<uint32_t, kMaxModels> mask{};
  bool operator==(const FrontKey&) const = default;
};
struct FrontKeyHash {
  size_t operator()(const FrontKey& k) const {
    uint64_t h = 1469598103934665603ull ^ k.status;
    for (uint32_t m : k.mask) h = (h ^ m) * 1099511628211ull;
    h *= 1099511628211ull;
    return static_cast<size_t>(h ^ (h >> 29));
  }
};

struct DpState {
  FrontKey key;
  double value = 0.0;
  int parent = -1;
  int option = -1;
  uint64_t lex = 0;  // (parent lex rank << 32) | option index
  uint32_t rank = 0;
};

// better-than: higher value wins, then smaller lex
inline bool dp_better(double va, uint64_t la, double vb, uint64_t lb) {
  if (va != vb) return va > vb;
  return la < lb;
}

inline bool status_dominates(const StatusCodec& codec, int a, int b) {
  if (a == b) return true;
  if (a == codec.done()) return true;
  if (codec.is_running(a) && codec.is_running(b) && codec.run_size(a) == codec.run_size(b))
    return codec.run_rem(a) <= codec.run_rem(b);
  return false;
}

}  // namespace engine

// ---------------------------------------------------------------------------
// Brute force: exhaustive depth-first enumeration of every feasible sequence,
// scored incrementally with the shared fold. Gated by the documented
// closed-form estimate |options|^S.

inline AllocationSequence solve_bruteforce(const PlanContext& ctx, const ArrivalForecast& forecast,
                                           const SolveOptions& opt = {}) {
  using namespace engine;
  throw_if_infeasible(precheck_scenario(ctx));
  Space sp = Space::build(ctx);
  const Tables& t = sp.tables;
  const int S = t.steps;
  for (int m = 0; m < t.models; ++m)
    if (static_cast<int>(forecast.counts.at(m).size()) != S)
      fail("input.forecast", "forecast horizon != window size");

  double estimate = std::pow(static_cast<double>(sp.options.size()), S);
  if (estimate > opt.bruteforce_cap)
    fail("planner.bruteforce-cap", "brute-force space estimate " + fmt_real(estimate) + " (=" +
                                       std::to_string(sp.options.size()) + "^" + std::to_string(S) +
                                       ") exceeds the cap " + fmt_real(opt.bruteforce_cap));

  StatusCodec codec{t.steps, t.models};
  bool has_initial = false;
  auto init_mask = initial_masks(t, ctx, &has_initial);

  std::vector<int> path(S, -1), best_path;
  double best_value = -std::numeric_limits<double>::infinity();
  bool found = false;

  struct Frame {
    std::array<int, kMaxModels> status{};
    std::array<uint32_t, kMaxModels> mask{};
    double value = 0.0;
  };
  std::vector<Frame> frames(S + 1);
  for (int m = 0; m < t.models; ++m) frames[0].status[m] = codec.ns();
  frames[0].mask = init_mask;

  // returns false when the subtree is exhausted
  auto dfs = [&](auto&& self, int s) -> void {
    if (s == S) {
      bool all_done = true;
      for (int m = 0; m < t.models; ++m) all_done = all_done && frames[S].status[m] == codec.done();
      if (all_done && frames[S].value > best_value) {
        best_value = frames[S].value;
        best_path.assign(path.begin(), path.end());
        found = true;
      }
      return;
    }
    const Frame& cur = frames[s];
    bool charge = s > 0 || has_initial;
    for (size_t oi = 0; oi < sp.options.size(); ++oi) {
      const Option& o = sp.options[oi];
      Frame& next = frames[s + 1];
      bool ok = true;
      for (int m = 0; m < t.models && ok; ++m) {
        int ns = codec.advance(t, m, cur.status[m], o.retrain_size[m], s);
        if (ns < 0) ok = false;
        else next.status[m] = ns;
      }
      if (!ok) continue;
      // an idle not-started model must still be startable later
      for (int m = 0; m < t.models && ok; ++m) {
        if (next.status[m] == codec.ns() && (t.min_rt[m] < 0 || s + 1 + t.min_rt[m] > S)) ok = false;
      }
      if (!ok) continue;
      double v = cur.value;
      for (int m = 0; m < t.models; ++m) {
        bool completion = cur.status[m] == codec.done();
        double acc = completion ? t.acc_post[m] : t.acc_pre[m];
        bool changed = charge && cur.mask[m] != o.infer_mask[m];
        double eff = effective_capability(o.infer_cap[m], changed ? t.loss_frac[m] : 0.0);
        double thr = step_throughput(static_cast<double>(forecast.counts[m][s]), eff);
        v += thr * acc;
      }
      next.mask = o.infer_mask;
      next.value = v;
      path[s] = static_cast<int>(oi);
      self(self, s + 1);
    }
  };
  dfs(dfs, 0);
  if (!found) fail("infeasible.joint", "no feasible allocation sequence exists for this window");

  AllocationSequence seq;
  seq.window_index = ctx.window;
  for (int s = 0; s < S; ++s) seq.allocations.push_back(sp.to_allocation(sp.options[best_path[s]], s));
  return seq;
}

// ---------------------------------------------------------------------------
// Dynamic program. States are (per-model retraining status entering step s,
// previous step's per-task inference slot sets); pruning keeps exactness:
//   - equal-key merge (max value, lex tie-break),
//   - placement band: within one status group a state more than one maximal
//     step's worth of reconfiguration loss behind the best can never catch up
//     (after one common transition the futures coincide),
//   - status dominance (done >= running >= longer-remaining running at equal
//     size and placement), valid when accuracy_post >= accuracy_pre,
//   - optimistic-bound pruning against a greedy incumbent (strict, so ties
//     survive for the lex rule).

inline AllocationSequence solve_dp(const PlanContext& ctx, const ArrivalForecast& forecast,
                                   const SolveOptions& opt = {}) {
  using namespace engine;
  throw_if_infeasible(precheck_scenario(ctx));
  Space sp = Space::build(ctx);
  const Tables& t = sp.tables;
  const int S = t.steps;
  const int M = t.models;
  for (int m = 0; m < M; ++m)
    if (static_cast<int>(forecast.counts.at(m).size()) != S)
      fail("input.forecast", "forecast horizon != window size");

  StatusCodec codec{t.steps, t.models};
  bool has_initial = false;
  auto init_mask = initial_masks(t, ctx, &has_initial);

  std::array<double, kMaxModels> acc_max{};
  std::array<double, kMaxModels> cap_max{};
  bool dominance_ok = true;
  for (int m = 0; m < M; ++m) {
    acc_max[m] = std::max(t.acc_pre[m], t.acc_post[m]);
    dominance_ok = dominance_ok && t.acc_post[m] >= t.acc_pre[m];
    for (const auto& o : sp.options) cap_max[m] = std::max(cap_max[m], o.infer_cap[m]);
  }
  double band = 1e-9;
  for (int m = 0; m < M; ++m) band += t.loss_frac[m] * cap_max[m] * acc_max[m];

  // per-step optimistic bound, ignoring retraining occupancy and overheads
  std::vector<double> ub_suffix(S + 1, 0.0);
  for (int s = S - 1; s >= 0; --s) {
    double best = 0.0;
    for (const auto& o : sp.options) {
      double v = 0.0;
      for (int m = 0; m < M; ++m)
        v += acc_max[m] * step_throughput(static_cast<double>(forecast.counts[m][s]), o.infer_cap[m]);
      best = std::max(best, v);
    }
    ub_suffix[s] = ub_suffix[s + 1] + best;
  }

  // greedy incumbent: myopic choice with deadline-forced retraining starts
  double incumbent = -std::numeric_limits<double>::infinity();
  {
    std::array<int, kMaxModels> st{};
    std::array<uint32_t, kMaxModels> mask = init_mask;
    double value = 0.0;
    bool alive = true;
    for (int s = 0; s < S && alive; ++s) {
      bool charge = s > 0 || has_initial;
      double best_v = 0.0;
      int best_o = -1;
      std::array<int, kMaxModels> best_st{};
      for (size_t oi = 0; oi < sp.options.size(); ++oi) {
        const Option& o = sp.options[oi];
        std::array<int, kMaxModels> ns{};
        bool ok = true;
        for (int m = 0; m < M && ok; ++m) {
          ns[m] = codec.advance(t, m, st[m], o.retrain_size[m], s);
          ok = ns[m] >= 0 && !(ns[m] == codec.ns() && (t.min_rt[m] < 0 || s + 1 + t.min_rt[m] > S));
        }
        if (!ok) continue;
        double v = value;
        for (int m = 0; m < M; ++m) {
          double acc = st[m] == codec.done() ? t.acc_post[m] : t.acc_pre[m];
          bool changed = charge && mask[m] != o.infer_mask[m];
          double eff = effective_capability(o.infer_cap[m], changed ? t.loss_frac[m] : 0.0);
          v += step_throughput(static_cast<double>(forecast.counts[m][s]), eff) * acc;
        }
        if (best_o < 0 || v > best_v) { best_v = v; best_o = static_cast<int>(oi); best_st = ns; }
      }
      if (best_o < 0) { alive = false; break; }
      value = best_v;
      st = best_st;
      mask = sp.options[best_o].infer_mask;
    }
    if (alive) {
      bool all_done = true;
      for (int m = 0; m < M; ++m) all_done = all_done && st[m] == codec.done();
      if (all_done) incumbent = value;
    }
  }

  std::vector<std::vector<DpState>> frontiers(S + 1);
  {
    DpState root;
    root.key.status = 0;  // all models not-started
    root.key.mask = init_mask;
    frontiers[0] = {root};
  }

  using SubsetKey = std::array<uint32_t, kMaxModels>;
  struct SubsetKeyHash {
    size_t operator()(const SubsetKey& k) const {
      uint64_t h = 14695981039346656037ull;
      for (uint32_t m : k) h = (h ^ m) * 1099511628211ull;
      return static_cast<size_t>(h ^ (h >> 31));
    }
  };
  struct Best {
    double value = -std::numeric_limits<double>::infinity();
    uint64_t lex = ~0ull;
    int idx = -1;
  };

  for (int s = 0; s < S; ++s) {
    const auto& cur = frontiers[s];
    if (cur.empty()) fail("infeasible.joint", "no feasible allocation sequence exists for this window");
    bool charge = s > 0 || has_initial;

    // group states by status
    std::unordered_map<uint64_t, std::vector<int>> groups;
    for (size_t i = 0; i < cur.size(); ++i) groups[cur[i].key.status].push_back(static_cast<int>(i));

    struct GroupWork {
      uint64_t status;
      std::array<int, kMaxModels> st{};
      std::vector<std::unordered_map<SubsetKey, Best, SubsetKeyHash>> by_subset;  // 1<<M entries
      std::vector<std::pair<int, std::vector<int> const*>> sig_options;           // (packed new status, options)
    };
    std::vector<GroupWork> work;
    work.reserve(groups.size());
    for (auto& [status, idxs] : groups) {
      GroupWork g;
      g.status = status;
      g.st = codec.unpack(status);
      g.by_subset.assign(1u << M, {});
      for (int i : idxs) {
        const DpState& st = cur[i];
        for (unsigned sub = 0; sub < (1u << M); ++sub) {
          SubsetKey key{};
          for (int m = 0; m < M; ++m)
            if (sub & (1u << m)) key[m] = st.key.mask[m];
            else key[m] = 0xdeadbeefu;  // fixed out-of-band filler
          auto& slot = g.by_subset[sub][key];
          if (dp_better(st.value, st.lex, slot.value, slot.lex)) slot = {st.value, st.lex, i};
        }
      }
      // enumerate signatures compatible with this status
      std::array<std::array<int8_t, 9>, kMaxModels> sizes{};
      std::array<int, kMaxModels> counts{};
      bool alive = true;
      for (int m = 0; m < M; ++m) {
        if (!allowed_sizes(t, codec, m, g.st[m], s, &sizes[m], &counts[m])) alive = false;
      }
      if (!alive) continue;
      std::array<int, kMaxModels> pick{};
      auto rec = [&](auto&& self, int m) -> void {
        if (m == M) {
          int sig = 0;
          std::array<int, kMaxModels> ns{};
          for (int mm = M - 1; mm >= 0; --mm) sig = sig * 8 + sizes[mm][pick[mm]];
          bool ok = true;
          for (int mm = 0; mm < M && ok; ++mm) {
            ns[mm] = codec.advance(t, mm, g.st[mm], sizes[mm][pick[mm]], s);
            ok = ns[mm] >= 0 && !(ns[mm] == codec.ns() && (t.min_rt[mm] < 0 || s + 1 + t.min_rt[mm] > S));
          }
          if (!ok) return;
          auto it = sp.by_signature.find(sig);
          if (it == sp.by_signature.end()) return;
          g.sig_options.emplace_back(static_cast<int>(codec.pack(ns)), &it->second);
          return;
        }
        for (int c = 0; c < counts[m]; ++c) {
          pick[m] = c;
          self(self, m + 1);
        }
      };
      rec(rec, 0);
      if (!g.sig_options.empty()) work.push_back(std::move(g));
    }

    // flatten transition units for optional parallelism
    struct Unit { const GroupWork* g; int packed_status; const std::vector<int>* options; };
    std::vector<Unit> units;
    for (const auto& g : work)
      for (const auto& [ns, opts] : g.sig_options) units.push_back({&g, ns, opts});

    using FrontMap = std::unordered_map<FrontKey, DpState, FrontKeyHash>;
    auto process = [&](size_t from, size_t to, FrontMap& local) {
      std::array<double, kMaxModels> c_changed{}, bonus{};
      for (size_t u = from; u < to; ++u) {
        const GroupWork& g = *units[u].g;
        for (int oi : *units[u].options) {
          const Option& o = sp.options[oi];
          for (int m = 0; m < M; ++m) {
            bool completion = g.st[m] == codec.done();
            double acc = completion ? t.acc_post[m] : t.acc_pre[m];
            double recv = static_cast<double>(forecast.counts[m][s]);
            double eff = effective_capability(o.infer_cap[m], charge ? t.loss_frac[m] : 0.0);
            c_changed[m] = step_throughput(recv, eff) * acc;
            bonus[m] = charge ? step_throughput(recv, o.infer_cap[m]) * acc - c_changed[m] : 0.0;
          }
          // pick the best predecessor over match-subsets
          Best chosen;
          for (unsigned sub = 0; sub < (1u << M); ++sub) {
            SubsetKey key{};
            double extra = 0.0;
            for (int m = 0; m < M; ++m) {
              if (sub & (1u << m)) { key[m] = o.infer_mask[m]; extra += bonus[m]; }
              else key[m] = 0xdeadbeefu;
            }
            auto it = g.by_subset[sub].find(key);
            if (it == g.by_subset[sub].end()) continue;
            double cand = it->second.value + extra;
            if (dp_better(cand, it->second.lex, chosen.value, chosen.lex)) chosen = {cand, it->second.lex, it->second.idx};
          }
          if (chosen.idx < 0) continue;
          const DpState& pred = cur[chosen.idx];
          // exact fold from the chosen predecessor
          double v = pred.value;
          for (int m = 0; m < M; ++m) {
            bool changed = charge && pred.key.mask[m] != o.infer_mask[m];
            double acc = g.st[m] == codec.done() ? t.acc_post[m] : t.acc_pre[m];
            double eff = effective_capability(o.infer_cap[m], changed ? t.loss_frac[m] : 0.0);
            double thr = step_throughput(static_cast<double>(forecast.counts[m][s]), eff);
            v += thr * acc;
          }
          if (v + ub_suffix[s + 1] < incumbent) continue;  // cannot strictly beat the incumbent
          DpState st;
          st.key.status = static_cast<uint64_t>(units[u].packed_status);
          st.key.mask = o.infer_mask;
          st.value = v;
          st.parent = chosen.idx;
          st.option = oi;
          st.lex = (static_cast<uint64_t>(pred.rank) << 32) | static_cast<uint64_t>(oi);
          auto [it2, inserted] = local.emplace(st.key, st);
          if (!inserted && dp_better(st.value, st.lex, it2->second.value, it2->second.lex)) it2->second = st;
        }
      }
    };

    FrontMap merged;
    int workers = std::max(1, opt.workers);
    if (workers == 1 || units.size() <= 1) {
      process(0, units.size(), merged);
    } else {
      size_t n = units.size();
      size_t chunks = std::min<size_t>(workers, n);
      std::vector<FrontMap> locals(chunks);
      std::vector<std::thread> threads;
      for (size_t c = 0; c < chunks; ++c) {
        size_t from = n * c / chunks, to = n * (c + 1) / chunks;
        threads.emplace_back([&, c, from, to] { process(from, to, locals[c]); });
      }
      for (auto& th : threads) th.join();
      for (auto& local : locals) {
        for (auto& [key, st] : local) {
          auto [it2, inserted] = merged.emplace(key, st);
          if (!inserted && dp_better(st.value, st.lex, it2->second.value, it2->second.lex)) it2->second = st;
        }
      }
    }

    std::vector<DpState> next;
    next.reserve(merged.size());
    for (auto& [key, st] : merged) next.push_back(st);

    // placement band per status group
    {
      std::unordered_map<uint64_t, double> best_by_status;
      for (const auto& st : next) {
        auto [it, ins] = best_by_status.emplace(st.key.status, st.value);
        if (!ins) it->second = std::max(it->second, st.value);
      }
      std::vector<DpState> kept;
      kept.reserve(next.size());
      for (auto& st : next)
        if (st.value >= best_by_status[st.key.status] - band) kept.push_back(std::move(st));
      next.swap(kept);
    }

    // status dominance within equal placements
    if (dominance_ok) {
      std::unordered_map<SubsetKey, std::vector<int>, SubsetKeyHash> by_mask;
      for (size_t i = 0; i < next.size(); ++i) by_mask[next[i].key.mask].push_back(static_cast<int>(i));
      std::vector<bool> dead(next.size(), false);
      for (auto& [mask, idxs] : by_mask) {
        if (idxs.size() > 64) continue;  // quadratic scan guard
        for (int a : idxs) {
          if (dead[a]) continue;
          auto sa = codec.unpack(next[a].key.status);
          for (int b : idxs) {
            if (a == b || dead[b] || dead[a]) continue;
            auto sb = codec.unpack(next[b].key.status);
            bool dom = true;
            for (int m = 0; m < M && dom; ++m) dom = status_dominates(codec, sa[m], sb[m]);
            if (dom && dp_better(next[a].value, next[a].lex, next[b].value, next[b].lex)) dead[b] = true;
          }
        }
      }
      std::vector<DpState> kept;
      kept.reserve(next.size());
      for (size_t i = 0; i < next.size(); ++i)
        if (!dead[i]) kept.push_back(std::move(next[i]));
      next.swap(kept);
    }

    if (next.size() > opt.state_budget)
      fail("planner.state-budget", "dynamic-program frontier reached " + std::to_string(next.size()) +
                                       " states at step " + std::to_string(s + 1) + " (budget " +
                                       std::to_string(opt.state_budget) + ")");

    // deterministic ranks for lex tie-breaking
    std::vector<int> order(next.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return next[a].lex < next[b].lex; });
    for (size_t r = 0; r < order.size(); ++r) next[order[r]].rank = static_cast<uint32_t>(r);
    frontiers[s + 1] = std::move(next);
  }

  // pick the best all-done terminal state
  const auto& last = frontiers[S];
  uint64_t all_done_key;
  {
    std::array<int, kMaxModels> st{};
    for (int m = 0; m < M; ++m) st[m] = codec.done();
    all_done_key = codec.pack(st);
  }
  const DpState* best = nullptr;
  for (const auto& st : last) {
    if (st.key.status != all_done_key) continue;
    if (!best || dp_better(st.value, st.lex, best->value, best->lex)) best = &st;
  }
  if (!best) fail("infeasible.joint", "no feasible allocation sequence exists for this window");

  std::vector<int> chosen(S, -1);
  {
    const DpState* stp = best;
    for (int s = S - 1; s >= 0; --s) {
      chosen[s] = stp->option;
      stp = s > 0 ? &frontiers[s][stp->parent] : nullptr;
    }
  }
  AllocationSequence seq;
  seq.window_index = ctx.window;
  for (int s = 0; s < S; ++s) seq.allocations.push_back(sp.to_allocation(sp.options[chosen[s]], s));
  return seq;
}

}  // namespace migsim
