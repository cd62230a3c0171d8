// SPDX-License-Identifier: Apache-2.0
//
// Trace-driven replay of planned allocation sequences at two fidelity
// levels. Fluid mode reproduces the planner's per-step min() arithmetic with
// expected-value accuracy weighting and overhead spill for psi > 1; request
// mode adds per-request FIFO queues, SLO deadline checks, and seeded
// correctness sampling.
#pragma once

#include <deque>
#include <random>

#include "migsim/preinit.hpp"

namespace migsim {

struct JobMetrics {
  std::string model;
  double received = 0.0;
  double served = 0.0;
  double timely = 0.0;
  double correct = 0.0;   // fluid: expected; request: sampled
  double valid = 0.0;     // timely AND correct
  double dropped = 0.0;   // request mode: deadline lapsed in queue
  double queued_at_end = 0.0;
  // fractions use the vacuous-truth convention: 1.0 when the denominator is 0
  double goodput = 1.0;        // valid / received
  double slo_attainment = 1.0; // timely / received
  double accuracy = 1.0;       // correct / served
  int reconfigurations = 0;
  double overhead_seconds = 0.0;
};

struct WindowMetrics {
  int window = 0;
  std::vector<JobMetrics> jobs;
};

struct Metrics {
  std::vector<JobMetrics> jobs;  // totals over all windows
  std::vector<WindowMetrics> windows;
  double system_goodput = 1.0;
  double total_received = 0.0;
  double total_valid = 0.0;
  int reconfiguration_count = 0;
  double total_overhead_seconds = 0.0;
};

namespace detail_sim {

inline void finalize_fractions(JobMetrics& j) {
  if (j.received > 0) {
    j.goodput = j.valid / j.received;
    j.slo_attainment = j.timely / j.received;
  } else {
    j.goodput = 1.0;
    j.slo_attainment = 1.0;
  }
  j.accuracy = j.served > 0 ? j.correct / j.served : 1.0;
}

// Per-(model, global step) replay inputs shared by both modes.
struct Series {
  int windows = 0, steps = 0, models = 0;
  std::vector<std::vector<double>> raw;        // [m][global step]
  std::vector<std::vector<double>> eff;        // after reconfiguration loss and spill
  std::vector<std::vector<char>> completion;   // retraining finished before this step
  std::vector<std::vector<char>> changed;      // slot set differs from previous step
  std::vector<std::vector<double>> applied_psi;  // psi_eff charged at changed steps, else 0
};

inline Series build_series(const Scenario& sc, const std::vector<EffectivePlan>& plans) {
  using namespace engine;
  const int W = static_cast<int>(plans.size());
  if (W != sc.window_count) fail("input.plan", "plan count != window count");
  const int S = sc.window_size;
  const int M = static_cast<int>(sc.models.size());
  Series series;
  series.windows = W;
  series.steps = S;
  series.models = M;
  auto alloc2 = [&](int m) { return std::vector<std::vector<double>>(M, std::vector<double>(W * S, 0.0)); };
  series.raw = alloc2(M);
  series.eff = alloc2(M);
  series.applied_psi = alloc2(M);
  series.completion.assign(M, std::vector<char>(W * S, 0));
  series.changed.assign(M, std::vector<char>(W * S, 0));

  std::vector<double> spill_pool(M, 0.0);
  std::array<uint32_t, kMaxModels> prev_mask{};
  bool have_prev = false;
  for (int w = 0; w < W; ++w) {
    PlanContext ctx{&sc, w, std::nullopt};
    Tables t = Tables::build(ctx);
    const auto& seq = plans[w].seq;
    if (static_cast<int>(seq.allocations.size()) != S) fail("input.plan", "plan length != window size");
    std::vector<StepView> views;
    views.reserve(S);
    for (const auto& a : seq.allocations) views.push_back(resolve_step(t, a));
    std::array<int, kMaxModels> finish_after{};
    for (int m = 0; m < M; ++m) {
      finish_after[m] = INT_MAX;
      for (int s = S - 1; s >= 0; --s)
        if (views[s].retrain_size[m] > 0) { finish_after[m] = s + 1; break; }
    }
    for (int s = 0; s < S; ++s) {
      int g = w * S + s;
      for (int m = 0; m < M; ++m) {
        double raw = views[s].infer_cap[m];
        bool changed = have_prev && views[s].infer_mask[m] != prev_mask[m];
        if (s > 0) changed = views[s].infer_mask[m] != views[s - 1].infer_mask[m];
        if (changed) {
          double psi = t.psi[m];
          auto it = plans[w].overrides.find({m, s});
          if (it != plans[w].overrides.end()) psi = it->second;
          spill_pool[m] += psi;
          series.applied_psi[m][g] = psi;
        }
        double consumed = spill_pool[m] < 1.0 ? spill_pool[m] : 1.0;
        spill_pool[m] -= consumed;
        series.raw[m][g] = raw;
        series.eff[m][g] = effective_capability(raw, consumed);
        series.completion[m][g] = s >= finish_after[m] ? 1 : 0;
        series.changed[m][g] = changed ? 1 : 0;
      }
      prev_mask = views[s].infer_mask;
      have_prev = true;
    }
  }
  return series;
}

inline Metrics assemble(const Scenario& sc, const std::vector<WindowMetrics>& windows) {
  Metrics metrics;
  metrics.windows = windows;
  const int M = static_cast<int>(sc.models.size());
  metrics.jobs.assign(M, {});
  for (int m = 0; m < M; ++m) metrics.jobs[m].model = sc.models[m].profile.name;
  for (const auto& w : windows) {
    for (int m = 0; m < M; ++m) {
      auto& total = metrics.jobs[m];
      const auto& j = w.jobs[m];
      total.received += j.received;
      total.served += j.served;
      total.timely += j.timely;
      total.correct += j.correct;
      total.valid += j.valid;
      total.dropped += j.dropped;
      total.queued_at_end += j.queued_at_end;
      total.reconfigurations += j.reconfigurations;
      total.overhead_seconds += j.overhead_seconds;
    }
  }
  for (auto& j : metrics.jobs) {
    finalize_fractions(j);
    metrics.total_received += j.received;
    metrics.total_valid += j.valid;
    metrics.reconfiguration_count += j.reconfigurations;
    metrics.total_overhead_seconds += j.overhead_seconds;
  }
  metrics.system_goodput = metrics.total_received > 0 ? metrics.total_valid / metrics.total_received : 1.0;
  return metrics;
}

}  // namespace detail_sim

// ---------------------------------------------------------------------------
// Fluid mode: per-step expected-value arithmetic. With oracle forecasts and
// psi <= 1 the per-window valid counts equal evaluate_plan's PlanScore.total.

inline Metrics run_fluid(const Scenario& sc, const std::vector<EffectivePlan>& plans) {
  detail_sim::Series series = detail_sim::build_series(sc, plans);
  const int M = series.models, S = series.steps;
  std::vector<WindowMetrics> windows;
  for (int w = 0; w < series.windows; ++w) {
    WindowMetrics wm;
    wm.window = w;
    wm.jobs.assign(M, {});
    for (int m = 0; m < M; ++m) wm.jobs[m].model = sc.models[m].profile.name;
    for (int s = 0; s < S; ++s) {
      int g = w * S + s;
      for (int m = 0; m < M; ++m) {
        auto& j = wm.jobs[m];
        double recv = static_cast<double>(sc.trace.counts[m][g]);
        double thr = step_throughput(recv, series.eff[m][g]);
        double acc = series.completion[m][g] ? sc.models[m].retraining.accuracy_post[w]
                                             : sc.models[m].retraining.accuracy_pre[w];
        j.received += recv;
        j.served += thr;
        j.timely += thr;  // anything served within the step met its deadline in the fluid approximation
        j.correct += thr * acc;
        j.valid += thr * acc;
        if (series.changed[m][g]) {
          j.reconfigurations += 1;
          j.overhead_seconds += series.applied_psi[m][g] * sc.step_seconds;
        }
      }
    }
    for (auto& j : wm.jobs) detail_sim::finalize_fractions(j);
    windows.push_back(std::move(wm));
  }
  return detail_sim::assemble(sc, windows);
}

// ---------------------------------------------------------------------------
// Request mode: per-model FIFO queue, sub-step completion times, deadline
// drops, and seeded per-request correctness draws.

inline Metrics run_requests(const Scenario& sc, const std::vector<EffectivePlan>& plans, uint64_t seed) {
  detail_sim::Series series = detail_sim::build_series(sc, plans);
  const int M = series.models, S = series.steps;
  const double g_len = sc.step_seconds;

  struct Pending {
    double arrival;   // seconds
    double deadline;  // seconds
  };
  std::vector<std::deque<Pending>> queues(M);
  std::vector<std::mt19937_64> rng;
  for (int m = 0; m < M; ++m) {
    rng.emplace_back(seed * 0x9e3779b97f4a7c15ull + 0x517cc1b727220a95ull * (m + 1));
    rng.back().discard(64);  // decorrelate the early outputs of nearby seeds
  }
  auto draw = [&](int m) { return static_cast<double>(rng[m]() >> 11) * 0x1.0p-53; };

  std::vector<WindowMetrics> windows;
  for (int w = 0; w < series.windows; ++w) {
    WindowMetrics wm;
    wm.window = w;
    wm.jobs.assign(M, {});
    for (int m = 0; m < M; ++m) wm.jobs[m].model = sc.models[m].profile.name;
    for (int s = 0; s < S; ++s) {
      int g = w * S + s;
      double now = static_cast<double>(g) * g_len;
      for (int m = 0; m < M; ++m) {
        auto& j = wm.jobs[m];
        double slo = slo_target(sc.models[m].profile);
        // arrivals enter the queue at the step start
        long long arriving = sc.trace.counts[m][g];
        j.received += static_cast<double>(arriving);
        for (long long i = 0; i < arriving; ++i) queues[m].push_back({now, now + slo});
        // lapsed deadlines drop out before service
        while (!queues[m].empty() && queues[m].front().deadline < now) {
          queues[m].pop_front();
          j.dropped += 1.0;
        }
        double cap = series.eff[m][g];
        long long n = static_cast<long long>(cap + 1e-9);
        double acc = series.completion[m][g] ? sc.models[m].retraining.accuracy_post[w]
                                             : sc.models[m].retraining.accuracy_pre[w];
        for (long long k = 1; k <= n && !queues[m].empty(); ++k) {
          Pending req = queues[m].front();
          queues[m].pop_front();
          double completion_time = now + static_cast<double>(k) * g_len / cap;
          bool timely = completion_time <= req.deadline + 1e-12;
          bool correct = draw(m) < acc;
          j.served += 1.0;
          if (timely) j.timely += 1.0;
          if (correct) j.correct += 1.0;
          if (timely && correct) j.valid += 1.0;
        }
        if (series.changed[m][g]) {
          j.reconfigurations += 1;
          j.overhead_seconds += series.applied_psi[m][g] * g_len;
        }
      }
    }
    // window totals close with whatever is still queued at the horizon end
    if (w == series.windows - 1)
      for (int m = 0; m < M; ++m) wm.jobs[m].queued_at_end = static_cast<double>(queues[m].size());
    for (auto& j : wm.jobs) detail_sim::finalize_fractions(j);
    windows.push_back(std::move(wm));
  }
  return detail_sim::assemble(sc, windows);
}

// ---------------------------------------------------------------------------
// Reports: a structured text document plus the flat plot-ready table
// `window,model,goodput,slo,acc,reconfigs`.

inline std::string goodput_report(const Metrics& metrics, const std::string& mode) {
  std::ostringstream out;
  out << "# goodput report (" << mode << " mode)\n";
  out << "jobs " << metrics.jobs.size() << "\n";
  out << "windows " << metrics.windows.size() << "\n";
  for (const auto& j : metrics.jobs) {
    out << "job " << j.model << " received " << fmt_real(j.received) << " served " << fmt_real(j.served)
        << " valid " << fmt_real(j.valid) << " goodput " << fmt_real(j.goodput) << " slo "
        << fmt_real(j.slo_attainment) << " accuracy " << fmt_real(j.accuracy) << " reconfigurations "
        << j.reconfigurations << " overhead_seconds " << fmt_real(j.overhead_seconds) << "\n";
  }
  out << "system goodput " << fmt_real(metrics.system_goodput) << " valid " << fmt_real(metrics.total_valid)
      << " received " << fmt_real(metrics.total_received) << " reconfigurations "
      << metrics.reconfiguration_count << " overhead_seconds " << fmt_real(metrics.total_overhead_seconds)
      << "\n";
  return out.str();
}

inline std::string goodput_table(const Metrics& metrics) {
  std::ostringstream out;
  out << "window,model,goodput,slo,acc,reconfigs\n";
  for (const auto& w : metrics.windows)
    for (const auto& j : w.jobs)
      out << w.window << "," << j.model << "," << fmt_real(j.goodput) << "," << fmt_real(j.slo_attainment)
          << "," << fmt_real(j.accuracy) << "," << j.reconfigurations << "\n";
  return out.str();
}

}  // namespace migsim
