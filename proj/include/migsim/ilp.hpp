// SPDX-License-Identifier: Apache-2.0
//
// The integer linear program over one retraining window: variables and
// linearized constraints for configuration selection, instance exclusivity,
// uninterrupted in-window retraining, deployment floors, reconfiguration
// detection, completion tracking, and the goodput objective. Emitted in the
// CPLEX-LP textual format for external MILP cross-checks.
//
// Variable and constraint creation order is deterministic and documented in
// docs/model.md together with the closed-form count.
#pragma once

#include <ostream>
#include <sstream>

#include "migsim/solvers.hpp"

namespace migsim {

struct ModelOptions {
  bool eq11_as_printed = false;  // reproduce the literal upper-bound-only reconfiguration constraint
};

struct PlanModel {
  struct Var {
    std::string name;
    char type = 'C';  // B binary, I general integer, C continuous (lb 0)
  };
  struct Term {
    double coef;
    int var;
  };
  struct Constraint {
    std::string name;
    std::vector<Term> terms;
    char sense = '<';  // '<' means <=, '>' means >=, '=' equality
    double rhs = 0.0;
  };

  static constexpr double kBigM = 10000.0;  // the helper constant H

  std::vector<Var> vars;
  std::vector<Constraint> constraints;
  std::vector<Term> objective;  // maximized
  int window = 0;

  size_t variable_count() const { return vars.size(); }
  size_t constraint_count() const { return constraints.size(); }
};

namespace detail_ilp {

class Builder {
 public:
  explicit Builder(PlanModel* model) : model_(model) {}

  int var(const std::string& name, char type) {
    model_->vars.push_back({name, type});
    return static_cast<int>(model_->vars.size()) - 1;
  }
  void con(const std::string& name, std::vector<PlanModel::Term> terms, char sense, double rhs) {
    model_->constraints.push_back({name, std::move(terms), sense, rhs});
  }
  // equality indicator: e = 1 iff lhs expression equals rhs expression, for
  // integer-valued expressions. Standard split |A-B| = d+ + d- with a sign
  // binary, then e = 1 <=> d+ + d- = 0.
  int equals(const std::string& stem, std::vector<PlanModel::Term> a_minus_b, double const_diff) {
    const double H = PlanModel::kBigM;
    int dp = var(stem + "P", 'I');
    int dm = var(stem + "M", 'I');
    int u = var(stem + "U", 'B');
    int e = var(stem, 'B');
    auto terms = std::move(a_minus_b);
    terms.push_back({-1.0, dp});
    terms.push_back({1.0, dm});
    con(stem + "_split", std::move(terms), '=', -const_diff);
    con(stem + "_sgnp", {{1.0, dp}, {-H, u}}, '<', 0.0);
    con(stem + "_sgnm", {{1.0, dm}, {H, u}}, '<', H);
    con(stem + "_zero", {{1.0, dp}, {1.0, dm}, {H, e}}, '<', H);
    con(stem + "_nonz", {{1.0, dp}, {1.0, dm}, {1.0, e}}, '>', 1.0);
    return e;
  }

 private:
  PlanModel* model_;
};

}  // namespace detail_ilp

inline PlanModel build_plan_model(const PlanContext& ctx, const ArrivalForecast& forecast,
                                  const ModelOptions& opt = {}) {
  using namespace engine;
  throw_if_infeasible(precheck_scenario(ctx));
  Tables t = Tables::build(ctx);
  const Catalog& cat = ctx.scenario->catalog;
  const int S = t.steps;
  const int M = t.models;
  const int C = static_cast<int>(cat.configurations.size());
  const double H = PlanModel::kBigM;
  for (int m = 0; m < M; ++m)
    if (static_cast<int>(forecast.counts.at(m).size()) != S)
      fail("input.forecast", "forecast horizon != window size");

  PlanModel model;
  model.window = ctx.window;
  detail_ilp::Builder b(&model);

  auto task_code = [&](int m, bool retraining) { return "m" + std::to_string(m) + (retraining ? "r" : "i"); };
  auto sfx = [&](int s) { return "_s" + std::to_string(s); };

  // per-model capability upper bound: the best single-configuration sum
  std::array<double, kMaxModels> cap_ub{};
  for (int c = 0; c < C; ++c) {
    for (int m = 0; m < M; ++m) {
      double sum = 0.0;
      for (const auto& slot : cat.configurations[c].slots) sum += t.cap_by_size[m][slot.size];
      cap_ub[m] = std::max(cap_ub[m], sum);
    }
  }

  bool has_initial = false;
  auto init_mask = initial_masks(t, ctx, &has_initial);
  // initial Y/N constants per inference task, for step-0 reconfig detection
  std::array<int, kMaxModels> init_y{}, init_n{};
  if (has_initial) {
    for (int m = 0; m < M; ++m) {
      if (init_mask[m] == kForeignMask) { init_y[m] = -1; init_n[m] = -1; continue; }
      for (size_t uid = 0; uid < t.universe.slots.size(); ++uid)
        if (init_mask[m] & (1u << uid)) {
          init_y[m] += t.universe.slots[uid].second;
          init_n[m] += 1;
        }
    }
  }

  // ---- variables -----------------------------------------------------------
  // X[t][c][j][s]
  std::vector<std::vector<std::vector<std::vector<int>>>> X(2 * M);
  for (int tt = 0; tt < 2 * M; ++tt) {
    int m = tt / 2;
    bool retr = tt % 2 == 1;
    X[tt].resize(C);
    for (int c = 0; c < C; ++c) {
      int J = static_cast<int>(cat.configurations[c].slots.size());
      X[tt][c].resize(J);
      for (int j = 0; j < J; ++j)
        for (int s = 0; s < S; ++s)
          X[tt][c][j].push_back(b.var("X_" + task_code(m, retr) + "_c" + std::to_string(c) + "_g" + std::to_string(j) + sfx(s), 'B'));
    }
  }
  std::vector<std::vector<int>> F(C);
  for (int c = 0; c < C; ++c)
    for (int s = 0; s < S; ++s) F[c].push_back(b.var("F_c" + std::to_string(c) + sfx(s), 'B'));
  std::vector<std::vector<int>> N(2 * M), Y(2 * M);
  for (int tt = 0; tt < 2 * M; ++tt)
    for (int s = 0; s < S; ++s) {
      N[tt].push_back(b.var("N_" + task_code(tt / 2, tt % 2) + sfx(s), 'I'));
      Y[tt].push_back(b.var("Y_" + task_code(tt / 2, tt % 2) + sfx(s), 'I'));
    }
  std::vector<std::vector<int>> Crun(M), Zs(M);
  for (int m = 0; m < M; ++m)
    for (int s = 0; s < S; ++s) {
      Crun[m].push_back(b.var("CR_m" + std::to_string(m) + sfx(s), 'B'));
      Zs[m].push_back(b.var("ZS_m" + std::to_string(m) + sfx(s), 'B'));
    }
  // start variables indexed by (model, step, GPC count), only where the run fits
  std::vector<std::map<std::pair<int, int>, int>> Z(M);
  for (int m = 0; m < M; ++m)
    for (int s = 0; s < S; ++s)
      for (int k = 1; k <= 7; ++k) {
        long long rt = t.rt_by_size[m][k];
        if (rt >= 1 && s + rt <= S)
          Z[m][{s, k}] = b.var("Z_m" + std::to_string(m) + sfx(s) + "_k" + std::to_string(k), 'B');
      }

  // ---- constraints ----------------------------------------------------------
  // Formula 2: configuration occupancy and uniqueness
  for (int s = 0; s < S; ++s) {
    for (int c = 0; c < C; ++c) {
      std::vector<PlanModel::Term> sum;
      int J = static_cast<int>(cat.configurations[c].slots.size());
      for (int tt = 0; tt < 2 * M; ++tt)
        for (int j = 0; j < J; ++j) sum.push_back({1.0, X[tt][c][j][s]});
      auto lo = sum;
      lo.push_back({-1.0 * H, F[c][s]});  // (1/H)*sum <= F  <=>  sum - H*F <= 0
      b.con("cfglo_c" + std::to_string(c) + sfx(s), std::move(lo), '<', 0.0);
      auto hi = sum;
      for (auto& term : hi) term.coef = -1.0;
      hi.push_back({1.0, F[c][s]});  // F <= sum
      b.con("cfghi_c" + std::to_string(c) + sfx(s), std::move(hi), '<', 0.0);
    }
    std::vector<PlanModel::Term> one;
    for (int c = 0; c < C; ++c) one.push_back({1.0, F[c][s]});
    b.con("onecfg" + sfx(s), std::move(one), '=', 1.0);
  }
  // Formula 3: no instance sharing
  for (int c = 0; c < C; ++c) {
    int J = static_cast<int>(cat.configurations[c].slots.size());
    for (int j = 0; j < J; ++j)
      for (int s = 0; s < S; ++s) {
        std::vector<PlanModel::Term> sum;
        for (int tt = 0; tt < 2 * M; ++tt) sum.push_back({1.0, X[tt][c][j][s]});
        b.con("noshare_c" + std::to_string(c) + "_g" + std::to_string(j) + sfx(s), std::move(sum), '<', 1.0);
      }
  }
  // N and Y definitions
  for (int tt = 0; tt < 2 * M; ++tt)
    for (int s = 0; s < S; ++s) {
      std::vector<PlanModel::Term> n{{1.0, N[tt][s]}}, y{{1.0, Y[tt][s]}};
      for (int c = 0; c < C; ++c) {
        int J = static_cast<int>(cat.configurations[c].slots.size());
        for (int j = 0; j < J; ++j) {
          n.push_back({-1.0, X[tt][c][j][s]});
          y.push_back({-static_cast<double>(cat.configurations[c].slots[j].size), X[tt][c][j][s]});
        }
      }
      b.con("ndef_" + task_code(tt / 2, tt % 2) + sfx(s), std::move(n), '=', 0.0);
      b.con("ydef_" + task_code(tt / 2, tt % 2) + sfx(s), std::move(y), '=', 0.0);
    }
  // Formula 4: single instance, running status, starts, no interruption
  std::vector<std::vector<int>> Q(M);  // equal-GPC indicators for the retraining task, s >= 1
  for (int m = 0; m < M; ++m) {
    int rr = 2 * m + 1;
    for (int s = 0; s < S; ++s) {
      b.con("nret1_m" + std::to_string(m) + sfx(s), {{1.0, N[rr][s]}}, '<', 1.0);
      b.con("crunhi_m" + std::to_string(m) + sfx(s), {{1.0, Crun[m][s]}, {-1.0, N[rr][s]}}, '<', 0.0);
      b.con("crunlo_m" + std::to_string(m) + sfx(s), {{1.0, Crun[m][s]}, {-1.0 / H, N[rr][s]}}, '>', 0.0);
      // start indicator from C-transitions
      if (s == 0) {
        b.con("zslo_m" + std::to_string(m) + sfx(s), {{1.0, Zs[m][0]}, {-1.0, Crun[m][0]}}, '>', 0.0);
        b.con("zshi_m" + std::to_string(m) + sfx(s), {{1.0, Zs[m][0]}, {-1.0, Crun[m][0]}}, '<', 0.0);
      } else {
        b.con("zslo_m" + std::to_string(m) + sfx(s),
              {{1.0, Zs[m][s]}, {-1.0, Crun[m][s]}, {1.0, Crun[m][s - 1]}}, '>', 0.0);
        b.con("zshi1_m" + std::to_string(m) + sfx(s), {{1.0, Zs[m][s]}, {-1.0, Crun[m][s]}}, '<', 0.0);
        b.con("zshi2_m" + std::to_string(m) + sfx(s), {{1.0, Zs[m][s]}, {1.0, Crun[m][s - 1]}}, '<', 1.0);
      }
      // z decomposition by GPC count
      std::vector<PlanModel::Term> zsum{{-1.0, Zs[m][s]}};
      for (int k = 1; k <= 7; ++k) {
        auto it = Z[m].find({s, k});
        if (it != Z[m].end()) zsum.push_back({1.0, it->second});
      }
      b.con("zsum_m" + std::to_string(m) + sfx(s), std::move(zsum), '=', 0.0);
    }
    // launched exactly once, with completion inside the window by construction
    std::vector<PlanModel::Term> launch;
    for (int s = 0; s < S; ++s) launch.push_back({1.0, Zs[m][s]});
    b.con("launch_m" + std::to_string(m), std::move(launch), '=', 1.0);
    // equal-GPC chain variables for the retraining task
    detail_ilp::Builder bb(&model);
    for (int s = 1; s < S; ++s) {
      int q = bb.equals("QE_m" + std::to_string(m) + sfx(s),
                        {{1.0, Y[rr][s - 1]}, {-1.0, Y[rr][s]}}, 0.0);
      Q[m].push_back(q);
    }
    for (auto& [sk, zvar] : Z[m]) {
      auto [s, k] = sk;
      long long rt = t.rt_by_size[m][k];
      // z = 1 forces Y at the start step to k
      b.con("zyhi_m" + std::to_string(m) + sfx(s) + "_k" + std::to_string(k),
            {{1.0, Y[rr][s]}, {H, zvar}}, '<', H + k);
      b.con("zylo_m" + std::to_string(m) + sfx(s) + "_k" + std::to_string(k),
            {{1.0, Y[rr][s]}, {-H, zvar}}, '>', k - H);
      // and the GPC count stays equal across the run's interior
      if (rt > 1) {
        std::vector<PlanModel::Term> chain;
        for (int w = s + 1; w <= s + static_cast<int>(rt) - 1; ++w) chain.push_back({1.0, Q[m][w - 1]});
        chain.push_back({-(static_cast<double>(rt) - 1.0), zvar});
        b.con("nointr_m" + std::to_string(m) + sfx(s) + "_k" + std::to_string(k), std::move(chain), '>', 0.0);
      }
    }
    // total running time equals the chosen retraining time
    std::vector<PlanModel::Term> csum;
    for (int s = 0; s < S; ++s) csum.push_back({1.0, Crun[m][s]});
    for (auto& [sk, zvar] : Z[m]) csum.push_back({-static_cast<double>(t.rt_by_size[m][sk.second]), zvar});
    b.con("csum_m" + std::to_string(m), std::move(csum), '=', 0.0);
  }
  // Eq. 12: finish indicators and completion status
  std::vector<std::vector<int>> Kf(M), Comp(M);
  for (int m = 0; m < M; ++m) {
    for (int s = 1; s < S; ++s) Kf[m].push_back(b.var("KF_m" + std::to_string(m) + sfx(s), 'B'));
    for (int s = 0; s < S; ++s) Comp[m].push_back(b.var("CP_m" + std::to_string(m) + sfx(s), 'B'));
    b.con("comp0_m" + std::to_string(m), {{1.0, Comp[m][0]}}, '=', 0.0);
    for (int s = 1; s < S; ++s) {
      int kf = Kf[m][s - 1];
      b.con("kflo_m" + std::to_string(m) + sfx(s), {{1.0, kf}, {-1.0, Crun[m][s - 1]}, {1.0, Crun[m][s]}}, '>', 0.0);
      b.con("kfhi1_m" + std::to_string(m) + sfx(s), {{1.0, kf}, {-1.0, Crun[m][s - 1]}}, '<', 0.0);
      b.con("kfhi2_m" + std::to_string(m) + sfx(s), {{1.0, kf}, {1.0, Crun[m][s]}}, '<', 1.0);
      b.con("cmono_m" + std::to_string(m) + sfx(s), {{1.0, Comp[m][s]}, {-1.0, Comp[m][s - 1]}}, '>', 0.0);
      b.con("ck_m" + std::to_string(m) + sfx(s), {{1.0, Comp[m][s]}, {-1.0, kf}}, '>', 0.0);
      b.con("chi_m" + std::to_string(m) + sfx(s), {{1.0, Comp[m][s]}, {-1.0, Comp[m][s - 1]}, {-1.0, kf}}, '<', 0.0);
    }
  }
  // Formula 6: deployment floor, strengthened single-anchor form plus the
  // literal GPC-sum form for reference
  for (int m = 0; m < M; ++m) {
    int ii = 2 * m;
    for (int s = 0; s < S; ++s) {
      std::vector<PlanModel::Term> anchors;
      for (int c = 0; c < C; ++c) {
        int J = static_cast<int>(cat.configurations[c].slots.size());
        for (int j = 0; j < J; ++j)
          if (cat.configurations[c].slots[j].size >= t.floor_gpcs[m]) anchors.push_back({1.0, X[ii][c][j][s]});
      }
      b.con("floor_m" + std::to_string(m) + sfx(s), std::move(anchors), '>', 1.0);
      b.con("floorsum_m" + std::to_string(m) + sfx(s), {{1.0, Y[ii][s]}}, '>', t.floor_gpcs[m]);
    }
  }
  // Eq. 11: reconfiguration detection for inference tasks
  std::vector<std::map<int, int>> R(M);
  for (int m = 0; m < M; ++m) {
    int ii = 2 * m;
    detail_ilp::Builder bb(&model);
    for (int s = has_initial ? 0 : 1; s < S; ++s) {
      int eq_y, eq_n;
      if (s == 0) {
        if (init_y[m] < 0) continue;  // unknown previous shape: skip step-0 detection
        eq_y = bb.equals("YE_m" + std::to_string(m) + sfx(s), {{-1.0, Y[ii][0]}}, static_cast<double>(init_y[m]));
        eq_n = bb.equals("NE_m" + std::to_string(m) + sfx(s), {{-1.0, N[ii][0]}}, static_cast<double>(init_n[m]));
      } else {
        eq_y = bb.equals("YE_m" + std::to_string(m) + sfx(s), {{1.0, Y[ii][s - 1]}, {-1.0, Y[ii][s]}}, 0.0);
        eq_n = bb.equals("NE_m" + std::to_string(m) + sfx(s), {{1.0, N[ii][s - 1]}, {-1.0, N[ii][s]}}, 0.0);
      }
      int r = b.var("R_m" + std::to_string(m) + sfx(s), 'B');
      R[m][s] = r;
      if (opt.eq11_as_printed) {
        // literal printed form: an upper bound only, so the optimizer may
        // always choose R = 0 (kept for study behind a flag)
        b.con("rprinted_m" + std::to_string(m) + sfx(s), {{1.0, r}, {-1.0, eq_y}, {-1.0, eq_n}}, '<', 0.0);
      } else {
        b.con("rlo1_m" + std::to_string(m) + sfx(s), {{1.0, r}, {1.0, eq_y}}, '>', 1.0);
        b.con("rlo2_m" + std::to_string(m) + sfx(s), {{1.0, r}, {1.0, eq_n}}, '>', 1.0);
        b.con("rhi_m" + std::to_string(m) + sfx(s), {{1.0, r}, {1.0, eq_y}, {1.0, eq_n}}, '<', 2.0);
      }
    }
  }
  // Objective machinery: raw capability, overhead product, throughput minimum,
  // completion-weighted throughput
  for (int m = 0; m < M; ++m) {
    int ii = 2 * m;
    for (int s = 0; s < S; ++s) {
      double recv = static_cast<double>(forecast.counts[m][s]);
      int P = b.var("PC_m" + std::to_string(m) + sfx(s), 'C');
      std::vector<PlanModel::Term> pdef{{1.0, P}};
      for (int c = 0; c < C; ++c) {
        int J = static_cast<int>(cat.configurations[c].slots.size());
        for (int j = 0; j < J; ++j)
          pdef.push_back({-t.cap_by_size[m][cat.configurations[c].slots[j].size], X[ii][c][j][s]});
      }
      b.con("pdef_m" + std::to_string(m) + sfx(s), std::move(pdef), '=', 0.0);

      int W = -1;
      auto rit = R[m].find(s);
      if (rit != R[m].end() && t.loss_frac[m] > 0.0) {
        W = b.var("W_m" + std::to_string(m) + sfx(s), 'C');
        b.con("whi1_m" + std::to_string(m) + sfx(s), {{1.0, W}, {-1.0, P}}, '<', 0.0);
        b.con("whi2_m" + std::to_string(m) + sfx(s), {{1.0, W}, {-cap_ub[m], rit->second}}, '<', 0.0);
        b.con("wlo_m" + std::to_string(m) + sfx(s), {{1.0, W}, {-1.0, P}, {-cap_ub[m], rit->second}}, '>', -cap_ub[m]);
      }
      int T = b.var("T_m" + std::to_string(m) + sfx(s), 'C');
      int Bm = b.var("TB_m" + std::to_string(m) + sfx(s), 'B');
      b.con("trecv_m" + std::to_string(m) + sfx(s), {{1.0, T}}, '<', recv);
      {
        std::vector<PlanModel::Term> tcap{{1.0, T}, {-1.0, P}};
        if (W >= 0) tcap.push_back({t.loss_frac[m], W});
        b.con("tcap_m" + std::to_string(m) + sfx(s), std::move(tcap), '<', 0.0);
      }
      b.con("tmin1_m" + std::to_string(m) + sfx(s), {{1.0, T}, {H, Bm}}, '>', recv);
      {
        std::vector<PlanModel::Term> tmin{{1.0, T}, {-1.0, P}, {-H, Bm}};
        if (W >= 0) tmin.push_back({t.loss_frac[m], W});
        b.con("tmin2_m" + std::to_string(m) + sfx(s), std::move(tmin), '>', -H);
      }
      int V = b.var("V_m" + std::to_string(m) + sfx(s), 'C');
      b.con("vhi1_m" + std::to_string(m) + sfx(s), {{1.0, V}, {-1.0, T}}, '<', 0.0);
      b.con("vhi2_m" + std::to_string(m) + sfx(s), {{1.0, V}, {-recv, Comp[m][s]}}, '<', 0.0);
      b.con("vlo_m" + std::to_string(m) + sfx(s), {{1.0, V}, {-1.0, T}, {-recv, Comp[m][s]}}, '>', -recv);
      model.objective.push_back({t.acc_pre[m], T});
      model.objective.push_back({t.acc_post[m] - t.acc_pre[m], V});
    }
  }
  return model;
}

// ---------------------------------------------------------------------------
// CPLEX-LP emission. Grammar documented in docs/formats.md.

namespace detail_ilp {
inline void write_terms(std::ostream& out, const PlanModel& model, const std::vector<PlanModel::Term>& terms) {
  bool first = true;
  int col = 0;
  for (const auto& term : terms) {
    if (term.coef == 0.0) continue;
    std::string piece;
    double c = term.coef;
    if (first) {
      if (c < 0) piece += "- ";
    } else {
      piece += c < 0 ? "- " : "+ ";
    }
    double a = c < 0 ? -c : c;
    if (a != 1.0) piece += fmt_real(a) + " ";
    piece += model.vars[term.var].name;
    if (col + static_cast<int>(piece.size()) > 230) {
      out << "\n   ";
      col = 3;
    }
    out << piece << " ";
    col += static_cast<int>(piece.size()) + 1;
    first = false;
  }
  if (first) out << "0 ";  // empty expression guard
}
}  // namespace detail_ilp

inline void emit_lp(const PlanModel& model, std::ostream& out) {
  out << "\\ goodput maximization, window " << model.window << "\n";
  out << "\\ variables " << model.variable_count() << " constraints " << model.constraint_count() << "\n";
  out << "Maximize\n obj: ";
  detail_ilp::write_terms(out, model, model.objective);
  out << "\nSubject To\n";
  for (const auto& con : model.constraints) {
    out << " " << con.name << ": ";
    detail_ilp::write_terms(out, model, con.terms);
    out << (con.sense == '<' ? "<= " : con.sense == '>' ? ">= " : "= ") << fmt_real(con.rhs) << "\n";
  }
  out << "Bounds\n";
  for (const auto& v : model.vars)
    if (v.type == 'C') out << " " << v.name << " >= 0\n";
  out << "Binaries\n";
  int col = 0;
  for (const auto& v : model.vars) {
    if (v.type != 'B') continue;
    if (col + static_cast<int>(v.name.size()) > 230) { out << "\n"; col = 0; }
    out << " " << v.name;
    col += static_cast<int>(v.name.size()) + 1;
  }
  out << "\nGenerals\n";
  col = 0;
  for (const auto& v : model.vars) {
    if (v.type != 'I') continue;
    if (col + static_cast<int>(v.name.size()) > 230) { out << "\n"; col = 0; }
    out << " " << v.name;
    col += static_cast<int>(v.name.size()) + 1;
  }
  out << "\nEnd\n";
}

inline std::string emit_lp_string(const PlanModel& model) {
  std::ostringstream out;
  emit_lp(model, out);
  return out.str();
}

// ---------------------------------------------------------------------------
// LP grammar validator for the emitted subset: section order, token shapes,
// one relation per constraint, declared binaries/generals actually used.
// Returns human-readable problems; empty means the document passes.

inline std::vector<std::string> lp_validate(const std::string& text) {
  std::vector<std::string> errors;
  auto is_name = [](std::string_view tok) {
    if (tok.empty()) return false;
    char c0 = tok[0];
    if (!std::isalpha(static_cast<unsigned char>(c0)) && c0 != '_') return false;
    if (c0 == 'e' || c0 == 'E') return false;  // avoid exponent ambiguity
    for (char ch : tok)
      if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') return false;
    return true;
  };
  auto is_number = [](std::string_view tok) {
    if (tok.empty()) return false;
    char* end = nullptr;
    std::string buf(tok);
    std::strtod(buf.c_str(), &end);
    return end == buf.c_str() + buf.size();
  };

  std::istringstream in(text);
  std::string line;
  enum Section { None, Objective, Constraints, Bounds, Binaries, Generals, Done } section = None;
  std::set<std::string> used_names, declared_int;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = trim(line);
    if (body.empty() || body[0] == '\\') continue;
    auto at = [&](const std::string& msg) { errors.push_back("line " + std::to_string(lineno) + ": " + msg); };
    if (body == "Maximize" || body == "Minimize") {
      if (section != None) at("objective section out of order");
      section = Objective;
      continue;
    }
    if (body == "Subject To") { section = Constraints; continue; }
    if (body == "Bounds") { section = Bounds; continue; }
    if (body == "Binaries") { section = Binaries; continue; }
    if (body == "Generals") { section = Generals; continue; }
    if (body == "End") { section = Done; continue; }
    if (section == Done) at("content after End");

    if (section == Objective || section == Constraints) {
      std::string merged(body);
      // labels: "name:" prefix
      auto colon = merged.find(':');
      if (colon != std::string::npos) {
        std::string label = std::string(trim(merged.substr(0, colon)));
        if (!is_name(label)) at("bad label '" + label + "'");
        merged = merged.substr(colon + 1);
      } else if (section == Constraints) {
        // continuation line of a wrapped expression; tokens only
      }
      int relations = 0;
      for (auto tok : tokens(merged)) {
        if (tok == "+" || tok == "-") continue;
        if (tok == "<=" || tok == ">=" || tok == "=") { ++relations; continue; }
        if (is_number(tok)) continue;
        if (is_name(tok)) { used_names.insert(std::string(tok)); continue; }
        at("bad token '" + std::string(tok) + "'");
      }
      if (section == Constraints && colon != std::string::npos && relations != 1) {
        // wrapped lines carry the relation on the final fragment; only flag
        // labeled single-line constraints without exactly one relation when
        // they end in a number
        auto toks = tokens(merged);
        if (relations > 1) at("multiple relations in one constraint");
      }
    } else if (section == Bounds) {
      for (auto tok : tokens(body)) {
        if (tok == "<=" || tok == ">=" || tok == "=") continue;
        if (is_number(tok)) continue;
        if (is_name(tok)) { used_names.insert(std::string(tok)); continue; }
        at("bad bound token '" + std::string(tok) + "'");
      }
    } else if (section == Binaries || section == Generals) {
      for (auto tok : tokens(body)) {
        if (!is_name(tok)) at("bad name '" + std::string(tok) + "'");
        else declared_int.insert(std::string(tok));
      }
    } else if (section == None) {
      at("content before the objective section");
    }
  }
  if (section != Done) errors.push_back("missing End");
  for (const auto& name : declared_int)
    if (!used_names.count(name)) errors.push_back("declared integer '" + name + "' never used");
  return errors;
}

}  // namespace migsim
