// SPDX-License-Identifier: Apache-2.0
//
// Arrival forecasting for the next retraining window. Three reference
// predictors behind one call; the planner treats the forecast as opaque
// input, so prediction quality can be varied per experiment.
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "migsim/common.hpp"

namespace migsim {

// Predicted arrival counts, one per step of the horizon, [model][offset].
struct ArrivalForecast {
  std::vector<std::vector<long long>> counts;
};

enum class PredictorKind { Oracle, Persistence, Ewma };

struct PredictorSpec {
  PredictorKind kind = PredictorKind::Oracle;
  double alpha = 0.5;  // Ewma only

  std::string str() const {
    switch (kind) {
      case PredictorKind::Oracle: return "oracle";
      case PredictorKind::Persistence: return "persistence";
      case PredictorKind::Ewma: return "ewma:" + fmt_real(alpha);
    }
    return "?";
  }
};

// Accepts "oracle", "persistence", or "ewma:<alpha>".
inline PredictorSpec parse_predictor_spec(const std::string& text) {
  if (text == "oracle") return {PredictorKind::Oracle, 0.0};
  if (text == "persistence") return {PredictorKind::Persistence, 0.0};
  if (text.rfind("ewma:", 0) == 0) {
    double a = parse_real(text.substr(5), "predictor alpha");
    if (!(a > 0.0 && a <= 1.0)) fail("input.predictor", "ewma alpha must lie in (0,1], got " + fmt_real(a));
    return {PredictorKind::Ewma, a};
  }
  fail("input.predictor", "unknown predictor '" + text + "' (want oracle|persistence|ewma:<alpha>)");
}

// history: per-model arrival counts observed so far (a trace prefix whose
// length is a multiple of window_size). actual_next: the true next-window
// counts, consumed only by the oracle predictor.
inline ArrivalForecast predict_arrivals(const PredictorSpec& spec,
                                        const std::vector<std::vector<long long>>& history,
                                        int window_size, int horizon,
                                        const std::vector<std::vector<long long>>* actual_next = nullptr) {
  if (window_size < 1 || horizon < 1) fail("input.predictor", "window size and horizon must be positive");
  ArrivalForecast out;
  if (spec.kind == PredictorKind::Oracle) {
    if (!actual_next) fail("predictor.history", "oracle predictor needs the actual next-window counts");
    for (const auto& per_model : *actual_next) {
      if (static_cast<int>(per_model.size()) != horizon)
        fail("input.predictor", "oracle counts length != horizon");
      out.counts.push_back(per_model);
    }
    return out;
  }

  for (const auto& per_model : history) {
    size_t full = per_model.size() / window_size;
    if (full < 1) fail("predictor.history", spec.str() + " needs at least one full prior window of history");
    std::vector<long long> fc(horizon, 0);
    if (spec.kind == PredictorKind::Persistence) {
      size_t base = (full - 1) * window_size;
      for (int ofs = 0; ofs < horizon; ++ofs) fc[ofs] = per_model[base + ofs % window_size];
    } else {
      if (!(spec.alpha > 0.0 && spec.alpha <= 1.0)) fail("input.predictor", "ewma alpha must lie in (0,1]");
      for (int ofs = 0; ofs < horizon; ++ofs) {
        int o = ofs % window_size;
        double e = static_cast<double>(per_model[o]);
        for (size_t w = 1; w < full; ++w)
          e = spec.alpha * static_cast<double>(per_model[w * window_size + o]) + (1.0 - spec.alpha) * e;
        fc[ofs] = std::llround(e);  // half rounds up for nonnegative values
      }
    }
    for (long long c : fc)
      if (c < 0) fail("predictor.negative", "forecast produced a negative count");
    out.counts.push_back(std::move(fc));
  }
  return out;
}

}  // namespace migsim
