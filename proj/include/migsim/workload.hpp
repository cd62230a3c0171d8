// SPDX-License-Identifier: Apache-2.0
//
// Scenario model: per-model profiles and retraining specs, inference traces,
// window structure, the scenario/trace file formats, and the granularity
// rescale that converts everything onto an integral step axis.
#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "migsim/catalog.hpp"
#include "migsim/common.hpp"

namespace migsim {

struct ModelProfile {
  std::string name;
  double gflops = 0.0;              // for the compute-proportional baseline
  int min_deploy_gpcs = 1;          // L: smallest single instance the model fits in
  std::map<int, double> capability; // instance size -> requests per second
  double latency_full = 0.0;        // seconds per request on the full device
  double reconfig_overhead = 0.0;   // psi, seconds lost when the task's instances change

  double capability_for(int size) const {
    auto it = capability.find(size);
    return it == capability.end() ? 0.0 : it->second;
  }
};

struct RetrainingSpec {
  long long data_volume = 0;             // samples per window
  std::map<int, long long> rt_table;     // instance size -> whole seconds to retrain
  std::vector<double> accuracy_pre;      // one entry per window
  std::vector<double> accuracy_post;     // one entry per window
};

struct ModelEntry {
  ModelProfile profile;
  RetrainingSpec retraining;
};

// Arrival counts, one integer per second, length window_size * window_count,
// indexed [model][second] in scenario model order.
struct InferenceTrace {
  std::vector<std::vector<long long>> counts;
};

struct Scenario {
  Catalog catalog;
  std::vector<ModelEntry> models;
  InferenceTrace trace;
  int window_size = 200;   // S, in steps (seconds when granularity == 1)
  int window_count = 1;
  double step_seconds = 1.0;  // wall-clock length of one step

  int horizon() const { return window_size * window_count; }
  int model_index(const std::string& name) const {
    for (size_t i = 0; i < models.size(); ++i)
      if (models[i].profile.name == name) return static_cast<int>(i);
    return -1;
  }
  std::vector<long long> window_arrivals(int model, int window) const {
    auto first = trace.counts[model].begin() + static_cast<long>(window) * window_size;
    return {first, first + window_size};
  }
};

// ---------------------------------------------------------------------------
// Derived quantities.

// Retraining runs roughly three passes over the data at inference speed:
// RT[k] = ceil(3 * volume / capability[k]), whole seconds to fit the
// integral planning axis.
inline std::map<int, long long> derive_rt_table(const ModelProfile& profile, long long volume) {
  if (volume <= 0) fail("input.scenario", "model '" + profile.name + "': data_volume must be positive");
  std::map<int, long long> rt;
  for (const auto& [size, cap] : profile.capability) {
    if (cap <= 0) fail("input.scenario", "model '" + profile.name + "': capability[" + std::to_string(size) + "] must be positive");
    rt[size] = static_cast<long long>(std::ceil(3.0 * static_cast<double>(volume) / cap));
  }
  return rt;
}

inline double slo_target(const ModelProfile& profile) {
  if (profile.latency_full <= 0) fail("input.scenario", "model '" + profile.name + "': latency_full must be positive");
  return 2.0 * profile.latency_full;
}

// ---------------------------------------------------------------------------
// Trace CSV: header `second,model,count`, one row per (second, model) pair,
// every pair exactly once, any row order.

inline InferenceTrace parse_trace_csv(std::istream& in, const std::vector<std::string>& model_names,
                                      int horizon, const std::string& source) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "second,model,count")
    fail("input.trace", source + ": expected header 'second,model,count'");
  InferenceTrace trace;
  trace.counts.assign(model_names.size(), std::vector<long long>(horizon, -1));
  std::map<std::string, int> index;
  for (size_t i = 0; i < model_names.size(); ++i) index[model_names[i]] = static_cast<int>(i);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = trim(line);
    if (body.empty()) continue;
    auto parts = split(body, ',');
    const std::string where = source + ":" + std::to_string(lineno);
    if (parts.size() != 3) fail("input.trace", where + ": expected 'second,model,count'");
    long long second = parse_int(trim(parts[0]), where + " second");
    auto it = index.find(std::string(trim(parts[1])));
    if (it == index.end()) fail("input.trace", where + ": unknown model '" + std::string(trim(parts[1])) + "'");
    long long count = parse_int(trim(parts[2]), where + " count");
    if (count < 0) fail("input.trace", where + ": negative count");
    if (second < 0 || second >= horizon)
      fail("input.trace-length-mismatch", where + ": second " + std::to_string(second) +
                                              " outside horizon 0.." + std::to_string(horizon - 1));
    auto& cell = trace.counts[it->second][second];
    if (cell >= 0) fail("input.trace", where + ": duplicate row for (" + std::to_string(second) + ", " + std::string(trim(parts[1])) + ")");
    cell = count;
  }
  for (size_t m = 0; m < model_names.size(); ++m) {
    for (int s = 0; s < horizon; ++s) {
      if (trace.counts[m][s] < 0)
        fail("input.trace-length-mismatch", source + ": trace-length-mismatch: model '" + model_names[m] +
                                                "' missing second " + std::to_string(s) +
                                                " (want " + std::to_string(horizon) + " seconds)");
    }
  }
  return trace;
}

inline std::string trace_to_csv(const InferenceTrace& trace, const std::vector<std::string>& model_names) {
  std::ostringstream out;
  out << "second,model,count\n";
  if (trace.counts.empty()) return out.str();
  size_t horizon = trace.counts[0].size();
  for (size_t s = 0; s < horizon; ++s)
    for (size_t m = 0; m < model_names.size(); ++m)
      out << s << "," << model_names[m] << "," << trace.counts[m][s] << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Scenario file: sections [windows], [catalog], [models], [trace].
// Grammar in docs/formats.md. Rejections carry a field path.

namespace detail {

struct ScenarioDoc {
  int size = 200, count = 1;
  double granularity = 1.0;
  std::string catalog_file, trace_file;
  std::vector<std::string> model_order;
  std::map<std::string, std::map<std::string, std::string>> model_keys;
};

inline ScenarioDoc parse_scenario_doc(std::istream& in, const std::string& source) {
  ScenarioDoc doc;
  std::string line, section, current_model;
  bool saw_size = false, saw_count = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    if (body.front() == '[') {
      if (body.back() != ']') fail("input.scenario", where + ": malformed section header");
      section = std::string(body.substr(1, body.size() - 2));
      current_model.clear();
      if (section != "windows" && section != "catalog" && section != "models" && section != "trace")
        fail("input.scenario", where + ": unknown section '" + section + "'");
      continue;
    }
    auto toks = tokens(body);
    std::string key(toks[0]);
    auto rest = [&]() {
      std::string r;
      for (size_t i = 1; i < toks.size(); ++i) {
        if (i > 1) r += " ";
        r += std::string(toks[i]);
      }
      return r;
    };
    if (section == "windows") {
      if (toks.size() != 2) fail("input.scenario", where + ": windows." + key + ": expected one value");
      if (key == "size") { doc.size = static_cast<int>(parse_int(toks[1], "windows.size")); saw_size = true; }
      else if (key == "count") { doc.count = static_cast<int>(parse_int(toks[1], "windows.count")); saw_count = true; }
      else if (key == "granularity") doc.granularity = parse_real(toks[1], "windows.granularity");
      else fail("input.scenario", where + ": windows: unknown key '" + key + "'");
    } else if (section == "catalog") {
      if (key == "file" && toks.size() == 2) doc.catalog_file = std::string(toks[1]);
      else fail("input.scenario", where + ": catalog: unknown key '" + key + "'");
    } else if (section == "trace") {
      if (key == "file" && toks.size() == 2) doc.trace_file = std::string(toks[1]);
      else fail("input.scenario", where + ": trace: unknown key '" + key + "'");
    } else if (section == "models") {
      if (key == "model") {
        if (toks.size() != 2) fail("input.scenario", where + ": model declaration needs a name");
        current_model = std::string(toks[1]);
        if (doc.model_keys.count(current_model)) fail("input.scenario", where + ": duplicate model '" + current_model + "'");
        doc.model_order.push_back(current_model);
        doc.model_keys[current_model] = {};
      } else {
        if (current_model.empty()) fail("input.scenario", where + ": model key before any 'model' line");
        static const std::set<std::string> known = {"gflops", "min_deploy_gpcs", "latency_full", "reconfig_overhead",
                                                    "capability", "data_volume", "rt_table", "accuracy_pre", "accuracy_post"};
        if (!known.count(key)) fail("input.scenario", where + ": models[" + current_model + "]: unknown key '" + key + "'");
        if (doc.model_keys[current_model].count(key)) fail("input.scenario", where + ": models[" + current_model + "]: duplicate key '" + key + "'");
        doc.model_keys[current_model][key] = rest();
      }
    } else {
      fail("input.scenario", where + ": key outside any section");
    }
  }
  if (!saw_size || !saw_count) fail("input.scenario", source + ": windows.size and windows.count are required");
  if (doc.catalog_file.empty()) fail("input.scenario", source + ": catalog.file is required");
  if (doc.trace_file.empty()) fail("input.scenario", source + ": trace.file is required");
  if (doc.model_order.empty()) fail("input.scenario", source + ": at least one model is required");
  return doc;
}

inline std::map<int, double> parse_size_map_real(const std::string& text, const std::string& path) {
  std::map<int, double> out;
  for (auto tok : tokens(text)) {
    auto parts = split(tok, ':');
    if (parts.size() != 2) fail("input.scenario", path + ": expected '<size>:<value>' pairs");
    int k = static_cast<int>(parse_int(parts[0], path));
    if (out.count(k)) fail("input.scenario", path + ": duplicate size " + std::to_string(k));
    out[k] = parse_real(parts[1], path);
  }
  if (out.empty()) fail("input.scenario", path + ": empty map");
  return out;
}

inline std::vector<double> parse_real_list(const std::string& text, const std::string& path) {
  std::vector<double> out;
  for (auto tok : tokens(text)) out.push_back(parse_real(tok, path));
  if (out.empty()) fail("input.scenario", path + ": empty list");
  return out;
}

}  // namespace detail

// Validates everything the domain invariants require and applies the accuracy
// carry-over: window w+1's accuracy_pre defaults to window w's accuracy_post
// unless overridden.
inline Scenario finalize_scenario(Catalog catalog, std::vector<ModelEntry> models, InferenceTrace trace,
                                  int window_size, int window_count, double granularity) {
  if (window_size < 2) fail("input.scenario", "windows.size: must be >= 2");
  if (window_count < 1) fail("input.scenario", "windows.count: must be >= 1");
  if (granularity <= 0) fail("input.scenario", "windows.granularity: must be positive");
  double steps = static_cast<double>(window_size) / granularity;
  if (std::abs(steps - std::round(steps)) > 1e-9)
    fail("input.scenario", "windows.granularity: " + fmt_real(granularity) + " does not divide window size " + std::to_string(window_size));
  if (models.empty()) fail("input.scenario", "models: at least one model is required");

  Scenario sc;
  sc.catalog = std::move(catalog);
  sc.window_size = window_size;
  sc.window_count = window_count;
  sc.step_seconds = 1.0;

  auto catalog_sizes = sc.catalog.instance_sizes();
  for (auto& entry : models) {
    auto& p = entry.profile;
    const std::string path = "models[" + p.name + "]";
    if (p.gflops <= 0) fail("input.scenario", path + ".gflops: must be positive");
    if (p.min_deploy_gpcs < 1 || p.min_deploy_gpcs > sc.catalog.gpc_count)
      fail("input.scenario", path + ".min_deploy_gpcs: must be in 1.." + std::to_string(sc.catalog.gpc_count));
    if (p.latency_full <= 0) fail("input.scenario", path + ".latency_full: must be positive");
    if (p.reconfig_overhead < 0) fail("input.scenario", path + ".reconfig_overhead: must be >= 0");
    double prev_cap = 0.0;
    for (const auto& [k, v] : p.capability) {
      if (k < 1 || k > sc.catalog.gpc_count) fail("input.scenario", path + ".capability: size " + std::to_string(k) + " out of range");
      if (v < prev_cap) fail("input.scenario", path + ".capability: not nondecreasing at size " + std::to_string(k));
      prev_cap = v;
      if (k >= p.min_deploy_gpcs && v <= 0) fail("input.scenario", path + ".capability[" + std::to_string(k) + "]: must be positive for sizes >= min_deploy_gpcs");
    }
    for (int k : catalog_sizes) {
      if (k >= p.min_deploy_gpcs && !p.capability.count(k))
        fail("input.scenario", path + ".capability: missing catalog size " + std::to_string(k));
    }

    auto& r = entry.retraining;
    if (r.rt_table.empty()) r.rt_table = derive_rt_table(p, r.data_volume);
    long long prev_rt = -1;
    for (const auto& [k, v] : r.rt_table) {
      if (k < 1 || k > sc.catalog.gpc_count) fail("input.scenario", path + ".rt_table: size " + std::to_string(k) + " out of range");
      if (v < 1) fail("input.scenario", path + ".rt_table[" + std::to_string(k) + "]: must be >= 1 second");
      if (prev_rt >= 0 && v > prev_rt) fail("input.scenario", path + ".rt_table: not nonincreasing at size " + std::to_string(k));
      prev_rt = v;
    }
    auto check_frac = [&](const std::vector<double>& xs, const std::string& key) {
      for (double x : xs)
        if (x < 0.0 || x > 1.0) fail("input.scenario", path + "." + key + ": values must lie in [0,1]");
    };
    if (r.accuracy_pre.empty()) fail("input.scenario", path + ".accuracy_pre: required");
    if (r.accuracy_post.empty()) fail("input.scenario", path + ".accuracy_post: required");
    if (r.accuracy_post.size() == 1) r.accuracy_post.assign(window_count, r.accuracy_post[0]);
    if (static_cast<int>(r.accuracy_post.size()) != window_count)
      fail("input.scenario", path + ".accuracy_post: want 1 or " + std::to_string(window_count) + " values, got " + std::to_string(r.accuracy_post.size()));
    if (static_cast<int>(r.accuracy_pre.size()) > window_count)
      fail("input.scenario", path + ".accuracy_pre: more values than windows");
    check_frac(r.accuracy_pre, "accuracy_pre");
    check_frac(r.accuracy_post, "accuracy_post");
    for (int w = static_cast<int>(r.accuracy_pre.size()); w < window_count; ++w)
      r.accuracy_pre.push_back(r.accuracy_post[w - 1]);  // carry-over
  }
  sc.models = std::move(models);

  if (trace.counts.size() != sc.models.size())
    fail("input.trace-length-mismatch", "trace: model count mismatch");
  for (size_t m = 0; m < trace.counts.size(); ++m) {
    if (static_cast<int>(trace.counts[m].size()) != sc.horizon())
      fail("input.trace-length-mismatch", "trace-length-mismatch: model '" + sc.models[m].profile.name + "' has " +
                                              std::to_string(trace.counts[m].size()) + " seconds, want " + std::to_string(sc.horizon()));
    for (long long c : trace.counts[m])
      if (c < 0) fail("input.trace", "trace: negative count for model '" + sc.models[m].profile.name + "'");
  }
  sc.trace = std::move(trace);
  return sc;
}

inline Scenario rescale_scenario(const Scenario& in, double granularity);

// Loads and fully validates a scenario. The file's granularity (or the
// explicit override, when given) is applied before returning, so callers
// always see an integral step axis.
inline Scenario load_scenario(const std::string& path, std::optional<double> granularity_override = std::nullopt) {
  std::ifstream in(path);
  if (!in) fail("input.missing-file", "cannot open scenario file '" + path + "'");
  auto doc = detail::parse_scenario_doc(in, path);

  auto dir = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp.string() : (dir / fp).string();
  };
  Catalog catalog = load_catalog_file(resolve(doc.catalog_file));

  std::vector<ModelEntry> models;
  for (const auto& name : doc.model_order) {
    const auto& keys = doc.model_keys[name];
    const std::string mpath = "models[" + name + "]";
    auto need = [&](const std::string& k) -> const std::string& {
      auto it = keys.find(k);
      if (it == keys.end()) fail("input.scenario", mpath + "." + k + ": required key missing");
      return it->second;
    };
    ModelEntry e;
    e.profile.name = name;
    e.profile.gflops = parse_real(need("gflops"), mpath + ".gflops");
    e.profile.min_deploy_gpcs = static_cast<int>(parse_int(need("min_deploy_gpcs"), mpath + ".min_deploy_gpcs"));
    e.profile.latency_full = parse_real(need("latency_full"), mpath + ".latency_full");
    e.profile.reconfig_overhead = parse_real(need("reconfig_overhead"), mpath + ".reconfig_overhead");
    e.profile.capability = detail::parse_size_map_real(need("capability"), mpath + ".capability");
    e.retraining.data_volume = keys.count("data_volume") ? parse_int(keys.at("data_volume"), mpath + ".data_volume") : 0;
    if (keys.count("rt_table")) {
      for (const auto& [k, v] : detail::parse_size_map_real(keys.at("rt_table"), mpath + ".rt_table"))
        e.retraining.rt_table[k] = static_cast<long long>(v);
    } else if (!keys.count("data_volume")) {
      fail("input.scenario", mpath + ": either rt_table or data_volume is required");
    }
    e.retraining.accuracy_pre = detail::parse_real_list(need("accuracy_pre"), mpath + ".accuracy_pre");
    e.retraining.accuracy_post = detail::parse_real_list(need("accuracy_post"), mpath + ".accuracy_post");
    models.push_back(std::move(e));
  }

  std::ifstream tin(resolve(doc.trace_file));
  if (!tin) fail("input.missing-file", "cannot open trace file '" + resolve(doc.trace_file) + "'");
  InferenceTrace trace = parse_trace_csv(tin, doc.model_order, doc.size * doc.count, resolve(doc.trace_file));

  double granularity = granularity_override.value_or(doc.granularity);
  Scenario sc = finalize_scenario(std::move(catalog), std::move(models), std::move(trace), doc.size, doc.count, granularity);
  if (granularity != 1.0) sc = rescale_scenario(sc, granularity);
  return sc;
}

// Serializes the resolved scenario (accuracy carry-over already applied).
// Catalog and trace are referenced by the supplied file names.
inline std::string scenario_to_string(const Scenario& sc, const std::string& catalog_file,
                                      const std::string& trace_file) {
  if (sc.step_seconds != 1.0) fail("input.scenario", "cannot serialize a rescaled scenario");
  std::ostringstream out;
  out << "[windows]\n";
  out << "size " << sc.window_size << "\n";
  out << "count " << sc.window_count << "\n";
  out << "\n[catalog]\nfile " << catalog_file << "\n";
  out << "\n[models]\n";
  for (const auto& e : sc.models) {
    out << "model " << e.profile.name << "\n";
    out << "gflops " << fmt_real(e.profile.gflops) << "\n";
    out << "min_deploy_gpcs " << e.profile.min_deploy_gpcs << "\n";
    out << "latency_full " << fmt_real(e.profile.latency_full) << "\n";
    out << "reconfig_overhead " << fmt_real(e.profile.reconfig_overhead) << "\n";
    out << "capability";
    for (const auto& [k, v] : e.profile.capability) out << " " << k << ":" << fmt_real(v);
    out << "\n";
    if (e.retraining.data_volume > 0) out << "data_volume " << e.retraining.data_volume << "\n";
    out << "rt_table";
    for (const auto& [k, v] : e.retraining.rt_table) out << " " << k << ":" << v;
    out << "\n";
    out << "accuracy_pre";
    for (double v : e.retraining.accuracy_pre) out << " " << fmt_real(v);
    out << "\n";
    out << "accuracy_post";
    for (double v : e.retraining.accuracy_post) out << " " << fmt_real(v);
    out << "\n";
  }
  out << "\n[trace]\nfile " << trace_file << "\n";
  return out.str();
}

inline void write_scenario_files(const Scenario& sc, const std::string& dir, const std::string& stem = "scenario") {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> names;
  for (const auto& e : sc.models) names.push_back(e.profile.name);
  {
    std::ofstream f(fs::path(dir) / (stem + ".catalog"));
    f << catalog_to_string(sc.catalog);
  }
  {
    std::ofstream f(fs::path(dir) / (stem + ".csv"));
    f << trace_to_csv(sc.trace, names);
  }
  {
    std::ofstream f(fs::path(dir) / (stem + ".scn"));
    f << scenario_to_string(sc, stem + ".catalog", stem + ".csv");
  }
}

// ---------------------------------------------------------------------------
// Granularity rescale. Supported factors: integers >= 1 (bins summed) and
// 1/q for integer q (each second split into q sub-steps, counts front-loaded).
// Capabilities become per-step counts, RT and psi are re-expressed in steps
// with ceilings re-applied, and step_seconds records the new step length.

inline Scenario rescale_scenario(const Scenario& in, double granularity) {
  if (granularity == 1.0 && in.step_seconds == 1.0) return in;
  if (in.step_seconds != 1.0) fail("input.granularity", "scenario is already rescaled");
  if (granularity <= 0) fail("input.granularity", "granularity must be positive");

  bool integral = std::abs(granularity - std::round(granularity)) < 1e-9 && granularity >= 1.0;
  bool reciprocal = !integral && std::abs(1.0 / granularity - std::round(1.0 / granularity)) < 1e-9;
  if (!integral && !reciprocal)
    fail("input.granularity", "granularity " + fmt_real(granularity) + " must be an integer or the reciprocal of an integer");
  double steps_d = static_cast<double>(in.window_size) / granularity;
  if (std::abs(steps_d - std::round(steps_d)) > 1e-9)
    fail("input.granularity", "granularity " + fmt_real(granularity) + " does not divide window size " + std::to_string(in.window_size));

  Scenario out = in;
  out.step_seconds = granularity;
  out.window_size = static_cast<int>(std::llround(steps_d));
  for (auto& e : out.models) {
    for (auto& [k, v] : e.profile.capability) v *= granularity;  // requests per step
    for (auto& [k, v] : e.retraining.rt_table)
      v = static_cast<long long>(std::ceil(static_cast<double>(v) / granularity));
  }
  out.trace.counts.clear();
  for (const auto& per_model : in.trace.counts) {
    std::vector<long long> rebinned;
    if (integral) {
      int g = static_cast<int>(std::llround(granularity));
      for (size_t s = 0; s + g <= per_model.size(); s += g) {
        long long sum = 0;
        for (int j = 0; j < g; ++j) sum += per_model[s + j];
        rebinned.push_back(sum);
      }
    } else {
      int q = static_cast<int>(std::llround(1.0 / granularity));
      for (long long c : per_model) {
        for (int j = 0; j < q; ++j) rebinned.push_back((c + q - 1 - j) / q);
      }
    }
    out.trace.counts.push_back(std::move(rebinned));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic trace generators. Two shapes: anti-correlated bursty pairs and a
// uniform rate. Deterministic in their parameters; the optional jitter is a
// fixed hash of (model, second) so generated files are reproducible.

inline long long detail_jitter(unsigned model, unsigned second, long long amplitude) {
  if (amplitude <= 0) return 0;
  unsigned long long h = 1469598103934665603ull;
  auto mix = [&](unsigned long long v) { h = (h ^ v) * 1099511628211ull; };
  mix(model + 1);
  mix(second + 0x9e3779b9u);
  return static_cast<long long>(h % (2 * amplitude + 1)) - amplitude;
}

// Two models with opposite square waves: model 0 bursts in the first half of
// each window, model 1 in the second half.
inline InferenceTrace make_bursty_pair_trace(int window_size, int window_count, long long high, long long low,
                                             long long jitter = 0) {
  InferenceTrace t;
  t.counts.assign(2, {});
  for (int m = 0; m < 2; ++m) {
    for (int w = 0; w < window_count; ++w) {
      for (int s = 0; s < window_size; ++s) {
        bool first_half = s < window_size / 2;
        bool hot = (m == 0) ? first_half : !first_half;
        long long v = (hot ? high : low) + detail_jitter(m, w * window_size + s, jitter);
        t.counts[m].push_back(std::max<long long>(0, v));
      }
    }
  }
  return t;
}

inline InferenceTrace make_uniform_trace(const std::vector<long long>& rates, int window_size, int window_count) {
  InferenceTrace t;
  for (long long r : rates) t.counts.emplace_back(window_size * window_count, r);
  return t;
}

}  // namespace migsim
