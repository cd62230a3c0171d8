// SPDX-License-Identifier: Apache-2.0
//
// MIG geometry: instance slots, legal device configurations, allocations of
// tasks to slots, and the slot-level diff that drives reconfiguration
// detection and pre-initialization.
#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "migsim/common.hpp"

namespace migsim {

// One placed instance: `size` contiguous GPC slices starting at `slice_start`.
struct InstanceSlot {
  std::string id;
  int size = 0;
  int slice_start = 0;

  bool same_range(const InstanceSlot& o) const {
    return size == o.size && slice_start == o.slice_start;
  }
};

struct MigConfiguration {
  std::string id;
  std::vector<InstanceSlot> slots;  // sorted by slice_start

  int total_size() const {
    int n = 0;
    for (const auto& s : slots) n += s.size;
    return n;
  }
  const InstanceSlot* find_slot(const std::string& slot_id) const {
    for (const auto& s : slots)
      if (s.id == slot_id) return &s;
    return nullptr;
  }
};

// Generative placement rule, carried as data in the catalog file. Instances of
// a given GPC size occupy `mem_footprint` contiguous memory slices starting at
// one of `mem_starts`. Rules exist so the shipped configuration list can be
// cross-checked by enumeration; the planner itself only consumes the
// configuration list.
struct PlacementRule {
  int size = 0;
  int mem_footprint = 0;
  std::vector<int> mem_starts;
};

struct Catalog {
  int gpc_count = 7;
  int mem_slices = 8;
  std::vector<PlacementRule> rules;
  std::vector<MigConfiguration> configurations;

  const MigConfiguration* find(const std::string& id) const {
    for (const auto& c : configurations)
      if (c.id == id) return &c;
    return nullptr;
  }
  std::vector<int> instance_sizes() const {
    std::set<int> sizes;
    for (const auto& c : configurations)
      for (const auto& s : c.slots) sizes.insert(s.size);
    return {sizes.begin(), sizes.end()};
  }
};

inline std::string slot_id_for(int size, int slice_start) {
  return std::to_string(size) + "@" + std::to_string(slice_start);
}

// ---------------------------------------------------------------------------
// Catalog file format (full grammar in docs/formats.md):
//
//   gpc_count <n>
//   mem_slices <n>
//   rule <size> <mem_footprint> <mem_start>[,<mem_start>...]
//   config <id> <size>@<slice_start> [<size>@<slice_start> ...]
//
// '#' starts a comment; blank lines are ignored; any other leading keyword is
// rejected.

inline Catalog load_catalog(std::istream& in, const std::string& source) {
  Catalog cat;
  std::string line;
  int lineno = 0;
  bool saw_entry = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    auto toks = tokens(body);
    const std::string where = source + ":" + std::to_string(lineno);
    if (toks[0] == "gpc_count" || toks[0] == "mem_slices") {
      if (saw_entry) fail("input.catalog", where + ": " + std::string(toks[0]) + " must precede rule/config entries");
      if (toks.size() != 2) fail("input.catalog", where + ": expected one value");
      int v = static_cast<int>(parse_int(toks[1], where));
      if (v < 1) fail("input.catalog", where + ": value must be positive");
      (toks[0] == "gpc_count" ? cat.gpc_count : cat.mem_slices) = v;
    } else if (toks[0] == "rule") {
      saw_entry = true;
      if (toks.size() != 4) fail("input.catalog", where + ": expected 'rule <size> <footprint> <starts>'");
      PlacementRule r;
      r.size = static_cast<int>(parse_int(toks[1], where + " size"));
      r.mem_footprint = static_cast<int>(parse_int(toks[2], where + " footprint"));
      for (auto part : split(toks[3], ',')) r.mem_starts.push_back(static_cast<int>(parse_int(part, where + " start")));
      if (r.size < 1 || r.size > cat.gpc_count) fail("input.catalog", where + ": rule size out of range");
      for (int s : r.mem_starts)
        if (s < 0 || s + r.mem_footprint > cat.mem_slices)
          fail("input.catalog", where + ": rule start out of range");
      cat.rules.push_back(std::move(r));
    } else if (toks[0] == "config") {
      saw_entry = true;
      if (toks.size() < 3) fail("input.catalog", where + ": expected 'config <id> <size>@<start>...'");
      MigConfiguration cfg;
      cfg.id = std::string(toks[1]);
      if (cat.find(cfg.id)) fail("input.catalog", where + ": duplicate configuration id '" + cfg.id + "'");
      for (size_t i = 2; i < toks.size(); ++i) {
        auto parts = split(toks[i], '@');
        if (parts.size() != 2) fail("input.catalog", where + ": configuration '" + cfg.id + "': malformed slot '" + std::string(toks[i]) + "'");
        InstanceSlot slot;
        slot.size = static_cast<int>(parse_int(parts[0], where + " slot size"));
        slot.slice_start = static_cast<int>(parse_int(parts[1], where + " slot start"));
        slot.id = slot_id_for(slot.size, slot.slice_start);
        if (slot.size < 1 || slot.size > cat.gpc_count)
          fail("input.catalog", "configuration '" + cfg.id + "': slot size " + std::to_string(slot.size) + " out of range 1.." + std::to_string(cat.gpc_count));
        if (slot.slice_start < 0 || slot.slice_start + slot.size > cat.gpc_count)
          fail("input.catalog", "configuration '" + cfg.id + "': slot " + slot.id + " exceeds the " + std::to_string(cat.gpc_count) + "-slice axis");
        cfg.slots.push_back(slot);
      }
      std::sort(cfg.slots.begin(), cfg.slots.end(),
                [](const InstanceSlot& a, const InstanceSlot& b) { return a.slice_start < b.slice_start; });
      for (size_t i = 1; i < cfg.slots.size(); ++i) {
        if (cfg.slots[i - 1].slice_start + cfg.slots[i - 1].size > cfg.slots[i].slice_start)
          fail("input.catalog", "configuration '" + cfg.id + "': overlapping slices " + cfg.slots[i - 1].id + " and " + cfg.slots[i].id);
      }
      cat.configurations.push_back(std::move(cfg));
    } else {
      fail("input.catalog", where + ": unknown key '" + std::string(toks[0]) + "'");
    }
  }
  if (cat.configurations.empty()) fail("input.catalog", source + ": no configurations declared");
  return cat;
}

inline Catalog load_catalog_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("input.missing-file", "cannot open catalog file '" + path + "'");
  return load_catalog(in, path);
}

inline Catalog load_catalog_text(const std::string& text, const std::string& source = "<inline>") {
  std::istringstream in(text);
  return load_catalog(in, source);
}

inline std::string catalog_to_string(const Catalog& cat) {
  std::ostringstream out;
  out << "gpc_count " << cat.gpc_count << "\n";
  out << "mem_slices " << cat.mem_slices << "\n";
  for (const auto& r : cat.rules) {
    out << "rule " << r.size << " " << r.mem_footprint << " ";
    for (size_t i = 0; i < r.mem_starts.size(); ++i) out << (i ? "," : "") << r.mem_starts[i];
    out << "\n";
  }
  for (const auto& c : cat.configurations) {
    out << "config " << c.id;
    for (const auto& s : c.slots) out << " " << s.size << "@" << s.slice_start;
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Allocations: the per-second task -> instance assignment.

struct Allocation {
  int second = 0;
  std::string configuration_id;
  std::map<TaskId, std::set<std::string>> assignments;  // slot ids; absent task = no slots

  const std::set<std::string>* slots_of(const TaskId& t) const {
    auto it = assignments.find(t);
    return it == assignments.end() ? nullptr : &it->second;
  }
};

struct AllocationViolation {
  std::string code;     // unknown-configuration | unknown-slot | instance-shared | retraining-multi-instance
  std::string message;
};

inline std::vector<AllocationViolation> validate_allocation(const Catalog& cat, const Allocation& alloc) {
  std::vector<AllocationViolation> out;
  const MigConfiguration* cfg = cat.find(alloc.configuration_id);
  if (!cfg) {
    out.push_back({"unknown-configuration",
                   "second " + std::to_string(alloc.second) + ": configuration '" + alloc.configuration_id + "' not in catalog"});
    return out;
  }
  std::map<std::string, TaskId> owner;
  for (const auto& [task, slots] : alloc.assignments) {
    for (const auto& slot_id : slots) {
      if (!cfg->find_slot(slot_id)) {
        out.push_back({"unknown-slot", "second " + std::to_string(alloc.second) + ": task " + task.str() +
                                           " names slot '" + slot_id + "' absent from configuration '" + cfg->id + "'"});
        continue;
      }
      auto [it, inserted] = owner.emplace(slot_id, task);
      if (!inserted) {
        out.push_back({"instance-shared", "second " + std::to_string(alloc.second) + ": slot '" + slot_id +
                                              "' assigned to both " + it->second.str() + " and " + task.str()});
      }
    }
    if (task.kind == TaskKind::Retraining && slots.size() > 1) {
      out.push_back({"retraining-multi-instance", "second " + std::to_string(alloc.second) + ": retraining task " +
                                                      task.str() + " holds " + std::to_string(slots.size()) + " instances"});
    }
  }
  return out;
}

// Per-task reconfiguration flags plus the created/destroyed instance lists.
// Identity is the (slice_start, size) pair: a same-size instance at a new
// slice is a destroy+create.
struct DiffReport {
  std::map<TaskId, bool> reconfigured;
  std::vector<InstanceSlot> created;    // assigned in next, not in prev (by slice range)
  std::vector<InstanceSlot> destroyed;  // assigned in prev, not in next
};

namespace detail {
inline std::set<std::pair<int, int>> assigned_ranges(const Catalog& cat, const Allocation& a,
                                                     const TaskId* only_task = nullptr) {
  std::set<std::pair<int, int>> out;
  const MigConfiguration* cfg = cat.find(a.configuration_id);
  if (!cfg) fail("input.allocation", "allocation names unknown configuration '" + a.configuration_id + "'");
  for (const auto& [task, slots] : a.assignments) {
    if (only_task && !(task == *only_task)) continue;
    for (const auto& id : slots) {
      const InstanceSlot* s = cfg->find_slot(id);
      if (!s) fail("input.allocation", "allocation names unknown slot '" + id + "'");
      out.emplace(s->slice_start, s->size);
    }
  }
  return out;
}
}  // namespace detail

inline DiffReport reconfiguration_diff(const Catalog& cat, const Allocation& prev, const Allocation& next) {
  DiffReport report;
  std::set<TaskId> all_tasks;
  for (const auto& [t, _] : prev.assignments) all_tasks.insert(t);
  for (const auto& [t, _] : next.assignments) all_tasks.insert(t);
  for (const auto& t : all_tasks) {
    auto before = detail::assigned_ranges(cat, prev, &t);
    auto after = detail::assigned_ranges(cat, next, &t);
    report.reconfigured[t] = before != after;
  }
  auto prev_all = detail::assigned_ranges(cat, prev);
  auto next_all = detail::assigned_ranges(cat, next);
  for (const auto& [start, size] : next_all)
    if (!prev_all.count({start, size})) report.created.push_back({slot_id_for(size, start), size, start});
  for (const auto& [start, size] : prev_all)
    if (!next_all.count({start, size})) report.destroyed.push_back({slot_id_for(size, start), size, start});
  return report;
}

}  // namespace migsim
