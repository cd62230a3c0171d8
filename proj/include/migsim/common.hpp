// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace migsim {

// Error carries a stable machine-readable code next to the human message.
// Codes in the "input" family map to CLI exit 2, "infeasible" family to exit 1.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& message) {
  throw Error(code, message);
}

enum class TaskKind { Inference, Retraining };

// Task identity as used in allocations: one inference and one retraining
// task per model.
struct TaskId {
  std::string model;
  TaskKind kind = TaskKind::Inference;

  bool operator==(const TaskId&) const = default;
  bool operator<(const TaskId& o) const {
    if (model != o.model) return model < o.model;
    return static_cast<int>(kind) < static_cast<int>(o.kind);
  }
  std::string str() const { return model + (kind == TaskKind::Inference ? ":i" : ":r"); }
};

inline TaskId inference_task(std::string model) { return {std::move(model), TaskKind::Inference}; }
inline TaskId retraining_task(std::string model) { return {std::move(model), TaskKind::Retraining}; }

inline TaskId parse_task_id(std::string_view text) {
  auto pos = text.rfind(':');
  if (pos == std::string_view::npos || pos + 2 != text.size() ||
      (text[pos + 1] != 'i' && text[pos + 1] != 'r')) {
    fail("input.task-id", "malformed task id '" + std::string(text) + "' (want <model>:i or <model>:r)");
  }
  return {std::string(text.substr(0, pos)),
          text[pos + 1] == 'i' ? TaskKind::Inference : TaskKind::Retraining};
}

// ---------------------------------------------------------------------------
// Small string helpers shared by the line-oriented file parsers.

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

// Splits on runs of spaces/tabs, dropping empty tokens.
inline std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

inline long long parse_int(std::string_view text, const std::string& what) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail("input.number", what + ": '" + std::string(text) + "' is not an integer");
  }
  return value;
}

inline double parse_real(std::string_view text, const std::string& what) {
  // std::from_chars for double is available on this toolchain but strtod keeps
  // the error handling uniform with locale-independent "C" parsing.
  std::string buf(text);
  char* end = nullptr;
  double value = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || buf.empty()) {
    fail("input.number", what + ": '" + buf + "' is not a number");
  }
  return value;
}

// Deterministic float formatting for reports and serialized artifacts.
inline std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline std::string fmt_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace migsim
