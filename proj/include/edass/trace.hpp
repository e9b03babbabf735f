#pragma once

// Trace files: a versioned header plus one line per dispatched event.
// Parsing here is the foundation for metrics and for the trace-level
// invariant checks in the tests.

#include <cstdint>
#include <string>
#include <vector>

#include "sim.hpp"
#include "util.hpp"

namespace edass {

struct MismatchedTraceError : Error {
  explicit MismatchedTraceError(const std::string& w) : Error(w) {}
};

inline std::string trace_header(std::uint64_t seed) {
  return "# e-dass-trace v1 seed=" + std::to_string(seed);
}

inline std::string trace_to_text(const std::vector<TraceLine>& lines,
                                 std::uint64_t seed) {
  std::string out = trace_header(seed);
  out += '\n';
  for (const TraceLine& l : lines) {
    out += l.to_string();
    out += '\n';
  }
  return out;
}

struct ParsedTraceLine {
  double time = 0;
  std::string actor;
  std::string kind;
  std::vector<std::pair<std::string, std::string>> details;

  const std::string* get(const std::string& key) const {
    for (const auto& [k, v] : details)
      if (k == key) return &v;
    return nullptr;
  }
  bool has(const std::string& key) const { return get(key) != nullptr; }
  std::optional<double> num(const std::string& key) const {
    const std::string* v = get(key);
    if (!v) return std::nullopt;
    return std::strtod(v->c_str(), nullptr);
  }
};

struct ParsedTrace {
  std::uint64_t seed = 0;
  std::vector<ParsedTraceLine> lines;
};

inline ParsedTrace parse_trace(const std::string& text) {
  ParsedTrace out;
  int line_no = 0;
  std::size_t pos = 0;
  bool saw_header = false;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string line = text.substr(
        pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.empty()) continue;

    if (!saw_header) {
      const std::string prefix = "# e-dass-trace v1 seed=";
      if (line.rfind(prefix, 0) != 0)
        throw MismatchedTraceError("missing trace header on line 1");
      out.seed = std::strtoull(line.c_str() + prefix.size(), nullptr, 10);
      saw_header = true;
      continue;
    }

    ParsedTraceLine pl;
    std::size_t i = 0;
    auto next_field = [&](const char* what) {
      std::size_t sp = line.find(' ', i);
      if (sp == std::string::npos)
        throw MismatchedTraceError("line " + std::to_string(line_no) +
                                   ": missing " + what);
      std::string f = line.substr(i, sp - i);
      i = sp + 1;
      return f;
    };
    std::string t = next_field("time");
    char* end = nullptr;
    pl.time = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
      throw MismatchedTraceError("line " + std::to_string(line_no) +
                                 ": bad time '" + t + "'");
    pl.actor = next_field("actor");
    std::size_t sp = line.find(' ', i);
    pl.kind = line.substr(i, sp == std::string::npos ? std::string::npos : sp - i);
    i = sp == std::string::npos ? line.size() : sp + 1;
    while (i < line.size()) {
      std::size_t e = line.find(' ', i);
      std::string kvs =
          line.substr(i, e == std::string::npos ? std::string::npos : e - i);
      i = e == std::string::npos ? line.size() : e + 1;
      std::size_t eq = kvs.find('=');
      if (eq == std::string::npos)
        throw MismatchedTraceError("line " + std::to_string(line_no) +
                                   ": detail without '=': " + kvs);
      pl.details.emplace_back(kvs.substr(0, eq), kvs.substr(eq + 1));
    }
    out.lines.push_back(std::move(pl));
  }
  if (!saw_header) throw MismatchedTraceError("empty trace");
  return out;
}

// "node/7" -> 7, anything else -> nullopt
inline std::optional<int> actor_node_id(const std::string& actor) {
  if (actor.rfind("node/", 0) != 0) return std::nullopt;
  return std::atoi(actor.c_str() + 5);
}

}  // namespace edass
