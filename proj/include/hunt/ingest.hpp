#pragma once

#include <cstdint>
#include <iosfwd>
#include <regex>
#include <string>
#include <vector>

#include "hunt/graph.hpp"

namespace hunt {

struct ProcessRef {
  std::int64_t pid = 0;
  std::string name;
  std::optional<std::string> args;
};

struct AuditEvent {
  std::int64_t ts = 0;
  Relation relation = Relation::Fork;
  ProcessRef subject;
  NodeKind object_kind = NodeKind::Process;
  // object payload, fields used depend on object_kind
  ProcessRef obj_process;
  std::string file_name;
  std::string src_ip, dst_ip, src_port, dst_port;
  std::string key_name;
};

struct ParseResult {
  std::vector<AuditEvent> events;
  std::size_t skipped = 0;  // malformed lines
};

// Line-delimited JSON, one event per line. Malformed lines are skipped and
// counted; event order is preserved.
ParseResult parse_events(std::istream& stream);
ParseResult parse_events_file(const std::string& path);

// One node per distinct entity key (process: pid+name; file: file_name;
// socket: 4-tuple; registry: key_name), one edge per event. Node ids are
// derived from entity keys, so the result is a pure function of the events.
Graph build_graph(const std::vector<AuditEvent>& events);

struct IocRule {
  std::string ioc_id;
  std::string target_attr;
  std::string pattern;  // ECMAScript regex over the attribute value
};

struct CompiledRule {
  IocRule rule;
  std::regex re;
};

// Validates target_attr and compiles patterns; throws GraphError on a bad rule.
std::vector<CompiledRule> compile_rules(const std::vector<IocRule>& rules);
std::vector<IocRule> load_rules(const std::string& path);

// Flags every node with any attribute matching any rule; records matching
// ioc_ids. Idempotent. Returns the number of flagged nodes (counted once).
std::size_t mark_suspicious(Graph& graph, const std::vector<CompiledRule>& rules);

}  // namespace hunt
