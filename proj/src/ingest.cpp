#include "hunt/ingest.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace hunt {

using json = nlohmann::json;

namespace {

AuditEvent event_from_json(const json& j) {
  AuditEvent ev;
  ev.ts = j.at("ts").get<std::int64_t>();
  ev.relation = relation_from_string(j.at("relation").get<std::string>());
  const auto& subj = j.at("subject");
  ev.subject.pid = subj.at("pid").get<std::int64_t>();
  ev.subject.name = subj.at("name").get<std::string>();
  if (subj.contains("args") && !subj.at("args").is_null())
    ev.subject.args = subj.at("args").get<std::string>();
  const auto& obj = j.at("object");
  ev.object_kind = node_kind_from_string(obj.at("kind").get<std::string>());
  if (ev.object_kind != object_kind(ev.relation))
    throw GraphError("relation/object kind mismatch");
  switch (ev.object_kind) {
    case NodeKind::Process:
      ev.obj_process.pid = obj.at("pid").get<std::int64_t>();
      ev.obj_process.name = obj.at("name").get<std::string>();
      if (obj.contains("args") && !obj.at("args").is_null())
        ev.obj_process.args = obj.at("args").get<std::string>();
      break;
    case NodeKind::File:
      ev.file_name = obj.at("file_name").get<std::string>();
      break;
    case NodeKind::Socket:
      ev.src_ip = obj.at("src_ip").get<std::string>();
      ev.dst_ip = obj.at("dst_ip").get<std::string>();
      ev.src_port = obj.at("src_port").get<std::string>();
      ev.dst_port = obj.at("dst_port").get<std::string>();
      break;
    case NodeKind::Registry:
      ev.key_name = obj.at("key_name").get<std::string>();
      break;
  }
  return ev;
}

std::string process_key(const ProcessRef& p) {
  return "proc:" + std::to_string(p.pid) + ":" + lowercase(p.name);
}

}  // namespace

ParseResult parse_events(std::istream& stream) {
  ParseResult result;
  std::string line;
  while (std::getline(stream, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      result.events.push_back(event_from_json(json::parse(line)));
    } catch (const std::exception&) {
      ++result.skipped;
    }
  }
  return result;
}

ParseResult parse_events_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open events file: " + path);
  return parse_events(in);
}

Graph build_graph(const std::vector<AuditEvent>& events) {
  Graph g;
  auto ensure = [&](const std::string& key, NodeKind kind, AttrMap attrs) {
    if (g.has_node(key)) return;
    Node n;
    n.id = key;
    n.kind = kind;
    n.attrs = std::move(attrs);
    g.add_node(std::move(n));
  };
  for (const auto& ev : events) {
    std::string subj_id = process_key(ev.subject);
    ensure(subj_id, NodeKind::Process,
           {{"name", ev.subject.name}, {"args", ev.subject.args}});
    std::string obj_id;
    switch (ev.object_kind) {
      case NodeKind::Process:
        obj_id = process_key(ev.obj_process);
        ensure(obj_id, NodeKind::Process,
               {{"name", ev.obj_process.name}, {"args", ev.obj_process.args}});
        break;
      case NodeKind::File:
        obj_id = "file:" + lowercase(ev.file_name);
        ensure(obj_id, NodeKind::File, {{"file_name", ev.file_name}});
        break;
      case NodeKind::Socket:
        obj_id = "sock:" + lowercase(ev.src_ip) + ":" + lowercase(ev.src_port) +
                 ">" + lowercase(ev.dst_ip) + ":" + lowercase(ev.dst_port);
        ensure(obj_id, NodeKind::Socket,
               {{"src_ip", ev.src_ip},
                {"dst_ip", ev.dst_ip},
                {"src_port", ev.src_port},
                {"dst_port", ev.dst_port}});
        break;
      case NodeKind::Registry:
        obj_id = "reg:" + lowercase(ev.key_name);
        ensure(obj_id, NodeKind::Registry, {{"key_name", ev.key_name}});
        break;
    }
    g.add_edge(subj_id, obj_id, ev.relation, ev.ts);
  }
  return g;
}

std::vector<CompiledRule> compile_rules(const std::vector<IocRule>& rules) {
  std::vector<CompiledRule> compiled;
  compiled.reserve(rules.size());
  for (const auto& r : rules) {
    bool legal_key = false;
    for (NodeKind k : {NodeKind::Process, NodeKind::File, NodeKind::Socket,
                       NodeKind::Registry}) {
      const auto& keys = attr_keys(k);
      if (std::find(keys.begin(), keys.end(), r.target_attr) != keys.end())
        legal_key = true;
    }
    if (!legal_key)
      throw GraphError("rule " + r.ioc_id + ": unknown target_attr '" +
                       r.target_attr + "'");
    try {
      compiled.push_back({r, std::regex(r.pattern)});
    } catch (const std::regex_error& e) {
      throw GraphError("rule " + r.ioc_id + ": bad pattern: " + e.what());
    }
  }
  return compiled;
}

std::vector<IocRule> load_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open rules file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw GraphError(std::string("rules JSON parse error: ") + e.what());
  }
  std::vector<IocRule> rules;
  for (const auto& j : doc) {
    rules.push_back({j.at("ioc_id").get<std::string>(),
                     j.at("target_attr").get<std::string>(),
                     j.at("pattern").get<std::string>()});
  }
  return rules;
}

std::size_t mark_suspicious(Graph& graph,
                            const std::vector<CompiledRule>& rules) {
  std::size_t flagged = 0;
  for (const auto& n : graph.nodes()) {
    bool hit = false;
    for (const auto& cr : rules) {
      auto it = n.attrs.find(cr.rule.target_attr);
      if (it == n.attrs.end() || !it->second) continue;
      if (std::regex_search(*it->second, cr.re)) {
        Node& m = graph.node_mut(n.id);
        m.suspicious = true;
        m.matched_iocs.insert(cr.rule.ioc_id);
        hit = true;
      }
    }
    if (hit) ++flagged;
  }
  return flagged;
}

}  // namespace hunt
