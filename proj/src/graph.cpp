#include "hunt/graph.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace hunt {

const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Process: return "process";
    case NodeKind::File: return "file";
    case NodeKind::Socket: return "socket";
    case NodeKind::Registry: return "registry";
  }
  return "?";
}

const char* to_string(Relation r) {
  switch (r) {
    case Relation::Fork: return "fork";
    case Relation::Read: return "read";
    case Relation::Write: return "write";
    case Relation::Recv: return "recv";
    case Relation::Send: return "send";
    case Relation::RegWrite: return "regwrite";
  }
  return "?";
}

NodeKind node_kind_from_string(const std::string& s) {
  if (s == "process") return NodeKind::Process;
  if (s == "file") return NodeKind::File;
  if (s == "socket") return NodeKind::Socket;
  if (s == "registry") return NodeKind::Registry;
  throw GraphError("unknown node kind: " + s);
}

Relation relation_from_string(const std::string& s) {
  if (s == "fork") return Relation::Fork;
  if (s == "read") return Relation::Read;
  if (s == "write") return Relation::Write;
  if (s == "recv") return Relation::Recv;
  if (s == "send") return Relation::Send;
  if (s == "regwrite") return Relation::RegWrite;
  throw GraphError("unknown relation: " + s);
}

NodeKind object_kind(Relation r) {
  switch (r) {
    case Relation::Fork: return NodeKind::Process;
    case Relation::Read:
    case Relation::Write: return NodeKind::File;
    case Relation::Recv:
    case Relation::Send: return NodeKind::Socket;
    case Relation::RegWrite: return NodeKind::Registry;
  }
  throw GraphError("bad relation");
}

const std::vector<std::string>& attr_keys(NodeKind k) {
  static const std::vector<std::string> process{"name", "args"};
  static const std::vector<std::string> file{"file_name"};
  static const std::vector<std::string> socket{"src_ip", "dst_ip", "src_port",
                                               "dst_port"};
  static const std::vector<std::string> registry{"key_name"};
  switch (k) {
    case NodeKind::Process: return process;
    case NodeKind::File: return file;
    case NodeKind::Socket: return socket;
    case NodeKind::Registry: return registry;
  }
  throw GraphError("bad kind");
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string primary_name(const Node& n) {
  auto get = [&](const char* key) -> std::string {
    auto it = n.attrs.find(key);
    if (it == n.attrs.end() || !it->second) return "";
    return *it->second;
  };
  switch (n.kind) {
    case NodeKind::Process: return get("name");
    case NodeKind::File: return get("file_name");
    case NodeKind::Registry: return get("key_name");
    case NodeKind::Socket: {
      std::string s = get("src_ip") + ":" + get("src_port") + ">" +
                      get("dst_ip") + ":" + get("dst_port");
      return s == ":>:" ? "" : s;
    }
  }
  return "";
}

void Graph::add_node(Node n) {
  if (n.id.empty()) throw GraphError("node id must be nonempty");
  if (index_.count(n.id)) throw GraphError("duplicate node id: " + n.id);
  const auto& legal = attr_keys(n.kind);
  for (auto& [key, val] : n.attrs) {
    if (std::find(legal.begin(), legal.end(), key) == legal.end())
      throw GraphError("attribute '" + key + "' not legal for kind " +
                       to_string(n.kind));
    if (val) val = lowercase(*val);
  }
  if (!n.matched_iocs.empty()) n.suspicious = true;
  index_.emplace(n.id, nodes_.size());
  nodes_.push_back(std::move(n));
}

std::size_t Graph::add_edge(const std::string& src, const std::string& dst,
                            Relation rel, std::optional<std::int64_t> ts) {
  auto si = index_.find(src);
  auto di = index_.find(dst);
  if (si == index_.end()) throw GraphError("unknown edge source: " + src);
  if (di == index_.end()) throw GraphError("unknown edge target: " + dst);
  if (nodes_[si->second].kind != NodeKind::Process)
    throw GraphError("edge source must be a process: " + src);
  if (nodes_[di->second].kind != object_kind(rel))
    throw GraphError(std::string("relation ") + to_string(rel) +
                     " cannot target kind " +
                     to_string(nodes_[di->second].kind));
  std::size_t idx = edges_.size();
  edges_.push_back(Edge{src, dst, rel, ts});
  out_[src].push_back(idx);
  in_[dst].push_back(idx);
  return idx;
}

const Node& Graph::node(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw GraphError("unknown node id: " + id);
  return nodes_[it->second];
}

Node& Graph::node_mut(const std::string& id) {
  auto it = index_.find(id);
  if (it == index_.end()) throw GraphError("unknown node id: " + id);
  return nodes_[it->second];
}

std::vector<std::pair<std::string, Relation>> Graph::neighbors(
    const std::string& id, Direction dir) const {
  if (!index_.count(id)) throw GraphError("unknown node id: " + id);
  std::set<std::pair<std::string, Relation>> acc;
  if (dir == Direction::Out || dir == Direction::Both) {
    auto it = out_.find(id);
    if (it != out_.end())
      for (auto e : it->second) acc.emplace(edges_[e].dst, edges_[e].rel);
  }
  if (dir == Direction::In || dir == Direction::Both) {
    auto it = in_.find(id);
    if (it != in_.end())
      for (auto e : it->second) acc.emplace(edges_[e].src, edges_[e].rel);
  }
  return {acc.begin(), acc.end()};
}

std::vector<std::vector<Graph::PathStep>> Graph::walk_paths(
    const std::string& start, int max_len) const {
  if (!index_.count(start)) throw GraphError("unknown node id: " + start);
  if (max_len < 1) throw GraphError("max_len must be >= 1");
  std::vector<std::vector<PathStep>> result;
  std::vector<PathStep> cur{{start, std::nullopt}};
  std::set<std::string> on_path{start};

  auto step_targets = [&](const std::string& id) {
    std::set<std::pair<std::string, Relation>> acc;
    auto it = out_.find(id);
    if (it != out_.end())
      for (auto e : it->second) acc.emplace(edges_[e].dst, edges_[e].rel);
    return acc;
  };

  std::function<void()> dfs = [&]() {
    result.push_back(cur);
    if (static_cast<int>(cur.size()) - 1 >= max_len) return;
    for (const auto& [nxt, rel] : step_targets(cur.back().id)) {
      if (on_path.count(nxt)) continue;  // simple paths only
      cur.push_back({nxt, rel});
      on_path.insert(nxt);
      dfs();
      on_path.erase(nxt);
      cur.pop_back();
    }
  };
  dfs();
  return result;
}

std::vector<std::vector<std::string>> Graph::paths_up_to(
    const std::string& start, int max_len) const {
  std::vector<std::vector<std::string>> result;
  std::set<std::vector<std::string>> seen;
  for (const auto& walk : walk_paths(start, max_len)) {
    std::vector<std::string> ids;
    ids.reserve(walk.size());
    for (const auto& s : walk) ids.push_back(s.id);
    if (seen.insert(ids).second) result.push_back(std::move(ids));
  }
  return result;
}

Graph Graph::induced(const std::set<std::string>& keep) const {
  Graph g;
  for (const auto& n : nodes_)
    if (keep.count(n.id)) g.add_node(n);
  for (const auto& e : edges_)
    if (keep.count(e.src) && keep.count(e.dst))
      g.add_edge(e.src, e.dst, e.rel, e.ts);
  return g;
}

}  // namespace hunt
