#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace hunt {

enum class NodeKind { Process, File, Socket, Registry };
enum class Relation { Fork, Read, Write, Recv, Send, RegWrite };

const char* to_string(NodeKind k);
const char* to_string(Relation r);
NodeKind node_kind_from_string(const std::string& s);
Relation relation_from_string(const std::string& s);

// Object kind a relation is allowed to point at. Subjects are always processes.
NodeKind object_kind(Relation r);

// Attribute keys legal for a node kind, in canonical order.
const std::vector<std::string>& attr_keys(NodeKind k);

// Values are lowercased on construction; null means "unknown" (query graphs
// built from CTI may omit attributes).
using AttrMap = std::map<std::string, std::optional<std::string>>;

struct GraphError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Process;
  AttrMap attrs;
  bool suspicious = false;
  std::set<std::string> matched_iocs;
};

struct Edge {
  std::string src;
  std::string dst;
  Relation rel = Relation::Fork;
  std::optional<std::int64_t> ts;
};

enum class Direction { Out, In, Both };

class Graph {
 public:
  // Validates id uniqueness and attr keys; lowercases attribute values.
  void add_node(Node n);
  // Validates endpoints and the relation/kind combination. Multi-edges are
  // allowed; returns the edge index.
  std::size_t add_edge(const std::string& src, const std::string& dst,
                       Relation rel,
                       std::optional<std::int64_t> ts = std::nullopt);

  bool has_node(const std::string& id) const { return index_.count(id) != 0; }
  const Node& node(const std::string& id) const;
  Node& node_mut(const std::string& id);
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // Sorted by (neighbor id, relation); duplicates collapse. Deterministic
  // across runs for the same graph.
  std::vector<std::pair<std::string, Relation>> neighbors(
      const std::string& id, Direction dir) const;

  // All directed simple paths from start with edge count <= max_len,
  // depth-first in sorted-neighbor order. Includes the trivial path [start].
  std::vector<std::vector<std::string>> paths_up_to(const std::string& start,
                                                    int max_len) const;

  // Same enumeration but with the relation taken to reach each node; used by
  // sentence generation. steps[0].second is unset.
  struct PathStep {
    std::string id;
    std::optional<Relation> rel;
  };
  std::vector<std::vector<PathStep>> walk_paths(const std::string& start,
                                                int max_len) const;

  // Induced subgraph on the given node ids: all edges with both endpoints
  // kept. Node/edge order follows this graph's order.
  Graph induced(const std::set<std::string>& keep) const;

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, std::size_t> index_;
  // edge indices per node
  std::unordered_map<std::string, std::vector<std::size_t>> out_;
  std::unordered_map<std::string, std::vector<std::size_t>> in_;
};

// JSON round-trip: {"nodes":[{"id","kind","attrs":{...},"suspicious"?,
// "matched_iocs"?}], "edges":[{"src","dst","rel","ts"?}]}.
std::string graph_to_json(const Graph& g);
Graph graph_from_json(const std::string& text);
Graph load_graph(const std::string& path);
void save_graph(const Graph& g, const std::string& path);

std::string lowercase(std::string s);

// Main human-readable attribute of a node (process name, file name, registry
// key, socket 4-tuple); empty when unset.
std::string primary_name(const Node& n);

}  // namespace hunt
