#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hunt/graph.hpp"

namespace hunt {

struct ReductionInput {
  const Graph* graph = nullptr;
  std::set<std::string> indicators;                          // I
  std::map<std::string, std::set<std::string>> matched_nodes;  // P: ioc -> nodes
};

// Builds I and P from the graph's matched_iocs annotations plus the rule set's
// indicator ids (indicators with zero matches stay in I and are reported as
// uncovered).
ReductionInput reduction_input(const Graph& graph,
                               const std::set<std::string>& indicator_ids);

struct SuspGraph {
  Graph subgraph;
  std::set<std::string> covered_iocs;
  std::set<std::string> uncovered_iocs;  // indicators with no match anywhere
  std::vector<std::string> seed_trace;   // seeds used, in visit order
};

// Matched nodes of the indicator with the fewest matches; ties broken by
// lexicographically smallest ioc_id. Throws if nothing matched.
std::set<std::string> select_seeds(const ReductionInput& input);

// BFS over both edge directions; a neighbor is enqueued only if it is a
// Process node or flagged suspicious. Returns the induced subgraph of the
// visited set.
Graph adaptive_bfs(const Graph& graph, const std::string& start);
std::set<std::string> adaptive_bfs_nodes(const Graph& graph,
                                         const std::string& start);

// Per-seed adaptiveBFS + compose until all coverable indicators are covered;
// recursion pulls unvisited matched nodes of still-uncovered indicators in
// sorted order. Identical node sets are deduplicated.
std::vector<SuspGraph> expand_search(const ReductionInput& input);

}  // namespace hunt
