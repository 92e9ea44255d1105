#include "hunt/reduce.hpp"

#include <algorithm>
#include <deque>

namespace hunt {

ReductionInput reduction_input(const Graph& graph,
                               const std::set<std::string>& indicator_ids) {
  ReductionInput input;
  input.graph = &graph;
  input.indicators = indicator_ids;
  for (const auto& n : graph.nodes())
    for (const auto& ioc : n.matched_iocs) {
      input.indicators.insert(ioc);
      input.matched_nodes[ioc].insert(n.id);
    }
  return input;
}

std::set<std::string> select_seeds(const ReductionInput& input) {
  const std::string* best = nullptr;
  std::size_t best_count = 0;
  for (const auto& [ioc, nodes] : input.matched_nodes) {
    if (nodes.empty()) continue;
    if (!best || nodes.size() < best_count ||
        (nodes.size() == best_count && ioc < *best)) {
      best = &ioc;
      best_count = nodes.size();
    }
  }
  if (!best) throw GraphError("no indicator matched any node");
  return input.matched_nodes.at(*best);
}

std::set<std::string> adaptive_bfs_nodes(const Graph& graph,
                                         const std::string& start) {
  graph.node(start);  // validates id
  std::set<std::string> visited{start};
  std::deque<std::string> queue{start};
  while (!queue.empty()) {
    std::string cur = queue.front();
    queue.pop_front();
    for (const auto& [nbr, rel] : graph.neighbors(cur, Direction::Both)) {
      (void)rel;
      if (visited.count(nbr)) continue;
      const Node& n = graph.node(nbr);
      if (n.kind != NodeKind::Process && !n.suspicious) continue;
      visited.insert(nbr);
      queue.push_back(nbr);
    }
  }
  return visited;
}

Graph adaptive_bfs(const Graph& graph, const std::string& start) {
  return graph.induced(adaptive_bfs_nodes(graph, start));
}

namespace {

std::set<std::string> covered_by(const ReductionInput& input,
                                 const std::set<std::string>& nodes) {
  std::set<std::string> covered;
  for (const auto& [ioc, matched] : input.matched_nodes)
    for (const auto& id : matched)
      if (nodes.count(id)) {
        covered.insert(ioc);
        break;
      }
  return covered;
}

// Expands susp with BFS closures of remaining matched nodes until every
// coverable indicator is covered. Mirrors the recursive composition step.
void expand_from(const ReductionInput& input,
                 const std::set<std::string>& coverable,
                 std::set<std::string>& susp,
                 std::vector<std::string>& trace) {
  for (;;) {
    std::set<std::string> covered = covered_by(input, susp);
    std::vector<std::string> remain;
    for (const auto& ioc : coverable)
      if (!covered.count(ioc))
        for (const auto& id : input.matched_nodes.at(ioc))
          if (!susp.count(id)) remain.push_back(id);
    if (remain.empty()) return;
    std::sort(remain.begin(), remain.end());
    remain.erase(std::unique(remain.begin(), remain.end()), remain.end());
    for (const auto& id : remain) {
      if (susp.count(id)) continue;
      auto sub = adaptive_bfs_nodes(*input.graph, id);
      susp.insert(sub.begin(), sub.end());
      trace.push_back(id);
    }
  }
}

}  // namespace

std::vector<SuspGraph> expand_search(const ReductionInput& input) {
  std::set<std::string> seeds = select_seeds(input);
  std::set<std::string> coverable;
  std::set<std::string> uncoverable;
  for (const auto& ioc : input.indicators) {
    auto it = input.matched_nodes.find(ioc);
    if (it != input.matched_nodes.end() && !it->second.empty())
      coverable.insert(ioc);
    else
      uncoverable.insert(ioc);
  }

  // Susp accumulates across the seed loop; indicators still uncovered after
  // all seed closures are merged pull in their matched nodes until fixpoint.
  std::set<std::string> susp;
  std::vector<std::string> trace;
  for (const auto& seed : seeds) {
    auto sub = adaptive_bfs_nodes(*input.graph, seed);
    susp.insert(sub.begin(), sub.end());
    trace.push_back(seed);
  }
  expand_from(input, coverable, susp, trace);

  SuspGraph sg;
  sg.subgraph = input.graph->induced(susp);
  for (const auto& n : sg.subgraph.nodes())
    sg.covered_iocs.insert(n.matched_iocs.begin(), n.matched_iocs.end());
  sg.uncovered_iocs = uncoverable;
  sg.seed_trace = std::move(trace);
  std::vector<SuspGraph> out;
  out.push_back(std::move(sg));
  return out;
}

}  // namespace hunt
