#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hunt/graph.hpp"

namespace hunt {

struct NoiseConfig {
  double p_drop_edge = 0.1;
  double p_drop_object_node = 0.1;
  double p_drop_attr = 0.3;
  std::uint64_t seed = 1;
};

struct GraphPairSample {
  Graph prov;
  Graph query;
  int label = 0;
  std::string note;  // generation recipe
};

// Union of all DFS paths from a process node with edge count <= max_len,
// plus induced edges. Throws if start is not a Process node.
Graph extract_subgraph(const Graph& g, const std::string& start_process,
                       int max_len = 3);

// Rule 1: merge process nodes sharing a name. Rule 2: among root-to-leaf
// paths with equal node-name sequences keep one; edges on only non-retained
// paths are removed. Idempotent.
Graph summarize(const Graph& g);

// Independent edge/object-node/attribute drops; resamples (up to 100 times)
// if the result would lose every node or every process node.
Graph add_noise(const Graph& g, const NoiseConfig& cfg);

// n_pos positives (query = noised summary of its own extraction) and n_neg
// negatives (query from a different extraction, <=90% node-name overlap),
// deterministically shuffled.
std::vector<GraphPairSample> make_dataset(const std::vector<Graph>& prov_graphs,
                                          std::size_t n_pos, std::size_t n_neg,
                                          const NoiseConfig& noise,
                                          std::uint64_t seed);

std::string sample_to_json(const GraphPairSample& s);
GraphPairSample sample_from_json(const std::string& text);
void save_dataset(const std::vector<GraphPairSample>& samples,
                  const std::string& dir);
std::vector<GraphPairSample> load_dataset(const std::string& dir);

}  // namespace hunt
