#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hunt/graph.hpp"

namespace hunt {

// query node id -> prov node ids with same kind and agreeing on every
// non-null query attribute (null acts as a wildcard).
using Alignment = std::map<std::string, std::set<std::string>>;

Alignment align_nodes(const Graph& query, const Graph& prov);

struct CountRatio {
  std::size_t count = 0;
  double ratio = 0.0;
};

CountRatio missing_nodes(const Graph& query, const Alignment& alignment);

// A query edge (i,j) is missing iff no directed prov path runs from a node
// aligned to i to a node aligned to j; unaligned endpoints count as missing.
CountRatio missing_paths(const Graph& query, const Graph& prov,
                         const Alignment& alignment);

struct GedResult {
  double raw = 0.0;
  double normalized = 0.0;  // raw / (|Vq|+|Eq|+|Vp|+|Ep|), clamped to [0,1]
  bool exact = true;
};

// Unit costs: node insert/delete/label-substitute = 1, edge insert/delete = 1.
// Exact branch-and-bound up to max_nodes total nodes; greedy upper bound
// beyond that (flagged exact=false).
GedResult ged(const Graph& query, const Graph& prov, std::size_t max_nodes = 12);

struct InconsistencyScore {
  CountRatio missing_node;
  CountRatio missing_path;
  GedResult ged;
};

InconsistencyScore inconsistency(const Graph& query, const Graph& prov);

// Weisfeiler-Lehman subtree kernel with cosine normalization. Node labels are
// kind + primary name; refinement folds in edge direction and relation.
double wl_similarity(const Graph& g1, const Graph& g2, int iterations);

// Mann-Whitney AUC; ties count 1/2. Throws on single-class input.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

// match iff score > 0.5 (strict).
bool classify(double score);

}  // namespace hunt
