#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "hunt/graph.hpp"
#include "hunt/tensor.hpp"

namespace hunt {

using Sentence = std::vector<std::string>;

// Tokens describing one node: kind token first, then non-null attribute
// values in canonical key order. The kind token guarantees every node has at
// least one token.
std::vector<std::string> node_tokens(const Node& n);

// One sentence per path (every node as start, edge count <= max_len):
// [kind, attrs..., relation, kind, attrs..., ...]. Null attributes emit no
// token.
std::vector<Sentence> paths_to_sentences(const Graph& g, int max_len = 3);

struct EmbeddingTable {
  std::size_t dim = 0;
  std::vector<std::string> tokens;               // index -> token
  std::unordered_map<std::string, std::size_t> vocab;  // token -> index
  Mat vectors;  // |V| x dim

  bool has(const std::string& tok) const { return vocab.count(tok) != 0; }
  // Row view copy; throws on OOV.
  std::vector<double> vec(const std::string& tok) const;
};

struct SkipGramConfig {
  std::size_t dim = 64;
  int window = 5;
  int negatives = 5;
  int epochs = 10;
  double lr = 0.025;
  // postprocessing: subtract the vocabulary-mean vector (removes the shared
  // drift direction that otherwise dominates cosine similarity), then rescale
  // every row to a fixed L2 norm (0 disables rescaling)
  bool center = true;
  double row_norm = 4.0;
  std::uint64_t seed = 1;
};

// Skip-gram with negative sampling, single-threaded and deterministic under a
// fixed seed. Every token that appears at least once enters the vocab.
EmbeddingTable train_skipgram(const std::vector<Sentence>& sentences,
                              const SkipGramConfig& cfg);

std::string embedding_to_json(const EmbeddingTable& t);
EmbeddingTable embedding_from_json(const std::string& text);
EmbeddingTable load_embedding(const std::string& path);
void save_embedding(const EmbeddingTable& t, const std::string& path);

double cosine(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace hunt
