#include "hunt/embed.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "hunt/util.hpp"
#include "json.hpp"

namespace hunt {

std::vector<std::string> node_tokens(const Node& n) {
  std::vector<std::string> toks{to_string(n.kind)};
  for (const auto& key : attr_keys(n.kind)) {
    auto it = n.attrs.find(key);
    if (it != n.attrs.end() && it->second && !it->second->empty())
      toks.push_back(*it->second);
  }
  return toks;
}

std::vector<Sentence> paths_to_sentences(const Graph& g, int max_len) {
  std::vector<Sentence> out;
  for (const auto& n : g.nodes()) {
    for (const auto& walk : g.walk_paths(n.id, max_len)) {
      Sentence s;
      for (const auto& step : walk) {
        if (step.rel) s.push_back(to_string(*step.rel));
        auto toks = node_tokens(g.node(step.id));
        s.insert(s.end(), toks.begin(), toks.end());
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<double> EmbeddingTable::vec(const std::string& tok) const {
  auto it = vocab.find(tok);
  if (it == vocab.end()) throw GraphError("token not in vocab: " + tok);
  const double* row = &vectors.data[it->second * dim];
  return {row, row + dim};
}

EmbeddingTable train_skipgram(const std::vector<Sentence>& sentences,
                              const SkipGramConfig& cfg) {
  if (sentences.empty()) throw GraphError("empty sentence corpus");
  if (cfg.dim < 2) throw GraphError("embedding dim must be >= 2");

  EmbeddingTable table;
  table.dim = cfg.dim;
  std::vector<std::size_t> counts;
  std::vector<std::vector<std::size_t>> corpus;
  corpus.reserve(sentences.size());
  for (const auto& s : sentences) {
    std::vector<std::size_t> ids;
    ids.reserve(s.size());
    for (const auto& tok : s) {
      auto [it, fresh] = table.vocab.emplace(tok, table.tokens.size());
      if (fresh) {
        table.tokens.push_back(tok);
        counts.push_back(0);
      }
      counts[it->second]++;
      ids.push_back(it->second);
    }
    corpus.push_back(std::move(ids));
  }
  std::size_t V = table.tokens.size();

  // unigram^0.75 negative sampling table
  std::vector<double> cdf(V);
  double total = 0.0;
  for (std::size_t i = 0; i < V; ++i) {
    total += std::pow(static_cast<double>(counts[i]), 0.75);
    cdf[i] = total;
  }

  Rng rng(derive_seed(cfg.seed, "skipgram"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> initd(-0.5 / cfg.dim, 0.5 / cfg.dim);

  Mat in(V, cfg.dim), out(V, cfg.dim);
  for (double& x : in.data) x = initd(rng);

  auto sample_neg = [&]() {
    double u = unit(rng) * total;
    return static_cast<std::size_t>(
        std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  };
  auto sigmoid = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };

  std::vector<double> acc(cfg.dim);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const auto& sent : corpus) {
      for (std::size_t pos = 0; pos < sent.size(); ++pos) {
        std::size_t center = sent[pos];
        int lo = std::max<int>(0, static_cast<int>(pos) - cfg.window);
        int hi = std::min<int>(sent.size() - 1,
                               static_cast<int>(pos) + cfg.window);
        for (int c = lo; c <= hi; ++c) {
          if (c == static_cast<int>(pos)) continue;
          std::size_t context = sent[c];
          std::fill(acc.begin(), acc.end(), 0.0);
          double* vin = &in.data[center * cfg.dim];
          for (int k = 0; k <= cfg.negatives; ++k) {
            std::size_t target = k == 0 ? context : sample_neg();
            double label = k == 0 ? 1.0 : 0.0;
            if (k > 0 && target == context) continue;
            double* vout = &out.data[target * cfg.dim];
            double dot = 0.0;
            for (std::size_t d = 0; d < cfg.dim; ++d) dot += vin[d] * vout[d];
            double gl = (label - sigmoid(dot)) * cfg.lr;
            for (std::size_t d = 0; d < cfg.dim; ++d) {
              acc[d] += gl * vout[d];
              vout[d] += gl * vin[d];
            }
          }
          for (std::size_t d = 0; d < cfg.dim; ++d) vin[d] += acc[d];
        }
      }
    }
  }
  if (cfg.center) {
    std::vector<double> mean(cfg.dim, 0.0);
    for (std::size_t i = 0; i < V; ++i)
      for (std::size_t d = 0; d < cfg.dim; ++d)
        mean[d] += in.at(i, d) / static_cast<double>(V);
    for (std::size_t i = 0; i < V; ++i)
      for (std::size_t d = 0; d < cfg.dim; ++d) in.at(i, d) -= mean[d];
  }
  if (cfg.row_norm > 0.0) {
    for (std::size_t i = 0; i < V; ++i) {
      double n2 = 0.0;
      for (std::size_t d = 0; d < cfg.dim; ++d) n2 += in.at(i, d) * in.at(i, d);
      double scale = cfg.row_norm / (std::sqrt(n2) + 1e-12);
      for (std::size_t d = 0; d < cfg.dim; ++d) in.at(i, d) *= scale;
    }
  }
  table.vectors = std::move(in);
  return table;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / std::sqrt(aa * bb);
}

std::string embedding_to_json(const EmbeddingTable& t) {
  nlohmann::ordered_json doc;
  doc["d_w"] = t.dim;
  doc["vocab"] = t.tokens;
  doc["vectors"] = t.vectors.data;
  return doc.dump() + "\n";
}

EmbeddingTable embedding_from_json(const std::string& text) {
  auto doc = nlohmann::json::parse(text);
  EmbeddingTable t;
  t.dim = doc.at("d_w").get<std::size_t>();
  t.tokens = doc.at("vocab").get<std::vector<std::string>>();
  for (std::size_t i = 0; i < t.tokens.size(); ++i) t.vocab[t.tokens[i]] = i;
  t.vectors = Mat(t.tokens.size(), t.dim);
  t.vectors.data = doc.at("vectors").get<std::vector<double>>();
  if (t.vectors.data.size() != t.tokens.size() * t.dim)
    throw GraphError("embedding file: vectors length mismatch");
  return t;
}

EmbeddingTable load_embedding(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open embedding file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return embedding_from_json(text);
}

void save_embedding(const EmbeddingTable& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw GraphError("cannot write embedding file: " + path);
  out << embedding_to_json(t);
}

}  // namespace hunt
