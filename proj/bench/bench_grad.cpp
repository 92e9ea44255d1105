// Compares the serial and OpenMP batch-gradient paths on synthetic pairs and
// verifies the results agree bit-for-bit.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "hunt/gnn.hpp"
#include "hunt/trainset.hpp"

using namespace hunt;

int main(int argc, char** argv) {
  std::size_t n_pairs = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 64;
  int reps = argc > 2 ? std::atoi(argv[2]) : 3;

  // Build a dataset straight from the library pipeline.
  std::vector<Graph> sources;
  {
    // a handful of mid-sized synthetic provenance graphs
    for (int i = 0; i < 4; ++i) {
      Graph g;
      for (int p = 0; p < 12; ++p) {
        Node n;
        n.id = "p" + std::to_string(i) + "_" + std::to_string(p);
        n.kind = NodeKind::Process;
        n.attrs = {{"name", "proc" + std::to_string((i * 5 + p) % 9)}};
        g.add_node(n);
      }
      for (int f = 0; f < 20; ++f) {
        Node n;
        n.id = "f" + std::to_string(i) + "_" + std::to_string(f);
        n.kind = NodeKind::File;
        n.attrs = {{"file_name", "file" + std::to_string((i * 3 + f) % 15)}};
        g.add_node(n);
      }
      std::uint64_t state = 88 + i;
      auto next = [&]() { return state = state * 6364136223846793005ull + 1; };
      for (int p = 1; p < 12; ++p)
        g.add_edge("p" + std::to_string(i) + "_" + std::to_string(next() % p),
                   "p" + std::to_string(i) + "_" + std::to_string(p),
                   Relation::Fork);
      for (int f = 0; f < 20; ++f)
        g.add_edge(
            "p" + std::to_string(i) + "_" + std::to_string(next() % 12),
            "f" + std::to_string(i) + "_" + std::to_string(f),
            next() % 2 ? Relation::Read : Relation::Write);
      sources.push_back(std::move(g));
    }
  }
  auto samples = make_dataset(sources, n_pairs / 2, n_pairs - n_pairs / 2, {}, 5);

  std::vector<Sentence> corpus;
  for (const auto& s : samples) {
    auto sp = paths_to_sentences(s.prov, 3);
    corpus.insert(corpus.end(), sp.begin(), sp.end());
  }
  SkipGramConfig sg;
  sg.dim = 32;
  sg.epochs = 1;
  auto table = train_skipgram(corpus, sg);

  std::vector<GraphFeatures> fq, fp;
  std::vector<Pair> pairs;
  fq.reserve(samples.size());
  fp.reserve(samples.size());
  for (const auto& s : samples) {
    fq.push_back(gather_features(s.query, table));
    fp.push_back(gather_features(s.prov, table));
  }
  for (std::size_t i = 0; i < samples.size(); ++i)
    pairs.push_back({&samples[i].prov, &samples[i].query, &fp[i], &fq[i],
                     double(samples[i].label)});

  ModelConfig cfg;
  cfg.d_w = 32;
  cfg.d = 32;
  auto model = init_model(cfg, 17);

  auto time_it = [&](bool parallel, ModelParams& grad) {
    double best = 1e18;
    for (int r = 0; r < reps; ++r) {
      auto t0 = std::chrono::steady_clock::now();
      batch_grad(pairs, model, grad, parallel);
      auto t1 = std::chrono::steady_clock::now();
      best = std::min(
          best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
  };

  auto gs = zero_like(model), gp = zero_like(model);
  double serial_ms = time_it(false, gs);
  double parallel_ms = time_it(true, gp);

  bool identical = true;
  std::vector<const Mat*> a, b;
  gs.visit([&](const std::string&, const Mat& m) { a.push_back(&m); });
  gp.visit([&](const std::string&, const Mat& m) { b.push_back(&m); });
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i]->data != b[i]->data) identical = false;

  std::printf("pairs=%zu reps=%d\n", pairs.size(), reps);
  std::printf("serial   %.2f ms/batch\n", serial_ms);
  std::printf("parallel %.2f ms/batch (%.2fx)\n", parallel_ms,
              serial_ms / parallel_ms);
  std::printf("gradients bit-identical: %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
