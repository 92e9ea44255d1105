#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "hunt/gnn.hpp"
#include "hunt/util.hpp"
#include "support/synth.hpp"

using namespace hunt;

namespace {

Mat eye(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

Mat from(std::initializer_list<std::initializer_list<double>> rows) {
  Mat m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (double x : r) m.at(i, j++) = x;
    ++i;
  }
  return m;
}

MlpParams identity_mlp(std::size_t d) {
  // Exact pass-through for non-negative inputs (hidden ReLU).
  return {eye(d), Mat(1, d), eye(d), Mat(1, d)};
}

Graph chain(int n) {
  Graph g;
  for (int i = 0; i < n; ++i) {
    Node p;
    p.id = "p" + std::to_string(i);
    p.kind = NodeKind::Process;
    p.attrs = {{"name", "w" + std::to_string(i)}};
    g.add_node(p);
  }
  for (int i = 0; i + 1 < n; ++i)
    g.add_edge("p" + std::to_string(i), "p" + std::to_string(i + 1),
               Relation::Fork);
  return g;
}

// Embedding table with one distinct vector per token seen in g.
EmbeddingTable table_for(const Graph& g, std::size_t dim, std::uint64_t seed) {
  std::set<std::string> toks;
  for (const auto& n : g.nodes())
    for (const auto& t : node_tokens(n)) toks.insert(t);
  EmbeddingTable tab;
  tab.dim = dim;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  tab.vectors = Mat(toks.size(), dim);
  for (const auto& t : toks) {
    tab.vocab[t] = tab.tokens.size();
    tab.tokens.push_back(t);
  }
  for (double& x : tab.vectors.data) x = d(rng);
  return tab;
}

ModelConfig tiny_config() {
  ModelConfig c;
  c.d_w = 6;
  c.d = 6;
  c.d_attr = 4;
  c.d_attn = 4;
  c.gcn_layers = 2;
  c.prov_layers = 2;
  c.ntn_k = 3;
  c.head_hidden = 4;
  return c;
}

}  // namespace

TEST_CASE("gcn_encode: single node, identity weight") {
  Graph g = chain(1);
  Mat f = from({{1.0, -2.0}});
  auto h = gcn_encode(g, f, {eye(2)});
  CHECK(h.at(0, 0) == doctest::Approx(1.0));
  CHECK(h.at(0, 1) == doctest::Approx(0.0));  // ReLU clips the negative
}

TEST_CASE("gcn_encode: isolated nodes stay independent") {
  Graph g;
  for (int i = 0; i < 2; ++i) {
    Node p;
    p.id = "p" + std::to_string(i);
    p.kind = NodeKind::Process;
    p.attrs = {{"name", "x"}};
    g.add_node(p);
  }
  Mat f = from({{1.0}, {5.0}});
  Mat w = from({{2.0}});
  auto h = gcn_encode(g, f, {w});
  CHECK(h.at(0, 0) == doctest::Approx(2.0));
  CHECK(h.at(1, 0) == doctest::Approx(10.0));
}

TEST_CASE("gcn_encode: 3-node path against hand-computed normalization") {
  // Self-looped degrees (2,3,2); features (1,0,0), W=1.
  Graph g = chain(3);
  Mat f = from({{1.0}, {0.0}, {0.0}});
  auto h = gcn_encode(g, f, {from({{1.0}})});
  CHECK(h.at(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(h.at(1, 0) == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-12));
  CHECK(h.at(2, 0) == doctest::Approx(0.0));
}

TEST_CASE("gcn_encode rejects mismatched shapes") {
  Graph g = chain(2);
  CHECK_THROWS_AS(gcn_encode(g, Mat(1, 2), {eye(2)}), GraphError);
  CHECK_THROWS_AS(gcn_encode(g, Mat(2, 3), {eye(2)}), GraphError);
}

TEST_CASE("attend_neighbors base cases") {
  Mat u = from({{0.0}});
  Mat W = from({{1.0}});
  Mat a = from({{0.0, 1.0}});

  auto one = attend_neighbors(u, from({{3.0}}), W, a, 0.2);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == doctest::Approx(1.0));

  auto same = attend_neighbors(u, from({{2.0}, {2.0}}), W, a, 0.2);
  CHECK(same[0] == doctest::Approx(0.5));
  CHECK(same[1] == doctest::Approx(0.5));

  CHECK(attend_neighbors(u, Mat(0, 1), W, a, 0.2).empty());
}

TEST_CASE("attend_neighbors: scores (ln 9, 0) give weights (0.9, 0.1)") {
  // W=1, a=(0,1), u=0: score_v = LeakyReLU(state_v); both scores >= 0.
  Mat u = from({{0.0}});
  Mat W = from({{1.0}});
  Mat a = from({{0.0, 1.0}});
  auto w = attend_neighbors(u, from({{std::log(9.0)}, {0.0}}), W, a, 0.2);
  CHECK(w[0] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("prov_layer hand cases") {
  SUBCASE("isolated node, eps=1, identity MLP") {
    Graph g = chain(1);
    Mat h0 = from({{0.7, 0.3}});
    ProvLayerParams p{from({{1.0}}), eye(2) /*unused*/, Mat(1, 4),
                      identity_mlp(2)};
    auto h1 = prov_layer(g, h0, p, 0.2);
    CHECK(h1.at(0, 0) == doctest::Approx(0.7));
    CHECK(h1.at(0, 1) == doctest::Approx(0.3));
  }
  SUBCASE("two equal neighbors, eps=0: convex combination returns s") {
    Graph g = chain(3);  // middle node has both ends as neighbors
    Mat h0 = from({{0.4, 0.6}, {0.0, 0.0}, {0.4, 0.6}});
    ProvLayerParams p{from({{0.0}}), eye(2), from({{0.3, -0.2, 0.1, 0.5}}),
                      identity_mlp(2)};
    auto h1 = prov_layer(g, h0, p, 0.2);
    CHECK(h1.at(1, 0) == doctest::Approx(0.4));
    CHECK(h1.at(1, 1) == doctest::Approx(0.6));
  }
  SUBCASE("u=(1,0), neighbor (0,1), eps=0.5 gives (0.5, 1.0)") {
    Graph g = chain(2);
    Mat h0 = from({{1.0, 0.0}, {0.0, 1.0}});
    ProvLayerParams p{from({{0.5}}), eye(2), from({{0.1, 0.2, 0.3, 0.4}}),
                      identity_mlp(2)};
    auto h1 = prov_layer(g, h0, p, 0.2);
    CHECK(h1.at(0, 0) == doctest::Approx(0.5));
    CHECK(h1.at(0, 1) == doctest::Approx(1.0));
  }
}

TEST_CASE("dense_concat hand cases") {
  Mat h0 = from({{1.0, 2.0}});
  SUBCASE("single state through identity MLP") {
    CHECK(dense_concat({h0}, identity_mlp(2)).data ==
          std::vector<double>{1.0, 2.0});
  }
  SUBCASE("selection of the first block") {
    Mat h1 = from({{3.0, 4.0}});
    MlpParams sel{from({{1, 0}, {0, 1}, {0, 0}, {0, 0}}), Mat(1, 2), eye(2),
                  Mat(1, 2)};
    CHECK(dense_concat({h0, h1}, sel).data == std::vector<double>{1.0, 2.0});
  }
  SUBCASE("sum of blocks: (1,2)+(3,4) = (4,6)") {
    Mat h1 = from({{3.0, 4.0}});
    MlpParams sum{from({{1, 0}, {0, 1}, {1, 0}, {0, 1}}), Mat(1, 2), eye(2),
                  Mat(1, 2)};
    auto out = dense_concat({h0, h1}, sum);
    CHECK(out.at(0, 0) == doctest::Approx(4.0));
    CHECK(out.at(0, 1) == doctest::Approx(6.0));
  }
  SUBCASE("row mismatch throws") {
    CHECK_THROWS_AS(dense_concat({h0, Mat(2, 2)}, identity_mlp(4)),
                    GraphError);
  }
}

TEST_CASE("pool_graph hand cases") {
  SUBCASE("single node pools to itself with weight 1") {
    std::vector<double> w;
    auto hg = pool_graph(from({{0.3, -0.7}}), eye(2), &w);
    CHECK(hg == std::vector<double>{0.3, -0.7});
    REQUIRE(w.size() == 1);
    CHECK(w[0] == doctest::Approx(1.0));
  }
  SUBCASE("identical states give uniform weights") {
    std::vector<double> w;
    auto hg = pool_graph(from({{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}}), eye(2),
                         &w);
    for (double x : w) CHECK(x == doctest::Approx(1.0 / 3.0));
    CHECK(hg[0] == doctest::Approx(1.0));
    CHECK(hg[1] == doctest::Approx(2.0));
  }
  SUBCASE("zero context cancels (1, -1)") {
    auto hg = pool_graph(from({{1.0}, {-1.0}}), from({{0.0}}));
    CHECK(hg[0] == doctest::Approx(0.0));
  }
  SUBCASE("empty graph throws") {
    CHECK_THROWS_AS(pool_graph(Mat(0, 2), eye(2)), GraphError);
  }
}

TEST_CASE("ntn_score hand cases") {
  SUBCASE("all-zero parameters give the zero vector") {
    NtnParams p{{Mat(2, 2), Mat(2, 2)}, Mat(2, 4), Mat(1, 2)};
    auto out = ntn_score({1.0, 2.0}, {3.0, 4.0}, p);
    CHECK(out == std::vector<double>{0.0, 0.0});
  }
  SUBCASE("d=1 scalar case: tanh(2*1*3)") {
    NtnParams p{{from({{1.0}})}, Mat(1, 2), Mat(1, 1)};
    auto out = ntn_score({2.0}, {3.0}, p);
    CHECK(out[0] == doctest::Approx(std::tanh(6.0)).epsilon(1e-12));
  }
  SUBCASE("large bias saturates toward 1") {
    NtnParams p{{Mat(1, 1)}, Mat(1, 2), from({{8.0}})};
    auto out = ntn_score({0.0}, {0.0}, p);
    CHECK(out[0] > 0.999999);
    CHECK(out[0] < 1.0);
  }
  SUBCASE("width mismatch throws") {
    NtnParams p{{Mat(2, 2)}, Mat(1, 4), Mat(1, 1)};
    CHECK_THROWS_AS(ntn_score({1.0}, {1.0, 2.0}, p), GraphError);
  }
}

TEST_CASE("head_score squashes into (0,1) and saturates with bias") {
  HeadParams zero{Mat(2, 2), Mat(1, 2), Mat(2, 1), Mat(1, 1)};
  CHECK(head_score({0.5, -0.5}, zero) == doctest::Approx(0.5));
  HeadParams hi{Mat(2, 2), Mat(1, 2), Mat(2, 1), from({{25.0}})};
  CHECK(head_score({0.0, 0.0}, hi) > 0.9999999);
  CHECK(head_score({0.0, 0.0}, hi) < 1.0);
}

TEST_CASE("attribute attention hand cases (input features)") {
  AttrAttentionParams uniform{Mat(2, 2), Mat(1, 2)};  // all scores zero
  SUBCASE("single row passes through exactly") {
    GraphFeatures f;
    f.attr_vecs.push_back(from({{0.2, 0.8}}));
    std::vector<std::vector<double>> al;
    auto h = attr_input_features(f, 2, uniform, &al);
    CHECK(h.at(0, 0) == doctest::Approx(0.2));
    CHECK(h.at(0, 1) == doctest::Approx(0.8));
    CHECK(al[0][0] == doctest::Approx(1.0));
  }
  SUBCASE("zero attention parameters average the rows") {
    GraphFeatures f;
    f.attr_vecs.push_back(from({{1.0, 0.0}, {0.0, 1.0}}));
    auto h = attr_input_features(f, 2, uniform);
    CHECK(h.at(0, 0) == doctest::Approx(0.5));
    CHECK(h.at(0, 1) == doctest::Approx(0.5));
  }
  SUBCASE("scores (ln 3, 0) weight the rows (0.75, 0.25)") {
    // W_a = I, a = (ln3 / tanh 1, 0): v_p=(1,0) scores ln 3, v_q=(0,1) scores 0.
    AttrAttentionParams p{eye(2),
                          from({{std::log(3.0) / std::tanh(1.0), 0.0}})};
    GraphFeatures f;
    f.attr_vecs.push_back(from({{1.0, 0.0}, {0.0, 1.0}}));
    std::vector<std::vector<double>> al;
    auto h = attr_input_features(f, 2, p, &al);
    CHECK(al[0][0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(al[0][1] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(h.at(0, 0) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(h.at(0, 1) == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("node with no rows gets a zero feature") {
    GraphFeatures f;
    f.attr_vecs.push_back(Mat(0, 2));
    auto h = attr_input_features(f, 2, uniform);
    CHECK(h.at(0, 0) == 0.0);
    CHECK(h.at(0, 1) == 0.0);
  }
}

TEST_CASE("forward: range, determinism, and tape/reference agreement") {
  auto cfg = tiny_config();
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Graph q = synth::random_graph(rng, 6);
    Graph p = synth::random_graph(rng, 12);
    auto tab_q = table_for(q, cfg.d_w, 100 + trial);
    auto tab_p = table_for(p, cfg.d_w, 200 + trial);
    auto fq = gather_features(q, tab_q);
    auto fp = gather_features(p, tab_p);
    auto model = init_model(cfg, 300 + trial);

    double s = forward(q, p, fq, fp, model);
    CHECK(s > 0.0);
    CHECK(s < 1.0);
    CHECK(s == forward(q, p, fq, fp, model));
    CHECK(forward_reference(q, p, fq, fp, model) ==
          doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("forward: attention and pooling weights normalize to 1") {
  auto cfg = tiny_config();
  std::mt19937_64 rng(13);
  Graph q = synth::random_graph(rng, 8);
  Graph p = synth::random_graph(rng, 14);
  auto fq = gather_features(q, table_for(q, cfg.d_w, 1));
  auto fp = gather_features(p, table_for(p, cfg.d_w, 2));
  auto model = init_model(cfg, 3);
  ForwardDebug dbg;
  forward(q, p, fq, fp, model, &dbg);

  auto check_sum = [](const std::vector<double>& w) {
    if (w.empty()) return;
    double s = 0.0;
    for (double x : w) {
      CHECK(x >= 0.0);
      s += x;
    }
    CHECK(std::abs(s - 1.0) <= 1e-9);
  };
  for (const auto& w : dbg.attr_weights_q) check_sum(w);
  for (const auto& w : dbg.attr_weights_p) check_sum(w);
  check_sum(dbg.pool_weights_q);
  check_sum(dbg.pool_weights_p);
}

TEST_CASE("forward is invariant to node relabeling and reordering") {
  auto cfg = tiny_config();
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    Graph q = synth::random_graph(rng, 6);
    Graph p = synth::random_graph(rng, 10);
    auto tab_q = table_for(q, cfg.d_w, 500 + trial);
    auto tab_p = table_for(p, cfg.d_w, 600 + trial);
    auto model = init_model(cfg, 700 + trial);
    double s = forward(q, p, gather_features(q, tab_q),
                       gather_features(p, tab_p), model);

    Graph q2 = synth::relabel(q, rng);
    Graph p2 = synth::relabel(p, rng);
    double s2 = forward(q2, p2, gather_features(q2, tab_q),
                        gather_features(p2, tab_p), model);
    CHECK(std::abs(s - s2) < 1e-9);
  }
}

TEST_CASE("provenance encoder is K-hop local before pooling") {
  Graph g = chain(8);
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Mat h0(8, 3);
  for (double& x : h0.data) x = d(rng);
  Mat h0b = h0;
  h0b.at(0, 0) += 1.0;  // perturb node 0 only

  ModelConfig cfg;
  cfg.d_attn = 2;
  auto run = [&](const Mat& start, int k) {
    Mat h = start;
    std::mt19937_64 prng(23);  // same layer params both runs
    for (int i = 0; i < k; ++i) {
      ProvLayerParams p{from({{1.0}}), Mat(3, 2), Mat(1, 4), identity_mlp(3)};
      for (double& x : p.W_n.data) x = d(prng);
      for (double& x : p.a_n.data) x = d(prng);
      h = prov_layer(g, h, p, 0.2);
    }
    return h;
  };
  const int K = 2;
  Mat a = run(h0, K), b = run(h0b, K);
  for (std::size_t u = 0; u < 8; ++u) {
    double diff = 0.0;
    for (std::size_t j = 0; j < 3; ++j)
      diff += std::abs(a.at(u, j) - b.at(u, j));
    if (u <= K)
      CHECK(diff >= 0.0);  // may change within K hops
    else
      CHECK(diff == 0.0);  // must not change beyond K hops
  }
}

TEST_CASE("batch_loss is the sum of squared errors") {
  auto cfg = tiny_config();
  std::mt19937_64 rng(29);
  Graph q = synth::random_graph(rng, 5);
  Graph p = synth::random_graph(rng, 9);
  auto fq = gather_features(q, table_for(q, cfg.d_w, 31));
  auto fp = gather_features(p, table_for(p, cfg.d_w, 37));
  auto model = init_model(cfg, 41);

  Pair pos{&q, &p, &fq, &fp, 1.0};
  Pair neg{&q, &p, &fq, &fp, 0.0};
  double s = forward(q, p, fq, fp, model);
  CHECK(batch_loss({pos}, model) ==
        doctest::Approx((1.0 - s) * (1.0 - s)).epsilon(1e-12));
  CHECK(batch_loss({pos, neg}, model) ==
        doctest::Approx((1.0 - s) * (1.0 - s) + s * s).epsilon(1e-12));

  // Zeroed final head layer pins s = 0.5: single positive pair loses 0.25.
  auto flat = model;
  for (double& x : flat.head.W2.data) x = 0.0;
  for (double& x : flat.head.b2.data) x = 0.0;
  CHECK(batch_loss({pos}, flat) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(batch_loss({}, model), GraphError);
}

TEST_CASE("analytic gradients match central finite differences") {
  auto cfg = tiny_config();
  std::mt19937_64 rng(43);
  Graph q = synth::random_graph(rng, 5);
  Graph p = synth::random_graph(rng, 8);
  auto fq = gather_features(q, table_for(q, cfg.d_w, 47));
  auto fp = gather_features(p, table_for(p, cfg.d_w, 53));
  auto model = init_model(cfg, 59);
  Pair pair{&q, &p, &fq, &fp, 1.0};

  auto grad = zero_like(model);
  pair_loss_grad(pair, model, grad);

  // Sample >= 200 scalars spread over every tensor.
  struct Probe {
    std::string name;
    Mat* g;
    std::size_t i;
  };
  std::vector<Probe> probes;
  std::vector<std::pair<std::string, Mat*>> gtens;
  grad.visit([&](const std::string& n, Mat& m) { gtens.push_back({n, &m}); });
  std::size_t ti = 0;
  std::vector<Mat*> mtens;
  model.visit([&](const std::string&, Mat& m) { mtens.push_back(&m); });
  std::mt19937_64 pick(61);
  for (auto& [name, gm] : gtens) {
    std::size_t take = std::min<std::size_t>(gm->data.size(), 8);
    for (std::size_t k = 0; k < take; ++k)
      probes.push_back({name, gm,
                        std::uniform_int_distribution<std::size_t>(
                            0, gm->data.size() - 1)(pick)});
    ++ti;
  }
  REQUIRE(probes.size() >= 200);

  const double h = 1e-5;
  std::size_t checked = 0;
  for (std::size_t t = 0; t < gtens.size(); ++t) {
    for (const auto& pr : probes) {
      if (pr.g != gtens[t].second) continue;
      double* theta = &mtens[t]->data[pr.i];
      double keep = *theta;
      *theta = keep + h;
      double lp = batch_loss({pair}, model);
      *theta = keep - h;
      double lm = batch_loss({pair}, model);
      *theta = keep;
      double fd = (lp - lm) / (2.0 * h);
      double an = pr.g->data[pr.i];
      double denom = std::max({std::abs(fd), std::abs(an), 1e-8});
      CHECK_MESSAGE(std::abs(an - fd) / denom < 1e-3,
                    pr.name << "[" << pr.i << "] analytic=" << an
                            << " fd=" << fd);
      ++checked;
    }
  }
  CHECK(checked >= 200);
}

TEST_CASE("batch gradient is linear: duplicated pair doubles it") {
  auto cfg = tiny_config();
  std::mt19937_64 rng(67);
  Graph q = synth::random_graph(rng, 4);
  Graph p = synth::random_graph(rng, 7);
  auto fq = gather_features(q, table_for(q, cfg.d_w, 71));
  auto fp = gather_features(p, table_for(p, cfg.d_w, 73));
  auto model = init_model(cfg, 79);
  Pair pair{&q, &p, &fq, &fp, 0.0};

  auto g1 = zero_like(model), g2 = zero_like(model);
  batch_grad({pair}, model, g1, false);
  batch_grad({pair, pair}, model, g2, false);
  std::vector<double> flat1, flat2;
  g1.visit([&](const std::string&, const Mat& m) {
    flat1.insert(flat1.end(), m.data.begin(), m.data.end());
  });
  g2.visit([&](const std::string&, const Mat& m) {
    flat2.insert(flat2.end(), m.data.begin(), m.data.end());
  });
  REQUIRE(flat1.size() == flat2.size());
  for (std::size_t i = 0; i < flat1.size(); ++i)
    CHECK(flat2[i] == doctest::Approx(2.0 * flat1[i]).epsilon(1e-12));
}

TEST_CASE("train: lr=0 leaves parameters unchanged; fixed seed reproduces") {
  auto cfg = tiny_config();
  std::mt19937_64 rng(83);
  std::vector<Graph> qs, ps;
  std::vector<GraphFeatures> fqs, fps;
  for (int i = 0; i < 6; ++i) {
    qs.push_back(synth::random_graph(rng, 4));
    ps.push_back(synth::random_graph(rng, 8));
  }
  for (int i = 0; i < 6; ++i) {
    fqs.push_back(gather_features(qs[i], table_for(qs[i], cfg.d_w, 90 + i)));
    fps.push_back(gather_features(ps[i], table_for(ps[i], cfg.d_w, 96 + i)));
  }
  std::vector<Pair> data;
  for (int i = 0; i < 6; ++i)
    data.push_back({&qs[i], &ps[i], &fqs[i], &fps[i], i % 2 ? 1.0 : 0.0});

  TrainConfig tc;
  tc.lr = 0.0;
  tc.epochs = 2;
  tc.batch_size = 2;
  tc.val_fraction = 0.0;
  auto r0 = train(data, cfg, tc, 5);
  auto ref = init_model(cfg, 5);
  std::vector<double> a, b;
  r0.model.visit([&](const std::string&, const Mat& m) {
    a.insert(a.end(), m.data.begin(), m.data.end());
  });
  ref.visit([&](const std::string&, const Mat& m) {
    b.insert(b.end(), m.data.begin(), m.data.end());
  });
  CHECK(a == b);

  tc.lr = 0.05;
  tc.epochs = 3;
  auto r1 = train(data, cfg, tc, 7);
  auto r2 = train(data, cfg, tc, 7);
  std::vector<double> c, d;
  r1.model.visit([&](const std::string&, const Mat& m) {
    c.insert(c.end(), m.data.begin(), m.data.end());
  });
  r2.model.visit([&](const std::string&, const Mat& m) {
    d.insert(d.end(), m.data.begin(), m.data.end());
  });
  CHECK(c == d);
  CHECK(r1.history.size() == 3);
}

TEST_CASE("train drives a tiny separable dataset below 1e-3") {
  auto cfg = tiny_config();
  std::mt19937_64 rng(97);
  Graph q = synth::random_graph(rng, 4);
  Graph p1 = synth::random_graph(rng, 6);
  Graph p2 = synth::random_graph(rng, 6);
  auto fq = gather_features(q, table_for(q, cfg.d_w, 101));
  auto fp1 = gather_features(p1, table_for(p1, cfg.d_w, 103));
  auto fp2 = gather_features(p2, table_for(p2, cfg.d_w, 107));
  std::vector<Pair> data{{&q, &p1, &fq, &fp1, 1.0},
                         {&q, &p2, &fq, &fp2, 0.0}};

  TrainConfig tc;
  tc.lr = 0.5;
  tc.epochs = 1000;
  tc.batch_size = 1;
  tc.val_fraction = 0.0;
  auto r = train(data, cfg, tc, 11);
  CHECK(r.history.back().train_loss < 1e-3);
}

TEST_CASE("model checkpoint round-trips bit-exactly") {
  auto model = init_model(tiny_config(), 113);
  auto back = model_from_json(model_to_json(model));
  std::vector<double> a, b;
  model.visit([&](const std::string&, const Mat& m) {
    a.insert(a.end(), m.data.begin(), m.data.end());
  });
  back.visit([&](const std::string&, const Mat& m) {
    b.insert(b.end(), m.data.begin(), m.data.end());
  });
  CHECK(a == b);
  CHECK(back.cfg.d == model.cfg.d);
  CHECK(back.cfg.ntn_k == model.cfg.ntn_k);
}
