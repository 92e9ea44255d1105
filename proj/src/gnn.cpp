#include "hunt/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "hunt/util.hpp"

namespace hunt {

GraphFeatures gather_features(const Graph& g, const EmbeddingTable& table) {
  GraphFeatures f;
  f.attr_vecs.reserve(g.node_count());
  for (const auto& n : g.nodes()) {
    std::vector<std::vector<double>> rows;
    for (const auto& tok : node_tokens(n)) {
      if (table.has(tok))
        rows.push_back(table.vec(tok));
      else
        ++f.oov_tokens;
    }
    Mat m(rows.size(), table.dim);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < table.dim; ++j) m.at(i, j) = rows[i][j];
    f.attr_vecs.push_back(std::move(m));
  }
  return f;
}

namespace {

using Var = Tape::Var;

struct BoundLayer {
  Var eps, W_n, a_n, W1, b1, W2, b2;
};

struct Bound {
  Var attr_W_a, attr_a;
  std::vector<Var> gcn;
  Var q_pool;
  std::vector<BoundLayer> prov;
  Var c_W1, c_b1, c_W2, c_b2;
  Var p_pool;
  std::vector<Var> ntn_W;
  Var ntn_V, ntn_b;
  Var h_W1, h_b1, h_W2, h_b2;
  std::vector<Var> order;  // matches ModelParams::visit order
};

Bound bind(Tape& t, const ModelParams& m, bool grad) {
  Bound b;
  auto put = [&](const Mat& v) {
    Var x = t.leaf(v, grad);
    b.order.push_back(x);
    return x;
  };
  b.attr_W_a = put(m.attr.W_a);
  b.attr_a = put(m.attr.a);
  for (const auto& w : m.query.gcn) b.gcn.push_back(put(w));
  b.q_pool = put(m.query.W_pool);
  for (const auto& L : m.prov.layers) {
    BoundLayer bl;
    bl.eps = put(L.eps);
    bl.W_n = put(L.W_n);
    bl.a_n = put(L.a_n);
    bl.W1 = put(L.mlp.W1);
    bl.b1 = put(L.mlp.b1);
    bl.W2 = put(L.mlp.W2);
    bl.b2 = put(L.mlp.b2);
    b.prov.push_back(bl);
  }
  b.c_W1 = put(m.prov.concat_mlp.W1);
  b.c_b1 = put(m.prov.concat_mlp.b1);
  b.c_W2 = put(m.prov.concat_mlp.W2);
  b.c_b2 = put(m.prov.concat_mlp.b2);
  b.p_pool = put(m.prov.W_pool);
  for (const auto& w : m.ntn.W) b.ntn_W.push_back(put(w));
  b.ntn_V = put(m.ntn.V);
  b.ntn_b = put(m.ntn.b);
  b.h_W1 = put(m.head.W1);
  b.h_b1 = put(m.head.b1);
  b.h_W2 = put(m.head.W2);
  b.h_b2 = put(m.head.b2);
  return b;
}

// D^-1/2 (A_sym + I) D^-1/2 over binary symmetric adjacency.
Mat gcn_norm(const Graph& g) {
  std::size_t n = g.node_count();
  std::unordered_map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i) idx[g.nodes()[i].id] = i;
  Mat a(n, n);
  for (std::size_t i = 0; i < n; ++i) a.at(i, i) = 1.0;
  for (const auto& e : g.edges()) {
    std::size_t u = idx[e.src], v = idx[e.dst];
    a.at(u, v) = 1.0;
    a.at(v, u) = 1.0;
  }
  std::vector<double> dinv(n);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < n; ++j) deg += a.at(i, j);
    dinv[i] = 1.0 / std::sqrt(deg);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a.at(i, j) *= dinv[i] * dinv[j];
  return a;
}

// Unique neighbor row indices per node, both directions, sorted by node order.
std::vector<std::vector<std::size_t>> neighbor_index(const Graph& g) {
  std::size_t n = g.node_count();
  std::unordered_map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i) idx[g.nodes()[i].id] = i;
  std::vector<std::set<std::size_t>> acc(n);
  for (const auto& e : g.edges()) {
    std::size_t u = idx[e.src], v = idx[e.dst];
    if (u != v) {
      acc[u].insert(v);
      acc[v].insert(u);
    }
  }
  std::vector<std::vector<std::size_t>> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {acc[i].begin(), acc[i].end()};
  return out;
}

// Eq-1 style attribute attention; one feature row per node.
Var input_features(Tape& t, const Bound& b, const GraphFeatures& f,
                   std::size_t d_w,
                   std::vector<std::vector<double>>* dbg_weights) {
  std::vector<Var> rows;
  for (const auto& av : f.attr_vecs) {
    if (av.rows == 0) {
      rows.push_back(t.constant(Mat(1, d_w)));
      if (dbg_weights) dbg_weights->push_back({});
      continue;
    }
    Var vu = t.constant(av);
    Var proj = t.tanh_(t.matmul(vu, b.attr_W_a));          // n x d_attr
    Var scores = t.matmul(proj, t.transpose(b.attr_a));    // n x 1
    Var alpha = t.softmax_row(t.transpose(scores));        // 1 x n
    rows.push_back(t.matmul(alpha, vu));                   // 1 x d_w
    if (dbg_weights) dbg_weights->push_back(t.value(alpha).data);
  }
  return t.stack_rows(rows);
}

Var encode_query(Tape& t, const Bound& b, const Graph& g, Var h0) {
  Var ahat = t.constant(gcn_norm(g));
  Var h = h0;
  for (Var w : b.gcn) h = t.relu(t.matmul(t.matmul(ahat, h), w));
  return h;
}

Var mlp_apply(Tape& t, Var x, Var w1, Var b1, Var w2, Var b2) {
  Var hid = t.relu(t.add_row_broadcast(t.matmul(x, w1), b1));
  return t.add_row_broadcast(t.matmul(hid, w2), b2);
}

Var encode_prov(Tape& t, const Bound& b, const Graph& g, Var h0,
                double leaky_slope) {
  auto nbr = neighbor_index(g);
  std::size_t n = g.node_count();
  std::vector<Var> states{h0};
  Var h = h0;
  for (const auto& L : b.prov) {
    Var proj = t.matmul(h, L.W_n);  // n x d_attn
    std::vector<Var> out_rows;
    out_rows.reserve(n);
    for (std::size_t u = 0; u < n; ++u) {
      Var self = t.scalar_mul(L.eps, t.row(h, u));
      Var pre = self;
      if (!nbr[u].empty()) {
        Var pu = t.row(proj, u);
        std::vector<Var> scores;
        std::vector<Var> nrows;
        for (std::size_t v : nbr[u]) {
          Var cat = t.concat_cols({pu, t.row(proj, v)});  // 1 x 2*d_attn
          scores.push_back(t.dot(cat, L.a_n));
          nrows.push_back(t.row(h, v));
        }
        Var e = t.leaky_relu(t.concat_cols(scores), leaky_slope);
        Var alpha = t.softmax_row(e);
        Var agg = t.matmul(alpha, t.stack_rows(nrows));
        pre = t.add(self, agg);
      }
      out_rows.push_back(mlp_apply(t, pre, L.W1, L.b1, L.W2, L.b2));
    }
    h = t.stack_rows(out_rows);
    states.push_back(h);
  }
  Var cat = t.concat_cols(states);
  return mlp_apply(t, cat, b.c_W1, b.c_b1, b.c_W2, b.c_b2);
}

Var pool(Tape& t, Var h, Var w_pool, std::vector<double>* dbg_weights) {
  Var ctx = t.tanh_(t.matmul(t.mean_rows(h), w_pool));  // 1 x d
  Var z = t.transpose(t.matmul(h, t.transpose(ctx)));   // 1 x n
  Var w = t.softmax_row(z);
  if (dbg_weights) *dbg_weights = t.value(w).data;
  return t.matmul(w, h);  // 1 x d
}

Var score_head(Tape& t, const Bound& b, Var hq, Var hp) {
  std::vector<Var> slices;
  for (Var wk : b.ntn_W)
    slices.push_back(t.matmul(t.matmul(hq, wk), t.transpose(hp)));  // 1x1
  Var bilinear = t.concat_cols(slices);                    // 1 x K
  Var cat = t.concat_cols({hq, hp});                       // 1 x 2d
  Var linear = t.matmul(cat, t.transpose(b.ntn_V));        // 1 x K
  Var ntn = t.tanh_(t.add(bilinear, t.add(linear, b.ntn_b)));
  Var hid = t.relu(t.add(t.matmul(ntn, b.h_W1), b.h_b1));
  return t.sigmoid(t.add(t.matmul(hid, b.h_W2), b.h_b2));
}

Var score_on_tape(Tape& t, const Bound& b, const ModelConfig& cfg,
                  const Graph& query, const Graph& prov,
                  const GraphFeatures& fq, const GraphFeatures& fp,
                  ForwardDebug* debug) {
  if (query.node_count() == 0 || prov.node_count() == 0)
    throw GraphError("forward requires nonempty graphs");
  Var h0q = input_features(t, b, fq, cfg.d_w,
                           debug ? &debug->attr_weights_q : nullptr);
  Var h0p = input_features(t, b, fp, cfg.d_w,
                           debug ? &debug->attr_weights_p : nullptr);
  Var hq = encode_query(t, b, query, h0q);
  Var hp = encode_prov(t, b, prov, h0p, cfg.leaky_slope);
  Var gq = pool(t, hq, b.q_pool, debug ? &debug->pool_weights_q : nullptr);
  Var gp = pool(t, hp, b.p_pool, debug ? &debug->pool_weights_p : nullptr);
  return score_head(t, b, gq, gp);
}

}  // namespace

double forward(const Graph& query, const Graph& prov, const GraphFeatures& fq,
               const GraphFeatures& fp, const ModelParams& model,
               ForwardDebug* debug) {
  Tape t;
  Bound b = bind(t, model, false);
  Var s = score_on_tape(t, b, model.cfg, query, prov, fq, fp, debug);
  return t.value(s).data[0];
}

double batch_loss(const std::vector<Pair>& batch, const ModelParams& model) {
  if (batch.empty()) throw GraphError("empty batch");
  double acc = 0.0;
  for (const auto& p : batch) {
    double s = forward(*p.query, *p.prov, *p.fq, *p.fp, model);
    acc += (p.label - s) * (p.label - s);
  }
  return acc;
}

double pair_loss_grad(const Pair& pair, const ModelParams& model,
                      ModelParams& grad_out) {
  Tape t;
  Bound b = bind(t, model, true);
  Var s = score_on_tape(t, b, model.cfg, *pair.query, *pair.prov, *pair.fq,
                        *pair.fp, nullptr);
  Var diff = t.sub(s, t.constant(Mat(1, 1, pair.label)));
  Var loss = t.mul(diff, diff);
  t.backward(loss);
  std::size_t i = 0;
  std::string bad;
  grad_out.visit([&](const std::string& name, Mat& m) {
    m = t.grad(b.order[i]);
    if (bad.empty() && !m.finite()) bad = name;
    ++i;
  });
  if (!bad.empty())
    throw GraphError("non-finite gradient in tensor: " + bad);
  return t.value(loss).data[0];
}

double batch_grad(const std::vector<Pair>& batch, const ModelParams& model,
                  ModelParams& grad_out, bool parallel) {
  if (batch.empty()) throw GraphError("empty batch");
  // Fixed-size chunks accumulated in chunk order keep the floating-point sum
  // independent of the thread count.
  constexpr std::size_t kChunk = 4;
  std::size_t nchunks = (batch.size() + kChunk - 1) / kChunk;
  std::vector<ModelParams> partial(nchunks, zero_like(model));
  std::vector<double> losses(nchunks, 0.0);

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::size_t c = 0; c < nchunks; ++c) {
    ModelParams g = zero_like(model);
    for (std::size_t i = c * kChunk;
         i < std::min(batch.size(), (c + 1) * kChunk); ++i) {
      losses[c] += pair_loss_grad(batch[i], model, g);
      axpy_params(1.0, g, partial[c]);
      g = zero_like(model);
    }
  }
  grad_out = zero_like(model);
  double loss = 0.0;
  for (std::size_t c = 0; c < nchunks; ++c) {
    axpy_params(1.0, partial[c], grad_out);
    loss += losses[c];
  }
  return loss;
}

namespace {

// Mann-Whitney pairwise ranking statistic (AUC); 0.5 when a class is absent.
double val_ranking_score(const std::vector<double>& scores,
                         const std::vector<int>& labels) {
  double num = 0.0;
  std::size_t cnt = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++cnt;
      if (scores[i] > scores[j])
        num += 1.0;
      else if (scores[i] == scores[j])
        num += 0.5;
    }
  }
  return cnt ? num / static_cast<double>(cnt) : 0.5;
}

}  // namespace

TrainResult train(const std::vector<Pair>& dataset, const ModelConfig& mc,
                  const TrainConfig& tc, std::uint64_t seed) {
  if (dataset.empty()) throw GraphError("empty training dataset");
  bool has0 = false, has1 = false;
  for (const auto& p : dataset) (p.label > 0.5 ? has1 : has0) = true;
  if (!has0 || !has1)
    throw GraphError("training dataset needs both labels");

  Rng rng(derive_seed(seed, "train"));
  std::vector<std::size_t> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  std::size_t n_val =
      std::min(dataset.size() - 1,
               static_cast<std::size_t>(dataset.size() * tc.val_fraction));
  std::vector<std::size_t> val(order.end() - n_val, order.end());
  std::vector<std::size_t> tr(order.begin(), order.end() - n_val);

  TrainResult result;
  result.model = init_model(mc, seed);
  ModelParams last_good = result.model;
  ModelParams grad = zero_like(result.model);
  ModelParams best_model = result.model;
  double best_val = -1.0;

  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    double anneal =
        tc.epochs > 1
            ? 1.0 - (1.0 - tc.final_lr_frac) * epoch / (tc.epochs - 1.0)
            : 1.0;
    double lr_e = tc.lr * anneal;
    std::shuffle(tr.begin(), tr.end(), rng);
    double epoch_loss = 0.0;
    bool diverged = false;
    for (std::size_t off = 0; off < tr.size(); off += tc.batch_size) {
      std::vector<Pair> batch;
      for (std::size_t i = off; i < std::min(tr.size(), off + tc.batch_size);
           ++i)
        batch.push_back(dataset[tr[i]]);
      double l;
      try {
        l = batch_grad(batch, result.model, grad, tc.parallel);
      } catch (const GraphError&) {
        diverged = true;
        break;
      }
      if (!std::isfinite(l)) {
        diverged = true;
        break;
      }
      epoch_loss += l;
      axpy_params(-lr_e, grad, result.model);
      if (tc.weight_decay > 0.0) {
        double shrink = 1.0 - lr_e * tc.weight_decay;
        result.model.visit([&](const std::string&, Mat& t) {
          for (double& x : t.data) x *= shrink;
        });
      }
      if (!result.model.finite()) {
        diverged = true;
        break;
      }
    }
    if (diverged) {
      result.model = last_good;
      break;
    }
    last_good = result.model;

    EpochStats st;
    st.epoch = epoch;
    st.train_loss = epoch_loss / static_cast<double>(tr.size());
    if (!val.empty()) {
      std::size_t correct = 0;
      std::vector<double> vs;
      std::vector<int> vl;
      vs.reserve(val.size());
      vl.reserve(val.size());
      for (std::size_t i : val) {
        const Pair& p = dataset[i];
        double s = forward(*p.query, *p.prov, *p.fq, *p.fp, result.model);
        bool verdict = s > 0.5;
        if (verdict == (p.label > 0.5)) ++correct;
        vs.push_back(s);
        vl.push_back(p.label > 0.5 ? 1 : 0);
      }
      st.val_accuracy = static_cast<double>(correct) / val.size();
      // checkpoint selection uses the finer-grained pairwise ranking score;
      // ties keep the later (lower-loss) epoch
      if (tc.keep_best_val) {
        double rank = val_ranking_score(vs, vl);
        if (rank >= best_val) {
          best_val = rank;
          best_model = result.model;
        }
      }
    }
    result.history.push_back(st);
    if (tc.verbose)
      std::fprintf(stderr, "epoch %d loss %.6f val_acc %.3f\n", epoch,
                   st.train_loss, st.val_accuracy);
  }
  if (tc.keep_best_val && best_val >= 0.0) result.model = best_model;
  return result;
}

namespace {

std::vector<double> softmax_vec(std::vector<double> v) {
  double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double& x : v) x /= sum;
  return v;
}

Mat mlp_ref(const Mat& x, const MlpParams& p) {
  Mat hid = matmul(x, p.W1);
  for (std::size_t i = 0; i < hid.rows; ++i)
    for (std::size_t j = 0; j < hid.cols; ++j) {
      hid.at(i, j) += p.b1.at(0, j);
      if (hid.at(i, j) < 0.0) hid.at(i, j) = 0.0;
    }
  Mat out = matmul(hid, p.W2);
  for (std::size_t i = 0; i < out.rows; ++i)
    for (std::size_t j = 0; j < out.cols; ++j) out.at(i, j) += p.b2.at(0, j);
  return out;
}

}  // namespace

Mat attr_input_features(const GraphFeatures& f, std::size_t d_w,
                        const AttrAttentionParams& p,
                        std::vector<std::vector<double>>* alphas) {
  Mat h0(f.attr_vecs.size(), d_w);
  for (std::size_t u = 0; u < f.attr_vecs.size(); ++u) {
    const Mat& av = f.attr_vecs[u];
    if (av.rows == 0) {
      if (alphas) alphas->push_back({});
      continue;
    }
    std::vector<double> scores(av.rows, 0.0);
    for (std::size_t i = 0; i < av.rows; ++i)
      for (std::size_t j = 0; j < p.W_a.cols; ++j) {
        double proj = 0.0;
        for (std::size_t k = 0; k < d_w; ++k)
          proj += av.at(i, k) * p.W_a.at(k, j);
        scores[i] += std::tanh(proj) * p.a.at(0, j);
      }
    auto alpha = softmax_vec(scores);
    for (std::size_t i = 0; i < av.rows; ++i)
      for (std::size_t k = 0; k < d_w; ++k)
        h0.at(u, k) += alpha[i] * av.at(i, k);
    if (alphas) alphas->push_back(alpha);
  }
  return h0;
}

Mat gcn_encode(const Graph& g, const Mat& features,
               const std::vector<Mat>& weights) {
  if (features.rows != g.node_count())
    throw GraphError("gcn_encode: feature row count mismatch");
  Mat ahat = gcn_norm(g);
  Mat h = features;
  for (const auto& w : weights) {
    if (w.rows != h.cols) throw GraphError("gcn_encode: weight shape mismatch");
    h = matmul(matmul(ahat, h), w);
    for (double& x : h.data) x = x > 0.0 ? x : 0.0;
  }
  return h;
}

std::vector<double> attend_neighbors(const Mat& u_state,
                                     const Mat& neighbor_states,
                                     const Mat& W_n, const Mat& a_n,
                                     double slope) {
  if (neighbor_states.rows == 0) return {};
  std::size_t da = W_n.cols;
  auto project = [&](const Mat& m, std::size_t r) {
    std::vector<double> p(da, 0.0);
    for (std::size_t j = 0; j < da; ++j)
      for (std::size_t k = 0; k < W_n.rows; ++k)
        p[j] += m.at(r, k) * W_n.at(k, j);
    return p;
  };
  auto pu = project(u_state, 0);
  std::vector<double> scores;
  for (std::size_t v = 0; v < neighbor_states.rows; ++v) {
    auto pv = project(neighbor_states, v);
    double e = 0.0;
    for (std::size_t j = 0; j < da; ++j)
      e += pu[j] * a_n.at(0, j) + pv[j] * a_n.at(0, da + j);
    scores.push_back(e > 0.0 ? e : slope * e);
  }
  return softmax_vec(scores);
}

Mat prov_layer(const Graph& g, const Mat& h_prev, const ProvLayerParams& p,
               double slope) {
  if (h_prev.rows != g.node_count())
    throw GraphError("prov_layer: state row count mismatch");
  auto nbr = neighbor_index(g);
  Mat out(h_prev.rows, p.mlp.W2.cols);
  for (std::size_t u = 0; u < h_prev.rows; ++u) {
    Mat pre(1, h_prev.cols);
    for (std::size_t j = 0; j < h_prev.cols; ++j)
      pre.at(0, j) = p.eps.data[0] * h_prev.at(u, j);
    if (!nbr[u].empty()) {
      Mat ustate(1, h_prev.cols);
      for (std::size_t j = 0; j < h_prev.cols; ++j)
        ustate.at(0, j) = h_prev.at(u, j);
      Mat nstates(nbr[u].size(), h_prev.cols);
      for (std::size_t vi = 0; vi < nbr[u].size(); ++vi)
        for (std::size_t j = 0; j < h_prev.cols; ++j)
          nstates.at(vi, j) = h_prev.at(nbr[u][vi], j);
      auto alpha = attend_neighbors(ustate, nstates, p.W_n, p.a_n, slope);
      for (std::size_t vi = 0; vi < nbr[u].size(); ++vi)
        for (std::size_t j = 0; j < h_prev.cols; ++j)
          pre.at(0, j) += alpha[vi] * nstates.at(vi, j);
    }
    Mat row = mlp_ref(pre, p.mlp);
    for (std::size_t j = 0; j < out.cols; ++j) out.at(u, j) = row.at(0, j);
  }
  return out;
}

Mat dense_concat(const std::vector<Mat>& states, const MlpParams& p) {
  if (states.empty()) throw GraphError("dense_concat: no states");
  std::size_t rows = states[0].rows;
  std::size_t cols = 0;
  for (const auto& s : states) {
    if (s.rows != rows) throw GraphError("dense_concat: row count mismatch");
    cols += s.cols;
  }
  Mat cat(rows, cols);
  std::size_t off = 0;
  for (const auto& s : states) {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < s.cols; ++j) cat.at(i, off + j) = s.at(i, j);
    off += s.cols;
  }
  return mlp_ref(cat, p);
}

std::vector<double> pool_graph(const Mat& h, const Mat& w_pool,
                               std::vector<double>* weights) {
  if (h.rows == 0) throw GraphError("pool_graph: empty graph");
  std::size_t n = h.rows, d = h.cols;
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mean[j] += h.at(i, j) / n;
  std::vector<double> ctx(d, 0.0);
  for (std::size_t j = 0; j < w_pool.cols; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) acc += mean[k] * w_pool.at(k, j);
    ctx[j] = std::tanh(acc);
  }
  std::vector<double> z(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) z[i] += h.at(i, j) * ctx[j];
  auto w = softmax_vec(z);
  if (weights) *weights = w;
  std::vector<double> hg(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) hg[j] += w[i] * h.at(i, j);
  return hg;
}

std::vector<double> ntn_score(const std::vector<double>& hq,
                              const std::vector<double>& hp,
                              const NtnParams& p) {
  if (hq.size() != hp.size()) throw GraphError("ntn_score: width mismatch");
  std::size_t d = hq.size();
  std::vector<double> out(p.W.size(), 0.0);
  for (std::size_t k = 0; k < p.W.size(); ++k) {
    double bil = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        bil += hq[i] * p.W[k].at(i, j) * hp[j];
    double lin = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      lin += p.V.at(k, i) * hq[i] + p.V.at(k, d + i) * hp[i];
    out[k] = std::tanh(bil + lin + p.b.at(0, k));
  }
  return out;
}

double head_score(const std::vector<double>& ntn_out, const HeadParams& p) {
  std::vector<double> hid(p.W1.cols, 0.0);
  for (std::size_t j = 0; j < p.W1.cols; ++j) {
    double acc = p.b1.at(0, j);
    for (std::size_t k = 0; k < ntn_out.size(); ++k)
      acc += ntn_out[k] * p.W1.at(k, j);
    hid[j] = acc > 0.0 ? acc : 0.0;
  }
  double s = p.b2.at(0, 0);
  for (std::size_t j = 0; j < hid.size(); ++j) s += hid[j] * p.W2.at(j, 0);
  return 1.0 / (1.0 + std::exp(-s));
}

double forward_reference(const Graph& query, const Graph& prov,
                         const GraphFeatures& fq, const GraphFeatures& fp,
                         const ModelParams& model) {
  const auto& cfg = model.cfg;
  Mat h0q = attr_input_features(fq, cfg.d_w, model.attr);
  Mat hq = gcn_encode(query, h0q, model.query.gcn);
  auto gq = pool_graph(hq, model.query.W_pool);

  Mat h = attr_input_features(fp, cfg.d_w, model.attr);
  std::vector<Mat> states{h};
  for (const auto& L : model.prov.layers) {
    h = prov_layer(prov, h, L, cfg.leaky_slope);
    states.push_back(h);
  }
  Mat hfinal = dense_concat(states, model.prov.concat_mlp);
  auto gp = pool_graph(hfinal, model.prov.W_pool);

  return head_score(ntn_score(gq, gp, model.ntn), model.head);
}

}  // namespace hunt
