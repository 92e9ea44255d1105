#pragma once

#include <cstdint>
#include <vector>

#include "hunt/embed.hpp"
#include "hunt/graph.hpp"
#include "hunt/model.hpp"
#include "hunt/tape.hpp"

namespace hunt {

// Per-node stacked attribute embedding rows (in-vocab tokens only). A node
// with no in-vocab token gets a 0-row matrix and contributes a zero feature.
struct GraphFeatures {
  std::vector<Mat> attr_vecs;
  std::size_t oov_tokens = 0;
};

GraphFeatures gather_features(const Graph& g, const EmbeddingTable& table);

struct ForwardDebug {
  std::vector<std::vector<double>> attr_weights_q, attr_weights_p;
  std::vector<double> pool_weights_q, pool_weights_p;
};

// Matching score in (0,1). Pure; thread-safe over shared read-only params.
double forward(const Graph& query, const Graph& prov, const GraphFeatures& fq,
               const GraphFeatures& fp, const ModelParams& model,
               ForwardDebug* debug = nullptr);

// ---- serial reference path (tape-free building blocks) ----
// The tape-based implementation is tested against these.

// Attention-weighted aggregation of attribute embedding rows; one output row
// per node. A node with no rows gets a zero feature.
Mat attr_input_features(const GraphFeatures& f, std::size_t d_w,
                        const AttrAttentionParams& p,
                        std::vector<std::vector<double>>* alphas = nullptr);

// L layers of ReLU(Ahat H W) over the symmetrized self-looped adjacency.
Mat gcn_encode(const Graph& g, const Mat& features,
               const std::vector<Mat>& weights);

// Softmax-normalized LeakyReLU(a . [W u ; W v]) scores; empty input gives an
// empty weight list.
std::vector<double> attend_neighbors(const Mat& u_state,
                                     const Mat& neighbor_states,
                                     const Mat& W_n, const Mat& a_n,
                                     double slope);

// One attention-aggregator layer: MLP(eps * h_u + sum_v alpha_v h_v),
// neighbors taken in both directions.
Mat prov_layer(const Graph& g, const Mat& h_prev, const ProvLayerParams& p,
               double slope);

// Per-node concatenation of layer states through the projection MLP.
Mat dense_concat(const std::vector<Mat>& states, const MlpParams& p);

// Softmax-weighted graph readout against the tanh(mean * W) context.
std::vector<double> pool_graph(const Mat& h, const Mat& w_pool,
                               std::vector<double>* weights = nullptr);

// K_ntn values in (-1,1): tanh(hq' W_k hp + V_k [hq;hp] + b_k).
std::vector<double> ntn_score(const std::vector<double>& hq,
                              const std::vector<double>& hp,
                              const NtnParams& p);

// Dense head mapping the NTN vector to a score in (0,1).
double head_score(const std::vector<double>& ntn_out, const HeadParams& p);

// Full forward composed from the blocks above.
double forward_reference(const Graph& query, const Graph& prov,
                         const GraphFeatures& fq, const GraphFeatures& fp,
                         const ModelParams& model);

struct Pair {
  const Graph* query = nullptr;
  const Graph* prov = nullptr;
  const GraphFeatures* fq = nullptr;
  const GraphFeatures* fp = nullptr;
  double label = 0.0;  // 0 or 1
};

// Sum of squared errors over the batch.
double batch_loss(const std::vector<Pair>& batch, const ModelParams& model);

// Loss and exact gradient for one pair; throws GraphError naming the first
// non-finite tensor if the backward pass produces one.
double pair_loss_grad(const Pair& pair, const ModelParams& model,
                      ModelParams& grad_out);

// Batch-summed gradient. Pairs are accumulated in fixed chunks so the serial
// and OpenMP paths produce bit-identical sums.
double batch_grad(const std::vector<Pair>& batch, const ModelParams& model,
                  ModelParams& grad_out, bool parallel = true);

struct TrainConfig {
  double lr = 0.005;
  // effective rate anneals linearly to lr * final_lr_frac over the epochs
  double final_lr_frac = 0.1;
  // L2 penalty, applied as the usual multiplicative shrink after each step
  double weight_decay = 1e-4;
  std::size_t batch_size = 32;
  int epochs = 150;
  double val_fraction = 0.1;
  // return the checkpoint with the best validation accuracy (ties go to the
  // later epoch) instead of the last epoch; no effect when the validation
  // split is empty
  bool keep_best_val = true;
  bool parallel = true;
  bool verbose = false;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;  // mean squared error per pair
  double val_accuracy = 0.0;
};

struct TrainResult {
  ModelParams model;
  std::vector<EpochStats> history;
};

// Mini-batch SGD; deterministic under a fixed seed. Aborts with the last
// good checkpoint if the loss goes non-finite.
TrainResult train(const std::vector<Pair>& dataset, const ModelConfig& mc,
                  const TrainConfig& tc, std::uint64_t seed);

}  // namespace hunt
