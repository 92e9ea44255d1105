#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hunt/tensor.hpp"

namespace hunt {

struct ModelConfig {
  std::size_t d_w = 64;        // attribute embedding width (input features)
  std::size_t d = 64;          // hidden width, both encoders end here
  std::size_t d_attr = 16;     // attribute attention projection
  std::size_t d_attn = 16;     // neighbor attention projection
  std::size_t gcn_layers = 3;  // query branch
  std::size_t prov_layers = 3;  // K
  std::size_t ntn_k = 16;
  std::size_t head_hidden = 16;
  double leaky_slope = 0.2;
};

struct AttrAttentionParams {
  Mat W_a;  // d_w x d_attr
  Mat a;    // 1 x d_attr
};

struct MlpParams {
  Mat W1, b1, W2, b2;  // in -> hidden (ReLU) -> out
};

struct ProvLayerParams {
  Mat eps;  // 1x1 learnable self-weight, init 1
  Mat W_n;  // in x d_attn neighbor attention projection
  Mat a_n;  // 1 x 2*d_attn scoring vector
  MlpParams mlp;
};

struct QueryEncoderParams {
  std::vector<Mat> gcn;  // layer l weight
  Mat W_pool;            // d x d
};

struct ProvEncoderParams {
  std::vector<ProvLayerParams> layers;
  MlpParams concat_mlp;  // (d_w + K*d) -> d -> d
  Mat W_pool;
};

struct NtnParams {
  std::vector<Mat> W;  // K_ntn slices, each d x d
  Mat V;               // K_ntn x 2d
  Mat b;               // 1 x K_ntn
};

struct HeadParams {
  Mat W1, b1;  // K_ntn -> hidden
  Mat W2, b2;  // hidden -> 1, sigmoid squash
};

struct ModelParams {
  ModelConfig cfg;
  AttrAttentionParams attr;
  QueryEncoderParams query;
  ProvEncoderParams prov;
  NtnParams ntn;
  HeadParams head;

  // Enumerates every learnable tensor in a fixed order.
  void visit(const std::function<void(const std::string&, Mat&)>& fn);
  void visit(const std::function<void(const std::string&, const Mat&)>& fn) const;
  std::size_t scalar_count() const;
  bool finite() const;
};

// Allocates all tensors with uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) init;
// eps scalars start at 1.
ModelParams init_model(const ModelConfig& cfg, std::uint64_t seed);
// Same shapes, all zeros; used for gradient accumulation.
ModelParams zero_like(const ModelParams& m);

// y += alpha * x over every tensor.
void axpy_params(double alpha, const ModelParams& x, ModelParams& y);

std::string model_to_json(const ModelParams& m);
ModelParams model_from_json(const std::string& text);
ModelParams load_model(const std::string& path);
void save_model(const ModelParams& m, const std::string& path);

}  // namespace hunt
