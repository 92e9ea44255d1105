#pragma once

#include <functional>
#include <vector>

#include "hunt/tensor.hpp"

namespace hunt {

// Reverse-mode tape over Mat values. Scoped to the ops this model needs;
// values are computed eagerly, gradients by replaying the tape backwards.
class Tape {
 public:
  using Var = int;

  Var leaf(Mat value, bool requires_grad);
  Var constant(Mat value) { return leaf(std::move(value), false); }

  Var add(Var a, Var b);                  // same shape
  Var add_row_broadcast(Var a, Var bias);  // (N x d) + (1 x d)
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);        // elementwise
  Var scale(Var a, double c);
  Var scalar_mul(Var s, Var a);  // s is 1x1
  Var matmul(Var a, Var b);
  Var transpose(Var a);
  Var relu(Var a);
  Var leaky_relu(Var a, double slope);
  Var tanh_(Var a);
  Var sigmoid(Var a);
  Var softmax_row(Var a);  // a is 1xN
  Var dot(Var a, Var b);   // 1xN . 1xN -> 1x1
  Var concat_cols(const std::vector<Var>& parts);
  Var stack_rows(const std::vector<Var>& rows);  // each 1xd
  Var row(Var a, std::size_t i);
  Var mean_rows(Var a);

  const Mat& value(Var v) const { return nodes_[v].val; }
  const Mat& grad(Var v) const { return nodes_[v].grad; }
  bool requires_grad(Var v) const { return nodes_[v].needs; }
  std::size_t size() const { return nodes_.size(); }

  // Seeds d(loss)/d(loss)=1 and accumulates gradients into every node that
  // requires them. loss must be 1x1.
  void backward(Var loss);

 private:
  struct Rec {
    Mat val;
    Mat grad;
    bool needs = false;
    std::function<void()> back;
  };
  std::vector<Rec> nodes_;

  Var push(Mat val, bool needs, std::function<void()> back);
  Mat& g(Var v) { return nodes_[v].grad; }
};

}  // namespace hunt
