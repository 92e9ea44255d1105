#include "hunt/tape.hpp"

#include <cmath>

namespace hunt {

Tape::Var Tape::push(Mat val, bool needs, std::function<void()> back) {
  Rec r;
  r.val = std::move(val);
  r.needs = needs;
  if (needs) {
    r.grad = Mat(r.val.rows, r.val.cols);
    r.back = std::move(back);
  }
  nodes_.push_back(std::move(r));
  return static_cast<Var>(nodes_.size() - 1);
}

Tape::Var Tape::leaf(Mat value, bool requires_grad) {
  return push(std::move(value), requires_grad, nullptr);
}

Tape::Var Tape::add(Var a, Var b) {
  assert(value(a).same_shape(value(b)));
  Mat out = value(a);
  axpy(1.0, value(b), out);
  bool needs = requires_grad(a) || requires_grad(b);
  Var v = push(std::move(out), needs, nullptr);
  if (needs)
    nodes_[v].back = [this, v, a, b] {
      if (requires_grad(a)) axpy(1.0, g(v), g(a));
      if (requires_grad(b)) axpy(1.0, g(v), g(b));
    };
  return v;
}

Tape::Var Tape::add_row_broadcast(Var a, Var bias) {
  const Mat& A = value(a);
  const Mat& B = value(bias);
  assert(B.rows == 1 && B.cols == A.cols);
  Mat out = A;
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j) out.at(i, j) += B.at(0, j);
  bool needs = requires_grad(a) || requires_grad(bias);
  Var v = push(std::move(out), needs, nullptr);
  if (needs)
    nodes_[v].back = [this, v, a, bias] {
      if (requires_grad(a)) axpy(1.0, g(v), g(a));
      if (requires_grad(bias)) {
        const Mat& gv = g(v);
        Mat& gb = g(bias);
        for (std::size_t i = 0; i < gv.rows; ++i)
          for (std::size_t j = 0; j < gv.cols; ++j)
            gb.at(0, j) += gv.at(i, j);
      }
    };
  return v;
}

Tape::Var Tape::sub(Var a, Var b) {
  assert(value(a).same_shape(value(b)));
  Mat out = value(a);
  axpy(-1.0, value(b), out);
  bool needs = requires_grad(a) || requires_grad(b);
  Var v = push(std::move(out), needs, nullptr);
  if (needs)
    nodes_[v].back = [this, v, a, b] {
      if (requires_grad(a)) axpy(1.0, g(v), g(a));
      if (requires_grad(b)) axpy(-1.0, g(v), g(b));
    };
  return v;
}

Tape::Var Tape::mul(Var a, Var b) {
  assert(value(a).same_shape(value(b)));
  Mat out = value(a);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= value(b).data[i];
  bool needs = requires_grad(a) || requires_grad(b);
  Var v = push(std::move(out), needs, nullptr);
  if (needs)
    nodes_[v].back = [this, v, a, b] {
      const Mat& gv = g(v);
      if (requires_grad(a))
        for (std::size_t i = 0; i < gv.size(); ++i)
          g(a).data[i] += gv.data[i] * value(b).data[i];
      if (requires_grad(b))
        for (std::size_t i = 0; i < gv.size(); ++i)
          g(b).data[i] += gv.data[i] * value(a).data[i];
    };
  return v;
}

Tape::Var Tape::scale(Var a, double c) {
  Mat out = value(a);
  for (double& x : out.data) x *= c;
  bool needs = requires_grad(a);
  Var v = push(std::move(out), needs, nullptr);
  if (needs)
    nodes_[v].back = [this, v, a, c] { axpy(c, g(v), g(a)); };
  return v;
}

Tape::Var Tape::scalar_mul(Var s, Var a) {
  assert(value(s).rows == 1 && value(s).cols == 1);
  double sv = value(s).data[0];
  Mat out = value(a);
  for (double& x : out.data) x *= sv;
  bool needs = requires_grad(a) || requires_grad(s);
  Var v = push(std::move(out), needs, nullptr);
  if (needs)
    nodes_[v].back = [this, v, a, s, sv] {
      const Mat& gv = g(v);
      if (requires_grad(a)) axpy(sv, gv, g(a));
      if (requires_grad(s)) {
        double acc = 0.0;
        for (std::size_t i = 0; i < gv.size(); ++i)
          acc += gv.data[i] * value(a).data[i];
        g(s).data[0] += acc;
      }
    };
  return v;
}

Tape::Var Tape::matmul(Var a, Var b) {
  Mat out = hunt::matmul(value(a), value(b));
  bool needs = requires_grad(a) || requires_grad(b);
  Var v = push(std::move(out), needs, nullptr);
  if (needs)
    nodes_[v].back = [this, v, a, b] {
      const Mat& gv = g(v);
      if (requires_grad(a)) {
        Mat da = hunt::matmul(gv, hunt::transpose(value(b)));
        axpy(1.0, da, g(a));
      }
      if (requires_grad(b)) {
        Mat db = hunt::matmul(hunt::transpose(value(a)), gv);
        axpy(1.0, db, g(b));
      }
    };
  return v;
}

Tape::Var Tape::transpose(Var a) {
  Mat out = hunt::transpose(value(a));
  bool needs = requires_grad(a);
  Var v = push(std::move(out), needs, nullptr);
  if (needs)
    nodes_[v].back = [this, v, a] {
      Mat gt = hunt::transpose(g(v));
      axpy(1.0, gt, g(a));
    };
  return v;
}

Tape::Var Tape::relu(Var a) {
  Mat out = value(a);
  for (double& x : out.data) x = x > 0.0 ? x : 0.0;
  bool needs = requires_grad(a);
  Var v = push(std::move(out), needs, nullptr);
  if (needs)
    nodes_[v].back = [this, v, a] {
      for (std::size_t i = 0; i < g(v).size(); ++i)
        if (value(a).data[i] > 0.0) g(a).data[i] += g(v).data[i];
    };
  return v;
}

Tape::Var Tape::leaky_relu(Var a, double slope) {
  Mat out = value(a);
  for (double& x : out.data) x = x > 0.0 ? x : slope * x;
  bool needs = requires_grad(a);
  Var v = push(std::move(out), needs, nullptr);
  if (needs)
    nodes_[v].back = [this, v, a, slope] {
      for (std::size_t i = 0; i < g(v).size(); ++i)
        g(a).data[i] +=
            g(v).data[i] * (value(a).data[i] > 0.0 ? 1.0 : slope);
    };
  return v;
}

Tape::Var Tape::tanh_(Var a) {
  Mat out = value(a);
  for (double& x : out.data) x = std::tanh(x);
  bool needs = requires_grad(a);
  Var v = push(std::move(out), needs, nullptr);
  if (needs)
    nodes_[v].back = [this, v, a] {
      for (std::size_t i = 0; i < g(v).size(); ++i) {
        double y = value(v).data[i];
        g(a).data[i] += g(v).data[i] * (1.0 - y * y);
      }
    };
  return v;
}

Tape::Var Tape::sigmoid(Var a) {
  Mat out = value(a);
  for (double& x : out.data) x = 1.0 / (1.0 + std::exp(-x));
  bool needs = requires_grad(a);
  Var v = push(std::move(out), needs, nullptr);
  if (needs)
    nodes_[v].back = [this, v, a] {
      for (std::size_t i = 0; i < g(v).size(); ++i) {
        double y = value(v).data[i];
        g(a).data[i] += g(v).data[i] * y * (1.0 - y);
      }
    };
  return v;
}

Tape::Var Tape::softmax_row(Var a) {
  const Mat& A = value(a);
  assert(A.rows == 1);
  Mat out = A;
  double mx = out.data[0];
  for (double x : out.data) mx = std::max(mx, x);
  double sum = 0.0;
  for (double& x : out.data) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double& x : out.data) x /= sum;
  bool needs = requires_grad(a);
  Var v = push(std::move(out), needs, nullptr);
  if (needs)
    nodes_[v].back = [this, v, a] {
      const Mat& y = value(v);
      const Mat& gv = g(v);
      double dot = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) dot += gv.data[i] * y.data[i];
      for (std::size_t i = 0; i < y.size(); ++i)
        g(a).data[i] += y.data[i] * (gv.data[i] - dot);
    };
  return v;
}

Tape::Var Tape::dot(Var a, Var b) {
  const Mat& A = value(a);
  const Mat& B = value(b);
  assert(A.same_shape(B));
  Mat out(1, 1);
  for (std::size_t i = 0; i < A.size(); ++i)
    out.data[0] += A.data[i] * B.data[i];
  bool needs = requires_grad(a) || requires_grad(b);
  Var v = push(std::move(out), needs, nullptr);
  if (needs)
    nodes_[v].back = [this, v, a, b] {
      double gv = g(v).data[0];
      if (requires_grad(a)) axpy(gv, value(b), g(a));
      if (requires_grad(b)) axpy(gv, value(a), g(b));
    };
  return v;
}

Tape::Var Tape::concat_cols(const std::vector<Var>& parts) {
  assert(!parts.empty());
  std::size_t rows = value(parts[0]).rows;
  std::size_t cols = 0;
  bool needs = false;
  for (Var p : parts) {
    assert(value(p).rows == rows);
    cols += value(p).cols;
    needs = needs || requires_grad(p);
  }
  Mat out(rows, cols);
  std::size_t off = 0;
  for (Var p : parts) {
    const Mat& P = value(p);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < P.cols; ++j)
        out.at(i, off + j) = P.at(i, j);
    off += P.cols;
  }
  Var v = push(std::move(out), needs, nullptr);
  if (needs)
    nodes_[v].back = [this, v, parts] {
      std::size_t off2 = 0;
      const Mat& gv = g(v);
      for (Var p : parts) {
        const Mat& P = value(p);
        if (requires_grad(p))
          for (std::size_t i = 0; i < P.rows; ++i)
            for (std::size_t j = 0; j < P.cols; ++j)
              g(p).at(i, j) += gv.at(i, off2 + j);
        off2 += P.cols;
      }
    };
  return v;
}

Tape::Var Tape::stack_rows(const std::vector<Var>& rows) {
  assert(!rows.empty());
  std::size_t cols = value(rows[0]).cols;
  bool needs = false;
  for (Var r : rows) {
    assert(value(r).rows == 1 && value(r).cols == cols);
    needs = needs || requires_grad(r);
  }
  Mat out(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      out.at(i, j) = value(rows[i]).at(0, j);
  Var v = push(std::move(out), needs, nullptr);
  if (needs)
    nodes_[v].back = [this, v, rows] {
      const Mat& gv = g(v);
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (requires_grad(rows[i]))
          for (std::size_t j = 0; j < gv.cols; ++j)
            g(rows[i]).at(0, j) += gv.at(i, j);
    };
  return v;
}

Tape::Var Tape::row(Var a, std::size_t i) {
  const Mat& A = value(a);
  assert(i < A.rows);
  Mat out(1, A.cols);
  for (std::size_t j = 0; j < A.cols; ++j) out.at(0, j) = A.at(i, j);
  bool needs = requires_grad(a);
  Var v = push(std::move(out), needs, nullptr);
  if (needs)
    nodes_[v].back = [this, v, a, i] {
      for (std::size_t j = 0; j < g(v).cols; ++j)
        g(a).at(i, j) += g(v).at(0, j);
    };
  return v;
}

Tape::Var Tape::mean_rows(Var a) {
  const Mat& A = value(a);
  Mat out(1, A.cols);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j) out.at(0, j) += A.at(i, j);
  for (double& x : out.data) x /= static_cast<double>(A.rows);
  bool needs = requires_grad(a);
  Var v = push(std::move(out), needs, nullptr);
  if (needs)
    nodes_[v].back = [this, v, a] {
      double inv = 1.0 / static_cast<double>(value(a).rows);
      for (std::size_t i = 0; i < value(a).rows; ++i)
        for (std::size_t j = 0; j < g(v).cols; ++j)
          g(a).at(i, j) += inv * g(v).at(0, j);
    };
  return v;
}

void Tape::backward(Var loss) {
  assert(value(loss).rows == 1 && value(loss).cols == 1);
  if (!requires_grad(loss)) return;
  g(loss).data[0] = 1.0;
  for (Var v = loss; v >= 0; --v)
    if (nodes_[v].needs && nodes_[v].back) nodes_[v].back();
}

}  // namespace hunt
