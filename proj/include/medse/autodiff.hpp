#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "medse/matrix.hpp"

namespace medse::ad {

// One tensor in the computation graph. Parameters are leaf nodes that
// outlive graphs; their grads accumulate across backward passes until an
// optimizer consumes and zeroes them.
struct Node {
  Matrix val;
  Matrix grad;  // allocated on first accumulation
  bool requires_grad = false;
  std::function<void()> backward;

  Matrix& ensure_grad() {
    if (grad.rows != val.rows || grad.cols != val.cols) grad = Matrix(val.rows, val.cols);
    return grad;
  }
};

using Var = std::shared_ptr<Node>;

// Creates a trainable leaf.
Var make_param(Matrix v);

// Tape of operations for one forward pass. With grad_enabled=false the ops
// only compute values (evaluation mode); backward() is then a no-op.
class Graph {
 public:
  explicit Graph(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}

  bool grad_enabled() const { return grad_enabled_; }

  Var input(Matrix v);  // constant leaf

  Var matmul(const Var& a, const Var& b);     // a[m,k] * b[k,n]
  Var matmul_nt(const Var& a, const Var& b);  // a[m,k] * b[n,k]^T
  Var add(const Var& a, const Var& b);
  Var add_rowvec(const Var& a, const Var& v);  // v broadcast over rows
  Var scale(const Var& a, double c);
  Var hadamard(const Var& a, const Matrix& mask);  // elementwise, constant mask
  Var gelu(const Var& a);
  Var tanh_act(const Var& a);
  Var softmax_rows(const Var& a);
  Var layer_norm(const Var& a, const Var& gain, const Var& bias, double eps = 1e-5);
  Var mean_rows(const Var& a);  // [m,n] -> [1,n]
  Var slice_rows(const Var& a, int r0, int r1);
  Var slice_cols(const Var& a, int c0, int c1);
  Var concat_cols(const Var& a, const Var& b);
  Var concat_rows(const std::vector<Var>& parts);
  Var row_normalize(const Var& a);  // rows scaled to unit L2 norm
  Var gather_rows(const Var& table, std::vector<int> ids);

  // InfoNCE with diagonal targets: sum_i [logsumexp(S_i,:) - S_ii].
  Var nce_diag_loss(const Var& scores);

  // Seeds the 1x1 root with grad 1 and replays the tape in reverse.
  void backward(const Var& root);

  std::size_t tape_size() const { return tape_.size(); }

 private:
  Var make(Matrix val, bool needs_grad);

  std::vector<Var> tape_;
  bool grad_enabled_;
};

}  // namespace medse::ad
