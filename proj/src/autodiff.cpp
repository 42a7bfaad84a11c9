#include "medse/autodiff.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "medse/kernels.hpp"

namespace medse::ad {

namespace {

inline void accum(Node& n, const Matrix& delta) {
  Matrix& g = n.ensure_grad();
  for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] += delta.data[i];
}

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;

}  // namespace

Var make_param(Matrix v) {
  auto n = std::make_shared<Node>();
  n->val = std::move(v);
  n->requires_grad = true;
  return n;
}

Var Graph::input(Matrix v) {
  auto n = std::make_shared<Node>();
  n->val = std::move(v);
  return n;
}

Var Graph::make(Matrix val, bool needs_grad) {
  auto n = std::make_shared<Node>();
  n->val = std::move(val);
  if (grad_enabled_ && needs_grad) {
    n->requires_grad = true;
    tape_.push_back(n);
  }
  return n;
}

Var Graph::matmul(const Var& a, const Var& b) {
  Matrix c = kern::matmul_nn(a->val, b->val);
  Var out = make(std::move(c), a->requires_grad || b->requires_grad);
  if (out->requires_grad) {
    Var o = out;
    out->backward = [a, b, o]() {
      if (a->requires_grad) accum(*a, kern::matmul_nt(o->grad, b->val));
      if (b->requires_grad) accum(*b, kern::matmul_tn(a->val, o->grad));
    };
  }
  return out;
}

Var Graph::matmul_nt(const Var& a, const Var& b) {
  Matrix c = kern::matmul_nt(a->val, b->val);
  bool needs = a->requires_grad || b->requires_grad;
  Var out = make(std::move(c), needs);
  if (out->requires_grad) {
    Var o = out;
    out->backward = [a, b, o]() {
      if (a->requires_grad) accum(*a, kern::matmul_nn(o->grad, b->val));
      if (b->requires_grad) accum(*b, kern::matmul_tn(o->grad, a->val));
    };
  }
  return out;
}

Var Graph::add(const Var& a, const Var& b) {
  assert(a->val.same_shape(b->val));
  Matrix c = a->val;
  for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] += b->val.data[i];
  Var out = make(std::move(c), a->requires_grad || b->requires_grad);
  if (out->requires_grad) {
    Var o = out;
    out->backward = [a, b, o]() {
      if (a->requires_grad) accum(*a, o->grad);
      if (b->requires_grad) accum(*b, o->grad);
    };
  }
  return out;
}

Var Graph::add_rowvec(const Var& a, const Var& v) {
  assert(v->val.rows == 1 && v->val.cols == a->val.cols);
  Matrix c = a->val;
  for (int i = 0; i < c.rows; ++i) {
    double* r = c.row(i);
    const double* vr = v->val.row(0);
    for (int j = 0; j < c.cols; ++j) r[j] += vr[j];
  }
  Var out = make(std::move(c), a->requires_grad || v->requires_grad);
  if (out->requires_grad) {
    Var o = out;
    out->backward = [a, v, o]() {
      if (a->requires_grad) accum(*a, o->grad);
      if (v->requires_grad) {
        Matrix& g = v->ensure_grad();
        for (int i = 0; i < o->grad.rows; ++i) {
          const double* gr = o->grad.row(i);
          for (int j = 0; j < o->grad.cols; ++j) g(0, j) += gr[j];
        }
      }
    };
  }
  return out;
}

Var Graph::scale(const Var& a, double c) {
  Matrix m = a->val;
  for (double& x : m.data) x *= c;
  Var out = make(std::move(m), a->requires_grad);
  if (out->requires_grad) {
    Var o = out;
    out->backward = [a, c, o]() {
      Matrix& g = a->ensure_grad();
      for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] += c * o->grad.data[i];
    };
  }
  return out;
}

Var Graph::hadamard(const Var& a, const Matrix& mask) {
  assert(a->val.same_shape(mask));
  Matrix m = a->val;
  for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] *= mask.data[i];
  Var out = make(std::move(m), a->requires_grad);
  if (out->requires_grad) {
    Var o = out;
    Matrix mk = mask;
    out->backward = [a, mk = std::move(mk), o]() {
      Matrix& g = a->ensure_grad();
      for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] += mk.data[i] * o->grad.data[i];
    };
  }
  return out;
}

Var Graph::gelu(const Var& a) {
  Matrix m = a->val;
  for (double& x : m.data) {
    double t = std::tanh(kGeluC * (x + kGeluA * x * x * x));
    x = 0.5 * x * (1.0 + t);
  }
  Var out = make(std::move(m), a->requires_grad);
  if (out->requires_grad) {
    Var o = out;
    out->backward = [a, o]() {
      Matrix& g = a->ensure_grad();
      for (std::size_t i = 0; i < g.data.size(); ++i) {
        double x = a->val.data[i];
        double u = kGeluC * (x + kGeluA * x * x * x);
        double t = std::tanh(u);
        double d = 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * kGeluC * (1.0 + 3.0 * kGeluA * x * x);
        g.data[i] += d * o->grad.data[i];
      }
    };
  }
  return out;
}

Var Graph::tanh_act(const Var& a) {
  Matrix m = a->val;
  for (double& x : m.data) x = std::tanh(x);
  Var out = make(std::move(m), a->requires_grad);
  if (out->requires_grad) {
    Var o = out;
    out->backward = [a, o]() {
      Matrix& g = a->ensure_grad();
      for (std::size_t i = 0; i < g.data.size(); ++i) {
        double y = o->val.data[i];
        g.data[i] += (1.0 - y * y) * o->grad.data[i];
      }
    };
  }
  return out;
}

Var Graph::softmax_rows(const Var& a) {
  Matrix m = a->val;
  kern::softmax_rows(m);
  Var out = make(std::move(m), a->requires_grad);
  if (out->requires_grad) {
    Var o = out;
    out->backward = [a, o]() {
      Matrix& g = a->ensure_grad();
      for (int i = 0; i < o->val.rows; ++i) {
        const double* y = o->val.row(i);
        const double* dy = o->grad.row(i);
        double s = dot(y, dy, o->val.cols);
        double* gr = g.row(i);
        for (int j = 0; j < o->val.cols; ++j) gr[j] += y[j] * (dy[j] - s);
      }
    };
  }
  return out;
}

Var Graph::layer_norm(const Var& a, const Var& gain, const Var& bias, double eps) {
  const int rows = a->val.rows, cols = a->val.cols;
  assert(gain->val.rows == 1 && gain->val.cols == cols);
  assert(bias->val.rows == 1 && bias->val.cols == cols);
  Matrix xhat(rows, cols);
  std::vector<double> inv_std(rows);
  Matrix y(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const double* x = a->val.row(i);
    double mu = 0.0;
    for (int j = 0; j < cols; ++j) mu += x[j];
    mu /= cols;
    double var = 0.0;
    for (int j = 0; j < cols; ++j) {
      double d = x[j] - mu;
      var += d * d;
    }
    var /= cols;
    double inv = 1.0 / std::sqrt(var + eps);
    inv_std[i] = inv;
    double* xh = xhat.row(i);
    double* yr = y.row(i);
    for (int j = 0; j < cols; ++j) {
      xh[j] = (x[j] - mu) * inv;
      yr[j] = gain->val(0, j) * xh[j] + bias->val(0, j);
    }
  }
  bool needs = a->requires_grad || gain->requires_grad || bias->requires_grad;
  Var out = make(std::move(y), needs);
  if (out->requires_grad) {
    Var o = out;
    auto xh = std::make_shared<Matrix>(std::move(xhat));
    auto is = std::make_shared<std::vector<double>>(std::move(inv_std));
    out->backward = [a, gain, bias, o, xh, is]() {
      const int rows = o->val.rows, cols = o->val.cols;
      if (gain->requires_grad) {
        Matrix& gg = gain->ensure_grad();
        for (int i = 0; i < rows; ++i)
          for (int j = 0; j < cols; ++j) gg(0, j) += o->grad(i, j) * (*xh)(i, j);
      }
      if (bias->requires_grad) {
        Matrix& gb = bias->ensure_grad();
        for (int i = 0; i < rows; ++i)
          for (int j = 0; j < cols; ++j) gb(0, j) += o->grad(i, j);
      }
      if (a->requires_grad) {
        Matrix& ga = a->ensure_grad();
        for (int i = 0; i < rows; ++i) {
          double m1 = 0.0, m2 = 0.0;
          for (int j = 0; j < cols; ++j) {
            double dxh = o->grad(i, j) * gain->val(0, j);
            m1 += dxh;
            m2 += dxh * (*xh)(i, j);
          }
          m1 /= cols;
          m2 /= cols;
          for (int j = 0; j < cols; ++j) {
            double dxh = o->grad(i, j) * gain->val(0, j);
            ga(i, j) += (*is)[i] * (dxh - m1 - (*xh)(i, j) * m2);
          }
        }
      }
    };
  }
  return out;
}

Var Graph::mean_rows(const Var& a) {
  const int rows = a->val.rows, cols = a->val.cols;
  assert(rows > 0);
  Matrix m(1, cols);
  for (int i = 0; i < rows; ++i) {
    const double* r = a->val.row(i);
    for (int j = 0; j < cols; ++j) m(0, j) += r[j];
  }
  for (int j = 0; j < cols; ++j) m(0, j) /= rows;
  Var out = make(std::move(m), a->requires_grad);
  if (out->requires_grad) {
    Var o = out;
    out->backward = [a, o, rows]() {
      Matrix& g = a->ensure_grad();
      const double inv = 1.0 / rows;
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < g.cols; ++j) g(i, j) += o->grad(0, j) * inv;
    };
  }
  return out;
}

Var Graph::slice_rows(const Var& a, int r0, int r1) {
  assert(0 <= r0 && r0 < r1 && r1 <= a->val.rows);
  Matrix m(r1 - r0, a->val.cols);
  for (int i = r0; i < r1; ++i)
    for (int j = 0; j < m.cols; ++j) m(i - r0, j) = a->val(i, j);
  Var out = make(std::move(m), a->requires_grad);
  if (out->requires_grad) {
    Var o = out;
    out->backward = [a, o, r0]() {
      Matrix& g = a->ensure_grad();
      for (int i = 0; i < o->grad.rows; ++i)
        for (int j = 0; j < o->grad.cols; ++j) g(i + r0, j) += o->grad(i, j);
    };
  }
  return out;
}

Var Graph::slice_cols(const Var& a, int c0, int c1) {
  assert(0 <= c0 && c0 < c1 && c1 <= a->val.cols);
  Matrix m(a->val.rows, c1 - c0);
  for (int i = 0; i < m.rows; ++i)
    for (int j = c0; j < c1; ++j) m(i, j - c0) = a->val(i, j);
  Var out = make(std::move(m), a->requires_grad);
  if (out->requires_grad) {
    Var o = out;
    out->backward = [a, o, c0]() {
      Matrix& g = a->ensure_grad();
      for (int i = 0; i < o->grad.rows; ++i)
        for (int j = 0; j < o->grad.cols; ++j) g(i, j + c0) += o->grad(i, j);
    };
  }
  return out;
}

Var Graph::concat_cols(const Var& a, const Var& b) {
  assert(a->val.rows == b->val.rows);
  Matrix m(a->val.rows, a->val.cols + b->val.cols);
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < a->val.cols; ++j) m(i, j) = a->val(i, j);
    for (int j = 0; j < b->val.cols; ++j) m(i, a->val.cols + j) = b->val(i, j);
  }
  Var out = make(std::move(m), a->requires_grad || b->requires_grad);
  if (out->requires_grad) {
    Var o = out;
    out->backward = [a, b, o]() {
      const int ac = a->val.cols;
      if (a->requires_grad) {
        Matrix& g = a->ensure_grad();
        for (int i = 0; i < g.rows; ++i)
          for (int j = 0; j < ac; ++j) g(i, j) += o->grad(i, j);
      }
      if (b->requires_grad) {
        Matrix& g = b->ensure_grad();
        for (int i = 0; i < g.rows; ++i)
          for (int j = 0; j < g.cols; ++j) g(i, j) += o->grad(i, ac + j);
      }
    };
  }
  return out;
}

Var Graph::concat_rows(const std::vector<Var>& parts) {
  assert(!parts.empty());
  int rows = 0;
  const int cols = parts[0]->val.cols;
  bool needs = false;
  for (const auto& p : parts) {
    assert(p->val.cols == cols);
    rows += p->val.rows;
    needs = needs || p->requires_grad;
  }
  Matrix m(rows, cols);
  int r = 0;
  for (const auto& p : parts) {
    for (int i = 0; i < p->val.rows; ++i, ++r)
      for (int j = 0; j < cols; ++j) m(r, j) = p->val(i, j);
  }
  Var out = make(std::move(m), needs);
  if (out->requires_grad) {
    Var o = out;
    std::vector<Var> ps = parts;
    out->backward = [ps, o]() {
      int r = 0;
      for (const auto& p : ps) {
        if (p->requires_grad) {
          Matrix& g = p->ensure_grad();
          for (int i = 0; i < p->val.rows; ++i)
            for (int j = 0; j < g.cols; ++j) g(i, j) += o->grad(r + i, j);
        }
        r += p->val.rows;
      }
    };
  }
  return out;
}

Var Graph::row_normalize(const Var& a) {
  const int rows = a->val.rows, cols = a->val.cols;
  Matrix m(rows, cols);
  std::vector<double> norms(rows);
  for (int i = 0; i < rows; ++i) {
    double n = l2_norm(a->val.row(i), cols);
    if (n < 1e-150) n = 1e-150;
    norms[i] = n;
    const double inv = 1.0 / n;
    for (int j = 0; j < cols; ++j) m(i, j) = a->val(i, j) * inv;
  }
  Var out = make(std::move(m), a->requires_grad);
  if (out->requires_grad) {
    Var o = out;
    auto ns = std::make_shared<std::vector<double>>(std::move(norms));
    out->backward = [a, o, ns]() {
      Matrix& g = a->ensure_grad();
      const int cols = g.cols;
      for (int i = 0; i < g.rows; ++i) {
        const double* y = o->val.row(i);
        const double* dy = o->grad.row(i);
        double s = dot(y, dy, cols);
        const double inv = 1.0 / (*ns)[i];
        double* gr = g.row(i);
        for (int j = 0; j < cols; ++j) gr[j] += (dy[j] - y[j] * s) * inv;
      }
    };
  }
  return out;
}

Var Graph::gather_rows(const Var& table, std::vector<int> ids) {
  const int cols = table->val.cols;
  Matrix m(int(ids.size()), cols);
  for (std::size_t t = 0; t < ids.size(); ++t) {
    assert(ids[t] >= 0 && ids[t] < table->val.rows);
    const double* src = table->val.row(ids[t]);
    double* dst = m.row(int(t));
    for (int j = 0; j < cols; ++j) dst[j] = src[j];
  }
  Var out = make(std::move(m), table->requires_grad);
  if (out->requires_grad) {
    Var o = out;
    out->backward = [table, o, ids = std::move(ids)]() {
      Matrix& g = table->ensure_grad();
      for (std::size_t t = 0; t < ids.size(); ++t) {
        const double* src = o->grad.row(int(t));
        double* dst = g.row(ids[t]);
        for (int j = 0; j < g.cols; ++j) dst[j] += src[j];
      }
    };
  }
  return out;
}

Var Graph::nce_diag_loss(const Var& scores) {
  const int n = scores->val.rows;
  if (scores->val.cols != n) throw std::invalid_argument("nce_diag_loss: scores must be square");
  Matrix probs = scores->val;
  kern::softmax_rows(probs);
  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double* r = scores->val.row(i);
    double mx = r[0];
    for (int j = 1; j < n; ++j) mx = std::max(mx, r[j]);
    double lse = 0.0;
    for (int j = 0; j < n; ++j) lse += std::exp(r[j] - mx);
    loss += mx + std::log(lse) - r[i];
  }
  Matrix out(1, 1);
  out(0, 0) = loss;
  Var v = make(std::move(out), scores->requires_grad);
  if (v->requires_grad) {
    Var o = v;
    auto p = std::make_shared<Matrix>(std::move(probs));
    v->backward = [scores, o, p, n]() {
      Matrix& g = scores->ensure_grad();
      const double gs = o->grad(0, 0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) += gs * ((*p)(i, j) - (i == j ? 1.0 : 0.0));
    };
  }
  return v;
}

void Graph::backward(const Var& root) {
  if (!grad_enabled_) return;
  if (root->val.rows != 1 || root->val.cols != 1)
    throw std::invalid_argument("backward: root must be a scalar");
  root->ensure_grad()(0, 0) = 1.0;
  for (auto it = tape_.rbegin(); it != tape_.rend(); ++it) {
    Node& n = **it;
    if (n.backward && n.grad.rows > 0) n.backward();
  }
  tape_.clear();
}

}  // namespace medse::ad
