#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "medse/autodiff.hpp"
#include "medse/rng.hpp"

using namespace medse;
using ad::Graph;
using ad::Var;

namespace {

// Central finite differences against the analytic gradient of a scalar
// expression built from a single parameter matrix.
void check_gradient(std::function<Var(Graph&, const Var&)> build, int rows, int cols,
                    uint64_t seed, double tol = 1e-6) {
  Rng rng(seed);
  Var p = ad::make_param(Matrix::randn(rows, cols, rng, 0.5));
  {
    Graph g;
    Var loss = build(g, p);
    REQUIRE(loss->val.rows == 1);
    REQUIRE(loss->val.cols == 1);
    g.backward(loss);
  }
  const double eps = 1e-6;
  for (std::size_t i = 0; i < p->val.data.size(); ++i) {
    double orig = p->val.data[i];
    p->val.data[i] = orig + eps;
    Graph gp(false);
    double lp = build(gp, p)->val(0, 0);
    p->val.data[i] = orig - eps;
    Graph gm(false);
    double lm = build(gm, p)->val(0, 0);
    p->val.data[i] = orig;
    double fd = (lp - lm) / (2 * eps);
    double an = p->grad.data[i];
    double denom = std::max({1.0, std::fabs(fd), std::fabs(an)});
    CHECK(std::fabs(fd - an) / denom < tol);
  }
}

// Reduce an arbitrary matrix to a scalar with uneven fixed weights so every
// entry contributes a distinct gradient path.
Var weigh(Graph& g, const Var& x) {
  Matrix w(x->val.rows, x->val.cols);
  for (std::size_t i = 0; i < w.data.size(); ++i) w.data[i] = 0.3 + 0.1 * double(i % 7);
  Var wx = g.hadamard(x, w);
  Var col = g.mean_rows(wx);                   // [1,n]
  Matrix ones(1, col->val.cols);
  for (double& v : ones.data) v = 1.0;
  return g.matmul_nt(col, g.input(ones));      // [1,1]
}

}  // namespace

TEST_CASE("gradients: matmul") {
  Rng rng(3);
  Matrix other = Matrix::randn(5, 4, rng);
  check_gradient(
      [&](Graph& g, const Var& p) { return weigh(g, g.matmul(p, g.input(other))); }, 3, 5, 17);
  Matrix left = Matrix::randn(6, 3, rng);
  check_gradient(
      [&](Graph& g, const Var& p) { return weigh(g, g.matmul(g.input(left), p)); }, 3, 5, 18);
}

TEST_CASE("gradients: matmul_nt") {
  Rng rng(4);
  Matrix other = Matrix::randn(7, 5, rng);
  check_gradient(
      [&](Graph& g, const Var& p) { return weigh(g, g.matmul_nt(p, g.input(other))); }, 3, 5, 19);
  check_gradient(
      [&](Graph& g, const Var& p) { return weigh(g, g.matmul_nt(g.input(other), p)); }, 3, 5, 20);
}

TEST_CASE("gradients: elementwise and broadcast ops") {
  Rng rng(5);
  Matrix m = Matrix::randn(4, 6, rng);
  check_gradient([&](Graph& g, const Var& p) { return weigh(g, g.add(p, g.input(m))); }, 4, 6, 21);
  check_gradient([&](Graph& g, const Var& p) { return weigh(g, g.scale(p, -2.5)); }, 4, 6, 22);
  Matrix mask(4, 6);
  Rng mr(9);
  for (double& v : mask.data) v = mr.uniform() < 0.3 ? 0.0 : 2.0;
  check_gradient([&](Graph& g, const Var& p) { return weigh(g, g.hadamard(p, mask)); }, 4, 6, 23);
  check_gradient([&](Graph& g, const Var& p) { return weigh(g, g.gelu(p)); }, 4, 6, 24);
  check_gradient([&](Graph& g, const Var& p) { return weigh(g, g.tanh_act(p)); }, 4, 6, 25);

  Matrix base = Matrix::randn(4, 6, rng);
  check_gradient(
      [&](Graph& g, const Var& p) { return weigh(g, g.add_rowvec(g.input(base), p)); }, 1, 6, 26);
}

TEST_CASE("gradients: softmax and layer norm") {
  check_gradient([&](Graph& g, const Var& p) { return weigh(g, g.softmax_rows(p)); }, 3, 5, 27);

  Rng rng(6);
  Matrix gain = Matrix::randn(1, 6, rng, 0.3);
  for (double& v : gain.data) v += 1.0;
  Matrix bias = Matrix::randn(1, 6, rng, 0.1);
  check_gradient(
      [&](Graph& g, const Var& p) {
        return weigh(g, g.layer_norm(p, g.input(gain), g.input(bias)));
      },
      4, 6, 28, 1e-5);

  // gain / bias gradients
  Matrix x = Matrix::randn(4, 6, rng);
  check_gradient(
      [&](Graph& g, const Var& p) {
        return weigh(g, g.layer_norm(g.input(x), p, g.input(bias)));
      },
      1, 6, 29, 1e-5);
  check_gradient(
      [&](Graph& g, const Var& p) {
        return weigh(g, g.layer_norm(g.input(x), g.input(gain), p));
      },
      1, 6, 30, 1e-5);
}

TEST_CASE("gradients: shape ops") {
  check_gradient([&](Graph& g, const Var& p) { return weigh(g, g.mean_rows(p)); }, 5, 4, 31);
  check_gradient([&](Graph& g, const Var& p) { return weigh(g, g.slice_rows(p, 1, 3)); }, 5, 4, 32);
  check_gradient([&](Graph& g, const Var& p) { return weigh(g, g.slice_cols(p, 1, 3)); }, 5, 4, 33);

  Rng rng(7);
  Matrix m = Matrix::randn(5, 3, rng);
  check_gradient(
      [&](Graph& g, const Var& p) { return weigh(g, g.concat_cols(p, g.input(m))); }, 5, 4, 34);
  check_gradient(
      [&](Graph& g, const Var& p) {
        std::vector<Var> parts = {g.slice_rows(p, 0, 2), g.input(m), g.slice_rows(p, 2, 5)};
        return weigh(g, g.concat_rows(parts));
      },
      5, 3, 35);
}

TEST_CASE("gradients: row normalize, gather, nce loss") {
  check_gradient([&](Graph& g, const Var& p) { return weigh(g, g.row_normalize(p)); }, 4, 5, 36);

  std::vector<int> ids = {2, 0, 2, 1};  // repeated row exercises grad accumulation
  check_gradient(
      [&](Graph& g, const Var& p) { return weigh(g, g.gather_rows(p, ids)); }, 3, 4, 37);

  check_gradient([&](Graph& g, const Var& p) { return g.nce_diag_loss(p); }, 5, 5, 38);

  // full contrastive pipeline: normalize -> similarity -> nce
  Rng rng(8);
  Matrix other = Matrix::randn(4, 6, rng);
  check_gradient(
      [&](Graph& g, const Var& p) {
        Var s = g.matmul_nt(g.row_normalize(p), g.row_normalize(g.input(other)));
        return g.nce_diag_loss(g.scale(s, 20.0));
      },
      4, 6, 39, 1e-5);
}

TEST_CASE("no-grad graphs build no tape and backward is inert") {
  Rng rng(9);
  Var p = ad::make_param(Matrix::randn(3, 3, rng));
  Graph g(false);
  Var y = g.matmul(p, p);
  CHECK(g.tape_size() == 0);
  CHECK_FALSE(y->requires_grad);
  CHECK(p->grad.rows == 0);
}

TEST_CASE("gradients accumulate across two backward passes") {
  Var p = ad::make_param(Matrix::filled(1, 1, 3.0));
  for (int pass = 0; pass < 2; ++pass) {
    Graph g;
    Var y = g.scale(p, 2.0);
    g.backward(y);
  }
  CHECK(p->grad(0, 0) == 4.0);
}
