#include "medse/kernels.hpp"

#include <cassert>
#include <cmath>

namespace medse::kern {

namespace {

inline void matmul_nn_row(const Matrix& a, const Matrix& b, Matrix& c, int i) {
  const int k = a.cols, n = b.cols;
  const double* arow = a.row(i);
  double* crow = c.row(i);
  for (int p = 0; p < k; ++p) {
    const double av = arow[p];
    if (av == 0.0) continue;
    const double* brow = b.row(p);
    for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
  }
}

inline void matmul_nt_row(const Matrix& a, const Matrix& b, Matrix& c, int i) {
  const int k = a.cols, n = b.rows;
  const double* arow = a.row(i);
  double* crow = c.row(i);
  for (int j = 0; j < n; ++j) crow[j] = dot(arow, b.row(j), k);
}

inline void softmax_row(Matrix& x, int i) {
  double* r = x.row(i);
  double mx = r[0];
  for (int j = 1; j < x.cols; ++j) mx = std::max(mx, r[j]);
  double sum = 0.0;
  for (int j = 0; j < x.cols; ++j) {
    r[j] = std::exp(r[j] - mx);
    sum += r[j];
  }
  const double inv = 1.0 / sum;
  for (int j = 0; j < x.cols; ++j) r[j] *= inv;
}

// a^T * b, accumulated over rows of a/b. Column-parallel: thread that owns
// output row `p` walks the shared m-dimension serially.
inline void matmul_tn_outrow(const Matrix& a, const Matrix& b, Matrix& c, int p) {
  const int m = a.rows, n = b.cols;
  double* crow = c.row(p);
  for (int i = 0; i < m; ++i) {
    const double av = a(i, p);
    if (av == 0.0) continue;
    const double* brow = b.row(i);
    for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
  }
}

// Tiny matrices gain nothing from forking threads.
constexpr std::size_t kParallelThreshold = 64 * 64;

}  // namespace

Matrix matmul_nn(const Matrix& a, const Matrix& b) {
  assert(a.cols == b.rows);
  Matrix c(a.rows, b.cols);
  if (std::size_t(a.rows) * a.cols * b.cols < kParallelThreshold) {
    for (int i = 0; i < a.rows; ++i) matmul_nn_row(a, b, c, i);
    return c;
  }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.rows; ++i) matmul_nn_row(a, b, c, i);
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  assert(a.cols == b.cols);
  Matrix c(a.rows, b.rows);
  if (std::size_t(a.rows) * a.cols * b.rows < kParallelThreshold) {
    for (int i = 0; i < a.rows; ++i) matmul_nt_row(a, b, c, i);
    return c;
  }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.rows; ++i) matmul_nt_row(a, b, c, i);
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  assert(a.rows == b.rows);
  Matrix c(a.cols, b.cols);
  if (std::size_t(a.rows) * a.cols * b.cols < kParallelThreshold) {
    for (int p = 0; p < a.cols; ++p) matmul_tn_outrow(a, b, c, p);
    return c;
  }
#pragma omp parallel for schedule(static)
  for (int p = 0; p < a.cols; ++p) matmul_tn_outrow(a, b, c, p);
  return c;
}

void softmax_rows(Matrix& x) {
  if (std::size_t(x.rows) * x.cols < kParallelThreshold) {
    for (int i = 0; i < x.rows; ++i) softmax_row(x, i);
    return;
  }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < x.rows; ++i) softmax_row(x, i);
}

namespace ref {

Matrix matmul_nn(const Matrix& a, const Matrix& b) {
  assert(a.cols == b.rows);
  Matrix c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) matmul_nn_row(a, b, c, i);
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  assert(a.cols == b.cols);
  Matrix c(a.rows, b.rows);
  for (int i = 0; i < a.rows; ++i) matmul_nt_row(a, b, c, i);
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  assert(a.rows == b.rows);
  Matrix c(a.cols, b.cols);
  for (int p = 0; p < a.cols; ++p) matmul_tn_outrow(a, b, c, p);
  return c;
}

void softmax_rows(Matrix& x) {
  for (int i = 0; i < x.rows; ++i) softmax_row(x, i);
}

}  // namespace ref

}  // namespace medse::kern
