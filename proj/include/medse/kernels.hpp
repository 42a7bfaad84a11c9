#pragma once

#include "medse/matrix.hpp"

namespace medse::kern {

// Production kernels. Parallelised over output rows with OpenMP; every
// output element is computed by exactly one thread with the same serial
// inner-loop order, so results are bitwise identical to kern::ref.

Matrix matmul_nn(const Matrix& a, const Matrix& b);  // a[m,k] * b[k,n]
Matrix matmul_nt(const Matrix& a, const Matrix& b);  // a[m,k] * b[n,k]^T
Matrix matmul_tn(const Matrix& a, const Matrix& b);  // a[m,k]^T * b[m,n]

// Row-wise softmax, in place.
void softmax_rows(Matrix& x);

// Serial reference implementations, kept for tests and the kernel benchmark.
namespace ref {
Matrix matmul_nn(const Matrix& a, const Matrix& b);
Matrix matmul_nt(const Matrix& a, const Matrix& b);
Matrix matmul_tn(const Matrix& a, const Matrix& b);
void softmax_rows(Matrix& x);
}  // namespace ref

}  // namespace medse::kern
