#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "medse/kernels.hpp"
#include "medse/rng.hpp"

using namespace medse;

TEST_CASE("matmul_nn matches a hand-computed product") {
  Matrix a(2, 3), b(3, 2);
  double av[] = {1, 2, 3, 4, 5, 6};
  double bv[] = {7, 8, 9, 10, 11, 12};
  a.data.assign(av, av + 6);
  b.data.assign(bv, bv + 6);
  Matrix c = kern::matmul_nn(a, b);
  CHECK(c(0, 0) == 58.0);
  CHECK(c(0, 1) == 64.0);
  CHECK(c(1, 0) == 139.0);
  CHECK(c(1, 1) == 154.0);
}

TEST_CASE("parallel kernels are bitwise identical to serial references") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    int m = 1 + rng.uniform_int(90);
    int k = 1 + rng.uniform_int(90);
    int n = 1 + rng.uniform_int(90);
    Matrix a = Matrix::randn(m, k, rng);
    Matrix b = Matrix::randn(k, n, rng);
    Matrix bt = Matrix::randn(n, k, rng);
    Matrix c = Matrix::randn(m, n, rng);
    CHECK(kern::matmul_nn(a, b) == kern::ref::matmul_nn(a, b));
    CHECK(kern::matmul_nt(a, bt) == kern::ref::matmul_nt(a, bt));
    CHECK(kern::matmul_tn(a, c) == kern::ref::matmul_tn(a, c));

    Matrix s1 = Matrix::randn(m, n, rng);
    Matrix s2 = s1;
    kern::softmax_rows(s1);
    kern::ref::softmax_rows(s2);
    CHECK(s1 == s2);
  }
}

TEST_CASE("matmul transpose variants agree with each other") {
  Rng rng(5);
  Matrix a = Matrix::randn(17, 9, rng);
  Matrix b = Matrix::randn(9, 13, rng);

  // a*b via nt with explicitly transposed b
  Matrix bt(13, 9);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 13; ++j) bt(j, i) = b(i, j);
  Matrix c1 = kern::matmul_nn(a, b);
  Matrix c2 = kern::matmul_nt(a, bt);
  CHECK(max_abs_diff(c1, c2) < 1e-12);

  // a^T * c via tn and via explicit transpose
  Matrix c = Matrix::randn(17, 4, rng);
  Matrix at(9, 17);
  for (int i = 0; i < 17; ++i)
    for (int j = 0; j < 9; ++j) at(j, i) = a(i, j);
  Matrix d1 = kern::matmul_tn(a, c);
  Matrix d2 = kern::matmul_nn(at, c);
  CHECK(max_abs_diff(d1, d2) < 1e-12);
}

TEST_CASE("softmax rows sum to one and dominate correctly") {
  Matrix x(1, 3);
  x(0, 0) = 1.0;
  x(0, 1) = 2.0;
  x(0, 2) = 3.0;
  kern::softmax_rows(x);
  double s = x(0, 0) + x(0, 1) + x(0, 2);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(x(0, 2) > x(0, 1));
  CHECK(x(0, 1) > x(0, 0));
}

TEST_CASE("rng is deterministic and uniform_int stays in range") {
  Rng r1(42), r2(42);
  for (int i = 0; i < 1000; ++i) {
    CHECK(r1.next_u64() == r2.next_u64());
  }
  Rng r3(7);
  for (int i = 0; i < 10000; ++i) {
    int v = r3.uniform_int(17);
    CHECK(v >= 0);
    CHECK(v < 17);
    double u = r3.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
