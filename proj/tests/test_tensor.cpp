#include <catch2/catch_amalgamated.hpp>

#include "eutherm/tensor.hpp"
#include "test_util.hpp"

using namespace eutherm;
using testutil::random_tensor;

namespace {

// independent oracle: recursive Laplace expansion along the first row
double laplace_det(const Tensor2& a) {
  const int d = a.dim();
  if (d == 1) return a(0, 0);
  double s = 0;
  for (int j = 0; j < d; ++j) {
    Tensor2 minor(d - 1);
    for (int r = 1; r < d; ++r) {
      int cc = 0;
      for (int c = 0; c < d; ++c) {
        if (c == j) continue;
        minor(r - 1, cc++) = a(r, c);
      }
    }
    s += (j % 2 == 0 ? 1.0 : -1.0) * a(0, j) * laplace_det(minor);
  }
  return s;
}

}  // namespace

TEST_CASE("determinant basics and oracle", "[tensor]") {
  CHECK(det(Tensor2::identity(3)) == 1.0);
  Tensor2 dg(2);
  dg(0, 0) = 2.0;
  dg(1, 1) = 3.0;
  CHECK(det(dg) == 6.0);

  std::mt19937_64 rng(42);
  for (int d = 1; d <= 3; ++d)
    for (int t = 0; t < 50; ++t) {
      Tensor2 a = random_tensor(rng, d);
      CHECK(det(a) == Catch::Approx(laplace_det(a)).margin(1e-12));
    }
}

TEST_CASE("cofactor identities", "[tensor]") {
  std::mt19937_64 rng(7);
  CHECK(max_abs(cof(Tensor2::identity(3)) - Tensor2::identity(3)) == 0.0);

  for (int d = 1; d <= 3; ++d)
    for (int t = 0; t < 50; ++t) {
      Tensor2 a = random_tensor(rng, d);
      // A cof(A)^T = det(A) I
      Tensor2 lhs = matmul(a, transpose(cof(a)));
      Tensor2 rhs = det(a) * Tensor2::identity(d);
      const double scale = std::max(1.0, std::abs(det(a)));
      CHECK(max_abs(lhs - rhs) <= 1e-12 * scale);
    }

  // invertible A: cof(A) = det(A) A^{-T}
  for (int d = 2; d <= 3; ++d) {
    Tensor2 a = testutil::random_defgrad(rng, d, 0.3);
    Tensor2 ref = det(a) * transpose(inv(a));
    CHECK(max_abs(cof(a) - ref) <= 1e-10 * max_abs(ref));
  }
}

TEST_CASE("directional derivative of det equals cof:H", "[tensor]") {
  std::mt19937_64 rng(11);
  for (int d = 1; d <= 3; ++d)
    for (int t = 0; t < 20; ++t) {
      Tensor2 a = random_tensor(rng, d);
      Tensor2 h = random_tensor(rng, d);
      const double eps = 1e-6 * std::max(frob(a), 1.0);
      const double fd = (det(a + eps * h) - det(a + (-eps) * h)) / (2 * eps);
      const double an = ddot(cof(a), h);
      const double scale = std::max({std::abs(an), std::abs(fd), 1e-9});
      CHECK(std::abs(fd - an) / scale <= 1e-6);
    }
}

TEST_CASE("inverse", "[tensor]") {
  CHECK(max_abs(inv(Tensor2::identity(2)) - Tensor2::identity(2)) == 0.0);
  Tensor2 dg(2);
  dg(0, 0) = 2.0;
  dg(1, 1) = 4.0;
  Tensor2 expect(2);
  expect(0, 0) = 0.5;
  expect(1, 1) = 0.25;
  CHECK(max_abs(inv(dg) - expect) == 0.0);

  std::mt19937_64 rng(3);
  for (int d = 1; d <= 3; ++d)
    for (int t = 0; t < 30; ++t) {
      Tensor2 a = testutil::random_defgrad(rng, d, 0.25);
      CHECK(max_abs(matmul(a, inv(a)) - Tensor2::identity(d)) <= 1e-12);
    }

  Tensor2 sing(2);
  sing(0, 0) = 1.0;
  sing(0, 1) = 2.0;
  sing(1, 0) = 0.5;
  sing(1, 1) = 1.0;
  CHECK_THROWS_AS(inv(sing), SingularTensor);
}

TEST_CASE("dev, trace, sym, ddot", "[tensor]") {
  std::mt19937_64 rng(5);
  CHECK(max_abs(dev(Tensor2::identity(3))) == 0.0);

  for (int d = 1; d <= 3; ++d)
    for (int t = 0; t < 30; ++t) {
      Tensor2 a = random_tensor(rng, d);
      CHECK(std::abs(trace(dev(a))) <= 1e-14 * std::max(1.0, std::abs(trace(a))));
      CHECK(max_abs(dev(dev(a)) - dev(a)) <= 1e-14 * std::max(1.0, max_abs(a)));
      Tensor2 b = random_tensor(rng, d);
      CHECK(ddot(Tensor2::identity(d), b) == Catch::Approx(trace(b)).margin(1e-14));
      // sym projects onto symmetric matrices
      Tensor2 s = sym(a);
      CHECK(max_abs(s - transpose(s)) == 0.0);
    }
}
