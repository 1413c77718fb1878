#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "eutherm/grid.hpp"

using namespace eutherm;

TEST_CASE("spectral derivative exactness", "[grid]") {
  Grid g(1, 64, 2.0);
  Field c(g.num_points(), 3.5);
  Field dc = g.deriv(c, 0);
  for (double v : dc) CHECK(std::abs(v) <= 1e-13);

  Field f(g.num_points()), ref(g.num_points());
  const double k = 2.0 * M_PI / g.length();
  for (int i = 0; i < g.n(); ++i) {
    f[i] = std::sin(k * g.x_of(i));
    ref[i] = k * std::cos(k * g.x_of(i));
  }
  Field df = g.deriv(f, 0);
  for (size_t i = 0; i < f.size(); ++i) CHECK(std::abs(df[i] - ref[i]) <= 1e-12 * k);
}

TEST_CASE("laplacian equals div grad", "[grid]") {
  Grid g(2, 32, 1.0);
  Field f = g.random_smooth(5, 99);
  Field lap = g.zeros();
  for (int ax = 0; ax < 2; ++ax) {
    Field d2 = g.deriv(g.deriv(f, ax), ax);
    for (size_t i = 0; i < lap.size(); ++i) lap[i] += d2[i];
  }
  // compare against spectral second derivative assembled the other way round
  Field lap2 = g.zeros();
  for (int ax = 0; ax < 2; ++ax) {
    Field d1 = g.deriv(f, ax);
    Field d2 = g.deriv(d1, ax);
    for (size_t i = 0; i < lap2.size(); ++i) lap2[i] += d2[i];
  }
  for (size_t i = 0; i < lap.size(); ++i) CHECK(lap[i] == Catch::Approx(lap2[i]).margin(1e-10));
}

TEST_CASE("inner products", "[grid]") {
  Grid g(1, 64, 3.0);
  Field z = g.zeros();
  Field f = g.random_smooth(4, 1);
  CHECK(g.inner(f, z) == 0.0);
  CHECK(g.inner(f, f) >= 0.0);

  // int sin^2 over one period = L/2
  Field s(g.num_points());
  const double k = 2.0 * M_PI / g.length();
  for (int i = 0; i < g.n(); ++i) s[i] = std::sin(k * g.x_of(i));
  CHECK(g.inner(s, s) == Catch::Approx(g.length() / 2).margin(1e-12));

  Field h = g.random_smooth(4, 2);
  CHECK(g.inner(f, h) == g.inner(h, f));
}

TEST_CASE("integration by parts on the periodic grid", "[grid]") {
  // <f, du> = -<df, u> underlies the skew-symmetry of the Poisson blocks
  for (int d = 1; d <= 2; ++d) {
    Grid g(d, d == 1 ? 64 : 32, 1.7);
    Field f = g.random_smooth(g.n() / 4, 11);
    Field u = g.random_smooth(g.n() / 4, 12);
    for (int ax = 0; ax < d; ++ax) {
      const double lhs = g.inner(f, g.deriv(u, ax));
      const double rhs = -g.inner(g.deriv(f, ax), u);
      const double scale = g.l2norm(f) * g.l2norm(u) + 1e-300;
      CHECK(std::abs(lhs - rhs) / scale <= 1e-11);
    }
  }
}

TEST_CASE("random smooth fields", "[grid]") {
  Grid g(2, 32, 1.0);
  Field c = g.random_smooth(0, 5);
  for (double v : c) CHECK(v == c[0]);

  Field a = g.random_smooth(4, 123);
  Field b = g.random_smooth(4, 123);
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

  double amax = 0;
  for (double v : a) amax = std::max(amax, std::abs(v));
  CHECK(g.high_mode_max(a, 4) <= 1e-13 * amax);
  CHECK(g.high_mode_max(a, 3) > 1e-13 * amax);  // k=4 modes present
}

TEST_CASE("dealias removes high modes", "[grid]") {
  Grid g(1, 64, 1.0);
  Field f = g.random_smooth(16, 77);
  Field fd = g.dealias(f);
  CHECK(g.high_mode_max(fd, g.n() / 3) <= 1e-13);
}

TEST_CASE("grid argument checks", "[grid]") {
  CHECK_THROWS_AS(Grid(3, 64, 1.0), BadParameters);
  CHECK_THROWS_AS(Grid(1, 48, 1.0), BadParameters);
  CHECK_THROWS_AS(Grid(1, 4, 1.0), BadParameters);
  Grid g(1, 64, 1.0);
  Field wrong(12, 0.0);
  CHECK_THROWS_AS(g.integrate(wrong), GridMismatch);
  CHECK_THROWS_AS(g.random_smooth(32, 1), BadParameters);
}

#include "eutherm/lie.hpp"

TEST_CASE("named field operators", "[grid]") {
  Grid g(2, 32, 1.0);
  Field f = g.random_smooth(4, 21);

  // div(grad f) equals the assembled spectral laplacian
  std::vector<Field> gf = grad(g, f);
  Field lap = div(g, gf);
  Field lap2 = g.zeros();
  for (int ax = 0; ax < 2; ++ax) {
    Field d2 = g.deriv(g.deriv(f, ax), ax);
    for (size_t i = 0; i < lap2.size(); ++i) lap2[i] += d2[i];
  }
  for (size_t i = 0; i < lap.size(); ++i)
    CHECK(lap[i] == Catch::Approx(lap2[i]).margin(1e-10));

  // tensor forms reduce to the scalar ones componentwise
  std::vector<Field> A(4);
  for (int c = 0; c < 4; ++c) A[c] = g.random_smooth(4, 50 + c);
  std::vector<Field> gA = grad_tensor(g, A);
  for (int c = 0; c < 4; ++c)
    for (int k = 0; k < 2; ++k) {
      Field ref = g.deriv(A[c], k);
      for (size_t i = 0; i < ref.size(); ++i)
        CHECK(gA[static_cast<size_t>(c) * 2 + k][i] == ref[i]);
    }
  std::vector<Field> dA = div_tensor(g, A);
  for (int i = 0; i < 2; ++i) {
    Field ref = g.zeros();
    for (int j = 0; j < 2; ++j) {
      Field dd = g.deriv(A[static_cast<size_t>(i) * 2 + j], j);
      for (size_t p = 0; p < ref.size(); ++p) ref[p] += dd[p];
    }
    for (size_t p = 0; p < ref.size(); ++p)
      CHECK(dA[i][p] == Catch::Approx(ref[p]).margin(1e-13));
  }

  // <f, div u> = -<grad f, u> through the named wrappers
  std::vector<Field> u(2);
  u[0] = g.random_smooth(4, 60);
  u[1] = g.random_smooth(4, 61);
  double lhs = g.inner(f, div(g, u));
  double rhs = 0;
  std::vector<Field> gradf = grad(g, f);
  for (int ax = 0; ax < 2; ++ax) rhs -= g.inner(gradf[ax], u[ax]);
  CHECK(std::abs(lhs - rhs) <= 1e-11 * (std::abs(lhs) + std::abs(rhs) + 1.0));
}

TEST_CASE("product rule holds below the aliasing threshold", "[grid]") {
  for (int d : {1, 2}) {
    Grid g(d, d == 1 ? 64 : 32, 1.3);
    // products of two kmax-fields stay below the Nyquist mode
    const int kmax = g.n() / 4 - 1;
    Field f = g.random_smooth(kmax, 31);
    Field h = g.random_smooth(kmax, 32);
    Field fh(g.num_points());
    for (size_t i = 0; i < fh.size(); ++i) fh[i] = f[i] * h[i];
    for (int ax = 0; ax < d; ++ax) {
      Field left = g.deriv(fh, ax);
      Field df = g.deriv(f, ax);
      Field dh = g.deriv(h, ax);
      double worst = 0, scale = 1e-300;
      for (size_t i = 0; i < left.size(); ++i) {
        const double right = f[i] * dh[i] + df[i] * h[i];
        worst = std::max(worst, std::abs(left[i] - right));
        scale = std::max(scale, std::abs(right));
      }
      CHECK(worst / scale <= 1e-11);
    }
  }
}
