#include <doctest.h>

#include <cmath>
#include <random>

#include "biotvem/monomial.hpp"
#include "biotvem/quadrature.hpp"

using namespace biotvem;

TEST_CASE("Gauss-Legendre on [0,1] is exact to degree 2n-1") {
  for (int n = 1; n <= 8; ++n) {
    VecX pts, wts;
    gauss_legendre_01(n, pts, wts);
    CHECK(std::abs(wts.sum() - 1.0) < 1e-14);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += wts[i] * std::pow(pts[i], k);
      CHECK(std::abs(s - 1.0 / (k + 1)) < 1e-13);
    }
  }
}

TEST_CASE("segment rule integrates monomials along a 3D segment") {
  const Vec3 a(0.2, -0.1, 0.5), b(1.1, 0.4, -0.3);
  QuadRule q = quad_segment(a, b, 5);
  CHECK(std::abs(q.measure() - (b - a).norm()) < 1e-13);
  // int_seg x1^2 ds with x1(t) = a1 + t(b1-a1)
  const double L = (b - a).norm();
  double exact = 0.0;
  {
    // closed form of int_0^1 (a1 + t d1)^2 dt * L
    const double a1 = a[0], d1 = b[0] - a[0];
    exact = L * (a1 * a1 + a1 * d1 + d1 * d1 / 3.0);
  }
  const double got = q.integrate([](const VecX& x) { return x[0] * x[0]; });
  CHECK(std::abs(got - exact) < 1e-13);
}

TEST_CASE("polygon rule: unit square monomials match closed forms") {
  MatX sq(4, 2);
  sq << 0, 0, 1, 0, 1, 1, 0, 1;
  QuadRule q = quad_polygon(sq, 6);
  CHECK(std::abs(q.measure() - 1.0) < 1e-13);
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; a + b <= 6; ++b) {
      const double got =
          q.integrate([&](const VecX& x) { return std::pow(x[0], a) * std::pow(x[1], b); });
      const double exact = 1.0 / ((a + 1) * (b + 1));
      CHECK(std::abs(got - exact) < 1e-12);
    }
}

TEST_CASE("polygon rule: regular pentagon area matches the shoelace formula") {
  const int n = 5;
  MatX loop(n, 2);
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * M_PI * i / n + 0.3;
    loop(i, 0) = 1.7 * std::cos(t) + 0.4;
    loop(i, 1) = 1.7 * std::sin(t) - 0.2;
  }
  double shoelace = 0.0;
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    shoelace += loop(i, 0) * loop(j, 1) - loop(j, 0) * loop(i, 1);
  }
  shoelace = 0.5 * std::abs(shoelace);
  QuadRule q = quad_polygon(loop, 2);
  CHECK(std::abs(q.measure() - shoelace) < 1e-13 * shoelace);
}

TEST_CASE("polygon rule works on a planar polygon embedded in 3D") {
  MatX loop(4, 3);
  loop << 0, 0, 1, 1, 0, 1, 1, 1, 1, 0, 1, 1;  // unit square at x3 = 1
  QuadRule q = quad_polygon(loop, 4);
  CHECK(std::abs(q.measure() - 1.0) < 1e-13);
  const double got = q.integrate([](const VecX& x) { return x[0] * x[0] * x[1]; });
  CHECK(std::abs(got - 1.0 / 6.0) < 1e-13);
}

namespace {

std::vector<MatX> box_faces(const Vec3& lo, const Vec3& hi) {
  auto quad = [](Vec3 a, Vec3 b, Vec3 c, Vec3 d) {
    MatX m(4, 3);
    m.row(0) = a;
    m.row(1) = b;
    m.row(2) = c;
    m.row(3) = d;
    return m;
  };
  const double x0 = lo[0], y0 = lo[1], z0 = lo[2], x1 = hi[0], y1 = hi[1], z1 = hi[2];
  std::vector<MatX> f;
  f.push_back(quad({x0, y0, z0}, {x0, y1, z0}, {x1, y1, z0}, {x1, y0, z0}));  // bottom
  f.push_back(quad({x0, y0, z1}, {x1, y0, z1}, {x1, y1, z1}, {x0, y1, z1}));  // top
  f.push_back(quad({x0, y0, z0}, {x1, y0, z0}, {x1, y0, z1}, {x0, y0, z1}));
  f.push_back(quad({x0, y1, z0}, {x0, y1, z1}, {x1, y1, z1}, {x1, y1, z0}));
  f.push_back(quad({x0, y0, z0}, {x0, y0, z1}, {x0, y1, z1}, {x0, y1, z0}));
  f.push_back(quad({x1, y0, z0}, {x1, y1, z0}, {x1, y1, z1}, {x1, y0, z1}));
  return f;
}

} // namespace

TEST_CASE("polyhedron rule: unit cube monomials match closed forms") {
  QuadRule q = quad_polyhedron(box_faces(Vec3::Zero(), Vec3::Ones()), 6);
  CHECK(std::abs(q.measure() - 1.0) < 1e-13);
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; b <= 2; ++b)
      for (int c = 0; a + b + c <= 6 && c <= 1; ++c) {
        const double got = q.integrate([&](const VecX& x) {
          return std::pow(x[0], a) * std::pow(x[1], b) * std::pow(x[2], c);
        });
        const double exact = 1.0 / ((a + 1) * (b + 1) * (c + 1));
        CHECK(std::abs(got - exact) < 1e-12);
      }
}

TEST_CASE("polyhedron rule on a sheared hexahedron agrees with Monte Carlo") {
  // Shear the unit cube by x -> x + (0.3 x3, 0.2 x3, 0): an affine map with
  // unit Jacobian, so MC sampling of the reference cube transfers directly.
  auto shear = [](const Vec3& x) { return Vec3(x[0] + 0.3 * x[2], x[1] + 0.2 * x[2], x[2]); };
  std::vector<MatX> faces = box_faces(Vec3::Zero(), Vec3::Ones());
  for (MatX& f : faces)
    for (int i = 0; i < f.rows(); ++i) f.row(i) = shear(f.row(i).transpose()).transpose();
  QuadRule q = quad_polyhedron(faces, 4);
  CHECK(std::abs(q.measure() - 1.0) < 1e-12);

  auto g = [](const Vec3& x) { return x[0] * x[1] * x[2]; };
  const double quad_val = q.integrate([&](const VecX& x) { return x[0] * x[1] * x[2]; });

  std::mt19937 rng(20240817);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int N = 2'000'000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < N; ++i) {
    const double v = g(shear(Vec3(unif(rng), unif(rng), unif(rng))));
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / N;
  const double sigma = std::sqrt((sum2 / N - mean * mean) / N);
  CHECK(std::abs(quad_val - mean) < 4.0 * sigma);
}

TEST_CASE("scaled monomial basis: ordering, values, derivatives") {
  CHECK(MonomialBasis::count(3, 2) == 10);
  CHECK(MonomialBasis::count(2, 2) == 6);
  CHECK(MonomialBasis::count(2, 1) == 3);

  Vec3 c(0.5, -1.0, 2.0);
  MonomialBasis m(3, 3, c, 0.25);
  CHECK(m.size() == 20);
  CHECK(m.exponents(0) == std::array<int, 3>{0, 0, 0});
  // First member is the constant, every other member vanishes at the center.
  Vec3 x = c;
  CHECK(m.value(0, x) == 1.0);
  for (int i = 1; i < m.size(); ++i) CHECK(m.value(i, x) == 0.0);
  // Member with t = (1,0,0) is 1 at center + (h,0,0).
  int lin = -1;
  for (int i = 0; i < m.size(); ++i)
    if (m.exponents(i) == std::array<int, 3>{1, 0, 0}) lin = i;
  REQUIRE(lin >= 0);
  CHECK(std::abs(m.value(lin, Vec3(c + Vec3(0.25, 0, 0))) - 1.0) < 1e-15);

  // derivative_coefficients reproduce the gradient at random points.
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    Vec3 p = c + Vec3(unif(rng), unif(rng), unif(rng));
    for (int i = 0; i < m.size(); ++i)
      for (int j = 0; j < 3; ++j) {
        const VecX dc = m.derivative_coefficients(i, j);
        double v = 0.0;
        for (int a = 0; a < m.size(); ++a) v += dc[a] * m.value(a, p);
        CHECK(std::abs(v - m.grad(i, p)[j]) < 1e-11);
      }
  }
}

TEST_CASE("gradient of a 2D linear scaled monomial is constant 1/h") {
  Vec2 c(0.0, 0.0);
  MonomialBasis m(2, 1, c, 0.5);
  // member with t = (0,1)
  int idx = -1;
  for (int i = 0; i < m.size(); ++i)
    if (m.exponents(i) == std::array<int, 3>{0, 1, 0}) idx = i;
  REQUIRE(idx >= 0);
  const VecX g = m.grad(idx, Vec2(0.37, -0.21));
  CHECK(std::abs(g[0]) < 1e-15);
  CHECK(std::abs(g[1] - 2.0) < 1e-15);
}

TEST_CASE("complement basis dimensions and spanning rank") {
  CHECK(ComplementBasis::dimension(3, 0) == 0);
  CHECK(ComplementBasis::dimension(3, 1) == 3);
  CHECK(ComplementBasis::dimension(3, 2) == 11);
  CHECK(ComplementBasis::dimension(2, 1) == 1);
  CHECK(ComplementBasis::dimension(2, 2) == 3);

  // grad(M_3 \ {1}) together with the degree-2 complement spans all vector
  // polynomials of degree 2: the 30 x 30 coefficient matrix has full rank.
  MonomialBasis m3(3, 3, Vec3::Zero(), 1.0);
  ComplementBasis comp(3, 2);
  MatX span(30, 19 + comp.size());
  for (int i = 1; i < 20; ++i)
    for (int j = 0; j < 3; ++j)
      span.col(i - 1).segment(10 * j, 10) = m3.derivative_coefficients(i, j).head(10);
  span.rightCols(comp.size()) = comp.coefficients();
  Eigen::ColPivHouseholderQR<MatX> qr(span);
  CHECK(qr.rank() == 30);
}

TEST_CASE("degenerate polygon input is rejected") {
  MatX two(2, 2);
  two << 0, 0, 1, 0;
  CHECK_THROWS_AS(quad_polygon(two, 2), Error);
  CHECK_THROWS_AS(quad_polyhedron({}, 2), Error);
}
