#include "biotvem/quadrature.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace biotvem {

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// All nonnegative integer tuples of length len summing to total.
void partitions(int total, int len, std::vector<std::vector<int>>& out) {
  std::vector<int> cur(len, 0);
  std::function<void(int, int)> rec = [&](int pos, int rest) {
    if (pos == len - 1) {
      cur[pos] = rest;
      out.push_back(cur);
      return;
    }
    for (int v = rest; v >= 0; --v) {
      cur[pos] = v;
      rec(pos + 1, rest - v);
    }
  };
  rec(0, total);
}

// Grundmann-Moeller points/weights in barycentric coordinates on a
// d-simplex; weights are relative to the simplex measure (they sum to 1).
void grundmann_moeller(int dim, int exactness, MatX& bary, VecX& weights) {
  int s = std::max(0, (exactness - 1 + 1) / 2);  // smallest s with 2s+1 >= exactness
  if (2 * s + 1 < exactness) ++s;
  const int d = 2 * s + 1;
  std::vector<VecX> pts;
  std::vector<double> wts;
  for (int i = 0; i <= s; ++i) {
    const double denom = d + dim - 2 * i;
    double w = std::pow(2.0, -2 * s) * std::pow(denom, d) /
               (factorial(i) * factorial(d + dim - i));
    if (i % 2) w = -w;
    std::vector<std::vector<int>> parts;
    partitions(s - i, dim + 1, parts);
    for (const auto& beta : parts) {
      VecX lambda(dim + 1);
      for (int j = 0; j <= dim; ++j) lambda[j] = (2.0 * beta[j] + 1.0) / denom;
      pts.push_back(lambda);
      wts.push_back(w);
    }
  }
  // The raw weights integrate over the standard simplex (measure 1/dim!);
  // normalize so they sum to 1.
  double total = 0.0;
  for (double w : wts) total += w;
  bary.resize(static_cast<int>(pts.size()), dim + 1);
  weights.resize(static_cast<int>(pts.size()));
  for (int q = 0; q < weights.size(); ++q) {
    bary.row(q) = pts[q].transpose();
    weights[q] = wts[q] / total;
  }
}

double simplex_measure(const MatX& vertices) {
  const int d = static_cast<int>(vertices.rows()) - 1;
  MatX E(vertices.cols(), d);
  for (int i = 0; i < d; ++i)
    E.col(i) = (vertices.row(i + 1) - vertices.row(0)).transpose();
  if (d == static_cast<int>(vertices.cols()))
    return E.determinant() / factorial(d);  // signed
  return std::sqrt((E.transpose() * E).determinant()) / factorial(d);
}

} // namespace

void gauss_legendre_01(int n, VecX& points, VecX& weights) {
  points.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n from the Chebyshev initial guess, on [-1,1].
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    points[n - 1 - i] = 0.5 * (x + 1.0);
    weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * pp * pp);
  }
}

QuadRule quad_segment(const Vec3& a, const Vec3& b, int exactness) {
  int n = exactness / 2 + 1;
  VecX t, w;
  gauss_legendre_01(n, t, w);
  QuadRule rule;
  rule.exactness = 2 * n - 1;
  rule.points.resize(n, 3);
  rule.weights.resize(n);
  const double len = (b - a).norm();
  for (int q = 0; q < n; ++q) {
    rule.points.row(q) = (a + t[q] * (b - a)).transpose();
    rule.weights[q] = w[q] * len;
  }
  return rule;
}

QuadRule quad_segment2(const Vec2& a, const Vec2& b, int exactness) {
  int n = exactness / 2 + 1;
  VecX t, w;
  gauss_legendre_01(n, t, w);
  QuadRule rule;
  rule.exactness = 2 * n - 1;
  rule.points.resize(n, 2);
  rule.weights.resize(n);
  const double len = (b - a).norm();
  for (int q = 0; q < n; ++q) {
    rule.points.row(q) = (a + t[q] * (b - a)).transpose();
    rule.weights[q] = w[q] * len;
  }
  return rule;
}

QuadRule quad_simplex(const MatX& vertices, int exactness) {
  const int d = static_cast<int>(vertices.rows()) - 1;
  MatX bary;
  VecX w;
  grundmann_moeller(d, exactness, bary, w);
  QuadRule rule;
  rule.exactness = exactness;
  rule.points = bary * vertices;
  rule.weights = w * simplex_measure(vertices);
  return rule;
}

QuadRule quad_polygon(const MatX& loop, int exactness) {
  const int nv = static_cast<int>(loop.rows());
  const int ad = static_cast<int>(loop.cols());
  if (nv < 3) throw Error(ErrorKind::Geometry, "polygon with fewer than 3 vertices");
  Eigen::RowVectorXd c = loop.colwise().mean();
  // Plane normal (3D) from the total signed area vector; 2D uses the z sign.
  Vec3 nrm = Vec3::Zero();
  if (ad == 3) {
    for (int j = 0; j < nv; ++j) {
      Vec3 a = (loop.row(j) - c).transpose();
      Vec3 b = (loop.row((j + 1) % nv) - c).transpose();
      nrm += a.cross(b);
    }
    if (nrm.norm() == 0.0) throw Error(ErrorKind::Geometry, "degenerate polygon");
    nrm.normalize();
  }
  std::vector<QuadRule> tris;
  int npts = 0;
  for (int j = 0; j < nv; ++j) {
    MatX T(3, ad);
    T.row(0) = c;
    T.row(1) = loop.row(j);
    T.row(2) = loop.row((j + 1) % nv);
    QuadRule tr = quad_simplex(T, exactness);
    // Signed areas orient fan triangles of non-convex polygons. In 2D the
    // simplex measure is already signed; planar 3D triangles need the sign
    // against the plane normal.
    if (ad == 3) {
      Vec3 a = (T.row(1) - T.row(0)).transpose();
      Vec3 b = (T.row(2) - T.row(0)).transpose();
      tr.weights *= (a.cross(b).dot(nrm) >= 0 ? 1.0 : -1.0);
    }
    npts += tr.size();
    tris.push_back(std::move(tr));
  }
  QuadRule rule;
  rule.exactness = exactness;
  rule.points.resize(npts, ad);
  rule.weights.resize(npts);
  int at = 0;
  for (const auto& tr : tris) {
    rule.points.middleRows(at, tr.size()) = tr.points;
    rule.weights.segment(at, tr.size()) = tr.weights;
    at += tr.size();
  }
  return rule;
}

QuadRule quad_polyhedron(const std::vector<MatX>& face_loops, int exactness) {
  if (face_loops.empty()) throw Error(ErrorKind::Geometry, "empty polyhedron");
  // Volume barycenter apex: vertex average is adequate for star-shaped cells;
  // signed tetrahedra handle the rest.
  Vec3 c = Vec3::Zero();
  int nv = 0;
  for (const auto& L : face_loops) {
    c += L.colwise().sum().transpose();
    nv += static_cast<int>(L.rows());
  }
  c /= nv;
  std::vector<QuadRule> tets;
  int npts = 0;
  for (const auto& L : face_loops) {
    const int m = static_cast<int>(L.rows());
    Eigen::RowVector3d fc = L.colwise().mean();
    for (int j = 0; j < m; ++j) {
      MatX T(4, 3);
      T.row(0) = c.transpose();
      T.row(1) = fc;
      T.row(2) = L.row(j);
      T.row(3) = L.row((j + 1) % m);
      // Full-dimension simplex measure is signed; outward-oriented faces give
      // positive volume, slivers through the apex cancel.
      QuadRule tr = quad_simplex(T, exactness);
      if (tr.weights.cwiseAbs().sum() == 0.0) continue;
      npts += tr.size();
      tets.push_back(std::move(tr));
    }
  }
  QuadRule rule;
  rule.exactness = exactness;
  rule.points.resize(npts, 3);
  rule.weights.resize(npts);
  int at = 0;
  for (const auto& tr : tets) {
    rule.points.middleRows(at, tr.size()) = tr.points;
    rule.weights.segment(at, tr.size()) = tr.weights;
    at += tr.size();
  }
  return rule;
}

} // namespace biotvem
