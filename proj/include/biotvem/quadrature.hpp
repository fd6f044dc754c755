#pragma once

#include <vector>

#include "biotvem/types.hpp"

namespace biotvem {

// Quadrature rule: points live in the ambient space of the entity (3D points
// for bulk faces/cells, 2D for surface polygons). Weights carry the measure.
struct QuadRule {
  MatX points;   // npts x ambient_dim
  VecX weights;  // npts
  int exactness = 0;

  int size() const { return static_cast<int>(weights.size()); }
  double measure() const { return weights.sum(); }

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (int q = 0; q < size(); ++q) s += weights[q] * f(points.row(q).transpose());
    return s;
  }
};

// Gauss-Legendre points/weights on [0,1]; exact for degree 2n-1.
void gauss_legendre_01(int n, VecX& points, VecX& weights);

// Rule on a 3D segment [a,b], exact to the given polynomial degree.
QuadRule quad_segment(const Vec3& a, const Vec3& b, int exactness);
QuadRule quad_segment2(const Vec2& a, const Vec2& b, int exactness);

// Grundmann-Moeller rule on a simplex given by its d+1 vertices (rows of V,
// ambient dimension = V.cols() >= d). Exact to the requested odd-or-rounded-up
// degree for polynomials on the simplex.
QuadRule quad_simplex(const MatX& vertices, int exactness);

// Simple polygon (vertex loop, 2D or planar 3D): fan triangulation from the
// vertex-average point.
QuadRule quad_polygon(const MatX& loop, int exactness);

// Polyhedron described by outward-oriented face loops (each a list of 3D
// points): cone each face triangle to the volume barycenter.
QuadRule quad_polyhedron(const std::vector<MatX>& face_loops, int exactness);

} // namespace biotvem
