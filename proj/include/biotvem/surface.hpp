#pragma once

#include <vector>

#include "biotvem/mesh.hpp"
#include "biotvem/types.hpp"

namespace biotvem {

struct SurfaceEdge {
  int v0 = -1, v1 = -1;  // v0 < v1
  double length = 0.0;
  bool on_boundary = false;
};

struct SurfacePolygon {
  std::vector<int> vertices;  // counterclockwise in the tangent frame
  std::vector<int> edges;
  Vec2 barycenter = Vec2::Zero();
  double area = 0.0;
  double diameter = 0.0;
};

// Polygonal mesh of the flat interface, with the frame mapping 2D coordinates
// back to 3D: x3d = origin + t1*x + t2*y, t1 x t2 = normal.
class SurfaceMesh2 {
public:
  SurfaceMesh2(MatX vertices2d, std::vector<std::vector<int>> polygon_loops,
               Vec3 origin, Vec3 t1, Vec3 t2);

  int num_vertices() const { return static_cast<int>(vertices_.rows()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_polygons() const { return static_cast<int>(polygons_.size()); }

  Vec2 vertex(int i) const { return vertices_.row(i).transpose(); }
  const SurfaceEdge& edge(int i) const { return edges_[i]; }
  const SurfacePolygon& polygon(int i) const { return polygons_[i]; }

  bool vertex_on_boundary(int i) const { return vertex_on_boundary_[i]; }
  // Characteristic vertex length: mean length of all incident edges.
  double vertex_length(int i) const { return vertex_length_[i]; }

  double mesh_size() const;  // max polygon diameter

  const Vec3& origin() const { return origin_; }
  const Vec3& tangent1() const { return t1_; }
  const Vec3& tangent2() const { return t2_; }
  const Vec3& normal() const { return normal_; }

  Vec3 to3d(const Vec2& x) const { return origin_ + t1_ * x[0] + t2_ * x[1]; }
  Vec2 to2d(const Vec3& x) const {
    Vec3 d = x - origin_;
    return Vec2(t1_.dot(d), t2_.dot(d));
  }

  MatX polygon_loop_coords(int p) const;  // nv x 2

private:
  MatX vertices_;
  std::vector<SurfaceEdge> edges_;
  std::vector<SurfacePolygon> polygons_;
  std::vector<bool> vertex_on_boundary_;
  std::vector<double> vertex_length_;
  Vec3 origin_, t1_, t2_, normal_;
};

struct BulkSurfaceConnector {
  std::vector<int> face_to_polygon;    // indexed by bulk face id, -1 if not on Sigma
  std::vector<int> polygon_to_face;    // indexed by polygon id
  std::vector<int> vertex_to_surface;  // bulk vertex id -> surface vertex id, -1 otherwise
  std::vector<int> surface_to_vertex;
  std::vector<int> edge_to_surface;    // bulk edge id -> surface edge id, -1 otherwise
  std::vector<int> surface_to_edge;
};

struct SurfaceExtraction {
  SurfaceMesh2 surface;
  BulkSurfaceConnector connector;
};

// Builds the interface mesh from the Sigma-tagged faces; requires them to be
// coplanar within 1e-10 * h_F. Matching is by coordinate hashing at 1e-12.
SurfaceExtraction extract_surface(const PolyMesh3& mesh);

} // namespace biotvem
