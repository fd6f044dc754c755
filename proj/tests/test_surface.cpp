#include <doctest.h>

#include <cmath>

#include "biotvem/surface.hpp"

using namespace biotvem;

namespace {

SurfaceExtraction extracted(int n) {
  PolyMesh3 mesh = generate_cube_mesh(n);
  tag_boundaries(mesh, benchmark_boundary_rule());
  return extract_surface(mesh);
}

} // namespace

TEST_CASE("interface extraction counts on cube meshes") {
  SurfaceExtraction e1 = extracted(1);
  CHECK(e1.surface.num_polygons() == 1);
  CHECK(e1.surface.num_vertices() == 4);
  CHECK(e1.surface.num_edges() == 4);
  for (int e = 0; e < 4; ++e) CHECK(e1.surface.edge(e).on_boundary);

  SurfaceExtraction e2 = extracted(2);
  CHECK(e2.surface.num_polygons() == 4);
  CHECK(e2.surface.num_vertices() == 9);
  CHECK(e2.surface.num_edges() == 12);
  int nb = 0;
  for (int e = 0; e < e2.surface.num_edges(); ++e) nb += e2.surface.edge(e).on_boundary;
  CHECK(nb == 8);
  CHECK(std::abs(e2.surface.mesh_size() - std::sqrt(0.5)) < 1e-14);

  SurfaceExtraction e3 = extracted(3);
  CHECK(e3.surface.num_polygons() == 9);
  int nb3 = 0;
  for (int e = 0; e < e3.surface.num_edges(); ++e) nb3 += e3.surface.edge(e).on_boundary;
  CHECK(nb3 == 12);
}

TEST_CASE("polygons are counterclockwise and frame maps are consistent") {
  SurfaceExtraction ext = extracted(2);
  const SurfaceMesh2& s = ext.surface;
  CHECK(std::abs(s.tangent1().cross(s.tangent2()).dot(s.normal()) - 1.0) < 1e-14);
  for (int p = 0; p < s.num_polygons(); ++p) {
    const MatX loop = s.polygon_loop_coords(p);
    double twice_area = 0.0;
    for (int i = 0; i < loop.rows(); ++i) {
      const int j = (i + 1) % loop.rows();
      twice_area += loop(i, 0) * loop(j, 1) - loop(j, 0) * loop(i, 1);
    }
    CHECK(twice_area > 0.0);
    CHECK(std::abs(0.5 * twice_area - s.polygon(p).area) < 1e-13);
  }
  // to3d / to2d round-trip
  for (int v = 0; v < s.num_vertices(); ++v) {
    const Vec2 x = s.vertex(v);
    CHECK((s.to2d(s.to3d(x)) - x).norm() < 1e-13);
    CHECK(std::abs(s.to3d(x)[2] - 1.0) < 1e-13);  // interface plane of the benchmark
  }
}

TEST_CASE("connector is a coordinate-faithful bijection") {
  PolyMesh3 mesh = generate_cube_mesh(2);
  tag_boundaries(mesh, benchmark_boundary_rule());
  SurfaceExtraction ext = extract_surface(mesh);
  const SurfaceMesh2& s = ext.surface;
  const BulkSurfaceConnector& c = ext.connector;

  for (int p = 0; p < s.num_polygons(); ++p) {
    const int f = c.polygon_to_face[p];
    REQUIRE(f >= 0);
    CHECK(mesh.face(f).tag == FaceTag::Sigma);
    CHECK(c.face_to_polygon[f] == p);
  }
  int mapped_faces = 0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (c.face_to_polygon[f] < 0) continue;
    ++mapped_faces;
    CHECK(mesh.face(f).tag == FaceTag::Sigma);
  }
  CHECK(mapped_faces == s.num_polygons());

  for (int sv = 0; sv < s.num_vertices(); ++sv) {
    const int bv = c.surface_to_vertex[sv];
    REQUIRE(bv >= 0);
    CHECK(c.vertex_to_surface[bv] == sv);
    CHECK((mesh.vertex(bv) - s.to3d(s.vertex(sv))).norm() < 1e-12);
  }
  for (int se = 0; se < s.num_edges(); ++se) {
    const int be = c.surface_to_edge[se];
    REQUIRE(be >= 0);
    CHECK(c.edge_to_surface[be] == se);
    CHECK(std::abs(mesh.edge(be).length - s.edge(se).length) < 1e-12);
  }
}

TEST_CASE("vertex characteristic length is the mean incident edge length") {
  SurfaceExtraction ext = extracted(2);
  const SurfaceMesh2& s = ext.surface;
  // uniform 2x2 grid: all edges have length 1/2
  for (int v = 0; v < s.num_vertices(); ++v)
    CHECK(std::abs(s.vertex_length(v) - 0.5) < 1e-13);
}

TEST_CASE("extraction requires Sigma faces") {
  PolyMesh3 mesh = generate_cube_mesh(1);
  BoundaryRule all_u;
  all_u.is_gamma_u = [](const Vec3&) { return true; };
  all_u.is_gamma_sigma = [](const Vec3&) { return false; };
  all_u.is_sigma = [](const Vec3&) { return false; };
  tag_boundaries(mesh, all_u);
  CHECK_THROWS_AS(extract_surface(mesh), Error);
}
