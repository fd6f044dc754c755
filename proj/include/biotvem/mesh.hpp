#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "biotvem/types.hpp"

namespace biotvem {

enum class FaceTag { Interior, GammaU, GammaSigma, Sigma };

const char* face_tag_name(FaceTag t);

struct MeshEdge {
  int v0 = -1, v1 = -1;  // v0 < v1
  double length = 0.0;
  Vec3 midpoint = Vec3::Zero();
};

struct MeshFace {
  std::vector<int> vertices;  // ordered loop, outward for owner_cells[0]
  std::vector<int> edges;     // edge j joins loop vertices j, j+1
  std::array<int, 2> owner_cells{-1, -1};
  Vec3 normal = Vec3::Zero();  // unit, outward for owner_cells[0]
  Vec3 barycenter = Vec3::Zero();
  double area = 0.0;
  double diameter = 0.0;
  FaceTag tag = FaceTag::Interior;

  bool is_boundary() const { return owner_cells[1] < 0; }
};

struct MeshCell {
  std::vector<int> faces;
  std::vector<int> face_signs;  // +1 if face normal is outward for this cell
  std::vector<int> vertices;    // ascending global ids
  std::vector<int> edges;       // ascending global ids
  Vec3 barycenter = Vec3::Zero();
  double volume = 0.0;
  double diameter = 0.0;
};

class PolyMesh3 {
public:
  // Raw construction: vertices + face loops + cell face lists. Derives edges,
  // geometry caches, orientations; validates planarity and cell closure.
  PolyMesh3(MatX vertices, std::vector<std::vector<int>> face_loops,
            std::vector<std::vector<int>> cell_faces);

  int num_vertices() const { return static_cast<int>(vertices_.rows()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }

  Vec3 vertex(int i) const { return vertices_.row(i).transpose(); }
  const MatX& vertices() const { return vertices_; }
  const MeshEdge& edge(int i) const { return edges_[i]; }
  const MeshFace& face(int i) const { return faces_[i]; }
  const MeshCell& cell(int i) const { return cells_[i]; }

  double mesh_size() const;  // max cell diameter

  // Face loop coordinates as an nv x 3 matrix, oriented outward for the given
  // cell (or for the first owner when cell < 0).
  MatX face_loop_coords(int f, int cell = -1) const;

  void set_face_tag(int f, FaceTag t) { faces_[f].tag = t; }

private:
  void build_topology(const std::vector<std::vector<int>>& face_loops,
                      const std::vector<std::vector<int>>& cell_faces);
  void build_geometry();
  void validate() const;

  MatX vertices_;
  std::vector<MeshEdge> edges_;
  std::vector<MeshFace> faces_;
  std::vector<MeshCell> cells_;
};

struct RegularityReport {
  std::vector<double> cell_star_radius_ratio;  // inscribed-ball estimate / h_K
  double min_face_star_ratio = 1.0;
  double min_edge_diameter_ratio = 1.0;
  double inferred_rho = 1.0;
};

PolyMesh3 generate_cube_mesh(int n, const Vec3& lo = Vec3::Zero(),
                             const Vec3& hi = Vec3::Ones());

PolyMesh3 import_mesh(std::istream& in);
PolyMesh3 import_mesh_file(const std::string& path);
void export_mesh(const PolyMesh3& mesh, std::ostream& out);
void export_mesh_file(const PolyMesh3& mesh, const std::string& path);

// Region predicates evaluated on boundary-face barycenters. Exactly one must
// match per face.
struct BoundaryRule {
  std::function<bool(const Vec3&)> is_gamma_u;
  std::function<bool(const Vec3&)> is_gamma_sigma;
  std::function<bool(const Vec3&)> is_sigma;
};

// Tags of the manufactured benchmark on the unit cube: Sigma = {x3 = 1},
// GammaU = {x3 <= 1/2}, GammaSigma the rest of the boundary.
BoundaryRule benchmark_boundary_rule();

void tag_boundaries(PolyMesh3& mesh, const BoundaryRule& rule);

RegularityReport check_regularity(const PolyMesh3& mesh);

} // namespace biotvem
