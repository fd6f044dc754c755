#include "biotvem/surface.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace biotvem {

SurfaceMesh2::SurfaceMesh2(MatX vertices2d, std::vector<std::vector<int>> polygon_loops,
                           Vec3 origin, Vec3 t1, Vec3 t2)
    : vertices_(std::move(vertices2d)), origin_(origin), t1_(t1), t2_(t2),
      normal_(t1.cross(t2)) {
  const int nv = num_vertices();
  std::map<std::pair<int, int>, int> edge_ids;
  std::map<int, int> edge_count;
  polygons_.resize(polygon_loops.size());
  for (size_t p = 0; p < polygon_loops.size(); ++p) {
    auto& poly = polygons_[p];
    poly.vertices = polygon_loops[p];
    const int m = static_cast<int>(poly.vertices.size());
    if (m < 3) throw Error(ErrorKind::Topology, "surface polygon with fewer than 3 vertices");
    // Counterclockwise in the tangent frame.
    double a2 = 0.0;
    for (int j = 0; j < m; ++j) {
      Vec2 a = vertex(poly.vertices[j]);
      Vec2 b = vertex(poly.vertices[(j + 1) % m]);
      a2 += a[0] * b[1] - a[1] * b[0];
    }
    if (a2 < 0.0) std::reverse(poly.vertices.begin(), poly.vertices.end());
    poly.edges.resize(m);
    for (int j = 0; j < m; ++j) {
      int a = poly.vertices[j], b = poly.vertices[(j + 1) % m];
      if (a < 0 || a >= nv || b < 0 || b >= nv)
        throw Error(ErrorKind::Topology, "surface polygon references invalid vertex");
      auto key = std::minmax(a, b);
      auto it = edge_ids.find(key);
      if (it == edge_ids.end()) {
        SurfaceEdge e;
        e.v0 = key.first;
        e.v1 = key.second;
        e.length = (vertex(e.v1) - vertex(e.v0)).norm();
        it = edge_ids.emplace(key, static_cast<int>(edges_.size())).first;
        edges_.push_back(e);
      }
      poly.edges[j] = it->second;
      edge_count[it->second] += 1;
    }
    Vec2 va = Vec2::Zero();
    for (int v : poly.vertices) va += vertex(v);
    va /= m;
    double area = 0.0;
    Vec2 moment = Vec2::Zero();
    for (int j = 0; j < m; ++j) {
      Vec2 a = vertex(poly.vertices[j]) - va;
      Vec2 b = vertex(poly.vertices[(j + 1) % m]) - va;
      double sa = 0.5 * (a[0] * b[1] - a[1] * b[0]);
      area += sa;
      moment += sa * (va + (a + b) / 3.0);
    }
    poly.area = area;
    poly.barycenter = moment / area;
    poly.diameter = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        poly.diameter = std::max(poly.diameter,
                                 (vertex(poly.vertices[i]) - vertex(poly.vertices[j])).norm());
  }
  vertex_on_boundary_.assign(nv, false);
  for (auto& [e, count] : edge_count) {
    if (count > 2) throw Error(ErrorKind::Topology, "surface edge shared by more than two polygons");
    edges_[e].on_boundary = (count == 1);
    if (count == 1) {
      vertex_on_boundary_[edges_[e].v0] = true;
      vertex_on_boundary_[edges_[e].v1] = true;
    }
  }
  vertex_length_.assign(nv, 0.0);
  std::vector<int> deg(nv, 0);
  for (const auto& e : edges_) {
    vertex_length_[e.v0] += e.length;
    vertex_length_[e.v1] += e.length;
    deg[e.v0] += 1;
    deg[e.v1] += 1;
  }
  for (int v = 0; v < nv; ++v) {
    if (deg[v] == 0) throw Error(ErrorKind::Topology, "isolated surface vertex");
    vertex_length_[v] /= deg[v];
  }
}

double SurfaceMesh2::mesh_size() const {
  double h = 0.0;
  for (const auto& p : polygons_) h = std::max(h, p.diameter);
  return h;
}

MatX SurfaceMesh2::polygon_loop_coords(int p) const {
  const auto& poly = polygons_[p];
  MatX L(poly.vertices.size(), 2);
  for (size_t j = 0; j < poly.vertices.size(); ++j)
    L.row(j) = vertex(poly.vertices[j]).transpose();
  return L;
}

SurfaceExtraction extract_surface(const PolyMesh3& mesh) {
  std::vector<int> sigma_faces;
  for (int f = 0; f < mesh.num_faces(); ++f)
    if (mesh.face(f).tag == FaceTag::Sigma) sigma_faces.push_back(f);
  if (sigma_faces.empty())
    throw Error(ErrorKind::Geometry, "no Sigma faces to extract");

  // Frame from the first face: n_Sigma is its outward normal.
  const MeshFace& f0 = mesh.face(sigma_faces[0]);
  Vec3 n = f0.normal;
  Vec3 origin = f0.barycenter;
  Vec3 t1 = (mesh.vertex(f0.vertices[0]) - origin).normalized();
  Vec3 t2 = n.cross(t1);

  double href = 0.0, dev = 0.0;
  for (int f : sigma_faces) {
    const MeshFace& face = mesh.face(f);
    href = std::max(href, face.diameter);
    if (face.normal.dot(n) < 0.99)
      throw Error(ErrorKind::Geometry, "Sigma faces are not consistently oriented");
    for (int v : face.vertices)
      dev = std::max(dev, std::abs((mesh.vertex(v) - origin).dot(n)));
  }
  if (dev > 1e-10 * href)
    throw Error(ErrorKind::Geometry,
                "Sigma faces not coplanar, max deviation " + std::to_string(dev));

  // Coordinate hashing at 1e-12 absolute.
  auto key_of = [](const Vec2& x) {
    auto snap = [](double v) { return std::llround(v * 1e12); };
    return std::pair<long long, long long>(snap(x[0]), snap(x[1]));
  };
  std::map<std::pair<long long, long long>, int> vmap;
  std::vector<int> surf_to_bulk_v;
  BulkSurfaceConnector conn;
  conn.face_to_polygon.assign(mesh.num_faces(), -1);
  conn.vertex_to_surface.assign(mesh.num_vertices(), -1);
  conn.edge_to_surface.assign(mesh.num_edges(), -1);

  std::vector<Vec2> coords;
  std::vector<std::vector<int>> loops;
  for (int f : sigma_faces) {
    const MeshFace& face = mesh.face(f);
    std::vector<int> loop;
    for (int v : face.vertices) {
      Vec3 d = mesh.vertex(v) - origin;
      Vec2 x(t1.dot(d), t2.dot(d));
      auto key = key_of(x);
      auto it = vmap.find(key);
      if (it == vmap.end()) {
        it = vmap.emplace(key, static_cast<int>(coords.size())).first;
        coords.push_back(x);
        surf_to_bulk_v.push_back(v);
      }
      conn.vertex_to_surface[v] = it->second;
      loop.push_back(it->second);
    }
    loops.push_back(loop);
    conn.face_to_polygon[f] = static_cast<int>(loops.size()) - 1;
    conn.polygon_to_face.push_back(f);
  }
  MatX V(coords.size(), 2);
  for (size_t i = 0; i < coords.size(); ++i) V.row(i) = coords[i].transpose();
  SurfaceMesh2 surf(std::move(V), std::move(loops), origin, t1, t2);

  conn.surface_to_vertex = surf_to_bulk_v;
  conn.surface_to_edge.assign(surf.num_edges(), -1);
  std::map<std::pair<int, int>, int> sedge_of;
  for (int e = 0; e < surf.num_edges(); ++e)
    sedge_of[{surf.edge(e).v0, surf.edge(e).v1}] = e;
  for (int f : sigma_faces) {
    const MeshFace& face = mesh.face(f);
    for (int e : face.edges) {
      const MeshEdge& edge = mesh.edge(e);
      auto key = std::minmax(conn.vertex_to_surface[edge.v0], conn.vertex_to_surface[edge.v1]);
      auto it = sedge_of.find({key.first, key.second});
      if (it == sedge_of.end())
        throw Error(ErrorKind::Internal, "surface edge matching failed");
      conn.edge_to_surface[e] = it->second;
      conn.surface_to_edge[it->second] = e;
    }
  }
  return SurfaceExtraction{std::move(surf), std::move(conn)};
}

} // namespace biotvem
