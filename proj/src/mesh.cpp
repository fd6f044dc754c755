#include "biotvem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "biotvem/quadrature.hpp"

namespace biotvem {

const char* face_tag_name(FaceTag t) {
  switch (t) {
    case FaceTag::GammaU: return "GammaU";
    case FaceTag::GammaSigma: return "GammaSigma";
    case FaceTag::Sigma: return "Sigma";
    default: return "Interior";
  }
}

PolyMesh3::PolyMesh3(MatX vertices, std::vector<std::vector<int>> face_loops,
                     std::vector<std::vector<int>> cell_faces)
    : vertices_(std::move(vertices)) {
  build_topology(face_loops, cell_faces);
  build_geometry();
  validate();
}

void PolyMesh3::build_topology(const std::vector<std::vector<int>>& face_loops,
                               const std::vector<std::vector<int>>& cell_faces) {
  const int nv = num_vertices();
  std::map<std::pair<int, int>, int> edge_ids;
  faces_.resize(face_loops.size());
  for (size_t f = 0; f < face_loops.size(); ++f) {
    const auto& loop = face_loops[f];
    if (loop.size() < 3)
      throw Error(ErrorKind::Topology, "face " + std::to_string(f) + " has fewer than 3 vertices");
    for (int v : loop)
      if (v < 0 || v >= nv)
        throw Error(ErrorKind::Topology, "face " + std::to_string(f) + " references invalid vertex");
    faces_[f].vertices = loop;
  }
  cells_.resize(cell_faces.size());
  for (size_t c = 0; c < cell_faces.size(); ++c) {
    cells_[c].faces = cell_faces[c];
    for (int f : cell_faces[c]) {
      if (f < 0 || f >= num_faces())
        throw Error(ErrorKind::Topology, "cell " + std::to_string(c) + " references invalid face");
      auto& own = faces_[f].owner_cells;
      if (own[0] < 0) own[0] = static_cast<int>(c);
      else if (own[1] < 0) own[1] = static_cast<int>(c);
      else
        throw Error(ErrorKind::Topology, "face " + std::to_string(f) + " owned by more than two cells");
    }
  }
  for (size_t f = 0; f < faces_.size(); ++f)
    if (faces_[f].owner_cells[0] < 0)
      throw Error(ErrorKind::Topology, "face " + std::to_string(f) + " belongs to no cell");

  // Orient each loop outward for its first owner, then freeze edges.
  for (auto& face : faces_) {
    const auto& loop = face.vertices;
    Vec3 nrm = Vec3::Zero();  // Newell normal
    Vec3 fc = Vec3::Zero();
    for (size_t j = 0; j < loop.size(); ++j) {
      Vec3 a = vertex(loop[j]);
      Vec3 b = vertex(loop[(j + 1) % loop.size()]);
      nrm += a.cross(b);
      fc += a;
    }
    fc /= static_cast<double>(loop.size());
    const MeshCell& owner = cells_[face.owner_cells[0]];
    Vec3 cc = Vec3::Zero();
    std::set<int> cvs;
    for (int cf : owner.faces)
      for (int v : faces_[cf].vertices) cvs.insert(v);
    for (int v : cvs) cc += vertex(v);
    cc /= static_cast<double>(cvs.size());
    if (nrm.dot(fc - cc) < 0.0) std::reverse(face.vertices.begin(), face.vertices.end());
  }
  for (auto& face : faces_) {
    face.edges.resize(face.vertices.size());
    for (size_t j = 0; j < face.vertices.size(); ++j) {
      int a = face.vertices[j], b = face.vertices[(j + 1) % face.vertices.size()];
      auto key = std::minmax(a, b);
      auto it = edge_ids.find(key);
      if (it == edge_ids.end()) {
        MeshEdge e;
        e.v0 = key.first;
        e.v1 = key.second;
        it = edge_ids.emplace(key, static_cast<int>(edges_.size())).first;
        edges_.push_back(e);
      }
      face.edges[j] = it->second;
    }
  }
  for (size_t c = 0; c < cells_.size(); ++c) {
    auto& cell = cells_[c];
    std::set<int> vs, es;
    cell.face_signs.resize(cell.faces.size());
    for (size_t jf = 0; jf < cell.faces.size(); ++jf) {
      const MeshFace& face = faces_[cell.faces[jf]];
      cell.face_signs[jf] = (face.owner_cells[0] == static_cast<int>(c)) ? 1 : -1;
      vs.insert(face.vertices.begin(), face.vertices.end());
      es.insert(face.edges.begin(), face.edges.end());
    }
    cell.vertices.assign(vs.begin(), vs.end());
    cell.edges.assign(es.begin(), es.end());
  }
}

void PolyMesh3::build_geometry() {
  for (auto& e : edges_) {
    e.length = (vertex(e.v1) - vertex(e.v0)).norm();
    e.midpoint = 0.5 * (vertex(e.v0) + vertex(e.v1));
  }
  for (size_t f = 0; f < faces_.size(); ++f) {
    auto& face = faces_[f];
    const auto& loop = face.vertices;
    const int m = static_cast<int>(loop.size());
    Vec3 va = Vec3::Zero();
    for (int v : loop) va += vertex(v);
    va /= m;
    Vec3 nrm = Vec3::Zero();
    Vec3 moment = Vec3::Zero();
    double area2 = 0.0;
    for (int j = 0; j < m; ++j) {
      Vec3 a = vertex(loop[j]) - va;
      Vec3 b = vertex(loop[(j + 1) % m]) - va;
      Vec3 cr = a.cross(b);
      nrm += cr;
    }
    face.area = 0.5 * nrm.norm();
    if (face.area <= 0.0)
      throw Error(ErrorKind::Geometry, "degenerate face " + std::to_string(f));
    face.normal = nrm.normalized();
    for (int j = 0; j < m; ++j) {
      Vec3 a = vertex(loop[j]) - va;
      Vec3 b = vertex(loop[(j + 1) % m]) - va;
      double sa = 0.5 * a.cross(b).dot(face.normal);
      area2 += sa;
      moment += sa * (va + (a + b) / 3.0);
    }
    face.barycenter = moment / area2;
    face.diameter = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        face.diameter = std::max(face.diameter, (vertex(loop[i]) - vertex(loop[j])).norm());
    double dev = 0.0;
    for (int v : loop) dev = std::max(dev, std::abs((vertex(v) - face.barycenter).dot(face.normal)));
    if (dev > 1e-10 * face.diameter)
      throw Error(ErrorKind::Geometry,
                  "face " + std::to_string(f) + " not planar, deviation " + std::to_string(dev));
  }
  for (size_t c = 0; c < cells_.size(); ++c) {
    auto& cell = cells_[c];
    std::vector<MatX> loops;
    for (size_t jf = 0; jf < cell.faces.size(); ++jf)
      loops.push_back(face_loop_coords(cell.faces[jf], static_cast<int>(c)));
    QuadRule q = quad_polyhedron(loops, 2);
    cell.volume = q.measure();
    if (cell.volume <= 0.0)
      throw Error(ErrorKind::Geometry, "cell " + std::to_string(c) + " has non-positive volume");
    Vec3 cc = Vec3::Zero();
    for (int i = 0; i < q.size(); ++i) cc += q.weights[i] * q.points.row(i).transpose();
    cell.barycenter = cc / cell.volume;
    cell.diameter = 0.0;
    for (size_t i = 0; i < cell.vertices.size(); ++i)
      for (size_t j = i + 1; j < cell.vertices.size(); ++j)
        cell.diameter = std::max(cell.diameter,
                                 (vertex(cell.vertices[i]) - vertex(cell.vertices[j])).norm());
  }
}

void PolyMesh3::validate() const {
  for (size_t c = 0; c < cells_.size(); ++c) {
    const auto& cell = cells_[c];
    Vec3 closure = Vec3::Zero();
    for (size_t jf = 0; jf < cell.faces.size(); ++jf) {
      const MeshFace& face = faces_[cell.faces[jf]];
      closure += cell.face_signs[jf] * face.area * face.normal;
    }
    if (closure.norm() > 1e-12 * cell.diameter * cell.diameter * 10.0)
      throw Error(ErrorKind::Topology, "cell " + std::to_string(c) + " is not closed");
  }
}

double PolyMesh3::mesh_size() const {
  double h = 0.0;
  for (const auto& c : cells_) h = std::max(h, c.diameter);
  return h;
}

MatX PolyMesh3::face_loop_coords(int f, int cell) const {
  const MeshFace& face = faces_[f];
  const int m = static_cast<int>(face.vertices.size());
  MatX L(m, 3);
  bool flip = cell >= 0 && face.owner_cells[0] != cell;
  for (int j = 0; j < m; ++j)
    L.row(j) = vertex(face.vertices[flip ? m - 1 - j : j]).transpose();
  return L;
}

PolyMesh3 generate_cube_mesh(int n, const Vec3& lo, const Vec3& hi) {
  if (n < 1) throw Error(ErrorKind::Config, "cube mesh requires n >= 1");
  if (((hi - lo).array() <= 0.0).any())
    throw Error(ErrorKind::Config, "degenerate box");
  const int nv1 = n + 1;
  MatX verts(nv1 * nv1 * nv1, 3);
  auto vid = [&](int i, int j, int k) { return i + nv1 * (j + nv1 * k); };
  for (int k = 0; k < nv1; ++k)
    for (int j = 0; j < nv1; ++j)
      for (int i = 0; i < nv1; ++i)
        verts.row(vid(i, j, k)) = (lo + Vec3((hi[0] - lo[0]) * i / n, (hi[1] - lo[1]) * j / n,
                                             (hi[2] - lo[2]) * k / n)).transpose();
  std::vector<std::vector<int>> faces;
  const int nxf = nv1 * n * n;
  auto xf = [&](int i, int j, int k) { return i * n * n + j * n + k; };
  auto yf = [&](int i, int j, int k) { return nxf + j * n * n + i * n + k; };
  auto zf = [&](int i, int j, int k) { return 2 * nxf + k * n * n + i * n + j; };
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        faces.push_back({vid(i, j, k), vid(i, j + 1, k), vid(i, j + 1, k + 1), vid(i, j, k + 1)});
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        faces.push_back({vid(i, j, k), vid(i + 1, j, k), vid(i + 1, j, k + 1), vid(i, j, k + 1)});
  for (int k = 0; k <= n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        faces.push_back({vid(i, j, k), vid(i + 1, j, k), vid(i + 1, j + 1, k), vid(i, j + 1, k)});
  std::vector<std::vector<int>> cells;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        cells.push_back({xf(i, j, k), xf(i + 1, j, k), yf(i, j, k), yf(i, j + 1, k),
                         zf(i, j, k), zf(i, j, k + 1)});
  return PolyMesh3(std::move(verts), std::move(faces), std::move(cells));
}

namespace {

std::vector<int> canonical_loop(const std::vector<int>& loop) {
  const int m = static_cast<int>(loop.size());
  int start = 0;
  for (int j = 1; j < m; ++j)
    if (loop[j] < loop[start]) start = j;
  int prev = loop[(start + m - 1) % m], next = loop[(start + 1) % m];
  std::vector<int> out(m);
  int dir = (next <= prev) ? 1 : -1;
  for (int j = 0; j < m; ++j) out[j] = loop[((start + dir * j) % m + m) % m];
  return out;
}

} // namespace

void export_mesh(const PolyMesh3& mesh, std::ostream& out) {
  out.precision(17);
  out << "VERTICES " << mesh.num_vertices() << "\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    Vec3 x = mesh.vertex(v);
    out << x[0] << " " << x[1] << " " << x[2] << "\n";
  }
  out << "FACES " << mesh.num_faces() << "\n";
  for (int f = 0; f < mesh.num_faces(); ++f) {
    auto loop = canonical_loop(mesh.face(f).vertices);
    for (size_t j = 0; j < loop.size(); ++j) out << (j ? " " : "") << loop[j];
    out << "\n";
  }
  out << "CELLS " << mesh.num_cells() << "\n";
  for (int c = 0; c < mesh.num_cells(); ++c) {
    auto fl = mesh.cell(c).faces;
    std::sort(fl.begin(), fl.end());
    for (size_t j = 0; j < fl.size(); ++j) out << (j ? " " : "") << fl[j];
    out << "\n";
  }
  out << "TAGS\n";
  for (int f = 0; f < mesh.num_faces(); ++f)
    if (mesh.face(f).tag != FaceTag::Interior)
      out << f << " " << face_tag_name(mesh.face(f).tag) << "\n";
}

void export_mesh_file(const PolyMesh3& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Config, "cannot open " + path + " for writing");
  export_mesh(mesh, out);
}

PolyMesh3 import_mesh(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next_line = [&](std::string& s) {
    while (std::getline(in, s)) {
      ++lineno;
      if (!s.empty() && s.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  auto fail = [&](const std::string& msg) -> Error {
    return Error(ErrorKind::Parse, "line " + std::to_string(lineno) + ": " + msg);
  };
  if (!next_line(line)) throw fail("empty mesh file");
  std::istringstream hdr(line);
  std::string kw;
  int nv = 0;
  hdr >> kw >> nv;
  if (kw != "VERTICES" || nv <= 0) throw fail("expected 'VERTICES n'");
  MatX verts(nv, 3);
  for (int v = 0; v < nv; ++v) {
    if (!next_line(line)) throw fail("unexpected end of VERTICES");
    std::istringstream ls(line);
    if (!(ls >> verts(v, 0) >> verts(v, 1) >> verts(v, 2))) throw fail("bad vertex line");
  }
  if (!next_line(line)) throw fail("missing FACES");
  std::istringstream fh(line);
  int nf = 0;
  fh >> kw >> nf;
  if (kw != "FACES" || nf <= 0) throw fail("expected 'FACES m'");
  std::vector<std::vector<int>> faces(nf);
  for (int f = 0; f < nf; ++f) {
    if (!next_line(line)) throw fail("unexpected end of FACES");
    std::istringstream ls(line);
    int v;
    while (ls >> v) faces[f].push_back(v);
    if (faces[f].size() < 3) throw fail("face with fewer than 3 vertices");
  }
  if (!next_line(line)) throw fail("missing CELLS");
  std::istringstream ch(line);
  int nc = 0;
  ch >> kw >> nc;
  if (kw != "CELLS" || nc <= 0) throw fail("expected 'CELLS c'");
  std::vector<std::vector<int>> cells(nc);
  for (int c = 0; c < nc; ++c) {
    if (!next_line(line)) throw fail("unexpected end of CELLS");
    std::istringstream ls(line);
    int f;
    while (ls >> f) cells[c].push_back(f);
    if (cells[c].size() < 4) throw fail("cell with fewer than 4 faces");
  }
  std::vector<std::pair<int, std::string>> tags;
  if (next_line(line)) {
    std::istringstream th(line);
    th >> kw;
    if (kw != "TAGS") throw fail("expected 'TAGS'");
    while (next_line(line)) {
      std::istringstream ls(line);
      int f;
      std::string name;
      if (!(ls >> f >> name)) throw fail("bad tag line");
      tags.emplace_back(f, name);
    }
  }
  PolyMesh3 mesh(std::move(verts), std::move(faces), std::move(cells));
  for (const auto& [f, name] : tags) {
    if (f < 0 || f >= mesh.num_faces())
      throw Error(ErrorKind::Parse, "tag references invalid face " + std::to_string(f));
    FaceTag t;
    if (name == "GammaU") t = FaceTag::GammaU;
    else if (name == "GammaSigma") t = FaceTag::GammaSigma;
    else if (name == "Sigma") t = FaceTag::Sigma;
    else throw Error(ErrorKind::Parse, "unknown tag '" + name + "'");
    if (!mesh.face(f).is_boundary())
      throw Error(ErrorKind::Topology, "tag on interior face " + std::to_string(f));
    mesh.set_face_tag(f, t);
  }
  return mesh;
}

PolyMesh3 import_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open mesh file " + path);
  return import_mesh(in);
}

BoundaryRule benchmark_boundary_rule() {
  const double tol = 1e-12;
  BoundaryRule rule;
  rule.is_sigma = [tol](const Vec3& x) { return std::abs(x[2] - 1.0) <= tol; };
  rule.is_gamma_u = [tol](const Vec3& x) { return x[2] <= 0.5 + tol; };
  rule.is_gamma_sigma = [tol](const Vec3& x) {
    return x[2] > 0.5 + tol && x[2] < 1.0 - tol;
  };
  return rule;
}

void tag_boundaries(PolyMesh3& mesh, const BoundaryRule& rule) {
  std::vector<int> bad;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (!mesh.face(f).is_boundary()) {
      mesh.set_face_tag(f, FaceTag::Interior);
      continue;
    }
    const Vec3 bc = mesh.face(f).barycenter;
    int hits = 0;
    FaceTag tag = FaceTag::Interior;
    if (rule.is_sigma && rule.is_sigma(bc)) { ++hits; tag = FaceTag::Sigma; }
    if (rule.is_gamma_u && rule.is_gamma_u(bc)) { ++hits; tag = FaceTag::GammaU; }
    if (rule.is_gamma_sigma && rule.is_gamma_sigma(bc)) { ++hits; tag = FaceTag::GammaSigma; }
    if (hits != 1) { bad.push_back(f); continue; }
    mesh.set_face_tag(f, tag);
  }
  if (!bad.empty()) {
    std::string msg = "untagged or doubly-tagged boundary faces:";
    for (int f : bad) msg += " " + std::to_string(f);
    throw Error(ErrorKind::Config, msg);
  }
}

RegularityReport check_regularity(const PolyMesh3& mesh) {
  RegularityReport rep;
  rep.cell_star_radius_ratio.resize(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const MeshCell& cell = mesh.cell(c);
    double r = cell.diameter;
    for (size_t jf = 0; jf < cell.faces.size(); ++jf) {
      const MeshFace& face = mesh.face(cell.faces[jf]);
      double d = std::abs((cell.barycenter - face.barycenter).dot(face.normal));
      r = std::min(r, d);
    }
    rep.cell_star_radius_ratio[c] = r / cell.diameter;
    for (int e : cell.edges)
      rep.min_edge_diameter_ratio =
          std::min(rep.min_edge_diameter_ratio, mesh.edge(e).length / cell.diameter);
  }
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const MeshFace& face = mesh.face(f);
    const int m = static_cast<int>(face.vertices.size());
    double r = face.diameter;
    for (int j = 0; j < m; ++j) {
      Vec3 a = mesh.vertex(face.vertices[j]);
      Vec3 b = mesh.vertex(face.vertices[(j + 1) % m]);
      Vec3 t = (b - a).normalized();
      Vec3 d = face.barycenter - a;
      r = std::min(r, (d - d.dot(t) * t).norm());
    }
    rep.min_face_star_ratio = std::min(rep.min_face_star_ratio, r / face.diameter);
  }
  rep.inferred_rho = rep.min_edge_diameter_ratio;
  for (double r : rep.cell_star_radius_ratio) rep.inferred_rho = std::min(rep.inferred_rho, r);
  rep.inferred_rho = std::min(rep.inferred_rho, rep.min_face_star_ratio);
  return rep;
}

} // namespace biotvem
