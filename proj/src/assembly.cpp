#include "biotvem/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "biotvem/quadrature.hpp"

namespace biotvem {

DofLayout build_layout(const PolyMesh3& mesh, const SurfaceMesh2& surface,
                       const BulkSurfaceConnector& connector) {
  bool any_sigma = false;
  for (int f = 0; f < mesh.num_faces(); ++f)
    if (mesh.face(f).tag == FaceTag::Sigma) any_sigma = true;
  if (!any_sigma) throw Error(ErrorKind::Config, "layout requires Sigma faces");
  (void)connector;

  DofLayout L;
  L.n_vertex = mesh.num_vertices();
  L.n_edge = mesh.num_edges();
  L.n_face = mesh.num_faces();
  L.n_cell = mesh.num_cells();
  L.n_svertex = surface.num_vertices();
  L.u_edge_off = 3 * L.n_vertex;
  L.u_face_off = L.u_edge_off + 3 * L.n_edge;
  L.u_div_off = L.u_face_off + 3 * L.n_face;
  L.p_off = L.u_div_off + 3 * L.n_cell;
  L.phi_off = L.p_off + 4 * L.n_cell;
  L.w_off = L.phi_off + L.n_svertex;
  L.total = L.w_off + 3 * L.n_svertex;
  L.constrained.assign(L.total, 0);
  L.bc_value.assign(L.total, 0.0);

  for (int f = 0; f < mesh.num_faces(); ++f) {
    const MeshFace& face = mesh.face(f);
    if (face.tag != FaceTag::GammaU) continue;
    for (int i = 0; i < 3; ++i) {
      for (int v : face.vertices) L.constrained[L.u_vertex(v, i)] = 1;
      for (int e : face.edges) L.constrained[L.u_edge(e, i)] = 1;
      L.constrained[L.u_face(f, i)] = 1;
    }
  }
  for (int sv = 0; sv < surface.num_vertices(); ++sv)
    if (surface.vertex_on_boundary(sv)) {
      L.constrained[L.phi(sv)] = 1;
      for (int c = 0; c < 3; ++c) L.constrained[L.w(sv, c)] = 1;
    }
  return L;
}

void set_boundary_values(DofLayout& layout, const PolyMesh3& mesh,
                         const SurfaceMesh2& surface,
                         const BulkSurfaceConnector& connector,
                         const ManufacturedCase& mcase) {
  (void)connector;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const MeshFace& face = mesh.face(f);
    if (face.tag != FaceTag::GammaU) continue;
    for (int v : face.vertices) {
      Vec3 uv = mcase.u(mesh.vertex(v));
      for (int i = 0; i < 3; ++i) layout.bc_value[layout.u_vertex(v, i)] = uv[i];
    }
    for (int e : face.edges) {
      Vec3 ue = mcase.u(mesh.edge(e).midpoint);
      for (int i = 0; i < 3; ++i) layout.bc_value[layout.u_edge(e, i)] = ue[i];
    }
    QuadRule q = quad_polygon(mesh.face_loop_coords(f), 6);
    Vec3 mean = Vec3::Zero();
    for (int p = 0; p < q.size(); ++p)
      mean += q.weights[p] * mcase.u(q.points.row(p).transpose());
    mean /= face.area;
    for (int i = 0; i < 3; ++i) layout.bc_value[layout.u_face(f, i)] = mean[i];
  }
  for (int sv = 0; sv < surface.num_vertices(); ++sv) {
    if (!surface.vertex_on_boundary(sv)) continue;
    Vec3 x = surface.to3d(surface.vertex(sv));
    layout.bc_value[layout.phi(sv)] = mcase.phi(x);
    Vec3 gw = mcase.grad_w(x);
    const double hz = surface.vertex_length(sv);
    layout.bc_value[layout.w(sv, 0)] = mcase.w(x);
    layout.bc_value[layout.w(sv, 1)] = hz * surface.tangent1().dot(gw);
    layout.bc_value[layout.w(sv, 2)] = hz * surface.tangent2().dot(gw);
  }
}

ElementSet build_elements(const PolyMesh3& mesh, const SurfaceMesh2& surface,
                          int exactness) {
  ElementSet es;
  es.faces.reserve(mesh.num_faces());
  for (int f = 0; f < mesh.num_faces(); ++f) es.faces.emplace_back(mesh, f, exactness);
  es.cells.reserve(mesh.num_cells());
  es.pressures.reserve(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    es.cells.emplace_back(mesh, c, es.faces, exactness);
    es.pressures.push_back(build_pressure_element(mesh, c, exactness));
  }
  es.plates.reserve(surface.num_polygons());
  es.ppressures.reserve(surface.num_polygons());
  for (int p = 0; p < surface.num_polygons(); ++p) {
    es.plates.emplace_back(surface, p, exactness);
    es.ppressures.emplace_back(surface, p, exactness);
  }
  return es;
}

MatX local_a_sigma(const StokesFaceElement& felem, double gamma, const Vec3& n_sigma) {
  const int Nf = felem.ndof();
  const QuadRule& q = felem.quad();
  MatX vals(q.size(), Nf);
  for (int p = 0; p < q.size(); ++p)
    vals.row(p) =
        felem.monomials().values(q.points.row(p).transpose()).head(6).transpose() *
        felem.pi0_deg2();
  MatX Mt = vals.transpose() * q.weights.asDiagonal() * vals;
  MatX A = MatX::Zero(3 * Nf, 3 * Nf);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double cij = gamma * ((i == j ? 1.0 : 0.0) - n_sigma[i] * n_sigma[j]);
      if (cij == 0.0) continue;
      for (int s = 0; s < Nf; ++s)
        for (int r = 0; r < Nf; ++r) A(3 * s + i, 3 * r + j) += cij * Mt(s, r);
    }
  return A;
}

MatX local_b1_sigma(const StokesFaceElement& felem, const PlatePressureElement& pelem,
                    const SurfaceMesh2& surface, const Vec3& n_sigma) {
  const int Nf = felem.ndof(), Nr = pelem.ndof();
  const QuadRule& q = felem.quad();
  MatX B = MatX::Zero(Nr, 3 * Nf);
  for (int p = 0; p < q.size(); ++p) {
    const Vec2 xf = q.points.row(p).transpose();
    const Vec3 x3 = felem.to_global(xf);
    const Vec2 xs = surface.to2d(x3);
    VecX psi = (pelem.monomials().values(xs).transpose() * pelem.pi_nabla()).transpose();
    VecX v2 = (felem.monomials().values(xf).head(6).transpose() * felem.pi0_deg2()).transpose();
    for (int r = 0; r < Nr; ++r)
      for (int s = 0; s < Nf; ++s)
        for (int i = 0; i < 3; ++i)
          B(r, 3 * s + i) += q.weights[p] * psi[r] * v2[s] * n_sigma[i];
  }
  return B;
}

std::vector<int> face_trace_globals(const PolyMesh3& mesh, int face_id,
                                    const DofLayout& layout) {
  const MeshFace& face = mesh.face(face_id);
  const int nfv = static_cast<int>(face.vertices.size());
  std::vector<int> g(3 * (2 * nfv + 1));
  for (int j = 0; j < nfv; ++j)
    for (int i = 0; i < 3; ++i) {
      g[3 * j + i] = layout.u_vertex(face.vertices[j], i);
      g[3 * (nfv + j) + i] = layout.u_edge(face.edges[j], i);
    }
  for (int i = 0; i < 3; ++i) g[3 * 2 * nfv + i] = layout.u_face(face_id, i);
  return g;
}

std::vector<int> cell_dof_globals(const PolyMesh3& mesh, const StokesCellElement& elem,
                                  const DofLayout& layout) {
  const MeshCell& cell = mesh.cell(elem.cell_id());
  std::vector<int> g(elem.ndof());
  for (size_t lv = 0; lv < cell.vertices.size(); ++lv)
    for (int i = 0; i < 3; ++i)
      g[3 * static_cast<int>(lv) + i] = layout.u_vertex(cell.vertices[lv], i);
  int s = static_cast<int>(cell.vertices.size());
  for (size_t le = 0; le < cell.edges.size(); ++le)
    for (int i = 0; i < 3; ++i) g[3 * (s + static_cast<int>(le)) + i] = layout.u_edge(cell.edges[le], i);
  s += static_cast<int>(cell.edges.size());
  for (size_t jf = 0; jf < cell.faces.size(); ++jf)
    for (int i = 0; i < 3; ++i) g[3 * (s + static_cast<int>(jf)) + i] = layout.u_face(cell.faces[jf], i);
  for (int d = 0; d < 3; ++d) g[3 * elem.num_scalar_slots() + d] = layout.u_div(elem.cell_id(), d);
  return g;
}

namespace {

using Triplet = Eigen::Triplet<double>;

void add_block(std::vector<Triplet>& trips, const MatX& M,
               const std::vector<int>& rows, const std::vector<int>& cols) {
  for (int r = 0; r < M.rows(); ++r)
    for (int c = 0; c < M.cols(); ++c)
      if (M(r, c) != 0.0) trips.emplace_back(rows[r], cols[c], M(r, c));
}

} // namespace

BlockSystem assemble(const CoupledProblem& prob, const DofLayout& layout) {
  const PolyMesh3& mesh = *prob.mesh;
  const SurfaceMesh2& surface = *prob.surface;
  const BulkSurfaceConnector& conn = *prob.connector;
  const ElementSet& es = *prob.elements;
  const ModelParams& params = prob.params;

  BlockSystem sys;
  sys.layout = &layout;
  sys.rhs = VecX::Zero(layout.total);
  std::vector<Triplet> trips;

  for (int c = 0; c < mesh.num_cells(); ++c) {
    const StokesCellElement& elem = es.cells[c];
    const PressureElement& pe = es.pressures[c];
    std::vector<int> ug = cell_dof_globals(mesh, elem, layout);
    std::vector<int> pg(4);
    for (int a = 0; a < 4; ++a) pg[a] = layout.p(c, a);

    MatX A = local_stokes_a(elem, params);
    add_block(trips, A, ug, ug);
    MatX B1 = local_b1_div(elem, pe);
    add_block(trips, B1, pg, ug);
    add_block(trips, MatX(B1.transpose()), ug, pg);
    if (prob.mcase) {
      VecX F = local_rhs_F(elem, prob.mcase->f);
      for (int k = 0; k < F.size(); ++k) sys.rhs[ug[k]] += F[k];
    }
  }

  // Interface terms.
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (mesh.face(f).tag != FaceTag::Sigma) continue;
    const StokesFaceElement& fe = es.faces[f];
    const int poly = conn.face_to_polygon[f];
    if (poly < 0) throw Error(ErrorKind::Assembly, "Sigma face " + std::to_string(f) +
                                                       " has no matched surface polygon");
    const PlatePressureElement& ppe = es.ppressures[poly];
    const Vec3 n = surface.normal();
    std::vector<int> tg = face_trace_globals(mesh, f, layout);
    std::vector<int> phig(ppe.ndof());
    for (int r = 0; r < ppe.ndof(); ++r)
      phig[r] = layout.phi(surface.polygon(poly).vertices[r]);

    MatX As = local_a_sigma(fe, params.gamma, n);
    add_block(trips, As, tg, tg);
    MatX Bs = local_b1_sigma(fe, ppe, surface, n);
    add_block(trips, Bs, phig, tg);
    add_block(trips, MatX(Bs.transpose()), tg, phig);

    if (prob.mcase) {
      // The exact solution of the benchmark does not satisfy the homogeneous
      // slip law; the defect moves to the bulk load.
      const QuadRule& q = fe.quad();
      for (int p = 0; p < q.size(); ++p) {
        const Vec2 xf = q.points.row(p).transpose();
        const Vec3 x3 = fe.to_global(xf);
        const Vec3 nR = prob.mcase->slip_defect(x3).cross(n);
        VecX v2 =
            (fe.monomials().values(xf).head(6).transpose() * fe.pi0_deg2()).transpose();
        for (int s = 0; s < fe.ndof(); ++s)
          for (int i = 0; i < 3; ++i)
            sys.rhs[tg[3 * s + i]] += q.weights[p] * nR[i] * v2[s];
      }
    }
  }
  // Traction data on the stress boundary.
  if (prob.mcase) {
    for (int f = 0; f < mesh.num_faces(); ++f) {
      if (mesh.face(f).tag != FaceTag::GammaSigma) continue;
      const StokesFaceElement& fe = es.faces[f];
      std::vector<int> tg = face_trace_globals(mesh, f, layout);
      const QuadRule& q = fe.quad();
      for (int p = 0; p < q.size(); ++p) {
        const Vec2 xf = q.points.row(p).transpose();
        const Vec3 x3 = fe.to_global(xf);
        const Vec3 t = prob.mcase->traction(x3, fe.normal());
        VecX v2 =
            (fe.monomials().values(xf).head(6).transpose() * fe.pi0_deg2()).transpose();
        for (int s = 0; s < fe.ndof(); ++s)
          for (int i = 0; i < 3; ++i)
            sys.rhs[tg[3 * s + i]] += q.weights[p] * t[i] * v2[s];
      }
    }
  }

  // Plate terms.
  for (int pl = 0; pl < surface.num_polygons(); ++pl) {
    const PlateElement& we = es.plates[pl];
    const PlatePressureElement& ppe = es.ppressures[pl];
    const SurfacePolygon& poly = surface.polygon(pl);
    std::vector<int> phig(ppe.ndof()), wg(we.ndof());
    for (int r = 0; r < ppe.ndof(); ++r) phig[r] = layout.phi(poly.vertices[r]);
    for (int l = 0; l < static_cast<int>(poly.vertices.size()); ++l)
      for (int c = 0; c < 3; ++c) wg[3 * l + c] = layout.w(poly.vertices[l], c);

    MatX C1 = local_c1(ppe, params);
    add_block(trips, MatX(-C1), phig, phig);
    MatX C2 = local_c2(we, params);
    add_block(trips, C2, wg, wg);
    MatX b2, b3;
    local_b2_b3(ppe, we, params, b2, b3);
    add_block(trips, MatX(b2 + b3), phig, wg);
    add_block(trips, MatX((b2 - b3).transpose()), wg, phig);

    if (prob.mcase) {
      auto g2 = [&](const Vec2& x) { return prob.mcase->g(surface.to3d(x)); };
      auto m2 = [&](const Vec2& x) { return prob.mcase->m(surface.to3d(x)); };
      VecX Gv, Mv;
      local_rhs_G_M(ppe, we, g2, m2, params, Gv, Mv);
      for (int r = 0; r < Gv.size(); ++r) sys.rhs[phig[r]] += Gv[r];
      for (int r = 0; r < Mv.size(); ++r) sys.rhs[wg[r]] += Mv[r];
    }
  }

  sys.K.resize(layout.total, layout.total);
  sys.K.setFromTriplets(trips.begin(), trips.end());
  sys.reduce();
  return sys;
}

void BlockSystem::reduce() {
  const DofLayout& L = *layout;
  glob_to_free.assign(L.total, -1);
  free_idx.clear();
  for (int i = 0; i < L.total; ++i)
    if (!L.constrained[i]) {
      glob_to_free[i] = static_cast<int>(free_idx.size());
      free_idx.push_back(i);
    }
  const int nf = static_cast<int>(free_idx.size());
  bf.resize(nf);
  for (int i = 0; i < nf; ++i) bf[i] = rhs[free_idx[i]];
  std::vector<Eigen::Triplet<double>> trips;
  for (int col = 0; col < K.outerSize(); ++col)
    for (SparseMat::InnerIterator it(K, col); it; ++it) {
      const int r = static_cast<int>(it.row());
      if (L.constrained[r]) continue;
      if (L.constrained[col]) {
        bf[glob_to_free[r]] -= it.value() * L.bc_value[col];
      } else {
        trips.emplace_back(glob_to_free[r], glob_to_free[col], it.value());
      }
    }
  Kff.resize(nf, nf);
  Kff.setFromTriplets(trips.begin(), trips.end());
}

VecX BlockSystem::expand(const VecX& xf) const {
  const DofLayout& L = *layout;
  VecX full(L.total);
  for (int i = 0; i < L.total; ++i)
    full[i] = L.constrained[i] ? L.bc_value[i] : xf[glob_to_free[i]];
  return full;
}

InfSupOperators build_infsup_operators(const CoupledProblem& prob,
                                       const DofLayout& layout) {
  const PolyMesh3& mesh = *prob.mesh;
  const SurfaceMesh2& surface = *prob.surface;
  const BulkSurfaceConnector& conn = *prob.connector;
  const ElementSet& es = *prob.elements;

  // Free-index maps for u and (p,phi).
  std::vector<int> umap(layout.total, -1), qmap(layout.total, -1);
  int nu = 0, nq = 0;
  for (int i = 0; i < layout.p_off; ++i)
    if (!layout.constrained[i]) umap[i] = nu++;
  for (int i = layout.p_off; i < layout.w_off; ++i)
    if (!layout.constrained[i]) qmap[i] = nq++;

  ModelParams unit;  // all ones
  std::vector<Eigen::Triplet<double>> tu, tq, tb;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const StokesCellElement& elem = es.cells[c];
    std::vector<int> ug = cell_dof_globals(mesh, elem, layout);
    // Velocity norm: mass + gradient parts with unit coefficients, no slip.
    MatX A = local_stokes_a(elem, unit);
    for (int r = 0; r < A.rows(); ++r) {
      if (umap[ug[r]] < 0) continue;
      for (int s = 0; s < A.cols(); ++s)
        if (umap[ug[s]] >= 0 && A(r, s) != 0.0)
          tu.emplace_back(umap[ug[r]], umap[ug[s]], A(r, s));
    }
    MatX B1 = local_b1_div(elem, es.pressures[c]);
    for (int a = 0; a < 4; ++a)
      for (int s = 0; s < B1.cols(); ++s)
        if (umap[ug[s]] >= 0 && B1(a, s) != 0.0)
          tb.emplace_back(qmap[layout.p(c, a)], umap[ug[s]], B1(a, s));
    const MatX& Hp = es.pressures[c].mass;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        tq.emplace_back(qmap[layout.p(c, a)], qmap[layout.p(c, b)], Hp(a, b));
  }
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (mesh.face(f).tag != FaceTag::Sigma) continue;
    const StokesFaceElement& fe = es.faces[f];
    const int poly = conn.face_to_polygon[f];
    const PlatePressureElement& ppe = es.ppressures[poly];
    std::vector<int> tg = face_trace_globals(mesh, f, layout);
    MatX Bs = local_b1_sigma(fe, ppe, surface, surface.normal());
    for (int r = 0; r < Bs.rows(); ++r) {
      const int gr = layout.phi(surface.polygon(poly).vertices[r]);
      if (qmap[gr] < 0) continue;
      for (int s = 0; s < Bs.cols(); ++s)
        if (umap[tg[s]] >= 0 && Bs(r, s) != 0.0)
          tb.emplace_back(qmap[gr], umap[tg[s]], Bs(r, s));
    }
  }
  for (int pl = 0; pl < surface.num_polygons(); ++pl) {
    const PlatePressureElement& ppe = es.ppressures[pl];
    MatX C1 = local_c1(ppe, unit);
    const SurfacePolygon& poly = surface.polygon(pl);
    for (int r = 0; r < C1.rows(); ++r) {
      const int gr = layout.phi(poly.vertices[r]);
      if (qmap[gr] < 0) continue;
      for (int s = 0; s < C1.cols(); ++s) {
        const int gs = layout.phi(poly.vertices[s]);
        if (qmap[gs] >= 0 && C1(r, s) != 0.0)
          tq.emplace_back(qmap[gr], qmap[gs], C1(r, s));
      }
    }
  }
  InfSupOperators ops;
  ops.Nu.resize(nu, nu);
  ops.Nu.setFromTriplets(tu.begin(), tu.end());
  ops.Nq.resize(nq, nq);
  ops.Nq.setFromTriplets(tq.begin(), tq.end());
  ops.B.resize(nq, nu);
  ops.B.setFromTriplets(tb.begin(), tb.end());
  return ops;
}

} // namespace biotvem
