#include "biotvem/stokes_element.hpp"

#include <Eigen/LU>
#include <cmath>

#include "biotvem/model.hpp"

namespace biotvem {

namespace {

// Quadratic Lagrange basis on [0,1] at nodes {0, 1, 1/2}.
inline void lagrange3(double t, double& l0, double& l1, double& lm) {
  l0 = 2.0 * (t - 0.5) * (t - 1.0);
  l1 = 2.0 * t * (t - 0.5);
  lm = 4.0 * t * (1.0 - t);
}

} // namespace

StokesFaceElement::StokesFaceElement(const PolyMesh3& mesh, int face_id, int exactness)
    : face_id_(face_id) {
  const MeshFace& face = mesh.face(face_id);
  nv_ = static_cast<int>(face.vertices.size());
  h_ = face.diameter;
  area_ = face.area;
  xF_ = face.barycenter;
  normal_ = face.normal;
  t1_ = (mesh.vertex(face.vertices[0]) - xF_).normalized();
  t2_ = normal_.cross(t1_);

  mono3_ = MonomialBasis(2, 3, Vec2::Zero(), h_);
  const int nm3 = 10, nm2 = 6;
  const int N = ndof();

  MatX loop(nv_, 2);
  for (int j = 0; j < nv_; ++j) loop.row(j) = to_local(mesh.vertex(face.vertices[j])).transpose();
  quad_ = quad_polygon(loop, exactness);

  // DOF functionals of the local monomials.
  dof_mono_.resize(N, nm3);
  for (int a = 0; a < nm3; ++a) {
    for (int j = 0; j < nv_; ++j) {
      dof_mono_(j, a) = mono3_.value(a, loop.row(j).transpose());
      Vec2 mid = 0.5 * (loop.row(j) + loop.row((j + 1) % nv_)).transpose();
      dof_mono_(nv_ + j, a) = mono3_.value(a, mid);
    }
    double mean = 0.0;
    for (int q = 0; q < quad_.size(); ++q)
      mean += quad_.weights[q] * mono3_.value(a, quad_.points.row(q).transpose());
    dof_mono_(2 * nv_, a) = mean / area_;
  }

  // Edge rules and the boundary trace of each DOF column at the edge points.
  VecX gl_t, gl_w;
  gauss_legendre_01(4, gl_t, gl_w);  // exact to degree 7 on each edge
  const int nge = static_cast<int>(gl_t.size());

  // Boundary functionals: integral over the boundary of (trace x given
  // polynomial values). trace_rows[j] is nge x N for edge j.
  std::vector<MatX> trace_rows(nv_, MatX::Zero(nge, N));
  std::vector<VecX> edge_w(nv_);
  std::vector<MatX> edge_pts(nv_);
  for (int j = 0; j < nv_; ++j) {
    Vec2 a = loop.row(j).transpose(), b = loop.row((j + 1) % nv_).transpose();
    double len = (b - a).norm();
    edge_w[j] = gl_w * len;
    edge_pts[j].resize(nge, 2);
    for (int q = 0; q < nge; ++q) {
      edge_pts[j].row(q) = (a + gl_t[q] * (b - a)).transpose();
      double l0, l1, lm;
      lagrange3(gl_t[q], l0, l1, lm);
      trace_rows[j](q, j) = l0;
      trace_rows[j](q, (j + 1) % nv_) = l1;
      trace_rows[j](q, nv_ + j) = lm;
    }
  }

  // H1 projection onto P2: stiffness rows + boundary-mean normalization.
  MatX G = MatX::Zero(nm2, nm2);
  for (int q = 0; q < quad_.size(); ++q) {
    MatX grads(nm2, 2);
    for (int a = 0; a < nm2; ++a) grads.row(a) = mono3_.grad(a, quad_.points.row(q).transpose()).transpose();
    G += quad_.weights[q] * grads * grads.transpose();
  }
  MatX B = MatX::Zero(nm2, N);
  for (int a = 1; a < nm2; ++a) {
    double lap = mono3_.laplacian(a, Vec2::Zero());  // constant for degree <= 2
    B.row(a) -= lap * area_ * Eigen::RowVectorXd::Unit(N, 2 * nv_);
    for (int j = 0; j < nv_; ++j) {
      Vec2 a2 = loop.row(j).transpose(), b2 = loop.row((j + 1) % nv_).transpose();
      Vec2 tang = (b2 - a2).normalized();
      Vec2 nrm(tang[1], -tang[0]);  // outward for counterclockwise loops
      for (int q = 0; q < nge; ++q) {
        double dn = mono3_.grad(a, edge_pts[j].row(q).transpose()).dot(nrm);
        B.row(a) += edge_w[j][q] * dn * trace_rows[j].row(q);
      }
    }
  }
  // Normalization row.
  for (int a = 0; a < nm2; ++a) {
    double s = 0.0;
    for (int j = 0; j < nv_; ++j)
      for (int q = 0; q < nge; ++q)
        s += edge_w[j][q] * mono3_.value(a, edge_pts[j].row(q).transpose());
    G(0, a) = s;
  }
  for (int j = 0; j < nv_; ++j)
    for (int q = 0; q < nge; ++q) B.row(0) += edge_w[j][q] * trace_rows[j].row(q);
  pinab_ = G.partialPivLu().solve(B);

  // Enhanced L2 projections: the constant moment is a DOF, higher moments
  // come from the H1 projection.
  MatX Hfull = MatX::Zero(nm3, nm3);
  for (int q = 0; q < quad_.size(); ++q) {
    VecX vals = mono3_.values(quad_.points.row(q).transpose());
    Hfull += quad_.weights[q] * vals * vals.transpose();
  }
  MatX moments = MatX::Zero(nm3, N);
  moments.row(0) = area_ * Eigen::RowVectorXd::Unit(N, 2 * nv_);
  moments.bottomRows(nm3 - 1) = Hfull.bottomLeftCorner(nm3 - 1, nm2) * pinab_;
  pi0_3_ = Hfull.partialPivLu().solve(moments);
  pi0_2_ = Hfull.topLeftCorner(nm2, nm2).ldlt().solve(moments.topRows(nm2));

  proj_vals_.resize(quad_.size(), N);
  for (int q = 0; q < quad_.size(); ++q)
    proj_vals_.row(q) = mono3_.values(quad_.points.row(q).transpose()).transpose() * pi0_3_;
}

Vec2 StokesFaceElement::to_local(const Vec3& x) const {
  Vec3 d = x - xF_;
  return Vec2(t1_.dot(d), t2_.dot(d));
}

Vec3 StokesFaceElement::to_global(const Vec2& x) const {
  return xF_ + t1_ * x[0] + t2_ * x[1];
}

StokesCellElement::StokesCellElement(const PolyMesh3& mesh, int cell_id,
                                     const std::vector<StokesFaceElement>& face_elements,
                                     int exactness)
    : cell_id_(cell_id) {
  const MeshCell& cell = mesh.cell(cell_id);
  h_ = cell.diameter;
  volume_ = cell.volume;
  xK_ = cell.barycenter;
  mono3_ = MonomialBasis(3, 3, xK_, h_);
  const int nm3 = 20, nm2 = 10, nm1 = 4;

  const int nvK = static_cast<int>(cell.vertices.size());
  const int neK = static_cast<int>(cell.edges.size());
  const int nfK = static_cast<int>(cell.faces.size());
  ns_ = nvK + neK + nfK;
  const int N = ndof();

  auto vslot = [&](int gv) {
    auto it = std::lower_bound(cell.vertices.begin(), cell.vertices.end(), gv);
    return static_cast<int>(it - cell.vertices.begin());
  };
  auto eslot = [&](int ge) {
    auto it = std::lower_bound(cell.edges.begin(), cell.edges.end(), ge);
    return nvK + static_cast<int>(it - cell.edges.begin());
  };

  // Face machinery.
  face_slots_.resize(nfK);
  face_elem_ids_.resize(nfK);
  face_signs_ = cell.face_signs;
  std::vector<MatX> loops;
  std::vector<MatX> face_pts3;  // nq x 3 per face
  for (int jf = 0; jf < nfK; ++jf) {
    const int fid = cell.faces[jf];
    const MeshFace& face = mesh.face(fid);
    face_elem_ids_[jf] = fid;
    const StokesFaceElement& fe = face_elements[fid];
    const int nfv = fe.nv();
    auto& slots = face_slots_[jf];
    slots.resize(2 * nfv + 1);
    for (int j = 0; j < nfv; ++j) {
      slots[j] = vslot(face.vertices[j]);
      slots[nfv + j] = eslot(face.edges[j]);
    }
    slots[2 * nfv] = nvK + neK + jf;
    loops.push_back(mesh.face_loop_coords(fid, cell_id));
    MatX p3(fe.quad().size(), 3);
    for (int q = 0; q < fe.quad().size(); ++q)
      p3.row(q) = fe.to_global(fe.quad().points.row(q).transpose()).transpose();
    face_pts3.push_back(std::move(p3));
  }
  quad_ = quad_polyhedron(loops, exactness);

  // Gram matrices of the cell monomials.
  MatX Hfull = MatX::Zero(nm3, nm3);
  G2_ = MatX::Zero(nm2, nm2);
  for (int q = 0; q < quad_.size(); ++q) {
    Vec3 x = quad_.points.row(q).transpose();
    VecX vals = mono3_.values(x);
    Hfull += quad_.weights[q] * vals * vals.transpose();
    MatX grads(nm2, 3);
    for (int a = 0; a < nm2; ++a) grads.row(a) = mono3_.grad(a, x).transpose();
    G2_ += quad_.weights[q] * grads * grads.transpose();
  }
  H2_ = Hfull.topLeftCorner(nm2, nm2);
  H1_ = Hfull.topLeftCorner(nm1, nm1);

  // Boundary moment helper: rows[target] += coeff * sum_q w_q qfun(x_q) *
  // (projected trace of v_i) over cell DOF columns of component i.
  auto add_face_term = [&](MatX& target, int row, int jf, int comp,
                           const std::function<double(const Vec3&)>& qfun, double coeff) {
    const StokesFaceElement& fe = face_elements[face_elem_ids_[jf]];
    const auto& slots = face_slots_[jf];
    for (int q = 0; q < fe.quad().size(); ++q) {
      const double wq = coeff * fe.quad().weights[q] * qfun(face_pts3[jf].row(q).transpose());
      if (wq == 0.0) continue;
      for (int s = 0; s < fe.ndof(); ++s)
        target(row, 3 * slots[s] + comp) += wq * fe.projected_values()(q, s);
    }
  };

  // Divergence representation: the constant moment is the boundary flux, the
  // linear moments are DOFs scaled by |K|/h_K.
  MatX div_mom = MatX::Zero(nm1, N);
  for (int jf = 0; jf < nfK; ++jf) {
    const StokesFaceElement& fe = face_elements[face_elem_ids_[jf]];
    Vec3 n = face_signs_[jf] * fe.normal();
    for (int i = 0; i < 3; ++i)
      add_face_term(div_mom, 0, jf, i, [](const Vec3&) { return 1.0; }, n[i]);
  }
  for (int d = 1; d < nm1; ++d)
    div_mom(d, 3 * ns_ + d - 1) = volume_ / h_;
  div_coef_ = H1_.partialPivLu().solve(div_mom);

  // Cell integral of each component via integration by parts with the linear
  // monomials: int_K v_i = h_K (int_dK (v.n) m_{1+i} - int_K div(v) m_{1+i}).
  MatX cellint = MatX::Zero(3, N);
  for (int i = 0; i < 3; ++i) {
    for (int jf = 0; jf < nfK; ++jf) {
      const StokesFaceElement& fe = face_elements[face_elem_ids_[jf]];
      Vec3 n = face_signs_[jf] * fe.normal();
      for (int c = 0; c < 3; ++c)
        add_face_term(cellint, i, jf, c,
                      [&](const Vec3& x) { return mono3_.value(1 + i, x); }, h_ * n[c]);
    }
    cellint.row(i) -= h_ * (volume_ / h_) * Eigen::RowVectorXd::Unit(N, 3 * ns_ + i);
  }

  // Componentwise H1 projection onto P2.
  MatX Gt = G2_;
  MatX bnd_mono = MatX::Zero(1, nm2);  // int_dK m_a
  for (int jf = 0; jf < nfK; ++jf) {
    const StokesFaceElement& fe = face_elements[face_elem_ids_[jf]];
    for (int q = 0; q < fe.quad().size(); ++q)
      for (int a = 0; a < nm2; ++a)
        bnd_mono(0, a) += fe.quad().weights[q] * mono3_.value(a, face_pts3[jf].row(q).transpose());
  }
  Gt.row(0) = bnd_mono;
  Eigen::PartialPivLU<MatX> Gt_lu(Gt);
  pinab_coef_.resize(3 * nm2, N);
  for (int i = 0; i < 3; ++i) {
    MatX B = MatX::Zero(nm2, N);
    for (int a = 1; a < nm2; ++a) {
      B.row(a) -= mono3_.laplacian(a, xK_) * cellint.row(i);
      for (int jf = 0; jf < nfK; ++jf) {
        const StokesFaceElement& fe = face_elements[face_elem_ids_[jf]];
        Vec3 n = face_signs_[jf] * fe.normal();
        add_face_term(B, a, jf, i,
                      [&](const Vec3& x) { return mono3_.grad(a, x).dot(n); }, 1.0);
      }
    }
    // Boundary-mean normalization: the face-mean DOFs give int_dK v_i.
    for (int jf = 0; jf < nfK; ++jf) {
      const StokesFaceElement& fe = face_elements[face_elem_ids_[jf]];
      B(0, 3 * face_slots_[jf].back() + i) += fe.area();
    }
    pinab_coef_.middleRows(i * nm2, nm2) = Gt_lu.solve(B);
  }

  // Gradient projector onto P1, entry (i,j).
  grad_coef_.resize(36, N);
  Eigen::LDLT<MatX> H1_ldlt(H1_);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      MatX mom = MatX::Zero(nm1, N);
      for (int d = 0; d < nm1; ++d) {
        if (d == 1 + j) mom.row(d) -= cellint.row(i) / h_;  // d m_d / dx_j = 1/h
        for (int jf = 0; jf < nfK; ++jf) {
          const StokesFaceElement& fe = face_elements[face_elem_ids_[jf]];
          Vec3 n = face_signs_[jf] * fe.normal();
          add_face_term(mom, d, jf, i,
                        [&](const Vec3& x) { return mono3_.value(d, x); }, n[j]);
        }
      }
      grad_coef_.middleRows((i * 3 + j) * nm1, nm1) = H1_ldlt.solve(mom);
    }

  // L2 projection onto vector P2 through the gradient/complement splitting.
  ComplementBasis gperp(3, 2);
  const int ng = gperp.size();  // 11
  MatX mixed = MatX::Zero(nm3 - 1 + ng, N);
  MatX mass14(nm1, nm3);
  mass14 = Hfull.topRows(nm1);
  for (int b = 1; b < nm3; ++b) {
    mixed.row(b - 1) -= mass14.col(b).transpose() * div_coef_;
    for (int jf = 0; jf < nfK; ++jf) {
      const StokesFaceElement& fe = face_elements[face_elem_ids_[jf]];
      Vec3 n = face_signs_[jf] * fe.normal();
      for (int i = 0; i < 3; ++i)
        add_face_term(mixed, b - 1, jf, i,
                      [&](const Vec3& x) { return mono3_.value(b, x); }, n[i]);
    }
  }
  // Complement moments from the enhancement: int_K v.g = int_K (Pi_nabla v).g.
  MatX vm_vals(quad_.size(), nm2);
  for (int q = 0; q < quad_.size(); ++q)
    vm_vals.row(q) = mono3_.values(quad_.points.row(q).transpose()).head(nm2).transpose();
  for (int jg = 0; jg < ng; ++jg) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(N);
    for (int i = 0; i < 3; ++i) {
      VecX gvals = vm_vals * gperp.coefficients().col(jg).segment(i * nm2, nm2);
      row += (gvals.cwiseProduct(quad_.weights)).transpose() *
             (vm_vals * pinab_coef_.middleRows(i * nm2, nm2));
    }
    mixed.row(nm3 - 1 + jg) = row;
  }
  MatX C(3 * nm2, nm3 - 1 + ng);
  for (int b = 1; b < nm3; ++b)
    for (int i = 0; i < 3; ++i)
      C.block(i * nm2, b - 1, nm2, 1) = mono3_.derivative_coefficients(b, i).head(nm2);
  C.rightCols(ng) = gperp.coefficients();
  Eigen::FullPivLU<MatX> C_lu(C);
  if (C_lu.rank() != 3 * nm2)
    throw Error(ErrorKind::Geometry, "cell " + std::to_string(cell_id) +
                                         ": vector polynomial splitting is rank-deficient");
  MatX vm_moments = C_lu.transpose().solve(mixed);
  Eigen::LDLT<MatX> H2_ldlt(H2_);
  pi0_coef_.resize(3 * nm2, N);
  for (int i = 0; i < 3; ++i)
    pi0_coef_.middleRows(i * nm2, nm2) = H2_ldlt.solve(vm_moments.middleRows(i * nm2, nm2));

  // DOF functionals of the vector monomials.
  dof_mono_ = MatX::Zero(N, 3 * nm2);
  for (int a = 0; a < nm2; ++a) {
    for (int i = 0; i < 3; ++i) {
      const int col = i * nm2 + a;
      for (int lv = 0; lv < nvK; ++lv)
        dof_mono_(3 * lv + i, col) = mono3_.value(a, mesh.vertex(cell.vertices[lv]));
      for (int le = 0; le < neK; ++le)
        dof_mono_(3 * (nvK + le) + i, col) = mono3_.value(a, mesh.edge(cell.edges[le]).midpoint);
      for (int jf = 0; jf < nfK; ++jf) {
        const StokesFaceElement& fe = face_elements[face_elem_ids_[jf]];
        double mean = 0.0;
        for (int q = 0; q < fe.quad().size(); ++q)
          mean += fe.quad().weights[q] * mono3_.value(a, face_pts3[jf].row(q).transpose());
        dof_mono_(3 * (nvK + neK + jf) + i, col) = mean / fe.area();
      }
      // div(m_a e_i) = d m_a / dx_i, degree <= 1.
      VecX dcoef = mono3_.derivative_coefficients(a, i).head(nm1 + 0);
      for (int d = 0; d < 3; ++d) {
        double mom = 0.0;
        for (int b = 0; b < nm1; ++b)
          if (b < dcoef.size() && dcoef[b] != 0.0) mom += dcoef[b] * Hfull(b, 1 + d);
        dof_mono_(3 * ns_ + d, col) = (h_ / volume_) * mom;
      }
    }
  }
  pinab_dof_ = dof_mono_ * pinab_coef_;
  pi0_dof_ = dof_mono_ * pi0_coef_;
}

Vec3 StokesCellElement::eval_pi_nabla(const VecX& local_dofs, const Vec3& x) const {
  VecX vals = mono3_.values(x).head(10);
  VecX coef = pinab_coef_ * local_dofs;
  Vec3 out;
  for (int i = 0; i < 3; ++i) out[i] = vals.dot(coef.segment(i * 10, 10));
  return out;
}

Mat3 StokesCellElement::eval_pi_nabla_grad(const VecX& local_dofs, const Vec3& x) const {
  MatX grads(10, 3);
  for (int a = 0; a < 10; ++a) grads.row(a) = mono3_.grad(a, x).transpose();
  VecX coef = pinab_coef_ * local_dofs;
  Mat3 J;
  for (int i = 0; i < 3; ++i)
    J.row(i) = (grads.transpose() * coef.segment(i * 10, 10)).transpose();
  return J;
}

PressureElement build_pressure_element(const PolyMesh3& mesh, int cell_id, int exactness) {
  PressureElement pe;
  pe.cell_id = cell_id;
  const MeshCell& cell = mesh.cell(cell_id);
  pe.mono1 = MonomialBasis(3, 1, cell.barycenter, cell.diameter);
  std::vector<MatX> loops;
  for (size_t jf = 0; jf < cell.faces.size(); ++jf)
    loops.push_back(mesh.face_loop_coords(cell.faces[jf], cell_id));
  QuadRule q = quad_polyhedron(loops, std::min(exactness, 2));
  pe.mass.setZero(4, 4);
  for (int i = 0; i < q.size(); ++i) {
    VecX vals = pe.mono1.values(q.points.row(i).transpose());
    pe.mass += q.weights[i] * vals * vals.transpose();
  }
  return pe;
}

MatX local_stokes_a(const StokesCellElement& elem, const ModelParams& params) {
  MatX s1_0, s1_nabla;
  stabilization_matrices(elem, params, s1_0, s1_nabla);
  const int N = elem.ndof();
  MatX A = MatX::Zero(N, N);
  const double c_mass = params.rho_f / params.tau;
  for (int i = 0; i < 3; ++i) {
    A += c_mass * elem.pi0().middleRows(i * 10, 10).transpose() * elem.mass2() *
         elem.pi0().middleRows(i * 10, 10);
    A += params.mu * elem.pi_nabla().middleRows(i * 10, 10).transpose() * elem.stiff2() *
         elem.pi_nabla().middleRows(i * 10, 10);
  }
  A += s1_0 + s1_nabla;
  return A;
}

void stabilization_matrices(const StokesCellElement& elem, const ModelParams& params,
                            MatX& s1_0, MatX& s1_nabla) {
  const int N = elem.ndof();
  MatX I = MatX::Identity(N, N);
  MatX R0 = I - elem.pi0_dof();
  s1_0 = (params.rho_f / params.tau) * std::pow(elem.h(), 3) * R0.transpose() * R0;

  MatX cons = MatX::Zero(N, N);
  for (int i = 0; i < 3; ++i)
    cons += params.mu * elem.pi_nabla().middleRows(i * 10, 10).transpose() * elem.stiff2() *
            elem.pi_nabla().middleRows(i * 10, 10);
  VecX d = cons.diagonal().cwiseMax(params.mu * elem.h());
  MatX Rn = I - elem.pi_nabla_dof();
  s1_nabla = Rn.transpose() * d.asDiagonal() * Rn;
}

MatX local_b1_div(const StokesCellElement& elem, const PressureElement& pelem) {
  // b1(v, m_c) = -int_K m_c div(v); the pressure basis shares the cell's
  // centering and scaling, so its mass matrix applies directly.
  return -pelem.mass * elem.divergence();
}

VecX local_rhs_F(const StokesCellElement& elem, const std::function<Vec3(const Vec3&)>& f) {
  VecX mom = VecX::Zero(30);
  const QuadRule& q = elem.quad();
  for (int p = 0; p < q.size(); ++p) {
    Vec3 x = q.points.row(p).transpose();
    Vec3 fv = f(x);
    VecX vals = elem.monomials().values(x).head(10);
    for (int i = 0; i < 3; ++i) mom.segment(i * 10, 10) += q.weights[p] * fv[i] * vals;
  }
  return elem.pi0().transpose() * mom;
}

} // namespace biotvem
