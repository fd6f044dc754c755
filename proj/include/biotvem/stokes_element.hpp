#pragma once

#include <vector>

#include "biotvem/mesh.hpp"
#include "biotvem/monomial.hpp"
#include "biotvem/quadrature.hpp"
#include "biotvem/types.hpp"

namespace biotvem {

struct ModelParams;  // defined in model.hpp

// Scalar trace element on a bulk face: one velocity component of the enhanced
// face space at k=2. DOFs (N = 2*nv + 1): vertex values (loop order), edge
// midpoint values (edge j joins loop vertices j, j+1), face mean (1/|F|)int v.
// Edge traces are the quadratic interpolants of the three edge values.
class StokesFaceElement {
public:
  StokesFaceElement(const PolyMesh3& mesh, int face_id, int exactness = 6);

  int face_id() const { return face_id_; }
  int nv() const { return nv_; }
  int ndof() const { return 2 * nv_ + 1; }
  double h() const { return h_; }
  double area() const { return area_; }
  const Vec3& normal() const { return normal_; }  // outward for first owner

  // Local frame: x3d = xF + t1*xi + t2*eta; t1 x t2 = normal.
  Vec2 to_local(const Vec3& x) const;
  Vec3 to_global(const Vec2& x) const;

  const MonomialBasis& monomials() const { return mono3_; }  // 2D, degree 3
  // H1-seminorm projection onto P2, boundary-mean normalized: 6 x N.
  const MatX& pi_nabla() const { return pinab_; }
  // L2 projections (from the enhancement): 10 x N and 6 x N.
  const MatX& pi0_deg3() const { return pi0_3_; }
  const MatX& pi0_deg2() const { return pi0_2_; }

  // Face quadrature (points in the local 2D frame) and values of the degree-3
  // L2 projection of each DOF column at its points: nq x N.
  const QuadRule& quad() const { return quad_; }
  const MatX& projected_values() const { return proj_vals_; }

  // DOF functionals applied to the local face monomials (degree <= 3): N x 10.
  const MatX& dof_of_monomials() const { return dof_mono_; }

private:
  int face_id_;
  int nv_;
  double h_, area_;
  Vec3 xF_, normal_, t1_, t2_;
  MonomialBasis mono3_;
  MatX pinab_, pi0_3_, pi0_2_, dof_mono_, proj_vals_;
  QuadRule quad_;
};

// Velocity element on a polyhedral cell at k=2. Scalar DOF slots per
// component: cell vertices (ascending global id), cell edges, cell faces
// (component means). Local DOF index for component i at scalar slot s is
// 3*s + i; the last 3 DOFs are divergence moments (h_K/|K|) int div(v) m_d
// against the non-constant members of the degree-1 cell monomials.
class StokesCellElement {
public:
  StokesCellElement(const PolyMesh3& mesh, int cell_id,
                    const std::vector<StokesFaceElement>& face_elements,
                    int exactness = 6);

  int cell_id() const { return cell_id_; }
  int num_scalar_slots() const { return ns_; }
  int ndof() const { return 3 * ns_ + 3; }
  double h() const { return h_; }
  double volume() const { return volume_; }
  const Vec3& centroid() const { return xK_; }

  const MonomialBasis& monomials() const { return mono3_; }  // 3D, degree 3

  // Coefficients over the degree-2 vector monomials (component-major,
  // index i*10 + a): 30 x N.
  const MatX& pi_nabla() const { return pinab_coef_; }
  const MatX& pi0() const { return pi0_coef_; }
  // Divergence representation div(v) over degree-1 monomials: 4 x N.
  const MatX& divergence() const { return div_coef_; }
  // L2 projection of each gradient entry d(v_i)/dx_j onto P1:
  // row block (i*3 + j)*4 + d, 36 x N.
  const MatX& grad_proj() const { return grad_coef_; }

  // DOF matrices of the projections: N x N.
  const MatX& pi_nabla_dof() const { return pinab_dof_; }
  const MatX& pi0_dof() const { return pi0_dof_; }
  // DOF functionals of the degree-2 vector monomials: N x 30.
  const MatX& dof_of_monomials() const { return dof_mono_; }

  const QuadRule& quad() const { return quad_; }
  // Mass and stiffness Gram matrices of the degree-2 cell monomials.
  const MatX& mass2() const { return H2_; }    // 10 x 10
  const MatX& stiff2() const { return G2_; }   // 10 x 10, int grad m . grad m'

  // Maps a face-local scalar DOF of face_elements[local_face] to the cell
  // scalar slot index.
  const std::vector<std::vector<int>>& face_slot_maps() const { return face_slots_; }
  const std::vector<int>& face_element_ids() const { return face_elem_ids_; }
  int face_sign(int local_face) const { return face_signs_[local_face]; }

  // Evaluate the pi_nabla / pi0 polynomials of a local DOF solution.
  Vec3 eval_pi_nabla(const VecX& local_dofs, const Vec3& x) const;
  Mat3 eval_pi_nabla_grad(const VecX& local_dofs, const Vec3& x) const;

private:
  int cell_id_;
  int ns_;
  double h_, volume_;
  Vec3 xK_;
  MonomialBasis mono3_;
  MatX pinab_coef_, pi0_coef_, div_coef_, grad_coef_;
  MatX pinab_dof_, pi0_dof_, dof_mono_;
  MatX H2_, G2_, H1_;
  QuadRule quad_;
  std::vector<std::vector<int>> face_slots_;
  std::vector<int> face_elem_ids_;
  std::vector<int> face_signs_;
};

// Pressure element: coefficients over the degree-1 cell monomials (4 DOFs).
struct PressureElement {
  int cell_id = -1;
  MonomialBasis mono1;  // 3D, degree 1
  MatX mass;            // 4 x 4
};

PressureElement build_pressure_element(const PolyMesh3& mesh, int cell_id,
                                       int exactness = 6);

// Local bilinear forms of the bulk problem.
MatX local_stokes_a(const StokesCellElement& elem, const ModelParams& params);
// Rows: pressure DOFs (4), columns: velocity DOFs. Entry = -int_K m_c div(v).
MatX local_b1_div(const StokesCellElement& elem, const PressureElement& pelem);
VecX local_rhs_F(const StokesCellElement& elem,
                 const std::function<Vec3(const Vec3&)>& f);
// The two stabilizers of a_h, already carrying their physical prefactors.
void stabilization_matrices(const StokesCellElement& elem, const ModelParams& params,
                            MatX& s1_0, MatX& s1_nabla);

} // namespace biotvem
