#pragma once

#include <Eigen/Sparse>
#include <memory>
#include <vector>

#include "biotvem/mesh.hpp"
#include "biotvem/model.hpp"
#include "biotvem/plate_element.hpp"
#include "biotvem/stokes_element.hpp"
#include "biotvem/surface.hpp"

namespace biotvem {

using SparseMat = Eigen::SparseMatrix<double>;

// Global DOF numbering. Ordering: u (vertex-major triples, then edge triples,
// then face-mean triples, then per-cell divergence moments), p (4 monomial
// coefficients per cell), phi (surface vertices), w (surface vertex triples).
struct DofLayout {
  int n_vertex = 0, n_edge = 0, n_face = 0, n_cell = 0, n_svertex = 0;
  int u_edge_off = 0, u_face_off = 0, u_div_off = 0;
  int p_off = 0, phi_off = 0, w_off = 0, total = 0;

  int u_vertex(int v, int i) const { return 3 * v + i; }
  int u_edge(int e, int i) const { return u_edge_off + 3 * e + i; }
  int u_face(int f, int i) const { return u_face_off + 3 * f + i; }
  int u_div(int c, int d) const { return u_div_off + 3 * c + d; }
  int p(int c, int a) const { return p_off + 4 * c + a; }
  int phi(int sv) const { return phi_off + sv; }
  int w(int sv, int comp) const { return w_off + 3 * sv + comp; }

  // 0 = u, 1 = p, 2 = phi, 3 = w
  int field_of(int idx) const {
    if (idx < p_off) return 0;
    if (idx < phi_off) return 1;
    if (idx < w_off) return 2;
    return 3;
  }

  std::vector<char> constrained;
  std::vector<double> bc_value;
};

DofLayout build_layout(const PolyMesh3& mesh, const SurfaceMesh2& surface,
                       const BulkSurfaceConnector& connector);

// Fills layout.bc_value at constrained DOFs with the interpolated exact data.
void set_boundary_values(DofLayout& layout, const PolyMesh3& mesh,
                         const SurfaceMesh2& surface,
                         const BulkSurfaceConnector& connector,
                         const ManufacturedCase& mcase);

// All local elements of a discretization.
struct ElementSet {
  std::vector<StokesFaceElement> faces;        // per mesh face
  std::vector<StokesCellElement> cells;        // per mesh cell
  std::vector<PressureElement> pressures;      // per mesh cell
  std::vector<PlateElement> plates;            // per surface polygon
  std::vector<PlatePressureElement> ppressures;  // per surface polygon
};

ElementSet build_elements(const PolyMesh3& mesh, const SurfaceMesh2& surface,
                          int exactness = 6);

// Interface slip form on a Sigma face over the velocity trace DOFs
// (component-interleaved: DOF 3s + i for scalar slot s, component i):
// gamma int_F (Pi u x n).(Pi v x n).
MatX local_a_sigma(const StokesFaceElement& felem, double gamma, const Vec3& n_sigma);

// Interface pairing int_F Pi psi (Pi v . n): rows = plate-pressure DOFs of the
// matched polygon, columns = face velocity trace DOFs.
MatX local_b1_sigma(const StokesFaceElement& felem, const PlatePressureElement& pelem,
                    const SurfaceMesh2& surface, const Vec3& n_sigma);

// Global u-DOF indices of a face's velocity trace DOFs, matching the local
// ordering of local_a_sigma / local_b1_sigma columns.
std::vector<int> face_trace_globals(const PolyMesh3& mesh, int face_id,
                                    const DofLayout& layout);

// Global u-DOF indices of a cell's velocity DOFs in element-local order.
std::vector<int> cell_dof_globals(const PolyMesh3& mesh, const StokesCellElement& elem,
                                  const DofLayout& layout);

struct CoupledProblem {
  const PolyMesh3* mesh = nullptr;
  const SurfaceMesh2* surface = nullptr;
  const BulkSurfaceConnector* connector = nullptr;
  const ElementSet* elements = nullptr;
  ModelParams params;
  const ManufacturedCase* mcase = nullptr;  // null = zero data, zero BCs
};

struct BlockSystem {
  const DofLayout* layout = nullptr;
  SparseMat K;  // full size, raw (constraints not yet eliminated)
  VecX rhs;

  // Reduced system over free DOFs, symmetric elimination.
  std::vector<int> free_idx;
  std::vector<int> glob_to_free;  // -1 where constrained
  SparseMat Kff;
  VecX bf;

  void reduce();
  VecX expand(const VecX& xf) const;
};

BlockSystem assemble(const CoupledProblem& prob, const DofLayout& layout);

// Norm matrices of the discrete inf-sup proxy: the velocity norm is the a_h
// assembly with unit mass/viscosity and no slip term; the (p,phi) norm is the
// exact pressure mass plus the c1 assembly with unit coefficients. B is the
// coupling block over free (p,phi) rows x free u columns.
struct InfSupOperators {
  SparseMat Nu;    // free u x free u
  SparseMat Nq;    // free (p,phi) x free (p,phi)
  SparseMat B;     // free (p,phi) x free u
};

InfSupOperators build_infsup_operators(const CoupledProblem& prob,
                                       const DofLayout& layout);

} // namespace biotvem
