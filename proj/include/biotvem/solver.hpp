#pragma once

#include <vector>

#include "biotvem/assembly.hpp"

namespace biotvem {

struct SolverConfig {
  enum class Mode { Monolithic, FixedPoint };
  Mode mode = Mode::Monolithic;
  double fp_tol = 1e-10;    // ell2 norm of the concatenated DOF increment
  int max_iterations = 50;
  double lin_rtol = 1e-12;  // linear relative residual target
};

struct SolutionFields {
  VecX full;  // all DOFs, constrained entries carry their prescribed values
  int iterations = 0;              // fixed-point count (1 for monolithic)
  double residual = 0.0;           // relative residual of the reduced system
  std::vector<double> increment_history;

  VecX u, p, phi, w;  // per-field slices
  void slice(const DofLayout& layout);
};

SolutionFields solve_monolithic(BlockSystem& system, const SolverConfig& cfg);
SolutionFields solve_fixed_point(BlockSystem& system, const SolverConfig& cfg);
SolutionFields solve(BlockSystem& system, const SolverConfig& cfg);

struct BlockResiduals {
  double u = 0.0, p = 0.0, phi = 0.0, w = 0.0;
  double max() const;
};

// Relative residuals of the reduced system grouped by field row.
BlockResiduals compute_residuals(const BlockSystem& system, const SolutionFields& fields);

// L2 norm of div(u_h) from the per-cell divergence representations.
double divergence_norm(const PolyMesh3& mesh, const ElementSet& elements,
                       const DofLayout& layout, const SolutionFields& fields);

// Discrete H1 norm proxy of u_h via its elementwise H1 projection.
double velocity_h1_norm(const PolyMesh3& mesh, const ElementSet& elements,
                        const DofLayout& layout, const SolutionFields& fields);

// Local u-DOF vector of a cell gathered from the global solution.
VecX gather_cell_dofs(const PolyMesh3& mesh, const StokesCellElement& elem,
                      const DofLayout& layout, const VecX& full);

} // namespace biotvem
