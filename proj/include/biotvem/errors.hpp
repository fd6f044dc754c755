#pragma once

#include <vector>

#include "biotvem/assembly.hpp"
#include "biotvem/solver.hpp"

namespace biotvem {

// Computable errors: each field compared against the elementwise polynomial
// projection of the discrete solution, in the full Sobolev norm of its space
// (u: H1, p: L2, phi: H1, w: H2). abs_* are the plain norms, norm_* the same
// norms of the exact field, and e_* = abs_* / norm_* the relative errors the
// convergence table reports. e_total combines the four relative errors in the
// Euclidean sense.
struct ErrorReport {
  double h_bulk = 0.0, h_plate = 0.0;
  double abs_u = 0.0, abs_p = 0.0, abs_phi = 0.0, abs_w = 0.0;
  double norm_u = 0.0, norm_p = 0.0, norm_phi = 0.0, norm_w = 0.0;
  double e_u = 0.0, e_p = 0.0, e_phi = 0.0, e_w = 0.0, e_total = 0.0;
  int iterations = 0;
};

ErrorReport compute_errors(const CoupledProblem& prob, const DofLayout& layout,
                           const SolutionFields& fields);

struct EOCRow {
  ErrorReport report;
  // Rates versus the previous row; NaN in the first row. Bulk fields use
  // h_bulk, plate fields h_plate, the total uses h_bulk.
  double r_total, r_u, r_p, r_w, r_phi;
};

using EOCTable = std::vector<EOCRow>;

EOCTable eoc(const std::vector<ErrorReport>& reports);

std::string format_eoc_table(const EOCTable& table);
std::string eoc_csv(const EOCTable& table);

} // namespace biotvem
