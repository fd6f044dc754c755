#pragma once

#include <string>
#include <vector>

#include "biotvem/errors.hpp"
#include "biotvem/model.hpp"
#include "biotvem/solver.hpp"

namespace biotvem {

// Flat key-value study configuration. Recognized keys:
//   mesh.family  = cube | file
//   mesh.levels  = comma-separated n values (cube) or mesh file paths (file)
//   params.<name>  model coefficients (rho_f, mu, gamma, rho_p, D, alpha,
//                  c0, kappa, tau)
//   solver.mode  = monolithic | fixed_point
//   solver.tol   fixed-point tolerance
//   output.dir   artifact directory ("" = no file output)
struct StudyConfig {
  std::string mesh_family = "cube";
  std::vector<std::string> levels;
  ModelParams params;
  SolverConfig solver;
  std::string output_dir;

  static StudyConfig parse_file(const std::string& path);
  static StudyConfig parse(std::istream& in);
};

struct LevelResult {
  ErrorReport report;
  double div_norm = 0.0;
  double u_h1_norm = 0.0;
};

struct StudyResult {
  std::vector<LevelResult> levels;
  EOCTable table;
};

// Runs the manufactured benchmark over the configured refinements; writes
// eoc.csv and fields_<j>.vem into output.dir when set.
StudyResult run_study(const StudyConfig& config);

} // namespace biotvem
