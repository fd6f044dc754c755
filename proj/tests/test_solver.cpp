#include <doctest.h>

#include <cmath>
#include <memory>

#include "biotvem/solver.hpp"

using namespace biotvem;

namespace {

struct Problem {
  PolyMesh3 mesh;
  SurfaceExtraction ext;
  ElementSet es;
  ManufacturedCase mc;
  DofLayout layout;
  CoupledProblem prob;
  BlockSystem sys;

  explicit Problem(int n)
      : mesh([n] {
          PolyMesh3 m = generate_cube_mesh(n);
          tag_boundaries(m, benchmark_boundary_rule());
          return m;
        }()),
        ext(extract_surface(mesh)),
        es(build_elements(mesh, ext.surface)),
        mc(benchmark_case(ModelParams{})),
        layout(build_layout(mesh, ext.surface, ext.connector)) {
    set_boundary_values(layout, mesh, ext.surface, ext.connector, mc);
    prob = CoupledProblem{&mesh, &ext.surface, &ext.connector, &es, mc.params, &mc};
    sys = assemble(prob, layout);
  }
};

} // namespace

TEST_CASE("monolithic solve: small residual, exact incompressibility") {
  Problem pb(2);
  SolverConfig cfg;
  SolutionFields fields = solve_monolithic(pb.sys, cfg);
  CHECK(fields.iterations == 1);
  CHECK(fields.residual < 1e-10);
  BlockResiduals br = compute_residuals(pb.sys, fields);
  CHECK(br.max() < 1e-10);
  const double divn = divergence_norm(pb.mesh, pb.es, pb.layout, fields);
  const double h1n = velocity_h1_norm(pb.mesh, pb.es, pb.layout, fields);
  CHECK(h1n > 1.0);  // the benchmark velocity has H1 norm ~1.55
  CHECK(divn <= 1e-9 * h1n);
  // per-field slices partition the DOF vector
  CHECK(fields.u.size() + fields.p.size() + fields.phi.size() + fields.w.size() ==
        fields.full.size());
}

TEST_CASE("fixed-point solve converges and matches the monolithic solution") {
  for (int n : {2, 3}) {
    Problem pb(n);
    SolverConfig mono;
    SolutionFields xm = solve_monolithic(pb.sys, mono);
    SolverConfig fp;
    fp.mode = SolverConfig::Mode::FixedPoint;
    SolutionFields xf = solve_fixed_point(pb.sys, fp);
    CHECK(xf.iterations <= 6);
    const double rel = (xf.full - xm.full).norm() / xm.full.norm();
    CHECK(rel <= 1e-7);
    // increments decrease monotonically and end below the tolerance
    REQUIRE(!xf.increment_history.empty());
    for (size_t i = 1; i < xf.increment_history.size(); ++i)
      CHECK(xf.increment_history[i] < xf.increment_history[i - 1]);
    CHECK(xf.increment_history.back() < fp.fp_tol);
    const double divn = divergence_norm(pb.mesh, pb.es, pb.layout, xf);
    CHECK(divn <= 1e-9 * velocity_h1_norm(pb.mesh, pb.es, pb.layout, xf));
  }
}

TEST_CASE("fixed-point handles an empty plate sub-system") {
  // at n=1 every surface vertex is clamped, so the plate block has no free DOFs
  Problem pb(1);
  SolverConfig fp;
  fp.mode = SolverConfig::Mode::FixedPoint;
  SolutionFields xf = solve_fixed_point(pb.sys, fp);
  SolverConfig mono;
  SolutionFields xm = solve_monolithic(pb.sys, mono);
  CHECK((xf.full - xm.full).norm() <= 1e-7 * xm.full.norm());
}

TEST_CASE("fixed-point iteration reports non-convergence with history") {
  Problem pb(2);
  SolverConfig fp;
  fp.mode = SolverConfig::Mode::FixedPoint;
  fp.max_iterations = 2;
  try {
    solve_fixed_point(pb.sys, fp);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Solver);
  }
}

TEST_CASE("determinism: repeated solves are bitwise identical") {
  Problem pa(2), pb(2);
  SolverConfig fp;
  fp.mode = SolverConfig::Mode::FixedPoint;
  SolutionFields xa = solve_fixed_point(pa.sys, fp);
  SolutionFields xb = solve_fixed_point(pb.sys, fp);
  CHECK(xa.iterations == xb.iterations);
  CHECK((xa.full.array() == xb.full.array()).all());
}

TEST_CASE("solve dispatches on the configured mode") {
  Problem pb(2);
  SolverConfig cfg;
  cfg.mode = SolverConfig::Mode::FixedPoint;
  SolutionFields x = solve(pb.sys, cfg);
  CHECK(x.iterations > 1);
}
