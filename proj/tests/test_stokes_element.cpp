#include <doctest.h>

#include <cmath>
#include <random>

#include "biotvem/assembly.hpp"
#include "biotvem/model.hpp"
#include "biotvem/stokes_element.hpp"

using namespace biotvem;

namespace {

struct Fixture {
  PolyMesh3 mesh;
  SurfaceExtraction ext;
  ElementSet es;
  Fixture(int n = 2)
      : mesh([n] {
          PolyMesh3 m = generate_cube_mesh(n);
          tag_boundaries(m, benchmark_boundary_rule());
          return m;
        }()),
        ext(extract_surface(mesh)),
        es(build_elements(mesh, ext.surface)) {}
};

} // namespace

TEST_CASE("face element projectors reproduce polynomials") {
  Fixture fx;
  for (int f : {0, 7, 20}) {
    const StokesFaceElement& fe = fx.es.faces[f];
    const MatX& D = fe.dof_of_monomials();  // N x 10 (degree <= 3)
    CHECK((fe.pi_nabla() * D.leftCols(6) - MatX::Identity(6, 6)).cwiseAbs().maxCoeff() <
          1e-12);
    // degree-3 moments are exact only for members of the space (degree <= 2)
    CHECK((fe.pi0_deg3() * D.leftCols(6) - MatX::Identity(10, 10).leftCols(6))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK((fe.pi0_deg2() * D.leftCols(6) - MatX::Identity(6, 6)).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("face quadrature points agree with the face plane") {
  Fixture fx;
  const StokesFaceElement& fe = fx.es.faces[3];
  const QuadRule& q = fe.quad();
  CHECK(std::abs(q.measure() - fe.area()) < 1e-12);
  for (int k = 0; k < q.size(); ++k) {
    const Vec3 x = fe.to_global(q.points.row(k).transpose());
    CHECK((fe.to_local(x) - Vec2(q.points.row(k).transpose())).norm() < 1e-12);
  }
}

TEST_CASE("cell projectors reproduce all vector quadratics") {
  Fixture fx;
  for (int c : {0, 5}) {
    const StokesCellElement& el = fx.es.cells[c];
    const MatX& D = el.dof_of_monomials();  // N x 30
    CHECK((el.pi_nabla() * D - MatX::Identity(30, 30)).cwiseAbs().maxCoeff() < 1e-11);
    CHECK((el.pi0() * D - MatX::Identity(30, 30)).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("divergence and gradient representations are exact on quadratics") {
  Fixture fx;
  const StokesCellElement& el = fx.es.cells[2];
  const MatX& D = el.dof_of_monomials();
  const MonomialBasis& m3 = el.monomials();
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 10; ++a) {
      // field v = m_a e_i: div v = d m_a / dx_i, grad rows likewise
      VecX dc = el.divergence() * D.col(10 * i + a);
      VecX dx = m3.derivative_coefficients(a, i).head(4);
      CHECK((dc - dx).cwiseAbs().maxCoeff() < 1e-11);
      VecX gc = el.grad_proj() * D.col(10 * i + a);
      for (int j = 0; j < 3; ++j) {
        VecX ex = m3.derivative_coefficients(a, j).head(4);
        CHECK((gc.segment((i * 3 + j) * 4, 4) - ex).cwiseAbs().maxCoeff() < 1e-11);
      }
    }
}

TEST_CASE("rigid translation: projector identity, zero gradient") {
  Fixture fx;
  const StokesCellElement& el = fx.es.cells[0];
  const MatX& D = el.dof_of_monomials();
  for (int i = 0; i < 3; ++i) {
    const VecX dofs = D.col(10 * i + 0);  // constant monomial in component i
    VecX coef = el.pi_nabla() * dofs;
    VecX expected = VecX::Zero(30);
    expected[10 * i] = 1.0;
    CHECK((coef - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((el.grad_proj() * dofs).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((el.divergence() * dofs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("unisolvence: DOFs of the quadratic probe set have full rank") {
  Fixture fx;
  const StokesCellElement& el = fx.es.cells[0];
  Eigen::ColPivHouseholderQR<MatX> qr(el.dof_of_monomials());
  CHECK(qr.rank() == 30);
  CHECK(el.ndof() == 3 * el.num_scalar_slots() + 3);
}

TEST_CASE("local a form: symmetry and consistency on random polynomial pairs") {
  Fixture fx;
  ModelParams pr;
  pr.rho_f = 1.3;
  pr.mu = 0.7;
  pr.tau = 0.5;
  std::mt19937 rng(42);
  std::normal_distribution<double> gauss;
  for (int c : {0, 6}) {
    const StokesCellElement& el = fx.es.cells[c];
    MatX A = local_stokes_a(el, pr);
    CHECK((A - A.transpose()).cwiseAbs().maxCoeff() < 1e-12 * A.cwiseAbs().maxCoeff());
    MatX exact = MatX::Zero(30, 30);
    for (int i = 0; i < 3; ++i)
      exact.block(10 * i, 10 * i, 10, 10) =
          pr.rho_f / pr.tau * el.mass2() + pr.mu * el.stiff2();
    const MatX& D = el.dof_of_monomials();
    for (int rep = 0; rep < 10; ++rep) {
      VecX x = VecX::NullaryExpr(30, [&] { return gauss(rng); });
      VecX y = VecX::NullaryExpr(30, [&] { return gauss(rng); });
      const double got = (D * x).dot(A * (D * y));
      const double ref = x.dot(exact * y);
      CHECK(std::abs(got - ref) < 1e-10 * (1.0 + std::abs(ref)));
    }
  }
}

TEST_CASE("stabilizers vanish on polynomial DOF vectors and are PSD") {
  Fixture fx;
  ModelParams pr;
  const StokesCellElement& el = fx.es.cells[1];
  MatX s0, snab;
  stabilization_matrices(el, pr, s0, snab);
  CHECK((s0 - s0.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((snab - snab.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  const MatX& D = el.dof_of_monomials();
  const double scale0 = std::max(1.0, s0.cwiseAbs().maxCoeff());
  const double scalen = std::max(1.0, snab.cwiseAbs().maxCoeff());
  CHECK((s0 * D).cwiseAbs().maxCoeff() < 1e-11 * scale0);
  CHECK((snab * D).cwiseAbs().maxCoeff() < 1e-11 * scalen);
  Eigen::SelfAdjointEigenSolver<MatX> e0(s0), en(snab);
  CHECK(e0.eigenvalues().minCoeff() > -1e-12 * scale0);
  CHECK(en.eigenvalues().minCoeff() > -1e-12 * scalen);
}

TEST_CASE("pressure coupling b1 matches direct quadrature") {
  Fixture fx;
  const StokesCellElement& el = fx.es.cells[3];
  const PressureElement& pe = fx.es.pressures[3];
  CHECK(pe.mono1.size() == 4);
  MatX B = local_b1_div(el, pe);
  const MatX& D = el.dof_of_monomials();
  // entry against a polynomial field: -int m_c d(m_a)/dx_i
  const QuadRule& q = el.quad();
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 10; ++a) {
      VecX got = B * D.col(10 * i + a);
      for (int cdx = 0; cdx < 4; ++cdx) {
        double exact = 0.0;
        for (int k = 0; k < q.size(); ++k) {
          const Vec3 x = q.points.row(k).transpose();
          exact -= q.weights[k] * pe.mono1.value(cdx, x) * el.monomials().grad(a, x)[i];
        }
        CHECK(std::abs(got[cdx] - exact) < 1e-11);
      }
    }
  // divergence-free field: v = (m_y, -m_x, 0) for the linear monomials
  // x2-in-comp-0 minus x1-in-comp-1: div = 0
  int ix = -1, iy = -1;
  for (int a = 0; a < 10; ++a) {
    if (el.monomials().exponents(a) == std::array<int, 3>{1, 0, 0}) ix = a;
    if (el.monomials().exponents(a) == std::array<int, 3>{0, 1, 0}) iy = a;
  }
  VecX dofs = D.col(0 * 10 + iy) - D.col(1 * 10 + ix);
  CHECK((B * dofs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("load functional matches exact moments for polynomial loads") {
  Fixture fx;
  const StokesCellElement& el = fx.es.cells[4];
  const MatX& D = el.dof_of_monomials();
  // f = 0
  VecX zero = local_rhs_F(el, [](const Vec3&) { return Vec3::Zero(); });
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
  // f = m_b e_j tested against v = m_a e_i: (f, Pi0 v) = delta_ij int m_a m_b
  for (int j = 0; j < 3; ++j)
    for (int b = 0; b < 4; ++b) {
      VecX F = local_rhs_F(el, [&](const Vec3& x) {
        Vec3 r = Vec3::Zero();
        r[j] = el.monomials().value(b, x);
        return r;
      });
      VecX got = D.transpose() * F;
      for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 10; ++a) {
          const double exact = (i == j) ? el.mass2()(a, b) : 0.0;
          CHECK(std::abs(got[10 * i + a] - exact) < 1e-11);
        }
    }
}
