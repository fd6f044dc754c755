#include "biotvem/plate_element.hpp"

#include <Eigen/LU>
#include <cmath>

#include "biotvem/model.hpp"

namespace biotvem {

namespace {

// Cubic Hermite basis on [0,1].
inline void hermite(double s, double& h00, double& h10, double& h01, double& h11) {
  h00 = 2 * s * s * s - 3 * s * s + 1;
  h10 = s * s * s - 2 * s * s + s;
  h01 = -2 * s * s * s + 3 * s * s;
  h11 = s * s * s - s * s;
}

inline void hermite_ds(double s, double& h00, double& h10, double& h01, double& h11) {
  h00 = 6 * s * s - 6 * s;
  h10 = 3 * s * s - 4 * s + 1;
  h01 = -6 * s * s + 6 * s;
  h11 = 3 * s * s - 2 * s;
}

} // namespace

PlateElement::PlateElement(const SurfaceMesh2& surf, int polygon_id, int exactness)
    : poly_id_(polygon_id) {
  const SurfacePolygon& poly = surf.polygon(polygon_id);
  nv_ = static_cast<int>(poly.vertices.size());
  h_ = poly.diameter;
  area_ = poly.area;
  const Vec2 xF = poly.barycenter;
  mono2_ = MonomialBasis(2, 2, xF, h_);
  const int nm = 6, N = ndof();

  MatX loop = surf.polygon_loop_coords(polygon_id);
  quad_ = quad_polygon(loop, exactness);

  std::vector<double> hz(nv_);
  for (int l = 0; l < nv_; ++l) hz[l] = surf.vertex_length(poly.vertices[l]);

  dof_mono_.resize(N, nm);
  for (int a = 0; a < nm; ++a)
    for (int l = 0; l < nv_; ++l) {
      Vec2 z = loop.row(l).transpose();
      dof_mono_(3 * l, a) = mono2_.value(a, z);
      Vec2 g = mono2_.grad(a, z);
      dof_mono_(3 * l + 1, a) = hz[l] * g[0];
      dof_mono_(3 * l + 2, a) = hz[l] * g[1];
    }

  H2_ = MatX::Zero(nm, nm);
  for (int q = 0; q < quad_.size(); ++q) {
    VecX vals = mono2_.values(quad_.points.row(q).transpose());
    H2_ += quad_.weights[q] * vals * vals.transpose();
  }

  // Edge machinery: values / tangential / normal derivatives of the trace at
  // Gauss points, as linear maps of the DOF vector.
  VecX gl_t, gl_w;
  gauss_legendre_01(4, gl_t, gl_w);
  const int nge = static_cast<int>(gl_t.size());
  std::vector<MatX> Tval(nv_), Ttan(nv_), Tnorm(nv_), Epts(nv_);
  std::vector<VecX> Ew(nv_);
  std::vector<Vec2> Enrm(nv_), Etan(nv_);
  for (int j = 0; j < nv_; ++j) {
    const int ja = j, jb = (j + 1) % nv_;
    Vec2 a = loop.row(ja).transpose(), b = loop.row(jb).transpose();
    const double len = (b - a).norm();
    Vec2 t = (b - a) / len;
    Vec2 n(t[1], -t[0]);  // outward for counterclockwise loops
    Etan[j] = t;
    Enrm[j] = n;
    Ew[j] = gl_w * len;
    Epts[j].resize(nge, 2);
    Tval[j] = MatX::Zero(nge, N);
    Ttan[j] = MatX::Zero(nge, N);
    Tnorm[j] = MatX::Zero(nge, N);
    for (int q = 0; q < nge; ++q) {
      const double s = gl_t[q];
      Epts[j].row(q) = (a + s * (b - a)).transpose();
      double h00, h10, h01, h11;
      hermite(s, h00, h10, h01, h11);
      double d00, d10, d01, d11;
      hermite_ds(s, d00, d10, d01, d11);
      // w trace: endpoint values + tangential derivatives (gradient DOFs are
      // scaled by the vertex lengths).
      Tval[j](q, 3 * ja) += h00;
      Tval[j](q, 3 * jb) += h01;
      Ttan[j](q, 3 * ja) += d00 / len;
      Ttan[j](q, 3 * jb) += d01 / len;
      for (int comp = 0; comp < 2; ++comp) {
        Tval[j](q, 3 * ja + 1 + comp) += h10 * len * t[comp] / hz[ja];
        Tval[j](q, 3 * jb + 1 + comp) += h11 * len * t[comp] / hz[jb];
        Ttan[j](q, 3 * ja + 1 + comp) += d10 * t[comp] / hz[ja];
        Ttan[j](q, 3 * jb + 1 + comp) += d11 * t[comp] / hz[jb];
        Tnorm[j](q, 3 * ja + 1 + comp) += (1.0 - s) * n[comp] / hz[ja];
        Tnorm[j](q, 3 * jb + 1 + comp) += s * n[comp] / hz[jb];
      }
    }
  }

  // H2-seminorm projection: Hessian Gram rows for the quadratic monomials,
  // vertex-average rows for the P1 kernel.
  MatX G = MatX::Zero(nm, nm);
  MatX B = MatX::Zero(nm, N);
  for (int a = 0; a < nm; ++a) {
    Mat2 Ha = mono2_.hessian(a, xF);
    for (int b = 0; b < nm; ++b)
      G(a, b) = area_ * (Ha.cwiseProduct(mono2_.hessian(b, xF))).sum();
  }
  for (int a = 3; a < nm; ++a) {
    Mat2 Ha = mono2_.hessian(a, xF);
    for (int j = 0; j < nv_; ++j) {
      Vec2 Hn = Ha * Enrm[j];
      const double ct = Hn.dot(Etan[j]), cn = Hn.dot(Enrm[j]);
      for (int q = 0; q < nge; ++q)
        B.row(a) += Ew[j][q] * (ct * Ttan[j].row(q) + cn * Tnorm[j].row(q));
    }
  }
  for (int a = 0; a < nm; ++a) {
    double v = 0.0;
    Vec2 g = Vec2::Zero();
    for (int l = 0; l < nv_; ++l) {
      v += mono2_.value(a, loop.row(l).transpose());
      g += mono2_.grad(a, loop.row(l).transpose());
    }
    G(0, a) = v / nv_;
    G(1, a) = g[0] / nv_;
    G(2, a) = g[1] / nv_;
  }
  for (int l = 0; l < nv_; ++l) {
    B(0, 3 * l) += 1.0 / nv_;
    B(1, 3 * l + 1) += 1.0 / (nv_ * hz[l]);
    B(2, 3 * l + 2) += 1.0 / (nv_ * hz[l]);
  }
  pih2_ = G.partialPivLu().solve(B);
  pi_dof_ = dof_mono_ * pih2_;

  // Gradient projection onto P1: int_F (dw/dx_j) m_d by parts. The area term
  // uses the enhanced L2 projection (same coefficients as pih2_ at k = 2).
  VecX intm = VecX::Zero(nm);
  for (int q = 0; q < quad_.size(); ++q)
    intm += quad_.weights[q] * mono2_.values(quad_.points.row(q).transpose());
  Eigen::RowVectorXd w_int = intm.transpose() * pih2_;  // int_F w
  MatX H1 = H2_.topLeftCorner(3, 3);
  Eigen::LDLT<MatX> H1_ldlt(H1);
  grad_coef_.resize(6, N);
  for (int j = 0; j < 2; ++j) {
    MatX mom = MatX::Zero(3, N);
    for (int d = 0; d < 3; ++d) {
      if (d == 1 + j) mom.row(d) -= w_int / h_;  // d m_d / dx_j = 1/h
      for (int e = 0; e < nv_; ++e)
        for (int q = 0; q < nge; ++q)
          mom.row(d) += Ew[e][q] * Enrm[e][j] *
                        mono2_.value(d, Epts[e].row(q).transpose()) * Tval[e].row(q);
    }
    grad_coef_.middleRows(j * 3, 3) = H1_ldlt.solve(mom);
  }

  // Constant Hessian representation: int_F d2w/dx_j dx_k over the boundary.
  hess_coef_ = MatX::Zero(4, N);
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(N);
      for (int e = 0; e < nv_; ++e)
        for (int q = 0; q < nge; ++q)
          row += Ew[e][q] * Enrm[e][k] *
                 (Etan[e][j] * Ttan[e].row(q) + Enrm[e][j] * Tnorm[e].row(q));
      hess_coef_.row(j * 2 + k) = row / area_;
    }
  MatX sym = 0.5 * (hess_coef_.row(1) + hess_coef_.row(2));
  hess_coef_.row(1) = sym;
  hess_coef_.row(2) = sym;
}

double PlateElement::eval(const VecX& local_dofs, const Vec2& x) const {
  return mono2_.values(x).dot(pih2_ * local_dofs);
}

Vec2 PlateElement::eval_grad(const VecX& local_dofs, const Vec2& x) const {
  VecX c = pih2_ * local_dofs;
  Vec2 g = Vec2::Zero();
  for (int a = 0; a < 6; ++a) g += c[a] * Vec2(mono2_.grad(a, x));
  return g;
}

Mat2 PlateElement::eval_hess(const VecX& local_dofs) const {
  VecX h = hess_coef_ * local_dofs;
  Mat2 H;
  H << h[0], h[1], h[2], h[3];
  return H;
}

PlatePressureElement::PlatePressureElement(const SurfaceMesh2& surf, int polygon_id,
                                           int exactness)
    : poly_id_(polygon_id) {
  const SurfacePolygon& poly = surf.polygon(polygon_id);
  nv_ = static_cast<int>(poly.vertices.size());
  h_ = poly.diameter;
  area_ = poly.area;
  mono1_ = MonomialBasis(2, 1, poly.barycenter, h_);
  const int nm = 3, N = nv_;

  MatX loop = surf.polygon_loop_coords(polygon_id);
  quad_ = quad_polygon(loop, exactness);

  dof_mono_.resize(N, nm);
  for (int a = 0; a < nm; ++a)
    for (int l = 0; l < nv_; ++l) dof_mono_(l, a) = mono1_.value(a, loop.row(l).transpose());

  H1_ = MatX::Zero(nm, nm);
  for (int q = 0; q < quad_.size(); ++q) {
    VecX vals = mono1_.values(quad_.points.row(q).transpose());
    H1_ += quad_.weights[q] * vals * vals.transpose();
  }

  // H1 projection onto P1 from linear edge traces; boundary-mean normalized.
  VecX gl_t, gl_w;
  gauss_legendre_01(3, gl_t, gl_w);
  const int nge = static_cast<int>(gl_t.size());
  MatX G = MatX::Zero(nm, nm);
  MatX B = MatX::Zero(nm, N);
  for (int q2 = 0; q2 < quad_.size(); ++q2) {
    MatX grads(nm, 2);
    for (int a = 0; a < nm; ++a)
      grads.row(a) = mono1_.grad(a, quad_.points.row(q2).transpose()).transpose();
    G += quad_.weights[q2] * grads * grads.transpose();
  }
  grad_coef_ = MatX::Zero(2, N);
  for (int j = 0; j < nv_; ++j) {
    const int ja = j, jb = (j + 1) % nv_;
    Vec2 a = loop.row(ja).transpose(), b = loop.row(jb).transpose();
    const double len = (b - a).norm();
    Vec2 t = (b - a) / len;
    Vec2 n(t[1], -t[0]);
    for (int q = 0; q < nge; ++q) {
      const double s = gl_t[q], w = gl_w[q] * len;
      Vec2 x = a + s * (b - a);
      Eigen::RowVectorXd trace = Eigen::RowVectorXd::Zero(N);
      trace[ja] = 1.0 - s;
      trace[jb] = s;
      for (int m = 1; m < nm; ++m)
        B.row(m) += w * mono1_.grad(m, x).dot(n) * trace;
      // Boundary-mean normalization fills the zero constant row.
      B.row(0) += w * trace;
      for (int m = 0; m < nm; ++m) G(0, m) += w * mono1_.value(m, x);
    }
  }
  pinab_ = G.partialPivLu().solve(B);
  pi_dof_ = dof_mono_ * pinab_;

  // Mean gradient from the boundary: int_F dr/dx_j = int_dF r n_j.
  for (int j = 0; j < nv_; ++j) {
    const int ja = j, jb = (j + 1) % nv_;
    Vec2 a = loop.row(ja).transpose(), b = loop.row(jb).transpose();
    const double len = (b - a).norm();
    Vec2 t = (b - a) / len;
    Vec2 n(t[1], -t[0]);
    // Linear trace integrates exactly: (r_a + r_b)/2 * len.
    for (int c = 0; c < 2; ++c) {
      grad_coef_(c, ja) += 0.5 * len * n[c] / area_;
      grad_coef_(c, jb) += 0.5 * len * n[c] / area_;
    }
  }
}

double PlatePressureElement::eval(const VecX& local_dofs, const Vec2& x) const {
  return mono1_.values(x).dot(pinab_ * local_dofs);
}

Vec2 PlatePressureElement::eval_grad(const VecX& local_dofs, const Vec2& x) const {
  VecX c = pinab_ * local_dofs;
  Vec2 g = Vec2::Zero();
  for (int a = 0; a < 3; ++a) g += c[a] * Vec2(mono1_.grad(a, x));
  return g;
}

MatX local_c1(const PlatePressureElement& pelem, const ModelParams& params) {
  const int N = pelem.ndof();
  MatX I = MatX::Identity(N, N);
  MatX R = I - pelem.pi_dof();
  const double cm = params.c0 / params.tau;
  MatX C = cm * pelem.pi_nabla().transpose() * pelem.mass1() * pelem.pi_nabla();
  C += cm * pelem.h() * pelem.h() * R.transpose() * R;
  C += params.kappa * pelem.area() * pelem.grad_proj().transpose() * pelem.grad_proj();
  C += params.kappa * R.transpose() * R;
  return C;
}

MatX local_c2(const PlateElement& elem, const ModelParams& params) {
  const int N = elem.ndof();
  MatX I = MatX::Identity(N, N);
  MatX R = I - elem.pi_dof();
  const double cm = params.rho_p / std::pow(params.tau, 3);
  const double cb = params.D / params.tau;
  MatX C = cm * elem.pi_h2().transpose() * elem.mass2() * elem.pi_h2();
  C += cm * elem.h() * elem.h() * R.transpose() * R;
  C += cb * elem.area() * elem.hess_proj().transpose() * elem.hess_proj();
  C += cb / (elem.h() * elem.h()) * R.transpose() * R;
  return C;
}

void local_b2_b3(const PlatePressureElement& pelem, const PlateElement& elem,
                 const ModelParams& params, MatX& b2, MatX& b3) {
  const QuadRule& q = elem.quad();
  const int Nr = pelem.ndof(), Nw = elem.ndof();
  b2 = MatX::Zero(Nr, Nw);
  b3 = MatX::Zero(Nr, Nw);
  // b2: -(alpha/tau) int (Pi0 grad psi).(Pi1 grad zeta); the psi gradient is
  // the elementwise constant representation.
  MatX gz_int = MatX::Zero(2, Nw);  // int_F (Pi1 grad w)_j
  for (int p = 0; p < q.size(); ++p) {
    VecX m1 = elem.monomials().values(q.points.row(p).transpose()).head(3);
    for (int j = 0; j < 2; ++j)
      gz_int.row(j) += q.weights[p] * m1.transpose() * elem.grad_proj().middleRows(j * 3, 3);
  }
  b2 = -(params.alpha / params.tau) * pelem.grad_proj().transpose() * gz_int;
  // b3: -(1/tau) int (Pi2 zeta)(Pi1 psi).
  for (int p = 0; p < q.size(); ++p) {
    Vec2 x = q.points.row(p).transpose();
    VecX vz = (elem.monomials().values(x).transpose() * elem.pi_h2()).transpose();
    VecX vr = (pelem.monomials().values(x).transpose() * pelem.pi_nabla()).transpose();
    b3 -= (q.weights[p] / params.tau) * vr * vz.transpose();
  }
}

void local_rhs_G_M(const PlatePressureElement& pelem, const PlateElement& elem,
                   const std::function<double(const Vec2&)>& g,
                   const std::function<double(const Vec2&)>& m,
                   const ModelParams& params, VecX& Gvec, VecX& Mvec) {
  const QuadRule& q = elem.quad();
  VecX mom_g = VecX::Zero(3), mom_m = VecX::Zero(6);
  for (int p = 0; p < q.size(); ++p) {
    Vec2 x = q.points.row(p).transpose();
    mom_g += q.weights[p] * g(x) * pelem.monomials().values(x);
    mom_m += q.weights[p] * m(x) * elem.monomials().values(x);
  }
  Gvec = -pelem.pi_nabla().transpose() * mom_g;
  Mvec = (1.0 / params.tau) * elem.pi_h2().transpose() * mom_m;
}

} // namespace biotvem
