#pragma once

#include <functional>

#include "biotvem/monomial.hpp"
#include "biotvem/quadrature.hpp"
#include "biotvem/surface.hpp"
#include "biotvem/types.hpp"

namespace biotvem {

struct ModelParams;

// C1 deflection element at k=2 on a surface polygon. DOFs per vertex z
// (local index l): value w(z) -> 3l, scaled gradient h_z dw/dx(z) -> 3l+1,
// h_z dw/dy(z) -> 3l+2. Edge traces: w cubic Hermite from endpoint values and
// tangential derivatives; normal derivative linear from endpoint gradients.
class PlateElement {
public:
  PlateElement(const SurfaceMesh2& surf, int polygon_id, int exactness = 6);

  int polygon_id() const { return poly_id_; }
  int nv() const { return nv_; }
  int ndof() const { return 3 * nv_; }
  double h() const { return h_; }
  double area() const { return area_; }

  const MonomialBasis& monomials() const { return mono2_; }  // 2D, degree 2

  // H2-seminorm projection onto P2 (vertex-average normalized); at k=2 the
  // enhanced L2 projection carries the same coefficients: 6 x N.
  const MatX& pi_h2() const { return pih2_; }
  // L2 projection of the gradient onto P1, row block j*3 + d: 6 x N.
  const MatX& grad_proj() const { return grad_coef_; }
  // Constant Hessian representation, rows (j*2 + k): 4 x N.
  const MatX& hess_proj() const { return hess_coef_; }

  const MatX& pi_dof() const { return pi_dof_; }  // N x N, DOFs of pi_h2
  const MatX& dof_of_monomials() const { return dof_mono_; }  // N x 6

  const QuadRule& quad() const { return quad_; }
  const MatX& mass2() const { return H2_; }  // 6 x 6

  double eval(const VecX& local_dofs, const Vec2& x) const;
  Vec2 eval_grad(const VecX& local_dofs, const Vec2& x) const;
  Mat2 eval_hess(const VecX& local_dofs) const;

private:
  int poly_id_;
  int nv_;
  double h_, area_;
  MonomialBasis mono2_;
  MatX pih2_, grad_coef_, hess_coef_, pi_dof_, dof_mono_, H2_;
  QuadRule quad_;
};

// Pressure-moment element at degree 1: vertex-value DOFs.
class PlatePressureElement {
public:
  PlatePressureElement(const SurfaceMesh2& surf, int polygon_id, int exactness = 6);

  int polygon_id() const { return poly_id_; }
  int nv() const { return nv_; }
  int ndof() const { return nv_; }
  double h() const { return h_; }
  double area() const { return area_; }

  const MonomialBasis& monomials() const { return mono1_; }  // 2D, degree 1

  // H1-seminorm projection onto P1 (boundary-mean normalized); the enhanced
  // L2 projection carries the same coefficients: 3 x N.
  const MatX& pi_nabla() const { return pinab_; }
  // Constant gradient representation (mean of the gradient): 2 x N.
  const MatX& grad_proj() const { return grad_coef_; }

  const MatX& pi_dof() const { return pi_dof_; }
  const MatX& dof_of_monomials() const { return dof_mono_; }  // N x 3

  const QuadRule& quad() const { return quad_; }
  const MatX& mass1() const { return H1_; }  // 3 x 3

  double eval(const VecX& local_dofs, const Vec2& x) const;
  Vec2 eval_grad(const VecX& local_dofs, const Vec2& x) const;

private:
  int poly_id_;
  int nv_;
  double h_, area_;
  MonomialBasis mono1_;
  MatX pinab_, grad_coef_, pi_dof_, dof_mono_, H1_;
  QuadRule quad_;
};

MatX local_c1(const PlatePressureElement& pelem, const ModelParams& params);
MatX local_c2(const PlateElement& elem, const ModelParams& params);
// Rectangular couplings, rows = pressure DOFs, columns = deflection DOFs.
void local_b2_b3(const PlatePressureElement& pelem, const PlateElement& elem,
                 const ModelParams& params, MatX& b2, MatX& b3);
void local_rhs_G_M(const PlatePressureElement& pelem, const PlateElement& elem,
                   const std::function<double(const Vec2&)>& g,
                   const std::function<double(const Vec2&)>& m,
                   const ModelParams& params, VecX& Gvec, VecX& Mvec);

} // namespace biotvem
