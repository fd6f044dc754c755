#pragma once

#include <array>
#include <vector>

#include "biotvem/types.hpp"

namespace biotvem {

// Scaled monomial basis m_a(x) = ((x - center)/h)^{t_a} on a d-dimensional
// entity (d = 1, 2, 3). Ordering is graded lexicographic: ascending total
// degree, and within a degree the first exponent decreases first. The first
// member is the constant 1. This ordering is fixed globally.
class MonomialBasis {
public:
  MonomialBasis() = default;
  MonomialBasis(int dim, int degree, const VecX& center, double h);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(exps_.size()); }
  double h() const { return h_; }
  const VecX& center() const { return center_; }
  const std::array<int, 3>& exponents(int i) const { return exps_[i]; }
  int member_degree(int i) const;

  double value(int i, const VecX& x) const;
  VecX grad(int i, const VecX& x) const;     // length dim
  MatX hessian(int i, const VecX& x) const;  // dim x dim
  double laplacian(int i, const VecX& x) const;

  // Row vector of all member values at x.
  VecX values(const VecX& x) const;

  // Coefficients of d(m_i)/dx_j expanded in this same basis (valid because
  // differentiation lowers the degree). Length = size().
  VecX derivative_coefficients(int i, int j) const;

  static int count(int dim, int degree);

private:
  int index_of(const std::array<int, 3>& t) const;

  int dim_ = 0;
  int degree_ = 0;
  VecX center_;
  double h_ = 1.0;
  std::vector<std::array<int, 3>> exps_;
};

// Basis of G_r^perp(D): in 3D span{x ^ P_{r-1}(D)^3}, in 2D span{x^perp P_{r-1}(D)},
// with x measured as (x - center)/h. Members are coefficient vectors over the
// vector monomial basis of degree r, component-major: entry (i*nm + a) is the
// coefficient of m_a in component i, nm = count(dim, r).
class ComplementBasis {
public:
  ComplementBasis() = default;
  ComplementBasis(int dim, int degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(members_.cols()); }
  const MatX& coefficients() const { return members_; }  // (dim*nm) x size

  static int dimension(int dim, int degree);

private:
  int dim_ = 0;
  int degree_ = 0;
  MatX members_;
};

} // namespace biotvem
