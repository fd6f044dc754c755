#pragma once

#include <functional>

#include "biotvem/types.hpp"

namespace biotvem {

// Model coefficients of the coupled bulk/plate system for one time step tau.
struct ModelParams {
  double rho_f = 1.0;  // fluid density
  double mu = 1.0;     // dynamic viscosity
  double gamma = 1.0;  // interface slip rate
  double rho_p = 1.0;  // plate inertial parameter
  double D = 1.0;      // flexural rigidity
  double alpha = 1.0;  // Biot-Willis coefficient
  double c0 = 1.0;     // storativity
  double kappa = 1.0;  // permeability
  double tau = 1.0;    // time-step size

  void validate() const;
};

// Closed-form solution plus the derived data of the benchmark problem.
// Plate fields take the 3D interface point (their surface restriction is
// handled by the caller through the surface frame).
struct ManufacturedCase {
  ModelParams params;
  Vec3 n_sigma = Vec3(0, 0, 1);

  std::function<Vec3(const Vec3&)> u;
  std::function<Mat3(const Vec3&)> grad_u;  // (i,j) = du_i/dx_j
  std::function<double(const Vec3&)> p;
  std::function<Vec3(const Vec3&)> grad_p;
  std::function<Vec3(const Vec3&)> f;  // bulk momentum forcing

  std::function<double(const Vec3&)> w;
  std::function<Vec3(const Vec3&)> grad_w;   // tangential (third component 0)
  std::function<Mat3(const Vec3&)> hess_w;   // tangential block
  std::function<double(const Vec3&)> phi;
  std::function<Vec3(const Vec3&)> grad_phi;
  std::function<double(const Vec3&)> g;  // plate mass forcing
  std::function<double(const Vec3&)> m;  // plate momentum forcing

  // Exact Cauchy stress sigma = mu grad(u) - p I applied to a direction.
  Vec3 traction(const Vec3& x, const Vec3& n) const;
  // Interface slip defect of the exact solution (nonzero for this benchmark):
  // R = -(sigma n) x n - gamma (u x n), added to the bulk load on the interface.
  Vec3 slip_defect(const Vec3& x) const;
};

// Trigonometric benchmark on the unit cube with the interface at x3 = 1.
ManufacturedCase benchmark_case(const ModelParams& params);

} // namespace biotvem
