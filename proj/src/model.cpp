#include "biotvem/model.hpp"

#include <cmath>

namespace biotvem {

void ModelParams::validate() const {
  auto pos = [](double v, const char* name) {
    if (!(v > 0.0))
      throw Error(ErrorKind::Config, std::string("parameter ") + name + " must be positive");
  };
  pos(rho_f, "rho_f");
  pos(mu, "mu");
  pos(gamma, "gamma");
  pos(rho_p, "rho_p");
  pos(D, "D");
  pos(alpha, "alpha");
  pos(kappa, "kappa");
  pos(tau, "tau");
  if (c0 < 0.0) throw Error(ErrorKind::Config, "parameter c0 must be nonnegative");
}

Vec3 ManufacturedCase::traction(const Vec3& x, const Vec3& n) const {
  return params.mu * grad_u(x) * n - p(x) * n;
}

Vec3 ManufacturedCase::slip_defect(const Vec3& x) const {
  const Vec3 t = traction(x, n_sigma);
  return -t.cross(n_sigma) - params.gamma * u(x).cross(n_sigma);
}

ManufacturedCase benchmark_case(const ModelParams& params) {
  params.validate();
  ManufacturedCase c;
  c.params = params;
  c.n_sigma = Vec3(0, 0, 1);
  const double pi2 = 2.0 * M_PI;

  c.u = [](const Vec3& x) {
    return Vec3(std::cos(x[2]) * std::sin(x[1]), std::cos(x[0]) * std::sin(x[2]),
                std::cos(x[1]) * std::sin(x[0]));
  };
  c.grad_u = [](const Vec3& x) {
    Mat3 J;
    J << 0.0, std::cos(x[2]) * std::cos(x[1]), -std::sin(x[2]) * std::sin(x[1]),
        -std::sin(x[0]) * std::sin(x[2]), 0.0, std::cos(x[0]) * std::cos(x[2]),
        std::cos(x[1]) * std::cos(x[0]), -std::sin(x[1]) * std::sin(x[0]), 0.0;
    return J;
  };
  c.p = [pi2](const Vec3& x) { return std::sin(pi2 * x[0]) * std::sin(pi2 * x[1]); };
  c.grad_p = [pi2](const Vec3& x) {
    return Vec3(pi2 * std::cos(pi2 * x[0]) * std::sin(pi2 * x[1]),
                pi2 * std::sin(pi2 * x[0]) * std::cos(pi2 * x[1]), 0.0);
  };
  // Each velocity component satisfies lap(u_i) = -2 u_i.
  const double rf_tau = params.rho_f / params.tau;
  const double mu = params.mu;
  c.f = [u = c.u, gp = c.grad_p, rf_tau, mu](const Vec3& x) {
    return Vec3(rf_tau * u(x) + 2.0 * mu * u(x) + gp(x));
  };

  // Plate deflection w = u . n on the interface; x3-independent.
  c.w = [](const Vec3& x) { return std::cos(x[1]) * std::sin(x[0]); };
  c.grad_w = [](const Vec3& x) {
    return Vec3(std::cos(x[1]) * std::cos(x[0]), -std::sin(x[1]) * std::sin(x[0]), 0.0);
  };
  c.hess_w = [](const Vec3& x) {
    Mat3 H = Mat3::Zero();
    H(0, 0) = -std::cos(x[1]) * std::sin(x[0]);
    H(0, 1) = -std::sin(x[1]) * std::cos(x[0]);
    H(1, 0) = H(0, 1);
    H(1, 1) = -std::cos(x[1]) * std::sin(x[0]);
    return H;
  };
  // phi = -(sigma n).n = p on the interface (du3/dx3 = 0 there).
  c.phi = [p = c.p](const Vec3& x) { return p(Vec3(x[0], x[1], 1.0)); };
  c.grad_phi = [gp = c.grad_p](const Vec3& x) {
    Vec3 g = gp(Vec3(x[0], x[1], 1.0));
    g[2] = 0.0;
    return g;
  };
  // lap(phi) = -8 pi^2 phi, lap(w) = -2 w, lap^2(w) = 4 w.
  const double c0_tau = params.c0 / params.tau;
  const double kappa = params.kappa;
  const double a_tau = params.alpha / params.tau;
  c.g = [phi = c.phi, w = c.w, c0_tau, kappa, a_tau, pi2](const Vec3& x) {
    return c0_tau * phi(x) + kappa * pi2 * pi2 * 2.0 * phi(x) + a_tau * 2.0 * w(x);
  };
  const double rp_tau2 = params.rho_p / (params.tau * params.tau);
  const double Dr = params.D;
  const double alpha = params.alpha;
  c.m = [phi = c.phi, w = c.w, rp_tau2, Dr, alpha, pi2](const Vec3& x) {
    return rp_tau2 * w(x) + 4.0 * Dr * w(x) - alpha * pi2 * pi2 * 2.0 * phi(x) + phi(x);
  };
  return c;
}

} // namespace biotvem
