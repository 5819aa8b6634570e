#pragma once

#include <utility>
#include <vector>

#include "adaptctl/types.hpp"

namespace adaptctl {

// Prescribed performance funnel rho(t) = (rho0 - rho_inf) e^{-ell t} +
// rho_inf with per-side allowances: containment means
// -delta_under * rho < e < delta_bar * rho.
struct PerformanceEnvelope {
  double rho0 = 1.0;
  double rho_inf = 0.01;
  double ell = 1.0;
  double delta_bar = 1.0;
  double delta_under = 1.0;
};

void validate(const PerformanceEnvelope& env);

// (rho, rho_dot) at time t.
std::pair<double, double> rho(const PerformanceEnvelope& env, double t);
double rho_ddot(const PerformanceEnvelope& env, double t);

// eps = 1/2 ln(delta_under + e/rho) - 1/2 ln(delta_bar - e/rho); bijection
// from the open envelope interval onto R. Throws EnvelopeViolation (tagged
// with t and channel) on or outside the boundary.
double transform(double e, double rho_t, const PerformanceEnvelope& env,
                 double t = 0.0, int channel = 0);

// Exact inverse: returns e/rho for a given eps.
double inverse_transform(double eps, const PerformanceEnvelope& env);

// First and second derivatives of the transform w.r.t. xi = e/rho.
double transform_slope(double xi, const PerformanceEnvelope& env);
double transform_curvature(double xi, const PerformanceEnvelope& env);

// Jacobian diagonals of the transformed-error dynamics:
// Gamma_ii = T'(xi)/rho (> 0 inside the envelope), Phi_ii = -Gamma_ii xi.
void gamma_phi(const Eigen::VectorXd& e, const Eigen::VectorXd& rho_t,
               const std::vector<PerformanceEnvelope>& envs,
               Eigen::VectorXd& gamma_diag, Eigen::VectorXd& phi_diag,
               double t = 0.0);

}  // namespace adaptctl
