#include "adaptctl/ppf.hpp"

#include <cmath>

#include "adaptctl/errors.hpp"

namespace adaptctl {

void validate(const PerformanceEnvelope& env) {
  if (!(env.rho0 > env.rho_inf && env.rho_inf > 0.0))
    throw ConfigError("PerformanceEnvelope: need rho0 > rho_inf > 0");
  if (!(env.ell > 0.0)) throw ConfigError("PerformanceEnvelope: ell must be > 0");
  if (!(env.delta_bar > 0.0 && env.delta_bar <= 1.0) ||
      !(env.delta_under > 0.0 && env.delta_under <= 1.0))
    throw ConfigError("PerformanceEnvelope: deltas must lie in (0, 1]");
}

std::pair<double, double> rho(const PerformanceEnvelope& env, double t) {
  const double decay = (env.rho0 - env.rho_inf) * std::exp(-env.ell * t);
  return {decay + env.rho_inf, -env.ell * decay};
}

double rho_ddot(const PerformanceEnvelope& env, double t) {
  return env.ell * env.ell * (env.rho0 - env.rho_inf) * std::exp(-env.ell * t);
}

double transform(double e, double rho_t, const PerformanceEnvelope& env,
                 double t, int channel) {
  const double xi = e / rho_t;
  if (!(xi > -env.delta_under && xi < env.delta_bar))
    throw EnvelopeViolation(t, channel, e, rho_t);
  return 0.5 * std::log(env.delta_under + xi) -
         0.5 * std::log(env.delta_bar - xi);
}

double inverse_transform(double eps, const PerformanceEnvelope& env) {
  const double ep = std::exp(eps), en = std::exp(-eps);
  return (env.delta_bar * ep - env.delta_under * en) / (ep + en);
}

double transform_slope(double xi, const PerformanceEnvelope& env) {
  return 0.5 * (1.0 / (env.delta_under + xi) + 1.0 / (env.delta_bar - xi));
}

double transform_curvature(double xi, const PerformanceEnvelope& env) {
  const double a = env.delta_under + xi, b = env.delta_bar - xi;
  return 0.5 * (-1.0 / (a * a) + 1.0 / (b * b));
}

void gamma_phi(const Eigen::VectorXd& e, const Eigen::VectorXd& rho_t,
               const std::vector<PerformanceEnvelope>& envs,
               Eigen::VectorXd& gamma_diag, Eigen::VectorXd& phi_diag,
               double t) {
  const int n = static_cast<int>(e.size());
  if (rho_t.size() != n || static_cast<int>(envs.size()) != n)
    throw ConfigError("gamma_phi: channel count mismatch");
  gamma_diag.resize(n);
  phi_diag.resize(n);
  for (int i = 0; i < n; ++i) {
    const double xi = e[i] / rho_t[i];
    if (!(xi > -envs[i].delta_under && xi < envs[i].delta_bar))
      throw EnvelopeViolation(t, i, e[i], rho_t[i]);
    gamma_diag[i] = transform_slope(xi, envs[i]) / rho_t[i];
    phi_diag[i] = -gamma_diag[i] * xi;
  }
}

}  // namespace adaptctl
