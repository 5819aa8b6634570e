#include "adaptctl/observer.hpp"

#include "adaptctl/errors.hpp"

namespace adaptctl {

StateVector ObserverModel::initial_state() const {
  StateVector xo = StateVector::Zero(state_dim());
  xo[n] = beta0;
  xo[n + 1] = delta0;
  return xo;
}

double beta_l(const ObserverModel&, const Eigen::VectorXd& y,
              const Eigen::VectorXd& x_breve, double delta) {
  const double y4 = y.squaredNorm() * y.squaredNorm();
  return 1.0 + y4 + x_breve.squaredNorm() * y4 + 2.0 * delta;
}

double beta_adaptation(const ObserverModel& obs, const Eigen::VectorXd& e_l,
                       double beta_breve, double bl) {
  return obs.gamma_l * e_l.norm() * bl - obs.gamma_l * obs.sigma_l * beta_breve;
}

double dynamic_signal_derivative(const ObserverModel& obs,
                                 const Eigen::VectorXd& y, double delta) {
  return -obs.lambda0 * delta + y.squaredNorm() + obs.d0;
}

StateVector observer_derivative(const ObserverModel& obs, double t,
                                const Eigen::VectorXd& y,
                                const StateVector& xo) {
  (void)t;
  if (xo.size() != obs.state_dim() || y.size() != obs.p)
    throw ConfigError("observer_derivative: dimension mismatch");
  const Eigen::VectorXd xb = xo.head(obs.n);
  const double beta_breve = xo[obs.n];
  const double delta = xo[obs.n + 1];
  const Eigen::VectorXd e_l = obs.C * xb - y;
  const double bl = beta_l(obs, y, xb, delta);

  StateVector dxo(obs.state_dim());
  dxo.head(obs.n) = obs.A * xb - obs.k_l * e_l - beta_breve * (obs.B * e_l) * bl;
  dxo[obs.n] = beta_adaptation(obs, e_l, beta_breve, bl);
  dxo[obs.n + 1] = dynamic_signal_derivative(obs, y, delta);
  return dxo;
}

}  // namespace adaptctl
