#pragma once

#include "adaptctl/types.hpp"

namespace adaptctl {

// Robust adaptive state observer. Runs alongside (and independently of) the
// controller: it only consumes the measured output y and reconstructs the
// model state. Internal state layout: [x_breve (n), beta_breve, delta].
struct ObserverModel {
  int n = 0;  // observed state dim
  int p = 0;  // measurement dim
  Matrix A;   // linear skeleton
  Matrix B;   // input/injection direction for the adaptive term
  Matrix C;   // measurement map
  Matrix k_l;  // n x p linear injection gain
  double gamma_l = 10.0;
  double sigma_l = 1e-4;
  double lambda0 = 2.5;
  double d0 = 0.625;
  double beta0 = 1.0;   // beta_breve(0)
  double delta0 = 1.0;  // delta(0)

  int state_dim() const { return n + 2; }
  StateVector initial_state() const;
};

// Normalizing signal: 1 + |y|^4 + |x_breve|^2 |y|^4 + 2 delta. Always >= 1
// while delta >= 0.
double beta_l(const ObserverModel& obs, const Eigen::VectorXd& y,
              const Eigen::VectorXd& x_breve, double delta);

// beta_breve' = Gamma_l |e_l| beta_l - Gamma_l sigma_l beta_breve
double beta_adaptation(const ObserverModel& obs, const Eigen::VectorXd& e_l,
                       double beta_breve, double bl);

// delta' = -lambda0 delta + |y|^2 + d0
double dynamic_signal_derivative(const ObserverModel& obs,
                                 const Eigen::VectorXd& y, double delta);

// Full derivative of [x_breve, beta_breve, delta] given the measurement y.
StateVector observer_derivative(const ObserverModel& obs, double t,
                                const Eigen::VectorXd& y,
                                const StateVector& xo);

}  // namespace adaptctl
