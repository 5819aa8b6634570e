#pragma once

#include <vector>

#include "adaptctl/ppf.hpp"
#include "adaptctl/reference.hpp"
#include "adaptctl/simulation.hpp"
#include "adaptctl/types.hpp"

namespace adaptctl {

// Model-reference adaptive controller with a prescribed performance funnel
// on every state-tracking channel e = x - x_m.
struct MracConfig {
  Matrix A, B;  // plant skeleton; B full column rank
  Matrix Am;    // desired closed matrix, A - B km
  Matrix km;    // baseline gain, u_m = -km x
  PerformanceEnvelope envelope;  // template; per-channel deltas set from e(0)
  double delta = 1.0;            // overshoot allowance in (0, 1]
  Eigen::VectorXd gamma1, gamma2, upsilon, beta;  // per channel
  Eigen::VectorXd alpha_bar;  // robustifying gains
  Eigen::VectorXd psi;        // constant regressor for the sigma bank
  Matrix K;                   // optional transformed-error damping; empty=off
  double eps_smooth = 0.0;    // >0 replaces sign(eps) with tanh(eps/value)
};

struct MracEstimates {
  Matrix theta_hat;  // n x n
  Matrix sigma_hat;  // l x n, corrected value (integral state minus leakage)
};

class MracPpfController : public Controller {
 public:
  MracPpfController(MracConfig cfg, ReferenceSignal ref);

  int state_dim() const override;
  StateVector initial_state(const StateVector& x0) const override;
  StateVector control(double t, const StateVector& x,
                      const StateVector& xc) const override;
  StateVector derivative(double t, const StateVector& x,
                         const Eigen::VectorXd& u,
                         const StateVector& xc) const override;
  Eigen::VectorXd reference(double t) const override;
  Eigen::VectorXd tracking_error(double t, const StateVector& x,
                                 const StateVector& xc) const override;
  Eigen::VectorXd estimate_trace(double t, const StateVector& x,
                                 const StateVector& xc) const override;
  std::string estimate_label() const override { return "xm"; }
  Eigen::VectorXd envelope_radius(double t) const override;
  Eigen::VectorXd transformed_error(double t, const StateVector& x,
                                    const StateVector& xc) const override;
  void check_invariants(double t, const StateVector& x,
                        const StateVector& xc) const override;

  const MracConfig& config() const { return cfg_; }
  const Matrix& kg() const { return kg_; }
  const std::vector<PerformanceEnvelope>& envelopes() const { return envs_; }
  MracEstimates estimates(double t, const StateVector& x,
                          const StateVector& xc) const;

 private:
  MracConfig cfg_;
  ReferenceSignal ref_;
  int n_ = 0, m_ = 0, l_ = 0;
  Matrix kg_;     // feedforward for the reference model
  Matrix B_pinv_;
  std::vector<PerformanceEnvelope> envs_;

  // The printed sigma update is implicit (the leakage correction contains
  // sigma_hat itself); it solves in closed form per channel, so sigma_hat is
  // an algebraic function of the integral state s and eps.
  Matrix sigma_from_state(const StateVector& xc,
                          const Eigen::VectorXd& eps) const;
  void eval(double t, const StateVector& x, const StateVector& xc,
            Eigen::VectorXd& e, Eigen::VectorXd& rho_t,
            Eigen::VectorXd& rho_dot, Eigen::VectorXd& eps,
            Eigen::VectorXd& gamma_diag, Eigen::VectorXd& phi_diag) const;
  int off_theta() const { return n_; }
  int off_s() const { return n_ + n_ * n_; }
};

}  // namespace adaptctl
