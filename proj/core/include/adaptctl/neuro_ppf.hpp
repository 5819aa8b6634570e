#pragma once

#include <cstdint>
#include <vector>

#include "adaptctl/ppf.hpp"
#include "adaptctl/reference.hpp"
#include "adaptctl/simulation.hpp"
#include "adaptctl/types.hpp"

namespace adaptctl {

// Sigmoid feature bank shared by the f and G approximators. The parameter
// vector theta (length p) is partitioned into m + m*m contiguous sub-banks:
// one per entry of f, then one per entry of G (row major), so
// F_f = Z_f(x)' theta and G_ij = Z_Gij(x)' theta with disjoint supports.
struct RegressorBank {
  Matrix W;           // p x n
  Eigen::VectorXd b;  // p
  int m = 0;          // output channels
  int block() const { return static_cast<int>(b.size()) / (m + m * m); }
};

RegressorBank make_regressor_bank(int p, int n, int m, std::uint64_t seed);

// zeta_j = 1/(1 + exp(-w_j' x - b_j))
Eigen::VectorXd regressors(const RegressorBank& bank,
                           const Eigen::VectorXd& x);

struct Approximation {
  Eigen::VectorXd F_f;  // m
  Matrix F_G;           // m x m
  Matrix Z_f;           // p x m
};

Approximation approximate(const RegressorBank& bank,
                          const Eigen::VectorXd& theta_hat,
                          const Eigen::VectorXd& x);

// A_F(x, v): the m x p matrix with F_G(x, theta) v = A_F(x, v) theta.
Matrix a_f(const RegressorBank& bank, const Eigen::VectorXd& zeta,
           const Eigen::VectorXd& v);

// Second-order metric error E = eps_dot + lambda .* eps.
Eigen::VectorXd metric_error(const Eigen::VectorXd& eps,
                             const Eigen::VectorXd& eps_dot,
                             const Eigen::VectorXd& lambda);

// Regularized inverse: nu_a = -Adj(F_G) Det(F_G) / (Det^2 + delta_d) nu_b.
Eigen::VectorXd regularized_inverse(const Matrix& F_G,
                                    const Eigen::VectorXd& nu_b,
                                    double delta_d);
Matrix adjugate(const Matrix& M);

struct NeuroPpfConfig {
  int p = 30;
  std::uint64_t seed = 1;
  double k = 0.5;
  double n_f = 0.2;
  double eta_ga = 0.2;
  double eta_gb = 0.2;
  double delta_d = 0.1;
  double sigma = 7.5;   // leakage
  double gamma = 0.1;   // adaptation gain
  double sign_g = 1.0;  // input-gain definiteness sign
  Eigen::VectorXd lambda;         // per channel
  PerformanceEnvelope envelope;   // template applied to every channel
  double delta = 1.0;
  Eigen::VectorXd theta0;         // empty = zero
};

// Neuro-adaptive tracking with prescribed performance for second-order
// MIMO plants with state x = [q, q_dot]; the reference supplies q_d and its
// first two derivatives.
class NeuroPpfController : public Controller {
 public:
  NeuroPpfController(NeuroPpfConfig cfg, ReferenceSignal ref);

  int state_dim() const override { return cfg_.p; }
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
  std::string estimate_label() const override { return "xd"; }
  Eigen::VectorXd envelope_radius(double t) const override;
  Eigen::VectorXd transformed_error(double t, const StateVector& x,
                                    const StateVector& xc) const override;
  void check_invariants(double t, const StateVector& x,
                        const StateVector& xc) const override;

  const RegressorBank& bank() const { return bank_; }
  const NeuroPpfConfig& config() const { return cfg_; }
  const std::vector<PerformanceEnvelope>& envelopes() const { return envs_; }

 private:
  NeuroPpfConfig cfg_;
  ReferenceSignal ref_;
  RegressorBank bank_;
  // Sides finalized from sign(e(0)) when the run hands over x0.
  mutable std::vector<PerformanceEnvelope> envs_;
  int m_ = 0;

  struct Eval {
    Eigen::VectorXd e, edot, eps, eps_dot, E, Rdiag, V;
    Eigen::VectorXd zeta, nu_b, nu_a, u;
    Matrix F_G, Z_f;
  };
  Eval eval(double t, const StateVector& x, const StateVector& xc) const;
};

}  // namespace adaptctl
