#pragma once

#include <utility>
#include <vector>

#include "adaptctl/reference.hpp"
#include "adaptctl/simulation.hpp"
#include "adaptctl/transfer.hpp"
#include "adaptctl/types.hpp"

namespace adaptctl {

enum class L1Variant { siso, mimo, unmatched };

// Convex compact sets for the adaptive estimates. omega entries project onto
// intervals (entrywise matrices when set, otherwise [omega_l, omega_u] on the
// diagonal and a centered interval of the same width off it); theta/sigma
// project onto balls.
struct ProjectionBounds {
  double omega_l = 0.0;
  double omega_u = 0.0;
  Matrix omega_lo;  // optional m x m entrywise lower bounds
  Matrix omega_hi;
  double theta_b = 0.0;
  double delta_b = 0.0;   // sigma ball radius
  double theta_b2 = 0.0;  // unmatched-channel set
  double delta_b2 = 0.0;
  double eps = 0.1;  // projection boundary-layer width
};

struct AdaptiveEstimates {
  Matrix omega_hat;            // m x m
  Eigen::VectorXd theta_hat;   // n (siso) or m
  Eigen::VectorXd sigma_hat;   // m
  Eigen::VectorXd theta2_hat;  // n - m (unmatched only)
  Eigen::VectorXd sigma2_hat;
};

struct L1Config {
  L1Variant variant = L1Variant::siso;
  double gamma = 0.0;  // adaptation gain
  double k = 0.0;      // feedback gain, K = k I
  RationalTransfer D;  // filter prototype, u = -k D(s)(eta_hat - Kg r)
  Matrix Q = Matrix();
  Matrix Am, B, C;  // design skeleton; B is Bm for the unmatched variant
  Matrix Bum;       // unmatched complement basis (filled by controller setup)
  ProjectionBounds bounds;
  Matrix omega_hat0;  // initial input-gain estimate; interval midpoints when
                      // empty
};

// State predictor derivative per variant:
//   siso:      Am x_hat + B (omega u + theta' x + sigma)
//   mimo:      Am x_hat + B (omega u + theta |x|_inf + sigma)
//   unmatched: mimo + Bum (theta2 |x|_inf + sigma2)
StateVector predictor_derivative(const L1Config& cfg,
                                 const AdaptiveEstimates& est,
                                 const StateVector& x,
                                 const StateVector& x_hat,
                                 const Eigen::VectorXd& u);

// Projected gradient adaptation, all channels scaled by gamma. Gradients are
// driven by w = (x_tilde' P B)' (and the Bum analogue for the unmatched set).
AdaptiveEstimates adaptation_derivative(const L1Config& cfg,
                                        const AdaptiveEstimates& est,
                                        const StateVector& x_tilde,
                                        const StateVector& x,
                                        const Eigen::VectorXd& u,
                                        const Matrix& P);

// Orthonormal basis of the orthogonal complement of range(Bm).
Matrix unmatched_complement(const Matrix& Bm);

// Split f into matched/unmatched coordinates: Bm f1 + Bum f2 = f.
std::pair<Eigen::VectorXd, Eigen::VectorXd> decompose_unmatched(
    const Matrix& Bm, const Eigen::VectorXd& f);

// Worst-case Lyapunov-level bound theta_m for the configured variant; the
// predicted uniform prediction-error bound is sqrt(theta_m/(lmin(P) gamma)).
double theta_m_bound(const L1Config& cfg, const Matrix& P, double d_theta,
                     double d_sigma);
double xtilde_bound(const L1Config& cfg, const Matrix& P, double d_theta,
                    double d_sigma);

// Stability / performance diagnostics for the filtered loop. All transfer
// norms are taken worst-case over a grid of the input-gain interval.
struct NormConditionReport {
  double G_l1 = 0.0;             // |H(s)(I - C(s))|_L1
  double GL = 0.0;               // |G|_L1 * L; < 1 required
  double stability_margin = 0.0;  // 1 - GL
  double HCKg_l1 = 0.0;          // |H(s) C(s) Kg|_L1
  double omega_inv_C_l1 = 0.0;   // |omega^-1 C(s)|_L1
  double rho_in = 0.0;
  double rho_r = 0.0;            // infimum feasible bound (NaN when GL >= 1)
  double rho_ur = 0.0;
  bool stable = false;           // GL < 1
  std::vector<double> rho_candidates;
  std::vector<double> margins;   // per candidate: rhs(rho) - |G|_L1
};

NormConditionReport norm_condition_report(
    const L1Config& cfg, double L, double B0, double r_inf,
    const std::vector<double>& rho_candidates = {}, double rho_in = 0.0,
    int omega_grid = 64);

class L1Controller : public Controller {
 public:
  L1Controller(L1Config cfg, ReferenceSignal ref);

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
  void check_invariants(double t, const StateVector& x,
                        const StateVector& xc) const override;

  const L1Config& config() const { return cfg_; }
  const Matrix& P() const { return P_; }
  const Matrix& Kg() const { return Kg_; }
  AdaptiveEstimates unpack(const StateVector& xc) const;
  StateVector x_hat(const StateVector& xc) const { return xc.head(n_); }

 protected:
  // Filter loop gain; the fuzzy variant modulates this online.
  virtual double loop_gain(double t, const StateVector& x,
                           const StateVector& xc) const;
  // d(C x_hat)/dt, used by the fuzzy gain scheduler for the error rate.
  Eigen::VectorXd output_rate(double t, const StateVector& x,
                              const Eigen::VectorXd& u,
                              const StateVector& xc) const;
  const ReferenceSignal& ref() const { return ref_; }

 private:
  L1Config cfg_;
  ReferenceSignal ref_;
  int n_ = 0, m_ = 0, p_ = 0, nth_ = 0, nun_ = 0;
  Matrix P_;
  Matrix Kg_;
  Matrix M2_;  // unmatched DC routing Hm(0)^-1 Hum(0)
  StateSpaceRealization filt_;  // realization of D(s), strictly proper
  int nf_ = 0;

  Eigen::VectorXd eta_hat(double t, const StateVector& x,
                          const Eigen::VectorXd& u,
                          const StateVector& xc) const;
  void pack(const AdaptiveEstimates& est, StateVector& xc) const;
  int off_omega() const { return n_; }
  int off_theta() const { return n_ + m_ * m_; }
  int off_sigma() const { return off_theta() + nth_; }
  int off_theta2() const { return off_sigma() + m_; }
  int off_sigma2() const { return off_theta2() + nun_; }
  int off_filter() const { return off_sigma2() + nun_; }
};

}  // namespace adaptctl
