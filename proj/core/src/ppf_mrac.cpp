#include "adaptctl/ppf_mrac.hpp"

#include <cmath>

#include "adaptctl/errors.hpp"
#include "adaptctl/gains.hpp"

namespace adaptctl {

MracPpfController::MracPpfController(MracConfig cfg, ReferenceSignal ref)
    : cfg_(std::move(cfg)), ref_(std::move(ref)) {
  n_ = static_cast<int>(cfg_.A.rows());
  m_ = static_cast<int>(cfg_.B.cols());
  l_ = static_cast<int>(cfg_.psi.size());
  if (cfg_.B.rows() != n_ || cfg_.Am.rows() != n_ || cfg_.km.rows() != m_ ||
      cfg_.km.cols() != n_)
    throw ConfigError("MracPpfController: skeleton dimension mismatch");
  if (ref_.dim != m_)
    throw ConfigError("MracPpfController: reference dim != input dim");
  for (const auto* v : {&cfg_.gamma1, &cfg_.gamma2, &cfg_.upsilon, &cfg_.beta,
                        &cfg_.alpha_bar}) {
    if (v->size() != n_)
      throw ConfigError("MracPpfController: per-channel gain size != n");
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(cfg_.B);
  if (cod.rank() < m_)
    throw ConfigError("MracPpfController: B is rank deficient");
  B_pinv_ = cod.pseudoInverse();
  kg_ = feedforward_gain(cfg_.Am, cfg_.B, Matrix::Identity(n_, n_));

  // Envelope containment is one-sided per channel: the unit side caps the
  // initial-error sign, the delta side limits over/undershoot. e(0) = 0
  // (x_m starts at x), so the positive branch applies everywhere.
  validate(cfg_.envelope);
  if (!(cfg_.delta > 0.0 && cfg_.delta <= 1.0))
    throw ConfigError("MracPpfController: delta must be in (0, 1]");
  for (int i = 0; i < n_; ++i) {
    PerformanceEnvelope env = cfg_.envelope;
    env.delta_bar = 1.0;
    env.delta_under = cfg_.delta;
    envs_.push_back(env);
  }
  if (cfg_.K.size() > 0 && (cfg_.K.rows() != n_ || cfg_.K.cols() != n_))
    throw ConfigError("MracPpfController: K must be n x n");
}

int MracPpfController::state_dim() const { return n_ + n_ * n_ + l_ * n_; }

StateVector MracPpfController::initial_state(const StateVector& x0) const {
  StateVector xc = StateVector::Zero(state_dim());
  xc.head(n_) = x0.head(n_);  // x_m(0) = x(0)
  return xc;
}

Matrix MracPpfController::sigma_from_state(const StateVector& xc,
                                           const Eigen::VectorXd& eps) const {
  const Matrix s = Eigen::Map<const Matrix>(xc.data() + off_s(), l_, n_);
  Matrix sigma(l_, n_);
  for (int i = 0; i < n_; ++i) {
    // Integral state plus an algebraic correction: the eps feedthrough acts
    // as a high-gain term opposing the transformed error, saturating at
    // psi/upsilon, while the |eps| term damps the estimate itself.
    const double bg = cfg_.beta[i] * cfg_.gamma2[i];
    sigma.col(i) = (s.col(i) + bg * eps[i] * cfg_.psi) /
                   (1.0 + bg * std::abs(eps[i]) * cfg_.upsilon[i]);
  }
  return sigma;
}

void MracPpfController::eval(double t, const StateVector& x,
                             const StateVector& xc, Eigen::VectorXd& e,
                             Eigen::VectorXd& rho_t, Eigen::VectorXd& rho_dot,
                             Eigen::VectorXd& eps,
                             Eigen::VectorXd& gamma_diag,
                             Eigen::VectorXd& phi_diag) const {
  e = x.head(n_) - xc.head(n_);
  rho_t.resize(n_);
  rho_dot.resize(n_);
  eps.resize(n_);
  for (int i = 0; i < n_; ++i) {
    auto [r, rd] = rho(envs_[i], t);
    rho_t[i] = r;
    rho_dot[i] = rd;
    eps[i] = transform(e[i], r, envs_[i], t, i);
  }
  gamma_phi(e, rho_t, envs_, gamma_diag, phi_diag, t);
}

StateVector MracPpfController::control(double t, const StateVector& x,
                                       const StateVector& xc) const {
  Eigen::VectorXd e, rho_t, rho_dot, eps, gd, pd;
  eval(t, x, xc, e, rho_t, rho_dot, eps, gd, pd);
  const Matrix theta =
      Eigen::Map<const Matrix>(xc.data() + off_theta(), n_, n_);
  const Matrix sigma = sigma_from_state(xc, eps);

  // V_n = Gamma^-1 V with V = Gamma(Am e - B kg r) + Phi rho_dot.
  Eigen::VectorXd vn = cfg_.Am * e - cfg_.B * (kg_ * ref_.r(t));
  vn += (pd.array() * rho_dot.array() / gd.array()).matrix();
  if (cfg_.K.size() > 0)
    vn += cfg_.K * (eps.array() / gd.array()).matrix();

  Eigen::VectorXd ur(m_);
  for (int i = 0; i < m_; ++i) {
    const double s = cfg_.eps_smooth > 0.0
                         ? std::tanh(eps[i] / cfg_.eps_smooth)
                         : (eps[i] > 0.0 ? 1.0 : (eps[i] < 0.0 ? -1.0 : 0.0));
    ur[i] = -s * cfg_.alpha_bar[i];
  }

  const Eigen::VectorXd u_ad =
      B_pinv_ * (-theta.transpose() * x.head(n_) - sigma.transpose() * cfg_.psi -
                 vn) +
      ur;
  return -cfg_.km * x.head(n_) + u_ad;
}

StateVector MracPpfController::derivative(double t, const StateVector& x,
                                          const Eigen::VectorXd& u,
                                          const StateVector& xc) const {
  (void)u;
  Eigen::VectorXd e, rho_t, rho_dot, eps, gd, pd;
  eval(t, x, xc, e, rho_t, rho_dot, eps, gd, pd);
  const Matrix sigma = sigma_from_state(xc, eps);

  StateVector dxc(state_dim());
  dxc.head(n_) = cfg_.Am * xc.head(n_) + cfg_.B * (kg_ * ref_.r(t));

  Eigen::Map<Matrix> dtheta(dxc.data() + off_theta(), n_, n_);
  Eigen::Map<Matrix> ds(dxc.data() + off_s(), l_, n_);
  for (int i = 0; i < n_; ++i) {
    // Gradient direction: positive eps asks for more negative u, i.e. a
    // larger theta^T x term, so theta moves along +eps*x.
    dtheta.col(i) = cfg_.gamma1[i] * eps[i] * gd[i] * x.head(n_);
    ds.col(i) = gd[i] * cfg_.gamma2[i] *
                (-std::abs(eps[i]) * cfg_.upsilon[i] * sigma.col(i) +
                 eps[i] * cfg_.psi);
  }
  return dxc;
}

Eigen::VectorXd MracPpfController::reference(double t) const {
  return ref_.r(t);
}

Eigen::VectorXd MracPpfController::tracking_error(double t,
                                                  const StateVector& x,
                                                  const StateVector& xc) const {
  (void)t;
  return x.head(n_) - xc.head(n_);
}

Eigen::VectorXd MracPpfController::estimate_trace(double, const StateVector&,
                                                  const StateVector& xc) const {
  return xc.head(n_);
}

Eigen::VectorXd MracPpfController::envelope_radius(double t) const {
  Eigen::VectorXd out(n_);
  for (int i = 0; i < n_; ++i) out[i] = rho(envs_[i], t).first;
  return out;
}

Eigen::VectorXd MracPpfController::transformed_error(
    double t, const StateVector& x, const StateVector& xc) const {
  Eigen::VectorXd e, rho_t, rho_dot, eps, gd, pd;
  eval(t, x, xc, e, rho_t, rho_dot, eps, gd, pd);
  return eps;
}

void MracPpfController::check_invariants(double t, const StateVector& x,
                                         const StateVector& xc) const {
  const Eigen::VectorXd e = x.head(n_) - xc.head(n_);
  for (int i = 0; i < n_; ++i) {
    const double r = rho(envs_[i], t).first;
    const double xi = e[i] / r;
    if (!(xi > -envs_[i].delta_under && xi < envs_[i].delta_bar))
      throw EnvelopeViolation(t, i, e[i], r);
  }
}

MracEstimates MracPpfController::estimates(double t, const StateVector& x,
                                           const StateVector& xc) const {
  Eigen::VectorXd e, rho_t, rho_dot, eps, gd, pd;
  eval(t, x, xc, e, rho_t, rho_dot, eps, gd, pd);
  MracEstimates est;
  est.theta_hat = Eigen::Map<const Matrix>(xc.data() + off_theta(), n_, n_);
  est.sigma_hat = sigma_from_state(xc, eps);
  return est;
}

}  // namespace adaptctl
