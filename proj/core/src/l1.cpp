#include "adaptctl/l1.hpp"

#include <cmath>
#include <limits>

#include "adaptctl/errors.hpp"
#include "adaptctl/gains.hpp"
#include "adaptctl/lyapunov.hpp"
#include "adaptctl/projection.hpp"

namespace adaptctl {

namespace {

// Materialize the entrywise omega intervals: diagonal entries live in
// [omega_l, omega_u], off-diagonal entries in a centered interval of the
// same width.
void omega_intervals(const ProjectionBounds& b, int m, Matrix& lo,
                     Matrix& hi) {
  if (b.omega_lo.size() > 0) {
    if (b.omega_lo.rows() != m || b.omega_hi.rows() != m ||
        b.omega_lo.cols() != m || b.omega_hi.cols() != m)
      throw ConfigError("omega bounds: entrywise interval shape mismatch");
    lo = b.omega_lo;
    hi = b.omega_hi;
  } else {
    if (!(b.omega_u > b.omega_l))
      throw ConfigError("omega bounds: need omega_l < omega_u");
    const double half = 0.5 * (b.omega_u - b.omega_l);
    lo = Matrix::Constant(m, m, -half);
    hi = Matrix::Constant(m, m, half);
    lo.diagonal().setConstant(b.omega_l);
    hi.diagonal().setConstant(b.omega_u);
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (!(hi(i, j) > lo(i, j)))
        throw ConfigError("omega bounds: empty interval");
}

int theta_dim(const L1Config& cfg) {
  return cfg.variant == L1Variant::siso ? static_cast<int>(cfg.Am.rows())
                                        : static_cast<int>(cfg.B.cols());
}

}  // namespace

StateVector predictor_derivative(const L1Config& cfg,
                                 const AdaptiveEstimates& est,
                                 const StateVector& x,
                                 const StateVector& x_hat,
                                 const Eigen::VectorXd& u) {
  const int n = static_cast<int>(cfg.Am.rows());
  const int m = static_cast<int>(cfg.B.cols());
  if (x.size() != n || x_hat.size() != n || u.size() != m ||
      est.theta_hat.size() != theta_dim(cfg) || est.sigma_hat.size() != m)
    throw ConfigError("predictor_derivative: dimension mismatch");

  Eigen::VectorXd eta = est.omega_hat * u + est.sigma_hat;
  if (cfg.variant == L1Variant::siso) {
    eta[0] += est.theta_hat.dot(x);
  } else {
    eta += est.theta_hat * x.lpNorm<Eigen::Infinity>();
  }
  StateVector dx = cfg.Am * x_hat + cfg.B * eta;
  if (cfg.variant == L1Variant::unmatched) {
    if (cfg.Bum.rows() != n || est.theta2_hat.size() != cfg.Bum.cols())
      throw ConfigError("predictor_derivative: unmatched basis mismatch");
    dx += cfg.Bum * (est.theta2_hat * x.lpNorm<Eigen::Infinity>() +
                     est.sigma2_hat);
  }
  return dx;
}

AdaptiveEstimates adaptation_derivative(const L1Config& cfg,
                                        const AdaptiveEstimates& est,
                                        const StateVector& x_tilde,
                                        const StateVector& x,
                                        const Eigen::VectorXd& u,
                                        const Matrix& P) {
  const int m = static_cast<int>(cfg.B.cols());
  const Eigen::VectorXd w = (x_tilde.transpose() * P * cfg.B).transpose();
  const double xinf = x.lpNorm<Eigen::Infinity>();

  Matrix lo, hi;
  omega_intervals(cfg.bounds, m, lo, hi);
  AdaptiveEstimates d;
  const Matrix raw_omega = -w * u.transpose();
  d.omega_hat.resize(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      d.omega_hat(i, j) =
          cfg.gamma * project(est.omega_hat(i, j), raw_omega(i, j), lo(i, j),
                              hi(i, j), cfg.bounds.eps);

  const Eigen::VectorXd raw_theta =
      cfg.variant == L1Variant::siso ? Eigen::VectorXd(-w[0] * x)
                                     : Eigen::VectorXd(-w * xinf);
  d.theta_hat = cfg.gamma * project(est.theta_hat, raw_theta,
                                    cfg.bounds.theta_b, cfg.bounds.eps);
  d.sigma_hat = cfg.gamma * project(est.sigma_hat, Eigen::VectorXd(-w),
                                    cfg.bounds.delta_b, cfg.bounds.eps);

  if (cfg.variant == L1Variant::unmatched) {
    const Eigen::VectorXd w2 =
        (x_tilde.transpose() * P * cfg.Bum).transpose();
    d.theta2_hat =
        cfg.gamma * project(est.theta2_hat, Eigen::VectorXd(-w2 * xinf),
                            cfg.bounds.theta_b2, cfg.bounds.eps);
    d.sigma2_hat = cfg.gamma * project(est.sigma2_hat, Eigen::VectorXd(-w2),
                                       cfg.bounds.delta_b2, cfg.bounds.eps);
  }
  return d;
}

Matrix unmatched_complement(const Matrix& Bm) {
  const int n = static_cast<int>(Bm.rows());
  const int m = static_cast<int>(Bm.cols());
  Eigen::ColPivHouseholderQR<Matrix> rank_check(Bm);
  if (rank_check.rank() < m)
    throw ConfigError("unmatched_complement: Bm is rank deficient");
  Eigen::HouseholderQR<Matrix> qr(Bm);
  Matrix Qfull = qr.householderQ() * Matrix::Identity(n, n);
  return Qfull.rightCols(n - m);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> decompose_unmatched(
    const Matrix& Bm, const Eigen::VectorXd& f) {
  const int n = static_cast<int>(Bm.rows());
  const int m = static_cast<int>(Bm.cols());
  if (f.size() != n) throw ConfigError("decompose_unmatched: size mismatch");
  Matrix Bum = unmatched_complement(Bm);
  Matrix Bfull(n, n);
  Bfull << Bm, Bum;
  Eigen::VectorXd coords = Bfull.fullPivLu().solve(f);
  return {coords.head(m), coords.tail(n - m)};
}

double theta_m_bound(const L1Config& cfg, const Matrix& P, double d_theta,
                     double d_sigma) {
  const int n = static_cast<int>(cfg.Am.rows());
  const int m = static_cast<int>(cfg.B.cols());
  const Matrix Q = cfg.Q.size() > 0 ? cfg.Q : Matrix::Identity(n, n);
  Eigen::SelfAdjointEigenSolver<Matrix> esP(P), esQ(Q);
  const double ratio =
      esP.eigenvalues().maxCoeff() / esQ.eigenvalues().minCoeff();
  const ProjectionBounds& b = cfg.bounds;

  if (cfg.variant == L1Variant::siso) {
    return b.theta_b * b.theta_b + 4.0 * b.delta_b * b.delta_b +
           (b.omega_u - b.omega_l) * (b.omega_u - b.omega_l) +
           4.0 * ratio * (d_theta * b.theta_b + d_sigma * b.delta_b);
  }

  Matrix lo, hi;
  omega_intervals(b, m, lo, hi);
  const double tr_max =
      lo.array().square().max(hi.array().square()).sum();

  if (cfg.variant == L1Variant::mimo) {
    return 4.0 * (b.theta_b * b.theta_b * m + b.delta_b * b.delta_b * m +
                  tr_max +
                  m * ratio * (d_theta * b.theta_b + d_sigma * b.delta_b));
  }
  const int num = n - m;
  return 4.0 * ((b.theta_b * b.theta_b + b.delta_b * b.delta_b) * m +
                (b.theta_b2 * b.theta_b2 + b.delta_b2 * b.delta_b2) * num +
                tr_max +
                4.0 * ratio *
                    ((d_theta * b.theta_b + d_sigma * b.delta_b) * m +
                     (d_theta * b.theta_b2 + d_sigma * b.delta_b2) * num));
}

double xtilde_bound(const L1Config& cfg, const Matrix& P, double d_theta,
                    double d_sigma) {
  Eigen::SelfAdjointEigenSolver<Matrix> esP(P);
  return std::sqrt(theta_m_bound(cfg, P, d_theta, d_sigma) /
                   (esP.eigenvalues().minCoeff() * cfg.gamma));
}

namespace {

// L1 norm of a MIMO transfer as max row sum of the entrywise impulse norms.
double transfer_l1(const Matrix& A, const Matrix& B, const Matrix& C) {
  Matrix entry = l1_norm_ss(A, B, C);
  return entry.rowwise().sum().maxCoeff();
}

}  // namespace

NormConditionReport norm_condition_report(
    const L1Config& cfg, double L, double B0, double r_inf,
    const std::vector<double>& rho_candidates, double rho_in,
    int omega_grid) {
  const int n = static_cast<int>(cfg.Am.rows());
  const int m = static_cast<int>(cfg.B.cols());
  const int p = static_cast<int>(cfg.C.rows());
  StateSpaceRealization F = realize(cfg.D);
  if (!cfg.D.strictly_proper())
    throw ConfigError(
        "norm_condition_report: D(s) must be strictly proper");
  const int nf = F.order();
  const Matrix Kg = feedforward_gain(cfg.Am, cfg.B, cfg.C);

  double w_lo = cfg.bounds.omega_l, w_hi = cfg.bounds.omega_u;
  if (cfg.bounds.omega_lo.size() > 0) {
    w_lo = cfg.bounds.omega_lo.diagonal().minCoeff();
    w_hi = cfg.bounds.omega_hi.diagonal().maxCoeff();
  }
  if (!(w_lo > 0.0))
    throw ConfigError("norm_condition_report: omega interval must be > 0");

  NormConditionReport rep;
  rep.rho_in = rho_in;
  const int pts = std::max(1, omega_grid);
  for (int gi = 0; gi < pts; ++gi) {
    const double omega =
        pts == 1 ? w_lo : w_lo + (w_hi - w_lo) * gi / (pts - 1.0);
    const double g = omega * cfg.k;  // scalar loop gain per channel
    const Matrix Acl = F.A - g * F.B * F.C;
    if (!is_hurwitz(Acl))
      throw StabilityError(
          "norm_condition_report: filter loop unstable at omega=" +
          std::to_string(omega));

    const int na = m * nf + n;
    // G = H(s)(I - C(s)): x' = Am x + B(xi - y), y_j = g Cf xf_j
    Matrix Ag = Matrix::Zero(na, na), Bg = Matrix::Zero(na, m),
           Cg = Matrix::Zero(n, na);
    for (int j = 0; j < m; ++j) {
      Ag.block(j * nf, j * nf, nf, nf) = Acl;
      Bg.block(j * nf, j, nf, 1) = F.B;
      Ag.block(m * nf, j * nf, n, nf) = -cfg.B.col(j) * (g * F.C);
    }
    Ag.block(m * nf, m * nf, n, n) = cfg.Am;
    Bg.block(m * nf, 0, n, m) = cfg.B;
    Cg.rightCols(n) = Matrix::Identity(n, n);
    rep.G_l1 = std::max(rep.G_l1, transfer_l1(Ag, Bg, Cg));

    // H C Kg: filter input Kg r, x' = Am x + B y
    Matrix Ah = Ag, Bh = Matrix::Zero(na, p);
    for (int j = 0; j < m; ++j) {
      Ah.block(m * nf, j * nf, n, nf) = cfg.B.col(j) * (g * F.C);
      Bh.block(j * nf, 0, nf, p) = F.B * Kg.row(j);
    }
    Bh.bottomRows(n).setZero();
    rep.HCKg_l1 = std::max(rep.HCKg_l1, transfer_l1(Ah, Bh, Cg));

    // omega^-1 C(s): scalar channel, the omega factors cancel to k.
    rep.omega_inv_C_l1 = std::max(
        rep.omega_inv_C_l1, transfer_l1(Acl, F.B, cfg.k * F.C));
  }

  rep.GL = rep.G_l1 * L;
  rep.stability_margin = 1.0 - rep.GL;
  rep.stable = rep.GL < 1.0;
  rep.rho_candidates = rho_candidates;
  for (double rho : rho_candidates) {
    const double denom = L * rho + B0;
    const double numer = rho - rep.HCKg_l1 * r_inf - rho_in;
    double margin;
    if (denom <= 0.0)
      margin = numer > 0.0 ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
    else
      margin = numer / denom - rep.G_l1;
    rep.margins.push_back(margin);
  }
  if (rep.stable) {
    rep.rho_r = (rep.G_l1 * B0 + rep.HCKg_l1 * r_inf + rho_in) /
                (1.0 - rep.GL);
    const double kg_norm =
        Kg.cwiseAbs().rowwise().sum().maxCoeff();  // induced inf-norm
    rep.rho_ur =
        rep.omega_inv_C_l1 * (kg_norm * r_inf + L * rep.rho_r + B0);
  } else {
    rep.rho_r = std::numeric_limits<double>::quiet_NaN();
    rep.rho_ur = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

L1Controller::L1Controller(L1Config cfg, ReferenceSignal ref)
    : cfg_(std::move(cfg)), ref_(std::move(ref)) {
  n_ = static_cast<int>(cfg_.Am.rows());
  m_ = static_cast<int>(cfg_.B.cols());
  p_ = static_cast<int>(cfg_.C.rows());
  if (cfg_.B.rows() != n_ || cfg_.C.cols() != n_)
    throw ConfigError("L1Controller: skeleton dimension mismatch");
  if (!(cfg_.gamma > 0.0)) throw ConfigError("L1Controller: gamma must be > 0");
  if (!(cfg_.k > 0.0)) throw ConfigError("L1Controller: k must be > 0");
  if (ref_.dim != p_)
    throw ConfigError("L1Controller: reference dim != output dim");
  if (!cfg_.D.strictly_proper())
    throw ConfigError(
        "L1Controller: D(s) with feedthrough closes an algebraic loop "
        "through omega_hat; use a strictly proper filter");
  filt_ = realize(cfg_.D);
  nf_ = filt_.order();

  if (cfg_.Q.size() == 0) cfg_.Q = Matrix::Identity(n_, n_);
  P_ = solve_lyapunov(cfg_.Am, cfg_.Q).P;
  Kg_ = feedforward_gain(cfg_.Am, cfg_.B, cfg_.C);

  nth_ = theta_dim(cfg_);
  nun_ = cfg_.variant == L1Variant::unmatched ? n_ - m_ : 0;
  if (cfg_.variant == L1Variant::unmatched) {
    if (cfg_.Bum.size() == 0) cfg_.Bum = unmatched_complement(cfg_.B);
    Eigen::FullPivLU<Matrix> lu(cfg_.Am);
    const Matrix Hm0 = cfg_.C * lu.solve(cfg_.B);
    const Matrix Hum0 = cfg_.C * lu.solve(cfg_.Bum);
    M2_ = Hm0.fullPivLu().solve(Hum0);
  }

  // C(s) = omega k D/(1 + omega k D) must be stable across the gain set.
  Matrix lo, hi;
  omega_intervals(cfg_.bounds, m_, lo, hi);
  for (double w : {lo.diagonal().minCoeff(), hi.diagonal().maxCoeff()}) {
    if (!is_hurwitz(filt_.A - (w * cfg_.k) * filt_.B * filt_.C))
      throw StabilityError(
          "L1Controller: filter loop unstable at an omega interval endpoint");
  }

  if (cfg_.omega_hat0.size() == 0)
    cfg_.omega_hat0 = 0.5 * (lo + hi);
  else if (cfg_.omega_hat0.rows() != m_ || cfg_.omega_hat0.cols() != m_)
    throw ConfigError("L1Controller: omega_hat0 shape mismatch");
}

int L1Controller::state_dim() const { return off_filter() + nf_ * m_; }

StateVector L1Controller::initial_state(const StateVector& x0) const {
  StateVector xc = StateVector::Zero(state_dim());
  xc.head(n_) = x0.head(n_);  // x_hat(0) = x(0)
  Eigen::Map<Matrix>(xc.data() + off_omega(), m_, m_) = cfg_.omega_hat0;
  return xc;
}

AdaptiveEstimates L1Controller::unpack(const StateVector& xc) const {
  AdaptiveEstimates est;
  est.omega_hat =
      Eigen::Map<const Matrix>(xc.data() + off_omega(), m_, m_);
  est.theta_hat = xc.segment(off_theta(), nth_);
  est.sigma_hat = xc.segment(off_sigma(), m_);
  if (nun_ > 0) {
    est.theta2_hat = xc.segment(off_theta2(), nun_);
    est.sigma2_hat = xc.segment(off_sigma2(), nun_);
  }
  return est;
}

void L1Controller::pack(const AdaptiveEstimates& est, StateVector& xc) const {
  Eigen::Map<Matrix>(xc.data() + off_omega(), m_, m_) = est.omega_hat;
  xc.segment(off_theta(), nth_) = est.theta_hat;
  xc.segment(off_sigma(), m_) = est.sigma_hat;
  if (nun_ > 0) {
    xc.segment(off_theta2(), nun_) = est.theta2_hat;
    xc.segment(off_sigma2(), nun_) = est.sigma2_hat;
  }
}

StateVector L1Controller::control(double t, const StateVector& x,
                                  const StateVector& xc) const {
  (void)t;
  (void)x;
  Eigen::VectorXd u(m_);
  for (int j = 0; j < m_; ++j)
    u[j] = (filt_.C * xc.segment(off_filter() + j * nf_, nf_))(0);
  return u;
}

Eigen::VectorXd L1Controller::eta_hat(double t, const StateVector& x,
                                      const Eigen::VectorXd& u,
                                      const StateVector& xc) const {
  (void)t;
  AdaptiveEstimates est = unpack(xc);
  Eigen::VectorXd eta = est.omega_hat * u + est.sigma_hat;
  if (cfg_.variant == L1Variant::siso) {
    eta[0] += est.theta_hat.dot(x.head(n_));
  } else {
    eta += est.theta_hat * x.head(n_).lpNorm<Eigen::Infinity>();
  }
  if (cfg_.variant == L1Variant::unmatched) {
    eta += M2_ * (est.theta2_hat * x.head(n_).lpNorm<Eigen::Infinity>() +
                  est.sigma2_hat);
  }
  return eta;
}

StateVector L1Controller::derivative(double t, const StateVector& x,
                                     const Eigen::VectorXd& u,
                                     const StateVector& xc) const {
  const StateVector xm = x.head(n_);
  const StateVector xh = xc.head(n_);
  AdaptiveEstimates est = unpack(xc);
  StateVector dxc = StateVector::Zero(state_dim());
  dxc.head(n_) = predictor_derivative(cfg_, est, xm, xh, u);
  AdaptiveEstimates dest =
      adaptation_derivative(cfg_, est, StateVector(xh - xm), xm, u, P_);
  pack(dest, dxc);

  const Eigen::VectorXd v =
      loop_gain(t, x, xc) * (Kg_ * ref_.r(t) - eta_hat(t, xm, u, xc));
  for (int j = 0; j < m_; ++j) {
    dxc.segment(off_filter() + j * nf_, nf_) =
        filt_.A * xc.segment(off_filter() + j * nf_, nf_) + filt_.B * v[j];
  }
  return dxc;
}

double L1Controller::loop_gain(double, const StateVector&,
                               const StateVector&) const {
  return cfg_.k;
}

Eigen::VectorXd L1Controller::output_rate(double t, const StateVector& x,
                                          const Eigen::VectorXd& u,
                                          const StateVector& xc) const {
  return cfg_.C *
         predictor_derivative(cfg_, unpack(xc), x.head(n_), xc.head(n_), u);
}

Eigen::VectorXd L1Controller::reference(double t) const { return ref_.r(t); }

Eigen::VectorXd L1Controller::tracking_error(double t, const StateVector& x,
                                             const StateVector& xc) const {
  (void)xc;
  return cfg_.C * x.head(n_) - ref_.r(t);
}

Eigen::VectorXd L1Controller::estimate_trace(double, const StateVector&,
                                             const StateVector& xc) const {
  return xc.head(n_);
}

void L1Controller::check_invariants(double t, const StateVector& x,
                                    const StateVector& xc) const {
  (void)x;
  const AdaptiveEstimates est = unpack(xc);
  const ProjectionBounds& b = cfg_.bounds;
  const double infl = 1.0 + b.eps + 1e-9;
  auto fail = [t](const std::string& what) {
    throw InvariantError("t=" + std::to_string(t) +
                         ": estimate escaped its bound set (" + what + ")");
  };
  Matrix lo, hi;
  omega_intervals(b, m_, lo, hi);
  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < m_; ++j) {
      const double c = 0.5 * (lo(i, j) + hi(i, j));
      const double rad = 0.5 * (hi(i, j) - lo(i, j)) * infl;
      if (std::abs(est.omega_hat(i, j) - c) > rad) fail("omega_hat");
    }
  }
  if (est.theta_hat.norm() > b.theta_b * infl) fail("theta_hat");
  if (est.sigma_hat.norm() > b.delta_b * infl) fail("sigma_hat");
  if (nun_ > 0) {
    if (est.theta2_hat.norm() > b.theta_b2 * infl) fail("theta2_hat");
    if (est.sigma2_hat.norm() > b.delta_b2 * infl) fail("sigma2_hat");
  }
}

}  // namespace adaptctl
