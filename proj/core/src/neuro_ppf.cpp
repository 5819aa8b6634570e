#include "adaptctl/neuro_ppf.hpp"

#include <cmath>
#include <random>

#include "adaptctl/errors.hpp"

namespace adaptctl {

RegressorBank make_regressor_bank(int p, int n, int m, std::uint64_t seed) {
  if (p <= 0 || n <= 0 || m <= 0)
    throw ConfigError("make_regressor_bank: dimensions must be positive");
  if (p % (m + m * m) != 0)
    throw ConfigError(
        "make_regressor_bank: p must split evenly into m + m^2 sub-banks");
  RegressorBank bank;
  bank.m = m;
  bank.W.resize(p, n);
  bank.b.resize(p);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uw(-1.0, 1.0), ub(-2.0, 2.0);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < n; ++j) bank.W(i, j) = uw(rng);
  }
  for (int i = 0; i < p; ++i) bank.b[i] = ub(rng);
  return bank;
}

Eigen::VectorXd regressors(const RegressorBank& bank,
                           const Eigen::VectorXd& x) {
  if (x.size() != bank.W.cols())
    throw ConfigError("regressors: state dimension mismatch");
  Eigen::VectorXd a = bank.W * x + bank.b;
  return (1.0 + (-a.array()).exp()).inverse().matrix();
}

Approximation approximate(const RegressorBank& bank,
                          const Eigen::VectorXd& theta_hat,
                          const Eigen::VectorXd& x) {
  const int p = static_cast<int>(bank.b.size());
  const int m = bank.m;
  const int blk = bank.block();
  if (theta_hat.size() != p)
    throw ConfigError("approximate: theta dimension mismatch");
  const Eigen::VectorXd zeta = regressors(bank, x);

  Approximation out;
  out.Z_f = Matrix::Zero(p, m);
  out.F_f.resize(m);
  for (int i = 0; i < m; ++i) {
    out.Z_f.block(i * blk, i, blk, 1) = zeta.segment(i * blk, blk);
    out.F_f[i] = zeta.segment(i * blk, blk).dot(theta_hat.segment(i * blk, blk));
  }
  out.F_G.resize(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const int off = (m + i * m + j) * blk;
      out.F_G(i, j) =
          zeta.segment(off, blk).dot(theta_hat.segment(off, blk));
    }
  }
  return out;
}

Matrix a_f(const RegressorBank& bank, const Eigen::VectorXd& zeta,
           const Eigen::VectorXd& v) {
  const int p = static_cast<int>(bank.b.size());
  const int m = bank.m;
  const int blk = bank.block();
  if (v.size() != m) throw ConfigError("a_f: v dimension mismatch");
  Matrix A = Matrix::Zero(m, p);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const int off = (m + i * m + j) * blk;
      A.block(i, off, 1, blk) = v[j] * zeta.segment(off, blk).transpose();
    }
  }
  return A;
}

Eigen::VectorXd metric_error(const Eigen::VectorXd& eps,
                             const Eigen::VectorXd& eps_dot,
                             const Eigen::VectorXd& lambda) {
  if (eps.size() != eps_dot.size() || eps.size() != lambda.size())
    throw ConfigError("metric_error: size mismatch");
  return eps_dot + lambda.cwiseProduct(eps);
}

Matrix adjugate(const Matrix& M) {
  const int n = static_cast<int>(M.rows());
  if (M.cols() != n) throw ConfigError("adjugate: square matrix required");
  if (n == 1) return Matrix::Identity(1, 1);
  Matrix adj(n, n);
  Matrix minor(n - 1, n - 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      int mr = 0;
      for (int r = 0; r < n; ++r) {
        if (r == i) continue;
        int mc = 0;
        for (int c = 0; c < n; ++c) {
          if (c == j) continue;
          minor(mr, mc++) = M(r, c);
        }
        ++mr;
      }
      const double cof = ((i + j) % 2 == 0 ? 1.0 : -1.0) *
                         (n == 2 ? minor(0, 0) : minor.determinant());
      adj(j, i) = cof;  // adjugate = cofactor transpose
    }
  }
  return adj;
}

Eigen::VectorXd regularized_inverse(const Matrix& F_G,
                                    const Eigen::VectorXd& nu_b,
                                    double delta_d) {
  const double det = F_G.determinant();
  return -(adjugate(F_G) * nu_b) * det / (det * det + delta_d);
}

NeuroPpfController::NeuroPpfController(NeuroPpfConfig cfg, ReferenceSignal ref)
    : cfg_(std::move(cfg)), ref_(std::move(ref)) {
  m_ = ref_.dim;
  if (cfg_.lambda.size() != m_)
    throw ConfigError("NeuroPpfController: lambda size != channel count");
  for (int i = 0; i < m_; ++i)
    if (!(cfg_.lambda[i] > 0.0))
      throw ConfigError("NeuroPpfController: lambda must be > 0");
  validate(cfg_.envelope);
  if (!(cfg_.delta > 0.0 && cfg_.delta <= 1.0))
    throw ConfigError("NeuroPpfController: delta must be in (0, 1]");
  for (int i = 0; i < m_; ++i) {
    PerformanceEnvelope env = cfg_.envelope;
    env.delta_bar = 1.0;
    env.delta_under = cfg_.delta;
    envs_.push_back(env);
  }
  bank_ = make_regressor_bank(cfg_.p, 2 * m_, m_, cfg_.seed);
  if (cfg_.theta0.size() == 0) cfg_.theta0 = Eigen::VectorXd::Zero(cfg_.p);
  if (cfg_.theta0.size() != cfg_.p)
    throw ConfigError("NeuroPpfController: theta0 size != p");
}

StateVector NeuroPpfController::initial_state(const StateVector& x0) const {
  const Eigen::VectorXd e0 = x0.head(m_) - ref_.r(0.0);
  for (int i = 0; i < m_; ++i) {
    // Unit side caps the initial-error sign; delta limits the other side.
    envs_[i].delta_bar = e0[i] >= 0.0 ? 1.0 : cfg_.delta;
    envs_[i].delta_under = e0[i] >= 0.0 ? cfg_.delta : 1.0;
  }
  return cfg_.theta0;
}

NeuroPpfController::Eval NeuroPpfController::eval(double t,
                                                  const StateVector& x,
                                                  const StateVector& xc) const {
  Eval ev;
  const Eigen::VectorXd q = x.head(m_);
  const Eigen::VectorXd qd = x.segment(m_, m_);
  const Eigen::VectorXd rd = ref_.r(t);
  const Eigen::VectorXd rd_dot = ref_.r_dot(t);
  const Eigen::VectorXd rd_ddot = ref_.r_ddot(t);
  ev.e = q - rd;
  ev.edot = qd - rd_dot;

  ev.eps.resize(m_);
  ev.eps_dot.resize(m_);
  ev.Rdiag.resize(m_);
  ev.V.resize(m_);
  for (int i = 0; i < m_; ++i) {
    const auto& env = envs_[i];
    auto [rho_t, rho_dot] = rho(env, t);
    const double rdd = rho_ddot(env, t);
    const double xi = ev.e[i] / rho_t;
    ev.eps[i] = transform(ev.e[i], rho_t, env, t, i);
    const double tp = transform_slope(xi, env);
    const double tpp = transform_curvature(xi, env);
    const double xi_dot =
        ev.edot[i] / rho_t - ev.e[i] * rho_dot / (rho_t * rho_t);
    ev.eps_dot[i] = tp * xi_dot;
    ev.Rdiag[i] = tp / rho_t;
    // Everything in eps_ddot except the R qddot term, plus lambda eps_dot.
    ev.V[i] = tpp * xi_dot * xi_dot +
              tp * (-rd_ddot[i] / rho_t -
                    2.0 * ev.edot[i] * rho_dot / (rho_t * rho_t) -
                    ev.e[i] * rdd / (rho_t * rho_t) +
                    2.0 * ev.e[i] * rho_dot * rho_dot /
                        (rho_t * rho_t * rho_t)) +
              cfg_.lambda[i] * ev.eps_dot[i];
  }
  ev.E = metric_error(ev.eps, ev.eps_dot, cfg_.lambda);

  ev.zeta = regressors(bank_, x.head(2 * m_));
  Approximation ap = approximate(bank_, xc, x.head(2 * m_));
  ev.F_G = ap.F_G;
  ev.Z_f = ap.Z_f;

  const Eigen::VectorXd Rinv_V =
      (ev.V.array() / ev.Rdiag.array()).matrix();
  const Eigen::VectorXd Rinv_E =
      (ev.E.array() / ev.Rdiag.array()).matrix();
  const Eigen::VectorXd Rt_E = ev.Rdiag.cwiseProduct(ev.E);  // R diagonal
  ev.nu_b = ap.F_f + Rinv_V + cfg_.k * Rinv_E + cfg_.n_f * Rt_E;
  ev.nu_a = regularized_inverse(ev.F_G, ev.nu_b, cfg_.delta_d);
  ev.u = ev.nu_a - (cfg_.eta_ga * ev.nu_a.squaredNorm() +
                    cfg_.eta_gb * ev.nu_b.squaredNorm()) *
                       Rt_E * cfg_.sign_g;
  return ev;
}

StateVector NeuroPpfController::control(double t, const StateVector& x,
                                        const StateVector& xc) const {
  return eval(t, x, xc).u;
}

StateVector NeuroPpfController::derivative(double t, const StateVector& x,
                                           const Eigen::VectorXd& u,
                                           const StateVector& xc) const {
  (void)u;
  Eval ev = eval(t, x, xc);
  const Matrix AF = a_f(bank_, ev.zeta, ev.nu_a);
  const Eigen::VectorXd Rt_E = ev.Rdiag.cwiseProduct(ev.E);
  return cfg_.gamma * ((ev.Z_f.transpose() + AF).transpose() * Rt_E -
                       cfg_.sigma * (xc - cfg_.theta0));
}

Eigen::VectorXd NeuroPpfController::reference(double t) const {
  return ref_.r(t);
}

Eigen::VectorXd NeuroPpfController::tracking_error(double t,
                                                   const StateVector& x,
                                                   const StateVector&) const {
  return x.head(m_) - ref_.r(t);
}

Eigen::VectorXd NeuroPpfController::estimate_trace(double t,
                                                   const StateVector&,
                                                   const StateVector&) const {
  Eigen::VectorXd out(2 * m_);
  out.head(m_) = ref_.r(t);
  out.tail(m_) = ref_.r_dot(t);
  return out;
}

Eigen::VectorXd NeuroPpfController::envelope_radius(double t) const {
  Eigen::VectorXd out(m_);
  for (int i = 0; i < m_; ++i) out[i] = rho(envs_[i], t).first;
  return out;
}

Eigen::VectorXd NeuroPpfController::transformed_error(
    double t, const StateVector& x, const StateVector&) const {
  Eigen::VectorXd eps(m_);
  const Eigen::VectorXd e = x.head(m_) - ref_.r(t);
  for (int i = 0; i < m_; ++i)
    eps[i] = transform(e[i], rho(envs_[i], t).first, envs_[i], t, i);
  return eps;
}

void NeuroPpfController::check_invariants(double t, const StateVector& x,
                                          const StateVector&) const {
  const Eigen::VectorXd e = x.head(m_) - ref_.r(t);
  for (int i = 0; i < m_; ++i) {
    const double r = rho(envs_[i], t).first;
    const double xi = e[i] / r;
    if (!(xi > -envs_[i].delta_under && xi < envs_[i].delta_bar))
      throw EnvelopeViolation(t, i, e[i], r);
  }
}

}  // namespace adaptctl
