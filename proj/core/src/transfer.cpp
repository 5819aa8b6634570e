#include "adaptctl/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "adaptctl/errors.hpp"
#include "adaptctl/integrate.hpp"

namespace adaptctl {

int RationalTransfer::effective_num_degree() const {
  for (int i = 0; i < num.size(); ++i) {
    if (num[i] != 0.0) return static_cast<int>(num.size()) - 1 - i;
  }
  return -1;  // zero numerator
}

Eigen::VectorXd poly_mul(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(a.size() + b.size() - 1);
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Eigen::VectorXd poly_add(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const auto n = std::max(a.size(), b.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  out.tail(a.size()) += a;
  out.tail(b.size()) += b;
  return out;
}

Eigen::VectorXd poly_trim(const Eigen::VectorXd& a) {
  int lead = 0;
  while (lead < a.size() - 1 && a[lead] == 0.0) ++lead;
  return a.tail(a.size() - lead);
}

std::vector<std::complex<double>> poly_roots(const Eigen::VectorXd& a_in) {
  Eigen::VectorXd a = poly_trim(a_in);
  const int deg = static_cast<int>(a.size()) - 1;
  std::vector<std::complex<double>> roots;
  if (deg < 1) return roots;
  if (a[0] == 0.0) throw NumericError("poly_roots: zero polynomial");
  Matrix comp = Matrix::Zero(deg, deg);
  for (int j = 0; j < deg; ++j) comp(0, j) = -a[j + 1] / a[0];
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  Eigen::EigenSolver<Matrix> es(comp);
  for (int i = 0; i < deg; ++i) roots.push_back(es.eigenvalues()[i]);
  return roots;
}

std::vector<std::complex<double>> poles(const RationalTransfer& tf) {
  if (tf.den.size() == 0 || tf.den[0] == 0.0)
    throw ConfigError("transfer: leading denominator coefficient is zero");
  return poly_roots(tf.den);
}

bool is_stable(const RationalTransfer& tf) {
  for (const auto& p : poles(tf)) {
    if (p.real() >= 0.0) return false;
  }
  return true;
}

StateSpaceRealization realize(const RationalTransfer& tf) {
  if (tf.den.size() == 0 || tf.den[0] == 0.0)
    throw ConfigError("realize: leading denominator coefficient is zero");
  const int nd = tf.den_degree();
  if (tf.effective_num_degree() > nd)
    throw ConfigError("realize: improper transfer function");

  // Normalize to monic denominator.
  Eigen::VectorXd den = tf.den / tf.den[0];
  Eigen::VectorXd num = Eigen::VectorXd::Zero(nd + 1);
  num.tail(tf.num.size()) = tf.num / tf.den[0];

  StateSpaceRealization ss;
  ss.D = Matrix::Constant(1, 1, num[0]);
  if (nd == 0) {
    ss.A = Matrix::Zero(0, 0);
    ss.B = Matrix::Zero(0, 1);
    ss.C = Matrix::Zero(1, 0);
    ss.state = StateVector::Zero(0);
    return ss;
  }
  ss.A = Matrix::Zero(nd, nd);
  for (int j = 0; j < nd; ++j) ss.A(0, j) = -den[j + 1];
  for (int i = 1; i < nd; ++i) ss.A(i, i - 1) = 1.0;
  ss.B = Matrix::Zero(nd, 1);
  ss.B(0, 0) = 1.0;
  // Strictly proper remainder: num - D*den, dropping the leading entry.
  ss.C = Matrix::Zero(1, nd);
  for (int j = 0; j < nd; ++j) ss.C(0, j) = num[j + 1] - num[0] * den[j + 1];
  ss.state = StateVector::Zero(nd);
  return ss;
}

namespace {

struct PoleSpread {
  double slowest;  // smallest |Re|
  double fastest;  // largest magnitude
};

PoleSpread pole_spread(const std::vector<std::complex<double>>& ps) {
  PoleSpread sp{1e300, 0.0};
  for (const auto& p : ps) {
    if (p.real() >= 0.0)
      throw StabilityError("l1_norm: transfer function is not stable");
    sp.slowest = std::min(sp.slowest, std::abs(p.real()));
    sp.fastest = std::max(sp.fastest, std::abs(p));
  }
  return sp;
}

Matrix impulse_l1(const Matrix& A, const Matrix& B, const Matrix& C,
                  double horizon, double dt, double slowest, double* tail) {
  const int p = static_cast<int>(C.rows());
  const int m = static_cast<int>(B.cols());
  Matrix acc = Matrix::Zero(p, m);
  Matrix last = Matrix::Zero(p, m);
  double max_tail = 0.0;
  for (int j = 0; j < m; ++j) {
    StateVector x = B.col(j);
    Eigen::VectorXd g = (C * x).cwiseAbs();
    const int steps = static_cast<int>(std::ceil(horizon / dt));
    DerivFn f = [&A](double, const StateVector& s) -> StateVector {
      return A * s;
    };
    for (int k = 0; k < steps; ++k) {
      x = rk4_step(f, x, k * dt, dt);
      Eigen::VectorXd g2 = (C * x).cwiseAbs();
      acc.col(j) += 0.5 * dt * (g + g2);
      g = g2;
    }
    last.col(j) = g;
    max_tail = std::max(max_tail, g.maxCoeff() / slowest);
  }
  if (tail) *tail = max_tail;
  return acc;
}

}  // namespace

L1NormResult l1_norm(const RationalTransfer& tf, double horizon, double dt) {
  if (!tf.strictly_proper())
    throw ConfigError("l1_norm: transfer must be strictly proper");
  const auto ps = poles(tf);
  const auto sp = pole_spread(ps);
  L1NormResult res;
  res.horizon = horizon > 0.0 ? horizon : 40.0 / sp.slowest;
  res.dt = dt > 0.0 ? dt : std::min(1e-3, 0.05 / sp.fastest);
  StateSpaceRealization ss = realize(tf);
  Matrix v = impulse_l1(ss.A, ss.B, ss.C, res.horizon, res.dt, sp.slowest,
                        &res.tail_bound);
  res.value = v(0, 0);
  return res;
}

Matrix l1_norm_ss(const Matrix& A, const Matrix& B, const Matrix& C,
                  double horizon, double dt) {
  Eigen::EigenSolver<Matrix> es(A);
  PoleSpread sp{1e300, 0.0};
  for (int i = 0; i < A.rows(); ++i) {
    const auto p = es.eigenvalues()[i];
    if (p.real() >= 0.0)
      throw StabilityError("l1_norm_ss: A is not Hurwitz");
    sp.slowest = std::min(sp.slowest, std::abs(p.real()));
    sp.fastest = std::max(sp.fastest, std::abs(p));
  }
  const double T = horizon > 0.0 ? horizon : 40.0 / sp.slowest;
  const double h = dt > 0.0 ? dt : std::min(1e-3, 0.05 / sp.fastest);
  return impulse_l1(A, B, C, T, h, sp.slowest, nullptr);
}

}  // namespace adaptctl
