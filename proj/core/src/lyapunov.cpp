#include "adaptctl/lyapunov.hpp"

#include "adaptctl/errors.hpp"

namespace adaptctl {

bool is_hurwitz(const Matrix& A) {
  Eigen::EigenSolver<Matrix> es(A);
  for (int i = 0; i < A.rows(); ++i) {
    if (es.eigenvalues()[i].real() >= 0.0) return false;
  }
  return true;
}

LyapunovPair solve_lyapunov(const Matrix& Am, const Matrix& Q) {
  const int n = static_cast<int>(Am.rows());
  if (Am.cols() != n || Q.rows() != n || Q.cols() != n)
    throw ConfigError("solve_lyapunov: dimension mismatch");
  if (!Q.isApprox(Q.transpose(), 1e-12))
    throw ConfigError("solve_lyapunov: Q must be symmetric");
  if (!is_hurwitz(Am))
    throw StabilityError("solve_lyapunov: Am is not Hurwitz");

  // vec(Am'P + P Am) = (I (x) Am' + Am' (x) I) vec(P)
  Matrix K = Matrix::Zero(n * n, n * n);
  const Matrix At = Am.transpose();
  for (int i = 0; i < n; ++i) {
    K.block(i * n, i * n, n, n) += At;
    for (int j = 0; j < n; ++j) {
      K.block(i * n, j * n, n, n) += At(i, j) * Matrix::Identity(n, n);
    }
  }
  Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(Q.data(), n * n);
  Eigen::FullPivLU<Matrix> lu(K);
  if (!lu.isInvertible())
    throw NumericError("solve_lyapunov: singular vectorized system");
  Eigen::VectorXd p = lu.solve(-q);

  LyapunovPair out;
  out.Q = Q;
  out.P = Eigen::Map<const Matrix>(p.data(), n, n);
  out.P = 0.5 * (out.P + out.P.transpose().eval());  // kill roundoff skew
  out.residual = (Am.transpose() * out.P + out.P * Am + Q).norm();
  if (out.residual > 1e-9 * Q.norm())
    throw NumericError("solve_lyapunov: residual above tolerance");
  return out;
}

}  // namespace adaptctl
