#include "adaptctl/gains.hpp"

#include <algorithm>
#include <cmath>

#include "adaptctl/errors.hpp"

namespace adaptctl {

Matrix feedforward_gain(const Matrix& Am, const Matrix& B, const Matrix& C) {
  Eigen::FullPivLU<Matrix> lu(Am);
  if (!lu.isInvertible())
    throw ConfigError("feedforward_gain: Am is singular");
  Matrix cab = C * lu.solve(B);
  Eigen::FullPivLU<Matrix> lu2(cab);
  if (!lu2.isInvertible())
    throw ConfigError("feedforward_gain: C Am^-1 B is singular");
  return -lu2.inverse();
}

Eigen::VectorXd poly_from_poles(const std::vector<std::complex<double>>& p) {
  std::vector<std::complex<double>> c{1.0};
  for (const auto& root : p) {
    std::vector<std::complex<double>> next(c.size() + 1, 0.0);
    for (size_t i = 0; i < c.size(); ++i) {
      next[i] += c[i];
      next[i + 1] -= c[i] * root;
    }
    c = std::move(next);
  }
  Eigen::VectorXd out(c.size());
  for (size_t i = 0; i < c.size(); ++i) {
    if (std::abs(c[i].imag()) > 1e-9 * (1.0 + std::abs(c[i].real())))
      throw ConfigError("poly_from_poles: poles must close under conjugation");
    out[static_cast<int>(i)] = c[i].real();
  }
  return out;
}

Matrix companion_from_poles(const std::vector<std::complex<double>>& p) {
  const int n = static_cast<int>(p.size());
  Eigen::VectorXd a = poly_from_poles(p);  // monic, length n+1
  Matrix A = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) A(i, i + 1) = 1.0;
  for (int j = 0; j < n; ++j) A(n - 1, j) = -a[n - j];
  return A;
}

Matrix block_second_order_am(
    const std::vector<std::pair<std::complex<double>, std::complex<double>>>&
        pole_pairs) {
  const int m = static_cast<int>(pole_pairs.size());
  Matrix A = Matrix::Zero(2 * m, 2 * m);
  A.topRightCorner(m, m) = Matrix::Identity(m, m);
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd a =
        poly_from_poles({pole_pairs[i].first, pole_pairs[i].second});
    A(m + i, i) = -a[2];      // -a0
    A(m + i, m + i) = -a[1];  // -a1
  }
  return A;
}

Matrix real_block_diag_from_poles(std::vector<std::complex<double>> p) {
  std::sort(p.begin(), p.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return std::abs(a.imag()) < std::abs(b.imag());
  });
  const int n = static_cast<int>(p.size());
  Matrix A = Matrix::Zero(n, n);
  int i = 0;
  while (i < n) {
    if (std::abs(p[i].imag()) < 1e-12) {
      A(i, i) = p[i].real();
      ++i;
    } else {
      if (i + 1 >= n || std::abs(p[i + 1].real() - p[i].real()) > 1e-9 ||
          std::abs(p[i + 1].imag() + p[i].imag()) > 1e-9)
        throw ConfigError(
            "real_block_diag_from_poles: unpaired complex pole");
      const double re = p[i].real();
      const double im = std::abs(p[i].imag());
      A(i, i) = re;
      A(i, i + 1) = im;
      A(i + 1, i) = -im;
      A(i + 1, i + 1) = re;
      i += 2;
    }
  }
  return A;
}

Matrix block_observer_gain(
    const std::vector<std::pair<std::complex<double>, std::complex<double>>>&
        pole_pairs) {
  const int m = static_cast<int>(pole_pairs.size());
  Matrix L = Matrix::Zero(2 * m, m);
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd a =
        poly_from_poles({pole_pairs[i].first, pole_pairs[i].second});
    L(i, i) = a[1];      // a1
    L(m + i, i) = a[2];  // a0
  }
  return L;
}

}  // namespace adaptctl
