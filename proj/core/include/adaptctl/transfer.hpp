#pragma once

#include <vector>

#include "adaptctl/types.hpp"

namespace adaptctl {

// Coefficient vectors are in descending powers of s.
struct RationalTransfer {
  Eigen::VectorXd num;
  Eigen::VectorXd den;

  int den_degree() const { return static_cast<int>(den.size()) - 1; }
  int num_degree() const { return static_cast<int>(num.size()) - 1; }
  bool strictly_proper() const { return effective_num_degree() < den_degree(); }
  int effective_num_degree() const;
};

struct StateSpaceRealization {
  Matrix A, B, C, D;
  StateVector state;  // zero-initialized, size = order

  int order() const { return static_cast<int>(A.rows()); }
};

struct L1NormResult {
  double value = 0.0;
  double tail_bound = 0.0;
  double horizon = 0.0;
  double dt = 0.0;
};

// Polynomial helpers (descending coefficients).
Eigen::VectorXd poly_mul(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
Eigen::VectorXd poly_add(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
Eigen::VectorXd poly_trim(const Eigen::VectorXd& a);
std::vector<std::complex<double>> poly_roots(const Eigen::VectorXd& a);

std::vector<std::complex<double>> poles(const RationalTransfer& tf);
bool is_stable(const RationalTransfer& tf);

// Controllable canonical form. Throws ConfigError for improper transfers.
StateSpaceRealization realize(const RationalTransfer& tf);

// Impulse-response quadrature of a stable, strictly proper transfer.
// horizon <= 0 and dt <= 0 select defaults (40/|Re lambda_slowest| and a step
// resolving the fastest pole).
L1NormResult l1_norm(const RationalTransfer& tf, double horizon = 0.0,
                     double dt = 0.0);

// Entrywise L1 norms of the impulse response of (A, B, C); returns the matrix
// of integral(|g_ij|). A must be Hurwitz.
Matrix l1_norm_ss(const Matrix& A, const Matrix& B, const Matrix& C,
                  double horizon = 0.0, double dt = 0.0);

}  // namespace adaptctl
