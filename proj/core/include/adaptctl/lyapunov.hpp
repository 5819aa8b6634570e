#pragma once

#include "adaptctl/types.hpp"

namespace adaptctl {

struct LyapunovPair {
  Matrix P;
  Matrix Q;
  double residual = 0.0;  // ||Am'P + PAm + Q||_F
};

bool is_hurwitz(const Matrix& A);

// Solves Am'P + P Am = -Q by Kronecker vectorization (n <= 10 everywhere in
// this toolkit). Throws StabilityError if Am is not Hurwitz and NumericError
// if the solve misses the 1e-9 relative residual tolerance.
LyapunovPair solve_lyapunov(const Matrix& Am, const Matrix& Q);

}  // namespace adaptctl
