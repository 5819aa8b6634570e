#pragma once

#include <Eigen/Dense>
#include <functional>

namespace adaptctl {

using StateVector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// deriv(t, x) -> xdot
using DerivFn = std::function<StateVector(double, const StateVector&)>;

}  // namespace adaptctl
