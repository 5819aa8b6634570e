#pragma once

#include "adaptctl/types.hpp"

namespace adaptctl {

// Smooth projection operator for adaptation laws. With
// f(theta) = (|theta|^2 - b^2) / (eps b^2), returns y unmodified while
// f < 0 or grad f . y <= 0, and otherwise removes the outward component
// scaled by f. Keeps the estimate inside the inflated ball |theta| <=
// b sqrt(1 + eps) for any bounded y. Throws ProjectionDomainError if
// theta is already outside the inflated ball (f > 1).
Eigen::VectorXd project(const Eigen::VectorXd& theta,
                        const Eigen::VectorXd& y, double bound,
                        double eps = 0.1);

// Interval version for scalar parameters: shift to the interval midpoint and
// project onto a ball of half the interval width.
double project(double theta, double y, double lo, double hi,
               double eps = 0.1);

// Column-wise ball projection for matrix estimates with a Frobenius-type
// bound per column.
Matrix project_columns(const Matrix& theta, const Matrix& y, double bound,
                       double eps = 0.1);

}  // namespace adaptctl
