#include "adaptctl/projection.hpp"

#include <algorithm>

#include "adaptctl/errors.hpp"

namespace adaptctl {

Eigen::VectorXd project(const Eigen::VectorXd& theta,
                        const Eigen::VectorXd& y, double bound, double eps) {
  if (!(bound > 0.0) || !(eps > 0.0))
    throw ConfigError("project: bound and eps must be positive");
  const double b2 = bound * bound;
  const double f = (theta.squaredNorm() - b2) / (eps * b2);
  if (f < 0.0) return y;
  // f = 1 is the outer edge of the boundary layer. Integrator stages may
  // evaluate slightly beyond it; clamp the scaling there so outward flow is
  // fully cancelled but never amplified. Containment at step boundaries is
  // checked separately against the inflated bound.
  const double fc = std::min(f, 1.0);
  const Eigen::VectorXd grad = (2.0 / (eps * b2)) * theta;
  const double gy = grad.dot(y);
  if (gy <= 0.0) return y;
  return y - grad * (gy / grad.squaredNorm()) * fc;
}

double project(double theta, double y, double lo, double hi, double eps) {
  if (!(hi > lo)) throw ConfigError("project: interval must have hi > lo");
  const double c = 0.5 * (lo + hi);
  Eigen::VectorXd th(1), yy(1);
  th << theta - c;
  yy << y;
  return project(th, yy, 0.5 * (hi - lo), eps)[0];
}

Matrix project_columns(const Matrix& theta, const Matrix& y, double bound,
                       double eps) {
  if (theta.rows() != y.rows() || theta.cols() != y.cols())
    throw ConfigError("project_columns: shape mismatch");
  Matrix out(y.rows(), y.cols());
  for (int j = 0; j < y.cols(); ++j)
    out.col(j) = project(theta.col(j), Eigen::VectorXd(y.col(j)), bound, eps);
  return out;
}

}  // namespace adaptctl
