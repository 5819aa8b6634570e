#include "adaptctl/integrate.hpp"

#include "adaptctl/errors.hpp"

namespace adaptctl {

namespace {
void check_finite(const StateVector& v, double t) {
  for (int i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw IntegrationError(
          "non-finite stage derivative at t=" + std::to_string(t) +
              ", state index " + std::to_string(i),
          t, i);
    }
  }
}
}  // namespace

StateVector rk4_step(const DerivFn& deriv, const StateVector& x, double t,
                     double h) {
  if (!(h > 0)) throw ConfigError("rk4_step: step must be positive");
  StateVector k1 = deriv(t, x);
  check_finite(k1, t);
  StateVector k2 = deriv(t + 0.5 * h, x + 0.5 * h * k1);
  check_finite(k2, t + 0.5 * h);
  StateVector k3 = deriv(t + 0.5 * h, x + 0.5 * h * k2);
  check_finite(k3, t + 0.5 * h);
  StateVector k4 = deriv(t + h, x + h * k3);
  check_finite(k4, t + h);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace adaptctl
