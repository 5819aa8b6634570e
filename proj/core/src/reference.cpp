#include "adaptctl/reference.hpp"

#include <cmath>

#include "adaptctl/errors.hpp"

namespace adaptctl {

ReferenceSignal make_cosine(const Eigen::VectorXd& amp,
                            const Eigen::VectorXd& omega,
                            const std::vector<StepEvent>& steps) {
  if (amp.size() != omega.size() || amp.size() == 0)
    throw ConfigError("make_cosine: amplitude/frequency size mismatch");
  const int dim = static_cast<int>(amp.size());
  for (const auto& s : steps) {
    if (s.channel < 0 || s.channel >= dim)
      throw ConfigError("make_cosine: step channel out of range");
  }
  ReferenceSignal sig;
  sig.dim = dim;
  sig.r = [amp, omega, steps, dim](double t) {
    Eigen::VectorXd out(dim);
    for (int i = 0; i < dim; ++i) out[i] = amp[i] * std::cos(omega[i] * t);
    for (const auto& s : steps)
      if (t >= s.time) out[s.channel] += s.delta;
    return out;
  };
  sig.r_dot = [amp, omega, dim](double t) {
    Eigen::VectorXd out(dim);
    for (int i = 0; i < dim; ++i)
      out[i] = -amp[i] * omega[i] * std::sin(omega[i] * t);
    return out;
  };
  sig.r_ddot = [amp, omega, dim](double t) {
    Eigen::VectorXd out(dim);
    for (int i = 0; i < dim; ++i)
      out[i] = -amp[i] * omega[i] * omega[i] * std::cos(omega[i] * t);
    return out;
  };
  return sig;
}

ReferenceSignal make_filtered_square(double amp, double freq_hz, double tau) {
  if (!(amp > 0.0) || !(freq_hz > 0.0) || !(tau > 0.0))
    throw ConfigError("make_filtered_square: parameters must be positive");
  const double half = 0.5 / freq_hz;
  // Exact response of 1/(tau s + 1) to the square wave: within each
  // half-period the state decays exponentially toward the current level.
  auto value = [amp, half, tau](double t) {
    if (t < 0.0) t = 0.0;
    const int k = static_cast<int>(std::floor(t / half));
    double rf = 0.0;  // filter state at the start of segment 0
    for (int i = 0; i < k; ++i) {
      const double level = (i % 2 == 0) ? amp : -amp;
      rf = level + (rf - level) * std::exp(-half / tau);
    }
    const double level = (k % 2 == 0) ? amp : -amp;
    return level + (rf - level) * std::exp(-(t - k * half) / tau);
  };
  ReferenceSignal sig;
  sig.dim = 1;
  sig.r = [value](double t) {
    Eigen::VectorXd out(1);
    out[0] = value(t);
    return out;
  };
  sig.r_dot = [value, amp, half, tau](double t) {
    if (t < 0.0) t = 0.0;
    const int k = static_cast<int>(std::floor(t / half));
    const double level = (k % 2 == 0) ? amp : -amp;
    Eigen::VectorXd out(1);
    out[0] = (level - value(t)) / tau;
    return out;
  };
  sig.r_ddot = [amp, half, tau, value](double t) {
    if (t < 0.0) t = 0.0;
    const int k = static_cast<int>(std::floor(t / half));
    const double level = (k % 2 == 0) ? amp : -amp;
    Eigen::VectorXd out(1);
    out[0] = -(level - value(t)) / (tau * tau);
    return out;
  };
  return sig;
}

}  // namespace adaptctl
