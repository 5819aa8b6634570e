#pragma once

#include <vector>

#include "adaptctl/types.hpp"

namespace adaptctl {

// Reference trajectory with derivatives, evaluated as a pure function of time
// so traces replay bit-identically.
struct ReferenceSignal {
  int dim = 1;
  std::function<Eigen::VectorXd(double)> r;
  std::function<Eigen::VectorXd(double)> r_dot;
  std::function<Eigen::VectorXd(double)> r_ddot;
};

struct StepEvent {
  double time = 0.0;
  double delta = 0.0;
  int channel = 0;
};

// r_i(t) = amp_i * cos(omega_i t) plus any step offsets that have fired.
// Step jumps are treated as offsets: they do not contribute to r_dot.
ReferenceSignal make_cosine(const Eigen::VectorXd& amp,
                            const Eigen::VectorXd& omega,
                            const std::vector<StepEvent>& steps = {});

// Square wave of the given amplitude/frequency passed through a first-order
// prefilter 1/(tau s + 1) to keep it band-limited; evaluated in closed form
// by chaining the exact exponential response across switch instants.
ReferenceSignal make_filtered_square(double amp, double freq_hz, double tau);

}  // namespace adaptctl
