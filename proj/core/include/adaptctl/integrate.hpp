#pragma once

#include "adaptctl/types.hpp"

namespace adaptctl {

// Classical fixed-step RK4. Throws IntegrationError naming t and the first
// non-finite state index if any stage derivative blows up.
StateVector rk4_step(const DerivFn& deriv, const StateVector& x, double t,
                     double h);

}  // namespace adaptctl
