#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "adaptctl/fuzzy.hpp"
#include "adaptctl/plant.hpp"
#include "adaptctl/types.hpp"

namespace adaptctl {

struct Particle {
  Eigen::VectorXd position;
  Eigen::VectorXd velocity;
  Eigen::VectorXd personal_best;
  double personal_best_cost = 0.0;
};

struct SwarmConfig {
  int population = 20;
  int generations = 20;
  double c1 = 2.0;
  double c2 = 2.0;
  double alpha0 = 1.0;        // initial inertia
  double alpha_decay = 0.99;  // per-generation factor
  std::uint64_t seed = 1;
  double gamma1 = 1.0;   // tracking-error weight
  double gamma2 = 0.01;  // control-effort weight
  // Accepted for config compatibility; carried and reported, never consumed.
  double lambda_unused = 10.0;
  Eigen::VectorXd lo, hi;           // constraint box
  double velocity_clamp_frac = 0.2;  // of box width, per axis
  int threads = 1;
};

struct Swarm {
  std::vector<Particle> particles;
  Eigen::VectorXd global_best;
  double global_best_cost = 0.0;
};

// Positions uniform in the box from the seeded generator, velocities zero.
Swarm init_swarm(const SwarmConfig& cfg);

// v <- alpha v + c1 r1 (pbest - x) + c2 r2 (gbest - x); x <- x + v; velocity
// clamped per axis, positions clamped to the box with the clamped axis
// velocity zeroed.
void update_particle(Particle& p, const Eigen::VectorXd& global_best,
                     double alpha, const SwarmConfig& cfg,
                     std::mt19937_64& rng);

using ObjectiveFn = std::function<double(const Eigen::VectorXd&)>;

struct OptimizeResult {
  Eigen::VectorXd best;
  double best_cost = 0.0;
  std::vector<double> history;  // best cost after init and each generation
};

// Evaluations may run on cfg.threads workers; personal/global best updates
// happen serially in particle order each generation, so the result is
// thread-count independent.
OptimizeResult optimize(const SwarmConfig& cfg, const ObjectiveFn& objective);

// Closed-loop tuning objective for the fuzzy-L1 gain scheduler.
struct FuzzyObjectiveScenario {
  L1Config l1;
  PlantModel plant;
  ReferenceSignal reference;
  FuzzyFilterSpec base_spec;  // supplies k_p/k_d/k_e/k_const and rule base
  double duration = 8.0;
  double h = 1e-3;
  double sample_dt = 0.01;
  StateVector x0;  // zero-filled when empty
  double gamma1 = 1.0;
  double gamma2 = 0.01;
};

// Sum over the sampled horizon of gamma1 e^2 + gamma2 u^2; +inf sentinel on
// divergence or an infeasible membership expansion.
double evaluate_objective(const Eigen::VectorXd& params,
                          const FuzzyObjectiveScenario& scenario);

}  // namespace adaptctl
