#include "adaptctl/pso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <thread>

#include "adaptctl/errors.hpp"
#include "adaptctl/simulation.hpp"

namespace adaptctl {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_box(const SwarmConfig& cfg) {
  if (cfg.lo.size() == 0 || cfg.lo.size() != cfg.hi.size())
    throw ConfigError("pso: constraint box missing or mismatched");
  for (int i = 0; i < cfg.lo.size(); ++i)
    if (cfg.lo[i] > cfg.hi[i])
      throw ConfigError("pso: lo > hi in constraint box axis " +
                        std::to_string(i));
  if (cfg.population <= 0) throw ConfigError("pso: population must be > 0");
  if (!(cfg.alpha_decay > 0.0 && cfg.alpha_decay <= 1.0))
    throw ConfigError("pso: alpha_decay must be in (0, 1]");
}

// Evaluate costs[i] = objective(positions[i]) on up to cfg.threads workers.
// Results land by index, so the outcome is independent of scheduling.
void evaluate_all(const std::vector<Eigen::VectorXd>& positions,
                  const ObjectiveFn& objective, int threads,
                  std::vector<double>& costs) {
  const int np = static_cast<int>(positions.size());
  costs.assign(np, kInf);
  const int nw = std::max(1, std::min(threads, np));
  if (nw == 1) {
    for (int i = 0; i < np; ++i) costs[i] = objective(positions[i]);
    return;
  }
  std::vector<std::thread> workers;
  for (int w = 0; w < nw; ++w) {
    workers.emplace_back([&, w]() {
      for (int i = w; i < np; i += nw) costs[i] = objective(positions[i]);
    });
  }
  for (auto& th : workers) th.join();
}

}  // namespace

Swarm init_swarm(const SwarmConfig& cfg) {
  validate_box(cfg);
  const int dim = static_cast<int>(cfg.lo.size());
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Swarm swarm;
  swarm.particles.resize(cfg.population);
  for (auto& p : swarm.particles) {
    p.position.resize(dim);
    for (int d = 0; d < dim; ++d)
      p.position[d] = cfg.lo[d] + (cfg.hi[d] - cfg.lo[d]) * unit(rng);
    p.velocity = Eigen::VectorXd::Zero(dim);
    p.personal_best = p.position;
    p.personal_best_cost = kInf;
  }
  swarm.global_best = swarm.particles.front().position;
  swarm.global_best_cost = kInf;
  return swarm;
}

void update_particle(Particle& p, const Eigen::VectorXd& global_best,
                     double alpha, const SwarmConfig& cfg,
                     std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int dim = static_cast<int>(p.position.size());
  for (int d = 0; d < dim; ++d) {
    const double r1 = unit(rng), r2 = unit(rng);
    p.velocity[d] = alpha * p.velocity[d] +
                    cfg.c1 * r1 * (p.personal_best[d] - p.position[d]) +
                    cfg.c2 * r2 * (global_best[d] - p.position[d]);
    const double vmax = cfg.velocity_clamp_frac * (cfg.hi[d] - cfg.lo[d]);
    p.velocity[d] = std::clamp(p.velocity[d], -vmax, vmax);
    p.position[d] += p.velocity[d];
    if (p.position[d] < cfg.lo[d]) {
      p.position[d] = cfg.lo[d];
      p.velocity[d] = 0.0;
    } else if (p.position[d] > cfg.hi[d]) {
      p.position[d] = cfg.hi[d];
      p.velocity[d] = 0.0;
    }
  }
}

OptimizeResult optimize(const SwarmConfig& cfg, const ObjectiveFn& objective) {
  Swarm swarm = init_swarm(cfg);
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<Eigen::VectorXd> positions;
  std::vector<double> costs;
  auto evaluate_and_absorb = [&]() {
    positions.clear();
    for (const auto& p : swarm.particles) positions.push_back(p.position);
    evaluate_all(positions, objective, cfg.threads, costs);
    for (size_t i = 0; i < swarm.particles.size(); ++i) {
      auto& p = swarm.particles[i];
      if (costs[i] < p.personal_best_cost) {
        p.personal_best_cost = costs[i];
        p.personal_best = p.position;
      }
      if (costs[i] < swarm.global_best_cost) {
        swarm.global_best_cost = costs[i];
        swarm.global_best = p.position;
      }
    }
  };

  OptimizeResult result;
  evaluate_and_absorb();
  result.history.push_back(swarm.global_best_cost);
  double alpha = cfg.alpha0;
  for (int g = 0; g < cfg.generations; ++g) {
    for (auto& p : swarm.particles)
      update_particle(p, swarm.global_best, alpha, cfg, rng);
    evaluate_and_absorb();
    result.history.push_back(swarm.global_best_cost);
    alpha *= cfg.alpha_decay;
  }
  result.best = swarm.global_best;
  result.best_cost = swarm.global_best_cost;
  return result;
}

double evaluate_objective(const Eigen::VectorXd& params,
                          const FuzzyObjectiveScenario& scenario) {
  try {
    FuzzyFilterSpec spec = scenario.base_spec;
    spec.output_mfs = output_mfs_from_params(params);

    ClosedLoop loop;
    loop.plant = scenario.plant;
    loop.controller = std::make_shared<FuzzyL1Controller>(
        scenario.l1, scenario.reference, spec);
    loop.h = scenario.h;
    loop.duration = scenario.duration;
    loop.x0 = scenario.x0;
    loop.output_stride =
        std::max(1, static_cast<int>(std::lround(scenario.sample_dt /
                                                 scenario.h)));
    SimulationTrace trace = run(loop);

    double cost = 0.0;
    for (size_t i = 0; i < trace.t.size(); ++i) {
      cost += scenario.gamma1 * trace.e[i].squaredNorm() +
              scenario.gamma2 * trace.u[i].squaredNorm();
    }
    if (!std::isfinite(cost)) return kInf;
    return cost;
  } catch (const std::exception&) {
    return kInf;  // divergence or infeasible expansion: survives, never best
  }
}

}  // namespace adaptctl
