#pragma once

#include <map>
#include <string>
#include <vector>

#include "adaptctl/types.hpp"

namespace adaptctl {

struct RobotParams {
  double m1 = 3.2;    // kg
  double l1 = 0.5;    // m
  double Iz1 = 0.96;  // kg m^2
  double k1 = 1.0;    // joint friction
  double m2 = 2.0;
  double l2 = 0.4;
  double Iz2 = 0.841;
  double k2 = 1.0;
  double g = 9.81;
};

Matrix inertia_matrix(const RobotParams& p, double q2);
Matrix coriolis_matrix(const RobotParams& p, double q2, double qd1,
                       double qd2);
Eigen::Vector2d gravity_vector(const RobotParams& p, double q1, double q2);

// A benchmark plant. The simulator integrates the full state (model states
// plus appended input-filter / internal-dynamics states); controllers only
// ever see the first n entries and the (Am, B, C) skeleton.
struct PlantModel {
  std::string name;
  int n = 0;      // model state dim (controller-visible)
  int m = 0;      // input dim
  int p = 0;      // output dim
  int n_sim = 0;  // full simulated state dim
  Matrix Am;      // known skeleton; scenarios may re-place poles
  Matrix B;
  Matrix C;
  RobotParams robot;  // populated for two_link_robot
  int variant = 0;
  std::map<std::string, double> params;

  std::function<StateVector(const StateVector&, const StateVector&, double)>
      deriv;

  StateVector measured(const StateVector& sim_state) const {
    return sim_state.head(n);
  }
};

// names: siso_benchmark, double_integrator_nl, two_link_robot,
// unmatched_mimo, mimo_uncertain, mimo_uncertain_input_nl
PlantModel make_plant(const std::string& name,
                      const std::map<std::string, double>& overrides = {});

StateVector derivative(const PlantModel& plant, const StateVector& x,
                       const StateVector& u, double t);

std::vector<std::string> plant_names();

}  // namespace adaptctl
