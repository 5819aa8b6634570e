#pragma once

#include <memory>
#include <string>
#include <vector>

#include "adaptctl/observer.hpp"
#include "adaptctl/plant.hpp"
#include "adaptctl/types.hpp"

namespace adaptctl {

// Feedback law with internal dynamics. The closed-loop integrator stacks the
// plant simulation state with the controller state and steps both with one
// RK4 call, so the control signal must be an algebraic function of the
// stacked state (filters/integrators live inside xc).
class Controller {
 public:
  virtual ~Controller() = default;
  virtual int state_dim() const = 0;
  virtual StateVector initial_state(const StateVector& x0) const = 0;
  virtual StateVector control(double t, const StateVector& x,
                              const StateVector& xc) const = 0;
  virtual StateVector derivative(double t, const StateVector& x,
                                 const StateVector& u,
                                 const StateVector& xc) const = 0;
  virtual Eigen::VectorXd reference(double t) const = 0;
  // Output-channel tracking error used in metrics and the e* CSV columns.
  virtual Eigen::VectorXd tracking_error(double t, const StateVector& x,
                                         const StateVector& xc) const = 0;
  // n values exported under the xhat*/xm* CSV columns (predictor or
  // reference-model state).
  virtual Eigen::VectorXd estimate_trace(double t, const StateVector& x,
                                         const StateVector& xc) const = 0;
  virtual std::string estimate_label() const { return "xhat"; }
  // Per-channel performance funnel radius; empty when the controller has no
  // envelope. eps: transformed errors.
  virtual Eigen::VectorXd envelope_radius(double t) const { return {}; }
  virtual Eigen::VectorXd transformed_error(double t, const StateVector& x,
                                            const StateVector& xc) const {
    return {};
  }
  // Throws (EnvelopeViolation, InvariantError) when a runtime invariant
  // fails at time t.
  virtual void check_invariants(double t, const StateVector& x,
                                const StateVector& xc) const {}
};

struct MetricsSummary {
  Eigen::VectorXd rms_error;        // per output channel
  Eigen::VectorXd max_abs_error;    // per output channel
  Eigen::VectorXd control_range;    // max - min per input
  std::vector<long> settling_sample;  // first sample staying in |e|<=band
  double settling_band = 0.05;
  std::vector<std::string> violations;
};

struct SimulationTrace {
  std::string name;
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x;     // plant model state (first n entries)
  std::vector<Eigen::VectorXd> xhat;  // predictor / model / observer state
  std::vector<Eigen::VectorXd> u;
  std::vector<Eigen::VectorXd> r;
  std::vector<Eigen::VectorXd> e;
  std::vector<Eigen::VectorXd> rho;  // empty unless an envelope is active
  std::vector<Eigen::VectorXd> eps;
  std::string estimate_label = "xhat";
  MetricsSummary metrics;
};

struct ClosedLoop {
  PlantModel plant;
  std::shared_ptr<Controller> controller;
  std::shared_ptr<ObserverModel> observer;  // optional, passive
  double h = 1e-3;
  double duration = 10.0;
  int output_stride = 1;   // record every k-th step (t=0 always recorded)
  bool strict = false;     // rethrow invariant violations instead of logging
  double settling_band = 0.05;
  StateVector x0;          // plant simulation state; zero-filled when empty
  std::string name;
  // Inputs for the dry-run norm-condition diagnostic (check subcommand).
  double check_L = 1.0;
  double check_B0 = 0.0;
  double check_r_inf = 1.0;
  std::vector<double> check_rho;
};

SimulationTrace run(const ClosedLoop& loop);

MetricsSummary compute_metrics(const SimulationTrace& trace, double band);

void export_csv(const SimulationTrace& trace, const std::string& path);

struct ComparisonReport {
  std::vector<std::string> names;
  std::vector<MetricsSummary> metrics;
  std::vector<size_t> rank_by_rms;            // indices, best first
  std::vector<size_t> rank_by_control_range;  // indices, best first
};

// Traces must share one time grid.
ComparisonReport compare(const std::vector<SimulationTrace>& traces);

void export_comparison(const ComparisonReport& report,
                       const std::vector<SimulationTrace>& traces,
                       const std::string& out_dir);

}  // namespace adaptctl
