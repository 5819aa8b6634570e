#include "adaptctl/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "adaptctl/errors.hpp"
#include "adaptctl/integrate.hpp"

namespace adaptctl {

namespace {

void record_violation(MetricsSummary& metrics, const std::string& msg) {
  constexpr size_t kCap = 64;
  if (metrics.violations.size() < kCap) metrics.violations.push_back(msg);
}

}  // namespace

SimulationTrace run(const ClosedLoop& loop) {
  if (!loop.controller) throw ConfigError("run: no controller configured");
  if (!(loop.h > 0.0)) throw ConfigError("run: step must be > 0");
  if (loop.duration < loop.h)
    throw ConfigError("run: horizon must be >= step");
  const PlantModel& plant = loop.plant;
  const Controller& ctrl = *loop.controller;

  StateVector xs = loop.x0.size() > 0
                       ? loop.x0
                       : StateVector(StateVector::Zero(plant.n_sim));
  if (xs.size() != plant.n_sim)
    throw ConfigError("run: x0 size does not match the simulated state");
  StateVector xc = ctrl.initial_state(xs.head(plant.n));
  const int nc = static_cast<int>(xc.size());
  const int no = loop.observer ? loop.observer->state_dim() : 0;

  StateVector X(plant.n_sim + nc + no);
  X.head(plant.n_sim) = xs;
  X.segment(plant.n_sim, nc) = xc;
  if (loop.observer) X.tail(no) = loop.observer->initial_state();

  DerivFn deriv = [&](double t, const StateVector& state) {
    const auto sim = state.head(plant.n_sim);
    const auto cst = state.segment(plant.n_sim, nc);
    const StateVector x = sim.head(plant.n);
    const StateVector u = ctrl.control(t, x, cst);
    StateVector dX(state.size());
    dX.head(plant.n_sim) = plant.deriv(sim, u, t);
    dX.segment(plant.n_sim, nc) = ctrl.derivative(t, x, u, cst);
    if (loop.observer) {
      const Eigen::VectorXd y = plant.C * x;
      dX.tail(no) =
          observer_derivative(*loop.observer, t, y, StateVector(state.tail(no)));
    }
    return dX;
  };

  SimulationTrace trace;
  trace.name = loop.name;
  trace.estimate_label =
      loop.observer ? "xbreve" : ctrl.estimate_label();
  const long steps = std::max(1L, std::lround(loop.duration / loop.h));

  auto record = [&](double t, const StateVector& state) {
    const StateVector x = state.head(plant.n);
    const StateVector cst = state.segment(plant.n_sim, nc);
    trace.t.push_back(t);
    trace.x.push_back(x);
    if (loop.observer)
      trace.xhat.push_back(state.tail(no).head(plant.n));
    else
      trace.xhat.push_back(ctrl.estimate_trace(t, x, cst));
    trace.u.push_back(ctrl.control(t, x, cst));
    trace.r.push_back(ctrl.reference(t));
    trace.e.push_back(ctrl.tracking_error(t, x, cst));
    const Eigen::VectorXd rho = ctrl.envelope_radius(t);
    if (rho.size() > 0) {
      trace.rho.push_back(rho);
      trace.eps.push_back(ctrl.transformed_error(t, x, cst));
    }
  };

  auto check = [&](double t, const StateVector& state) {
    const StateVector x = state.head(plant.n);
    const StateVector cst = state.segment(plant.n_sim, nc);
    try {
      ctrl.check_invariants(t, x, cst);
    } catch (const EnvelopeViolation& ev) {
      record_violation(trace.metrics, ev.what());
      throw;  // transform is undefined outside the funnel; cannot continue
    } catch (const InvariantError& iv) {
      record_violation(trace.metrics, iv.what());
      if (loop.strict) throw;
    }
    if (loop.observer) {
      const double delta = state.tail(no)[loop.observer->n + 1];
      if (!(delta > 0.0)) {
        record_violation(trace.metrics,
                         "t=" + std::to_string(t) +
                             ": observer dynamic signal delta <= 0");
        if (loop.strict)
          throw InvariantError(trace.metrics.violations.back());
      }
    }
  };

  check(0.0, X);
  record(0.0, X);
  for (long k = 0; k < steps; ++k) {
    const double t = k * loop.h;
    X = rk4_step(deriv, X, t, loop.h);
    const double t1 = (k + 1) * loop.h;
    check(t1, X);
    if ((k + 1) % loop.output_stride == 0 || k + 1 == steps)
      record(t1, X);
  }

  trace.metrics = [&] {
    MetricsSummary m = compute_metrics(trace, loop.settling_band);
    m.violations = trace.metrics.violations;
    return m;
  }();
  return trace;
}

MetricsSummary compute_metrics(const SimulationTrace& trace, double band) {
  MetricsSummary m;
  m.settling_band = band;
  if (trace.t.empty()) return m;
  const int p = static_cast<int>(trace.e.front().size());
  const int nu = static_cast<int>(trace.u.front().size());
  const size_t ns = trace.t.size();

  m.rms_error = Eigen::VectorXd::Zero(p);
  m.max_abs_error = Eigen::VectorXd::Zero(p);
  for (const auto& e : trace.e) {
    m.rms_error += e.cwiseAbs2();
    m.max_abs_error = m.max_abs_error.cwiseMax(e.cwiseAbs());
  }
  m.rms_error = (m.rms_error / static_cast<double>(ns)).cwiseSqrt();

  Eigen::VectorXd umin = trace.u.front(), umax = trace.u.front();
  for (const auto& u : trace.u) {
    umin = umin.cwiseMin(u);
    umax = umax.cwiseMax(u);
  }
  m.control_range = umax - umin;
  (void)nu;

  m.settling_sample.assign(p, -1);
  for (int i = 0; i < p; ++i) {
    long last_outside = -1;
    for (size_t s = 0; s < ns; ++s)
      if (std::abs(trace.e[s][i]) > band) last_outside = static_cast<long>(s);
    if (last_outside + 1 < static_cast<long>(ns))
      m.settling_sample[i] = last_outside + 1;
  }
  return m;
}

void export_csv(const SimulationTrace& trace, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw ConfigError("export_csv: cannot open '" + path + "'");
  const int n = trace.x.empty() ? 0 : static_cast<int>(trace.x.front().size());
  const int nh =
      trace.xhat.empty() ? 0 : static_cast<int>(trace.xhat.front().size());
  const int nu = trace.u.empty() ? 0 : static_cast<int>(trace.u.front().size());
  const int np = trace.r.empty() ? 0 : static_cast<int>(trace.r.front().size());
  const bool ppf = !trace.rho.empty();

  std::fputs("t", f);
  auto head = [&](const char* base, int count) {
    for (int i = 1; i <= count; ++i) std::fprintf(f, ",%s%d", base, i);
  };
  head("x", n);
  head(trace.estimate_label.c_str(), nh);
  head("u", nu);
  head("r", np);
  head("e", np);
  if (ppf) {
    head("rho", np);
    head("eps", np);
  }
  std::fputc('\n', f);

  auto row = [&](const Eigen::VectorXd& v) {
    for (int i = 0; i < v.size(); ++i) std::fprintf(f, ",%.9e", v[i]);
  };
  for (size_t s = 0; s < trace.t.size(); ++s) {
    std::fprintf(f, "%.9e", trace.t[s]);
    row(trace.x[s]);
    row(trace.xhat[s]);
    row(trace.u[s]);
    row(trace.r[s]);
    row(trace.e[s]);
    if (ppf) {
      row(trace.rho[s]);
      row(trace.eps[s]);
    }
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0)
    throw ConfigError("export_csv: write failed for '" + path + "'");
}

ComparisonReport compare(const std::vector<SimulationTrace>& traces) {
  if (traces.empty()) throw ConfigError("compare: no traces");
  for (size_t i = 1; i < traces.size(); ++i) {
    if (traces[i].t.size() != traces[0].t.size())
      throw ConfigError("compare: time grids differ in length");
    for (size_t s = 0; s < traces[0].t.size(); ++s)
      if (traces[i].t[s] != traces[0].t[s])
        throw ConfigError("compare: time grids differ at sample " +
                          std::to_string(s));
  }
  ComparisonReport rep;
  for (const auto& tr : traces) {
    rep.names.push_back(tr.name);
    rep.metrics.push_back(tr.metrics);
  }
  auto ranked = [&](auto score) {
    std::vector<size_t> idx(traces.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
      return score(rep.metrics[a]) < score(rep.metrics[b]);
    });
    return idx;
  };
  rep.rank_by_rms =
      ranked([](const MetricsSummary& m) { return m.rms_error.norm(); });
  rep.rank_by_control_range =
      ranked([](const MetricsSummary& m) { return m.control_range.sum(); });
  return rep;
}

void export_comparison(const ComparisonReport& rep,
                       const std::vector<SimulationTrace>& traces,
                       const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  {
    const std::string path = (fs::path(out_dir) / "comparison.csv").string();
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw ConfigError("export_comparison: cannot open '" + path + "'");
    std::fputs("t", f);
    for (const auto& tr : traces) {
      for (int i = 1; i <= tr.e.front().size(); ++i)
        std::fprintf(f, ",%s.e%d", tr.name.c_str(), i);
      for (int i = 1; i <= tr.u.front().size(); ++i)
        std::fprintf(f, ",%s.u%d", tr.name.c_str(), i);
    }
    std::fputc('\n', f);
    for (size_t s = 0; s < traces[0].t.size(); ++s) {
      std::fprintf(f, "%.9e", traces[0].t[s]);
      for (const auto& tr : traces) {
        for (int i = 0; i < tr.e[s].size(); ++i)
          std::fprintf(f, ",%.9e", tr.e[s][i]);
        for (int i = 0; i < tr.u[s].size(); ++i)
          std::fprintf(f, ",%.9e", tr.u[s][i]);
      }
      std::fputc('\n', f);
    }
    std::fclose(f);
  }

  {
    const std::string path = (fs::path(out_dir) / "metrics.csv").string();
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw ConfigError("export_comparison: cannot open '" + path + "'");
    std::fputs(
        "name,rms_error,max_abs_error,control_range,rank_rms,rank_range\n",
        f);
    std::vector<size_t> rank_rms(rep.names.size()), rank_rng(rep.names.size());
    for (size_t r = 0; r < rep.rank_by_rms.size(); ++r)
      rank_rms[rep.rank_by_rms[r]] = r + 1;
    for (size_t r = 0; r < rep.rank_by_control_range.size(); ++r)
      rank_rng[rep.rank_by_control_range[r]] = r + 1;
    for (size_t i = 0; i < rep.names.size(); ++i) {
      const auto& m = rep.metrics[i];
      std::fprintf(f, "%s,%.9e,%.9e,%.9e,%zu,%zu\n", rep.names[i].c_str(),
                   m.rms_error.norm(), m.max_abs_error.maxCoeff(),
                   m.control_range.sum(), rank_rms[i], rank_rng[i]);
    }
    std::fclose(f);
  }
}

}  // namespace adaptctl
