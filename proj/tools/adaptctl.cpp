// Command-line front end: run scenarios, compare runs, tune the fuzzy gain
// scheduler, and dry-run configuration checks.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "adaptctl/errors.hpp"
#include "adaptctl/fuzzy.hpp"
#include "adaptctl/l1.hpp"
#include "adaptctl/pso.hpp"
#include "adaptctl/scenario.hpp"
#include "adaptctl/simulation.hpp"

namespace fs = std::filesystem;
using namespace adaptctl;

namespace {

int thread_cap() {
  if (const char* env = std::getenv("ADAPTCTL_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::string trace_stem(const SimulationTrace& trace) {
  return trace.name.empty() ? std::string("trace") : trace.name;
}

void write_plot_script(const SimulationTrace& trace, const fs::path& out_dir) {
  const std::string stem = trace_stem(trace);
  std::ofstream f(out_dir / ("plot_" + stem + ".py"));
  f << "#!/usr/bin/env python3\n"
       "import matplotlib\n"
       "matplotlib.use('Agg')\n"
       "import matplotlib.pyplot as plt\n"
       "import pandas as pd\n\n"
       "df = pd.read_csv('"
    << stem
    << ".csv')\n"
       "groups = {}\n"
       "for col in df.columns[1:]:\n"
       "    base = col.rstrip('0123456789')\n"
       "    groups.setdefault(base, []).append(col)\n"
       "fig, axes = plt.subplots(len(groups), 1, figsize=(10, 3 * "
       "len(groups)), sharex=True)\n"
       "for ax, (base, cols) in zip(axes, groups.items()):\n"
       "    for col in cols:\n"
       "        ax.plot(df['t'], df[col], label=col)\n"
       "    ax.set_ylabel(base)\n"
       "    ax.legend(loc='upper right', fontsize='small')\n"
       "    ax.grid(True, alpha=0.3)\n"
       "axes[-1].set_xlabel('t [s]')\n"
       "fig.tight_layout()\n"
       "fig.savefig('"
    << stem << ".png', dpi=130)\n";
}

void print_metrics(const SimulationTrace& trace) {
  const MetricsSummary& m = trace.metrics;
  std::printf("trace: %s (%zu samples)\n", trace_stem(trace).c_str(),
              trace.t.size());
  for (int i = 0; i < m.rms_error.size(); ++i) {
    std::printf("  e%d: rms=%.6e max=%.6e", i + 1, m.rms_error[i],
                m.max_abs_error[i]);
    if (m.settling_sample[i] >= 0)
      std::printf(" settled@sample=%ld (band=%.3g)", m.settling_sample[i],
                  m.settling_band);
    else
      std::printf(" not settled (band=%.3g)", m.settling_band);
    std::printf("\n");
  }
  for (int i = 0; i < m.control_range.size(); ++i)
    std::printf("  u%d: range=%.6e\n", i + 1, m.control_range[i]);
  for (const auto& v : m.violations)
    std::printf("  violation: %s\n", v.c_str());
}

SimulationTrace run_one(const std::string& path, bool strict) {
  Scenario sc = Scenario::from_file(path);
  ClosedLoop loop = build_closed_loop(sc);
  loop.strict = strict;
  if (loop.name.empty()) loop.name = fs::path(path).stem().string();
  return run(loop);
}

int cmd_run(const std::string& scenario, const std::string& out, bool strict) {
  SimulationTrace trace = run_one(scenario, strict);
  fs::create_directories(out);
  export_csv(trace, (fs::path(out) / (trace_stem(trace) + ".csv")).string());
  write_plot_script(trace, out);
  print_metrics(trace);
  if (strict && !trace.metrics.violations.empty()) return 3;
  return 0;
}

int cmd_compare(const std::vector<std::string>& scenarios,
                const std::string& out, bool strict) {
  std::vector<SimulationTrace> traces;
  for (const auto& path : scenarios) traces.push_back(run_one(path, strict));
  ComparisonReport rep = compare(traces);
  fs::create_directories(out);
  for (const auto& trace : traces) {
    export_csv(trace, (fs::path(out) / (trace_stem(trace) + ".csv")).string());
    print_metrics(trace);
  }
  export_comparison(rep, traces, out);
  std::printf("rank by rms_error:");
  for (size_t i : rep.rank_by_rms) std::printf(" %s", rep.names[i].c_str());
  std::printf("\nrank by control_range:");
  for (size_t i : rep.rank_by_control_range)
    std::printf(" %s", rep.names[i].c_str());
  std::printf("\n");
  return 0;
}

int cmd_pso(const std::string& config, const std::string& out) {
  Scenario sc = Scenario::from_file(config);
  PsoSetup setup = build_pso(sc);
  setup.swarm.threads = thread_cap();
  OptimizeResult res = optimize(setup.swarm, [&](const Eigen::VectorXd& p) {
    return evaluate_objective(p, setup.objective);
  });
  fs::create_directories(out);
  {
    std::ofstream f(fs::path(out) / "convergence.csv");
    f << "generation,best_cost\n";
    for (size_t g = 0; g < res.history.size(); ++g)
      f << g << "," << std::scientific << res.history[g] << "\n";
  }
  {
    std::ofstream f(fs::path(out) / "best_params.conf");
    f << "# tuned output membership parameters\n";
    f << "fuzzy.params =";
    for (int i = 0; i < res.best.size(); ++i) f << " " << res.best[i];
    f << "\nfuzzy.best_cost = " << std::scientific << res.best_cost << "\n";
  }
  std::printf("best cost: %.9e\n", res.best_cost);
  std::printf("best params:");
  for (int i = 0; i < res.best.size(); ++i) std::printf(" %.6g", res.best[i]);
  std::printf("\nhistory:");
  for (double h : res.history) std::printf(" %.4e", h);
  std::printf("\n");
  return 0;
}

int cmd_check(const std::string& scenario) {
  Scenario sc = Scenario::from_file(scenario);
  ClosedLoop loop = build_closed_loop(sc);
  std::printf("scenario ok: plant=%s n=%d m=%d p=%d h=%g duration=%g\n",
              loop.plant.name.c_str(), loop.plant.n, loop.plant.m,
              loop.plant.p, loop.h, loop.duration);
  if (auto* l1 = dynamic_cast<const L1Controller*>(loop.controller.get())) {
    NormConditionReport rep =
        norm_condition_report(l1->config(), loop.check_L, loop.check_B0,
                              loop.check_r_inf, loop.check_rho);
    std::printf("norm condition: |G|_L1=%.6e  |G|L=%.6e  margin=%.6e  %s\n",
                rep.G_l1, rep.GL, rep.stability_margin,
                rep.stable ? "SATISFIED" : "VIOLATED");
    std::printf("  |H C Kg|_L1=%.6e  |w^-1 C|_L1=%.6e\n", rep.HCKg_l1,
                rep.omega_inv_C_l1);
    if (rep.stable)
      std::printf("  rho_r=%.6e  rho_ur=%.6e\n", rep.rho_r, rep.rho_ur);
    for (size_t i = 0; i < rep.rho_candidates.size(); ++i)
      std::printf("  rho=%.6g  margin=%.6e  %s\n", rep.rho_candidates[i],
                  rep.margins[i],
                  rep.margins[i] > 0.0 ? "feasible" : "infeasible");
    if (!rep.stable) return 3;
  }
  return 0;
}

int cmd_list_plants() {
  for (const auto& name : plant_names()) std::printf("%s\n", name.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic adaptive-control simulation toolkit"};
  app.require_subcommand(1);

  std::string scenario, config, out = "out";
  std::vector<std::string> scenarios;
  bool strict = false;

  auto* run_cmd = app.add_subcommand("run", "simulate one scenario");
  run_cmd->add_option("--scenario", scenario, "scenario file")->required();
  run_cmd->add_option("--out", out, "output directory");
  run_cmd->add_flag("--strict", strict, "abort on invariant violations");

  auto* cmp_cmd =
      app.add_subcommand("compare", "run scenarios on one grid and rank them");
  cmp_cmd->add_option("--scenarios", scenarios, "scenario files")
      ->required()
      ->expected(-2);
  cmp_cmd->add_option("--out", out, "output directory");
  cmp_cmd->add_flag("--strict", strict, "abort on invariant violations");

  auto* pso_cmd =
      app.add_subcommand("pso", "tune fuzzy membership parameters");
  pso_cmd->add_option("--config", config, "tuning config file")->required();
  pso_cmd->add_option("--out", out, "output directory");

  auto* chk_cmd =
      app.add_subcommand("check", "validate a scenario without simulating");
  chk_cmd->add_option("--scenario", scenario, "scenario file")->required();

  app.add_subcommand("list-plants", "list available plant models");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(scenario, out, strict);
    if (cmp_cmd->parsed()) return cmd_compare(scenarios, out, strict);
    if (pso_cmd->parsed()) return cmd_pso(config, out);
    if (chk_cmd->parsed()) return cmd_check(scenario);
    return cmd_list_plants();
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const InvariantError& e) {
    std::fprintf(stderr, "invariant violated: %s\n", e.what());
    return 3;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 4;
  }
}
