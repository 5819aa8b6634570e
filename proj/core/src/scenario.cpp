#include "adaptctl/scenario.hpp"

#include <cctype>
#include <complex>
#include <fstream>
#include <memory>
#include <sstream>

#include "adaptctl/errors.hpp"
#include "adaptctl/fuzzy.hpp"
#include "adaptctl/gains.hpp"
#include "adaptctl/l1.hpp"
#include "adaptctl/neuro_ppf.hpp"
#include "adaptctl/ppf_mrac.hpp"
#include "adaptctl/reference.hpp"

namespace adaptctl {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    size_t pos = 0;
    double v = std::stod(text, &pos);
    if (pos != text.size())
      throw ConfigError("key '" + key + "': trailing characters in number '" +
                        text + "'");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + text +
                      "'");
  }
}

}  // namespace

Scenario Scenario::from_string(const std::string& text,
                               const std::string& name) {
  Scenario sc;
  sc.name_ = name;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(name + ":" + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(name + ":" + std::to_string(lineno) + ": empty key");
    if (sc.entries_.count(key))
      throw ConfigError(name + ":" + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
    sc.entries_[key] = Entry{value, lineno, false};
    sc.order_.push_back(key);
  }
  return sc;
}

Scenario Scenario::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str(), path);
}

Scenario parse_scenario(const std::string& path) {
  return Scenario::from_file(path);
}

const Scenario::Entry& Scenario::require(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end())
    throw ConfigError(name_ + ": missing required key '" + key + "'");
  it->second.consumed = true;
  return it->second;
}

bool Scenario::has(const std::string& key) const {
  return entries_.count(key) > 0;
}

std::string Scenario::get_string(const std::string& key) const {
  return require(key).value;
}

std::string Scenario::get_string(const std::string& key,
                                 const std::string& dflt) const {
  return has(key) ? get_string(key) : dflt;
}

double Scenario::get_double(const std::string& key) const {
  return parse_double(key, require(key).value);
}

double Scenario::get_double(const std::string& key, double dflt) const {
  return has(key) ? get_double(key) : dflt;
}

long Scenario::get_int(const std::string& key, long dflt) const {
  if (!has(key)) return dflt;
  const double v = get_double(key);
  const long l = static_cast<long>(v);
  if (static_cast<double>(l) != v)
    throw ConfigError("key '" + key + "': expected an integer");
  return l;
}

bool Scenario::get_bool(const std::string& key, bool dflt) const {
  if (!has(key)) return dflt;
  const std::string v = get_string(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("key '" + key + "': expected true/false");
}

Eigen::VectorXd Scenario::get_vector(const std::string& key) const {
  std::string text = require(key).value;
  for (auto& ch : text)
    if (ch == ',') ch = ' ';
  std::istringstream in(text);
  std::vector<double> vals;
  std::string tok;
  while (in >> tok) vals.push_back(parse_double(key, tok));
  if (vals.empty())
    throw ConfigError("key '" + key + "': expected a numeric list");
  return Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
}

Eigen::VectorXd Scenario::get_vector(const std::string& key,
                                     const Eigen::VectorXd& dflt) const {
  return has(key) ? get_vector(key) : dflt;
}

std::map<std::string, double> Scenario::plant_overrides() const {
  std::map<std::string, double> out;
  for (const auto& [key, entry] : entries_) {
    if (key.rfind("plant.", 0) != 0 || key == "plant.name") continue;
    entry.consumed = true;
    out[key.substr(6)] = parse_double(key, entry.value);
  }
  return out;
}

void Scenario::ensure_all_consumed() const {
  for (const auto& key : order_) {
    const auto& entry = entries_.at(key);
    if (!entry.consumed)
      throw ConfigError(name_ + ":" + std::to_string(entry.line) +
                        ": unknown key '" + key + "'");
  }
}

namespace {

// Broadcast a scalar or accept an exact-length list.
Eigen::VectorXd per_channel(const Scenario& sc, const std::string& key,
                            int dim, double dflt) {
  if (!sc.has(key)) return Eigen::VectorXd::Constant(dim, dflt);
  Eigen::VectorXd v = sc.get_vector(key);
  if (v.size() == 1) return Eigen::VectorXd::Constant(dim, v[0]);
  if (v.size() != dim)
    throw ConfigError("key '" + key + "': expected 1 or " +
                      std::to_string(dim) + " values");
  return v;
}

ReferenceSignal build_reference(const Scenario& sc, int dim) {
  const std::string kind = sc.get_string("reference.kind", "cosine");
  if (kind == "square") {
    if (dim != 1)
      throw ConfigError("square reference is scalar only");
    return make_filtered_square(sc.get_double("reference.amplitude"),
                                sc.get_double("reference.freq_hz"),
                                sc.get_double("reference.tau", 0.05));
  }
  if (kind != "cosine")
    throw ConfigError("reference.kind: unknown kind '" + kind + "'");
  Eigen::VectorXd amp = per_channel(sc, "reference.amplitude", dim, 1.0);
  Eigen::VectorXd omega = per_channel(sc, "reference.omega", dim, 1.0);
  std::vector<StepEvent> steps;
  if (sc.has("reference.step_times")) {
    Eigen::VectorXd times = sc.get_vector("reference.step_times");
    Eigen::VectorXd deltas = sc.get_vector("reference.step_values");
    Eigen::VectorXd chans = per_channel(sc, "reference.step_channels",
                                        static_cast<int>(times.size()), 0.0);
    if (deltas.size() != times.size())
      throw ConfigError("reference.step_values: length mismatch");
    for (int i = 0; i < times.size(); ++i)
      steps.push_back({times[i], deltas[i], static_cast<int>(chans[i])});
  }
  return make_cosine(amp, omega, steps);
}

std::vector<std::complex<double>> poles_from(const Scenario& sc,
                                             const std::string& prefix) {
  Eigen::VectorXd re = sc.get_vector(prefix + "poles_re");
  Eigen::VectorXd im = sc.get_vector(
      prefix + "poles_im", Eigen::VectorXd::Zero(re.size()));
  if (im.size() != re.size())
    throw ConfigError(prefix + "poles_im: length mismatch");
  std::vector<std::complex<double>> p;
  for (int i = 0; i < re.size(); ++i) p.emplace_back(re[i], im[i]);
  return p;
}

// Pole pairs listed one per channel as re_i +/- j im_i.
std::vector<std::pair<std::complex<double>, std::complex<double>>>
pole_pairs_from(const Scenario& sc, const std::string& prefix) {
  Eigen::VectorXd re = sc.get_vector(prefix + "poles_re");
  Eigen::VectorXd im = sc.get_vector(
      prefix + "poles_im", Eigen::VectorXd::Zero(re.size()));
  if (im.size() != re.size())
    throw ConfigError(prefix + "poles_im: length mismatch");
  std::vector<std::pair<std::complex<double>, std::complex<double>>> pairs;
  for (int i = 0; i < re.size(); ++i)
    pairs.emplace_back(std::complex<double>(re[i], im[i]),
                       std::complex<double>(re[i], -im[i]));
  return pairs;
}

L1Config build_l1_config(const Scenario& sc, const PlantModel& plant,
                         L1Variant variant) {
  L1Config cfg;
  cfg.variant = variant;
  cfg.gamma = sc.get_double("controller.gamma");
  cfg.k = sc.get_double("controller.k");
  cfg.Am = plant.Am;
  cfg.B = plant.B;
  cfg.C = plant.C;
  const int n = static_cast<int>(plant.Am.rows());
  const int m = static_cast<int>(plant.B.cols());

  if (sc.has("controller.poles_re")) {
    const std::string placement = sc.get_string(
        "controller.pole_placement",
        plant.name == "two_link_robot" ? "block2" : "companion");
    if (placement == "companion") {
      cfg.Am = companion_from_poles(poles_from(sc, "controller."));
    } else if (placement == "block2") {
      cfg.Am = block_second_order_am(pole_pairs_from(sc, "controller."));
    } else {
      throw ConfigError("controller.pole_placement: unknown mode '" +
                        placement + "'");
    }
    if (cfg.Am.rows() != n)
      throw ConfigError("controller.poles_re: pole count does not match "
                        "plant order");
  }

  Eigen::VectorXd qd = per_channel(sc, "controller.Q_diag", n, 1.0);
  cfg.Q = qd.asDiagonal();

  if (sc.has("controller.D_num")) {
    cfg.D.num = sc.get_vector("controller.D_num");
    cfg.D.den = sc.get_vector("controller.D_den");
  } else {
    cfg.D.num = Eigen::VectorXd::Ones(1);
    cfg.D.den = Eigen::VectorXd::Zero(2);  // integrator
    cfg.D.den[0] = 1.0;
  }

  ProjectionBounds& b = cfg.bounds;
  if (sc.has("controller.omega_diag_l")) {
    const double dl = sc.get_double("controller.omega_diag_l");
    const double du = sc.get_double("controller.omega_diag_u");
    const double ol = sc.get_double("controller.omega_offdiag_l");
    const double ou = sc.get_double("controller.omega_offdiag_u");
    b.omega_lo = Matrix::Constant(m, m, ol);
    b.omega_hi = Matrix::Constant(m, m, ou);
    b.omega_lo.diagonal().setConstant(dl);
    b.omega_hi.diagonal().setConstant(du);
    b.omega_l = dl;
    b.omega_u = du;
  } else {
    b.omega_l = sc.get_double("controller.omega_l");
    b.omega_u = sc.get_double("controller.omega_u");
  }
  b.theta_b = sc.get_double("controller.theta_b");
  b.delta_b = sc.get_double("controller.sigma_b");
  if (variant == L1Variant::unmatched) {
    b.theta_b2 = sc.get_double("controller.theta_b2");
    b.delta_b2 = sc.get_double("controller.sigma_b2");
  }
  b.eps = sc.get_double("controller.proj_eps", 0.1);

  if (sc.has("controller.omega_hat0"))
    cfg.omega_hat0 = sc.get_double("controller.omega_hat0") *
                     Matrix::Identity(m, m);
  return cfg;
}

FuzzyFilterSpec build_fuzzy_spec(const Scenario& sc, double k_const) {
  Eigen::VectorXd params =
      sc.get_vector("fuzzy.params", default_output_params());
  FuzzyFilterSpec spec = spec_from_params(params);
  spec.k_p = sc.get_double("fuzzy.k_p", 0.1);
  spec.k_d = sc.get_double("fuzzy.k_d", 0.05);
  spec.k_e = sc.get_double("fuzzy.k_e", 0.1);
  spec.k_const = sc.get_double("fuzzy.k_const", k_const);
  spec.output_is_inverse = sc.get_bool("fuzzy.output_is_inverse", false);
  return spec;
}

std::shared_ptr<ObserverModel> build_observer(const Scenario& sc,
                                              const PlantModel& plant) {
  bool any = false;
  for (const std::string key :
       {"observer.gamma_l", "observer.k_l", "observer.poles_re"})
    any = any || sc.has(key);
  if (!any) return nullptr;

  auto obs = std::make_shared<ObserverModel>();
  obs->n = plant.n;
  obs->p = plant.p;
  const int half = plant.n / 2;
  if (plant.n % 2 != 0)
    throw ConfigError("observer: plant order must be even (q/q_dot form)");
  obs->A = Matrix::Zero(plant.n, plant.n);
  obs->A.topRightCorner(half, half) = Matrix::Identity(half, half);
  obs->B = Matrix::Zero(plant.n, plant.p);
  obs->B.bottomRows(half) = Matrix::Identity(half, half);
  obs->C = plant.C;

  if (sc.has("observer.k_l")) {
    Eigen::VectorXd kl = sc.get_vector("observer.k_l");
    if (kl.size() != plant.n * plant.p)
      throw ConfigError("observer.k_l: expected n*p entries");
    obs->k_l = Eigen::Map<Matrix>(kl.data(), plant.n, plant.p);
  } else {
    obs->k_l = block_observer_gain(pole_pairs_from(sc, "observer."));
    if (obs->k_l.rows() != plant.n)
      throw ConfigError("observer.poles_re: pole pairs do not match order");
  }
  obs->gamma_l = sc.get_double("observer.gamma_l", 10.0);
  obs->sigma_l = sc.get_double("observer.sigma_l", 1e-4);
  obs->lambda0 = sc.get_double("observer.lambda0", 2.5);
  obs->d0 = sc.get_double("observer.d0", 0.625);
  obs->beta0 = sc.get_double("observer.beta0", 1.0);
  obs->delta0 = sc.get_double("observer.delta0", 1.0);
  return obs;
}

std::shared_ptr<Controller> build_controller(const Scenario& sc,
                                             const PlantModel& plant,
                                             const std::string& kind) {
  if (kind == "l1_siso" || kind == "l1_mimo" || kind == "l1_unmatched") {
    const L1Variant variant = kind == "l1_siso"     ? L1Variant::siso
                              : kind == "l1_mimo"   ? L1Variant::mimo
                                                    : L1Variant::unmatched;
    L1Config cfg = build_l1_config(sc, plant, variant);
    ReferenceSignal ref =
        build_reference(sc, static_cast<int>(cfg.C.rows()));
    return std::make_shared<L1Controller>(std::move(cfg), std::move(ref));
  }
  if (kind == "fuzzy_l1") {
    L1Config cfg = build_l1_config(sc, plant, L1Variant::mimo);
    if (cfg.C.rows() != 1)
      throw ConfigError("fuzzy_l1: scalar-output plants only");
    FuzzyFilterSpec spec = build_fuzzy_spec(sc, cfg.k);
    ReferenceSignal ref = build_reference(sc, 1);
    return std::make_shared<FuzzyL1Controller>(std::move(cfg), std::move(ref),
                                               std::move(spec));
  }
  if (kind == "mrac_ppf") {
    MracConfig cfg;
    cfg.A = plant.Am;
    cfg.B = plant.B;
    const int n = plant.n;
    cfg.Am = real_block_diag_from_poles(poles_from(sc, "controller."));
    if (cfg.Am.rows() != n)
      throw ConfigError("controller.poles_re: pole count != plant order");
    cfg.km = cfg.B.completeOrthogonalDecomposition().solve(cfg.A - cfg.Am);
    if (((cfg.A - cfg.B * cfg.km) - cfg.Am).norm() > 1e-8 * cfg.A.norm())
      throw ConfigError("mrac_ppf: desired poles unreachable through B");
    cfg.envelope.rho0 = sc.get_double("controller.rho0");
    cfg.envelope.rho_inf = sc.get_double("controller.rho_inf");
    cfg.envelope.ell = sc.get_double("controller.ell");
    cfg.delta = sc.get_double("controller.delta", 1.0);
    cfg.gamma1 = per_channel(sc, "controller.gamma1", n, 1.0);
    cfg.gamma2 = per_channel(sc, "controller.gamma2", n, 1.0);
    cfg.upsilon = per_channel(sc, "controller.upsilon", n, 0.05);
    cfg.beta = per_channel(sc, "controller.beta", n, 1.0);
    cfg.alpha_bar = per_channel(sc, "controller.alpha_bar", n, 0.0);
    cfg.psi = sc.get_vector("controller.psi");
    if (sc.has("controller.K_diag")) {
      Eigen::VectorXd kd = per_channel(sc, "controller.K_diag", n, 0.0);
      cfg.K = kd.asDiagonal();
    }
    cfg.eps_smooth = sc.get_double("controller.eps_smooth", 0.0);
    ReferenceSignal ref = build_reference(sc, static_cast<int>(cfg.B.cols()));
    return std::make_shared<MracPpfController>(std::move(cfg),
                                               std::move(ref));
  }
  if (kind == "neuro_ppf") {
    NeuroPpfConfig cfg;
    const int m = plant.m;
    cfg.p = static_cast<int>(sc.get_int("controller.p", 30));
    cfg.seed = static_cast<std::uint64_t>(sc.get_int("controller.seed", 1));
    cfg.k = sc.get_double("controller.k", 0.5);
    cfg.n_f = sc.get_double("controller.n_f", 0.2);
    cfg.eta_ga = sc.get_double("controller.eta_ga", 0.2);
    cfg.eta_gb = sc.get_double("controller.eta_gb", 0.2);
    cfg.delta_d = sc.get_double("controller.delta_d", 0.1);
    cfg.sigma = sc.get_double("controller.sigma", 7.5);
    cfg.gamma = sc.get_double("controller.gamma", 0.1);
    cfg.sign_g = sc.get_double("controller.sign_g", 1.0);
    cfg.lambda = per_channel(sc, "controller.lambda", m, 0.75);
    cfg.envelope.rho0 = sc.get_double("controller.rho0");
    cfg.envelope.rho_inf = sc.get_double("controller.rho_inf");
    cfg.envelope.ell = sc.get_double("controller.ell");
    cfg.delta = sc.get_double("controller.delta", 1.0);
    ReferenceSignal ref = build_reference(sc, m);
    return std::make_shared<NeuroPpfController>(std::move(cfg),
                                                std::move(ref));
  }
  throw ConfigError("controller.kind: unknown controller '" + kind + "'");
}

}  // namespace

ClosedLoop build_closed_loop(const Scenario& sc) {
  ClosedLoop loop;
  loop.name = sc.get_string("name", sc.source_name());

  const std::string plant_name = sc.get_string("plant.name");
  loop.plant = make_plant(plant_name, sc.plant_overrides());

  loop.h = sc.get_double("sim.h", 1e-3);
  if (!(loop.h > 0.0)) throw ConfigError("sim.h: step must be > 0");
  loop.duration = sc.get_double("sim.duration", 10.0);
  if (loop.duration < loop.h)
    throw ConfigError("sim.duration: horizon must be >= step");
  loop.output_stride = static_cast<int>(sc.get_int("sim.output_stride", 1));
  if (loop.output_stride < 1)
    throw ConfigError("sim.output_stride: must be >= 1");
  loop.settling_band = sc.get_double("sim.settling_band", 0.05);
  if (sc.has("sim.x0")) {
    Eigen::VectorXd x0 = sc.get_vector("sim.x0");
    if (x0.size() > loop.plant.n_sim)
      throw ConfigError("sim.x0: more entries than simulated states");
    loop.x0 = StateVector::Zero(loop.plant.n_sim);
    loop.x0.head(x0.size()) = x0;
  }

  const std::string kind = sc.get_string("controller.kind");
  loop.controller = build_controller(sc, loop.plant, kind);
  loop.observer = build_observer(sc, loop.plant);

  loop.check_L = sc.get_double("check.L", 1.0);
  loop.check_B0 = sc.get_double("check.B0", 0.0);
  loop.check_r_inf = sc.get_double("check.r_inf", 1.0);
  if (sc.has("check.rho")) {
    Eigen::VectorXd rho = sc.get_vector("check.rho");
    loop.check_rho.assign(rho.data(), rho.data() + rho.size());
  }

  sc.ensure_all_consumed();
  return loop;
}

PsoSetup build_pso(const Scenario& sc) {
  PsoSetup setup;
  SwarmConfig& sw = setup.swarm;
  sw.population = static_cast<int>(sc.get_int("pso.population", 20));
  sw.generations = static_cast<int>(sc.get_int("pso.generations", 20));
  sw.c1 = sc.get_double("pso.c1", 2.0);
  sw.c2 = sc.get_double("pso.c2", 2.0);
  sw.alpha0 = sc.get_double("pso.alpha0", 1.0);
  sw.alpha_decay = sc.get_double("pso.alpha_decay", 0.99);
  sw.seed = static_cast<std::uint64_t>(sc.get_int("pso.seed", 1));
  sw.gamma1 = sc.get_double("pso.gamma1", 1.0);
  sw.gamma2 = sc.get_double("pso.gamma2", 0.01);
  sw.lambda_unused = sc.get_double("pso.lambda", 10.0);
  sw.velocity_clamp_frac = sc.get_double("pso.velocity_clamp", 0.2);
  default_param_box(sw.lo, sw.hi);
  if (sc.has("pso.box_lo")) {
    sw.lo = sc.get_vector("pso.box_lo");
    sw.hi = sc.get_vector("pso.box_hi");
  }

  const std::string kind = sc.get_string("controller.kind", "fuzzy_l1");
  if (kind != "fuzzy_l1")
    throw ConfigError("pso: objective requires controller.kind = fuzzy_l1");

  FuzzyObjectiveScenario& obj = setup.objective;
  obj.plant = make_plant(sc.get_string("plant.name"), sc.plant_overrides());
  obj.l1 = build_l1_config(sc, obj.plant, L1Variant::mimo);
  obj.reference = build_reference(sc, 1);
  obj.base_spec = build_fuzzy_spec(sc, obj.l1.k);
  obj.duration = sc.get_double("sim.duration", 8.0);
  obj.h = sc.get_double("sim.h", 1e-3);
  if (sc.has("sim.x0")) {
    Eigen::VectorXd x0 = sc.get_vector("sim.x0");
    if (x0.size() > obj.plant.n_sim)
      throw ConfigError("sim.x0: more entries than simulated states");
    obj.x0 = StateVector::Zero(obj.plant.n_sim);
    obj.x0.head(x0.size()) = x0;
  }
  obj.sample_dt = sc.get_double("pso.sample_dt", 0.01);
  obj.gamma1 = sw.gamma1;
  obj.gamma2 = sw.gamma2;
  if (sc.has("name")) sc.get_string("name");

  sc.ensure_all_consumed();
  return setup;
}

}  // namespace adaptctl
