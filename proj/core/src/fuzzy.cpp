#include "adaptctl/fuzzy.hpp"

#include <algorithm>
#include <cmath>

#include "adaptctl/errors.hpp"

namespace adaptctl {

double TriangularMF::grade(double x) const {
  if (x < l || x > h) return 0.0;
  if (x < c) return c == l ? 1.0 : (x - l) / (c - l);
  if (x > c) return c == h ? 1.0 : (h - x) / (h - c);
  return 1.0;
}

namespace {

constexpr int kZ = 0, kVS = 1, kS = 2, kL = 3, kVL = 4;

MFBank input_bank() {
  // Apex reconstruction of the Ch. 4 input sets over [0, 1].
  const std::array<double, 5> apex{0.0, 0.08, 0.25, 0.55, 1.0};
  MFBank bank;
  for (int i = 0; i < 5; ++i) {
    bank[i].l = i == 0 ? apex[0] : apex[i - 1];
    bank[i].c = apex[i];
    bank[i].h = i == 4 ? apex[4] : apex[i + 1];
  }
  return bank;
}

std::array<std::array<int, 5>, 5> default_rulebase() {
  // [i_de][i_e], both ascending Z..VL.
  return {{{{kZ, kVS, kVS, kS, kL}},
           {{kVS, kVS, kS, kL, kVL}},
           {{kVS, kS, kL, kVL, kVL}},
           {{kS, kL, kVL, kVL, kVL}},
           {{kL, kVL, kVL, kVL, kVL}}}};
}

double triangle_centroid(const TriangularMF& mf) {
  return (mf.l + mf.c + mf.h) / 3.0;
}

}  // namespace

MFBank output_mfs_from_params(const Eigen::VectorXd& params) {
  if (params.size() != 9)
    throw ConfigError("output_mfs_from_params: expected 9 parameters");
  const double VL_l = params[0], VL_c = params[1];
  const double L_l = params[2], L_c = params[3], L_h = params[4];
  const double S_l = params[5], S_c = params[6];
  const double VS_l = params[7], VS_c = params[8];
  MFBank out;
  out[kZ] = {VS_l, VS_l, S_l};
  out[kVS] = {VS_l, VS_c, L_l};
  out[kS] = {S_l, S_c, VL_l};
  out[kL] = {L_l, L_c, L_h};
  out[kVL] = {VL_l, VL_c, VL_c};
  for (const auto& mf : out) {
    if (!(mf.l <= mf.c && mf.c <= mf.h))
      throw ConfigError(
          "output_mfs_from_params: linked parameters break l <= c <= h");
  }
  return out;
}

Eigen::VectorXd default_output_params() {
  Eigen::VectorXd lo, hi;
  default_param_box(lo, hi);
  return 0.5 * (lo + hi);
}

void default_param_box(Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
  lo.resize(9);
  hi.resize(9);
  lo << 4.0, 8.0, 1.5, 3.0, 6.0, 0.3, 1.5, 0.0, 0.5;
  hi << 8.0, 12.0, 3.0, 6.0, 10.0, 1.5, 4.0, 0.5, 1.5;
}

FuzzyFilterSpec make_default_fuzzy_spec() {
  return spec_from_params(default_output_params());
}

FuzzyFilterSpec spec_from_params(const Eigen::VectorXd& params) {
  FuzzyFilterSpec spec;
  spec.input_mfs_e = input_bank();
  spec.input_mfs_de = input_bank();
  spec.output_mfs = output_mfs_from_params(params);
  spec.rulebase = default_rulebase();
  return spec;
}

std::array<double, 5> fuzzify(double value, const MFBank& mfs) {
  const double v = std::clamp(value, 0.0, 1.0);
  std::array<double, 5> deg;
  for (int i = 0; i < 5; ++i) deg[i] = mfs[i].grade(v);
  return deg;
}

double infer(double e_norm, double de_norm, const FuzzyFilterSpec& spec) {
  const auto mu_e = fuzzify(e_norm, spec.input_mfs_e);
  const auto mu_de = fuzzify(de_norm, spec.input_mfs_de);

  std::array<double, 5> level{};  // max firing strength per output label
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double w = std::min(mu_e[i], mu_de[j]);
      const int label = spec.rulebase[j][i];
      level[label] = std::max(level[label], w);
    }
  }

  double lo = spec.output_mfs[0].l, hi = spec.output_mfs[0].h;
  for (const auto& mf : spec.output_mfs) {
    lo = std::min(lo, mf.l);
    hi = std::max(hi, mf.h);
  }
  constexpr int kGrid = 512;
  double num = 0.0, den = 0.0;
  for (int g = 0; g < kGrid; ++g) {
    const double x = lo + (hi - lo) * g / (kGrid - 1.0);
    double mu = 0.0;
    for (int s = 0; s < 5; ++s)
      mu = std::max(mu, std::min(level[s], spec.output_mfs[s].grade(x)));
    num += mu * x;
    den += mu;
  }
  if (den == 0.0) return triangle_centroid(spec.output_mfs[0]);  // Z fallback
  return num / den;
}

double effective_gain(double e, const FuzzyFilterSpec& spec, double k_f) {
  if (std::abs(e) <= spec.k_e) return spec.k_const;
  if (spec.output_is_inverse) {
    if (k_f <= 0.0)
      throw NumericError("effective_gain: inverse output needs k_f > 0");
    return 1.0 / k_f;
  }
  return k_f;
}

FuzzyL1Controller::FuzzyL1Controller(L1Config cfg, ReferenceSignal ref,
                                     FuzzyFilterSpec spec)
    : L1Controller(std::move(cfg), std::move(ref)), spec_(std::move(spec)) {
  if (config().C.rows() != 1)
    throw ConfigError("FuzzyL1Controller: scalar output required");
  double lo = spec_.output_mfs[0].l, hi = spec_.output_mfs[0].h;
  for (const auto& mf : spec_.output_mfs) {
    lo = std::min(lo, mf.l);
    hi = std::max(hi, mf.h);
  }
  constexpr int kGrid = 512;
  grid_x_.resize(kGrid);
  for (int g = 0; g < kGrid; ++g)
    grid_x_[g] = lo + (hi - lo) * g / (kGrid - 1.0);
  for (int s = 0; s < 5; ++s) {
    grid_grade_[s].resize(kGrid);
    for (int g = 0; g < kGrid; ++g)
      grid_grade_[s][g] = spec_.output_mfs[s].grade(grid_x_[g]);
  }
  grid_mu_.resize(kGrid);
}

double FuzzyL1Controller::loop_gain(double t, const StateVector& x,
                                    const StateVector& xc) const {
  const Eigen::VectorXd u = control(t, x, xc);
  const double e = (config().C * x.head(config().Am.rows()))(0) - ref().r(t)(0);
  const double edot = output_rate(t, x, u, xc)(0) - ref().r_dot(t)(0);

  const auto mu_e = fuzzify(spec_.k_p * std::abs(e), spec_.input_mfs_e);
  const auto mu_de = fuzzify(spec_.k_d * std::abs(edot), spec_.input_mfs_de);
  std::array<double, 5> level{};
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double w = std::min(mu_e[i], mu_de[j]);
      const int label = spec_.rulebase[j][i];
      level[label] = std::max(level[label], w);
    }
  }
  grid_mu_.setZero();
  for (int s = 0; s < 5; ++s)
    if (level[s] > 0.0)
      grid_mu_ = grid_mu_.max(grid_grade_[s].min(level[s]));
  double num = 0.0, den = 0.0;
  for (int g = 0; g < grid_mu_.size(); ++g) {
    num += grid_mu_[g] * grid_x_[g];
    den += grid_mu_[g];
  }
  const double kf =
      den == 0.0 ? triangle_centroid(spec_.output_mfs[0]) : num / den;
  return effective_gain(e, spec_, kf);
}

}  // namespace adaptctl
