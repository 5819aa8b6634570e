#pragma once

#include <array>

#include "adaptctl/l1.hpp"
#include "adaptctl/types.hpp"

namespace adaptctl {

struct TriangularMF {
  double l = 0.0;  // left foot
  double c = 0.0;  // apex
  double h = 0.0;  // right foot; l = c or c = h makes a shoulder
  double grade(double x) const;
};

// Label order used throughout: index 0..4 = Z, VS, S, L, VL.
using MFBank = std::array<TriangularMF, 5>;

struct FuzzyFilterSpec {
  MFBank input_mfs_e;
  MFBank input_mfs_de;
  MFBank output_mfs;
  std::array<std::array<int, 5>, 5> rulebase;  // [i_de][i_e] -> output label
  double k_p = 0.1;   // error normalization
  double k_d = 0.05;  // error-rate normalization
  double k_e = 0.1;   // switching threshold on |e|
  double k_const = 20.0;
  bool output_is_inverse = false;
};

// Output membership parameter vector (the 9 free values, in order):
// VL_l, VL_c, L_l, L_c, L_h, S_l, S_c, VS_l, VS_c. The remaining corners
// follow from the linkage equalities VL_h=VL_c, S_h=VL_l, VS_h=L_l,
// Z_h=S_l, Z_l=Z_c=VS_l.
MFBank output_mfs_from_params(const Eigen::VectorXd& params);
Eigen::VectorXd default_output_params();  // constraint-box midpoints
void default_param_box(Eigen::VectorXd& lo, Eigen::VectorXd& hi);

FuzzyFilterSpec make_default_fuzzy_spec();
FuzzyFilterSpec spec_from_params(const Eigen::VectorXd& params);

std::array<double, 5> fuzzify(double value, const MFBank& mfs);

// Mamdani min/max inference with centroid defuzzification on a 512-point
// grid over the output support. An identically-zero aggregate falls back to
// the centroid of the Z set.
double infer(double e_norm, double de_norm, const FuzzyFilterSpec& spec);

// Fuzzy gain only engages when |e| exceeds k_e (ties go to the constant).
double effective_gain(double e, const FuzzyFilterSpec& spec, double k_f);

// L1 controller whose filter gain k is scheduled online by the fuzzy
// inference over (|e|, |e'|).
class FuzzyL1Controller : public L1Controller {
 public:
  FuzzyL1Controller(L1Config cfg, ReferenceSignal ref, FuzzyFilterSpec spec);
  const FuzzyFilterSpec& spec() const { return spec_; }

 protected:
  double loop_gain(double t, const StateVector& x,
                   const StateVector& xc) const override;

 private:
  FuzzyFilterSpec spec_;
  // Output membership grades tabulated on the centroid grid once at
  // construction; keeps the per-step inference off the triangle formulas
  // while reproducing infer() exactly.
  Eigen::ArrayXd grid_x_;
  std::array<Eigen::ArrayXd, 5> grid_grade_;
  mutable Eigen::ArrayXd grid_mu_;
};

}  // namespace adaptctl
