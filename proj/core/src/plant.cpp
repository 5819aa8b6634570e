#include "adaptctl/plant.hpp"

#include <cmath>

#include "adaptctl/errors.hpp"
#include "adaptctl/gains.hpp"

namespace adaptctl {

Matrix inertia_matrix(const RobotParams& p, double q2) {
  const double c2 = std::cos(q2);
  Matrix M(2, 2);
  M(0, 0) = p.Iz1 + p.Iz2 + p.m1 * p.l1 * p.l1 / 2.0 +
            p.m2 * (p.l1 * p.l1 + p.l2 * p.l2 / 4.0 + p.l1 * p.l2 * c2);
  M(0, 1) = p.Iz2 + p.m2 * (p.l2 * p.l2 / 4.0 + 0.5 * p.l1 * p.l2 * c2);
  M(1, 0) = M(0, 1);
  M(1, 1) = p.Iz2 + p.m2 * p.l2 * p.l2 / 4.0;
  return M;
}

Matrix coriolis_matrix(const RobotParams& p, double q2, double qd1,
                       double qd2) {
  const double c = 0.5 * p.m2 * p.l1 * p.l2 * std::sin(q2);
  Matrix C(2, 2);
  C(0, 0) = c * qd2 + p.k1;
  C(0, 1) = -c * (qd1 + qd2);
  C(1, 0) = c * qd1;
  C(1, 1) = p.k2;
  return C;
}

Eigen::Vector2d gravity_vector(const RobotParams& p, double q1, double q2) {
  const double c1 = std::cos(q1);
  const double c12 = std::cos(q1 + q2);
  Eigen::Vector2d G;
  G[0] = 0.5 * p.m1 * p.g * p.l1 * c1 +
         p.m2 * p.g * (p.l1 * c1 + 0.5 * p.l2 * c12);
  G[1] = 0.5 * p.m2 * p.g * p.l2 * c12;
  return G;
}

namespace {

double getp(const std::map<std::string, double>& m, const std::string& key,
            double dflt) {
  auto it = m.find(key);
  return it == m.end() ? dflt : it->second;
}

double sec_clamped(double x) {
  double c = std::cos(x);
  const double lim = 1e-3;
  if (std::abs(c) < lim) c = (c < 0.0 ? -lim : lim);
  return 1.0 / c;
}

PlantModel make_siso_benchmark() {
  PlantModel pl;
  pl.name = "siso_benchmark";
  pl.n = 2;
  pl.m = 1;
  pl.p = 1;
  pl.n_sim = 2;
  pl.Am = Matrix{{0.0, 1.0}, {-1.0, -1.4}};
  pl.B = Matrix{{0.0}, {1.0}};
  pl.C = Matrix{{1.0, 0.0}};
  Matrix Am = pl.Am, B = pl.B;
  pl.deriv = [Am, B](const StateVector& x, const StateVector& u,
                     double t) -> StateVector {
    const double x1 = x[0], x2 = x[1], uu = u[0];
    const double f = x1 + 1.4 * x2 + (2.0 + 0.2 * std::sin(t)) * uu +
                     std::sin(uu) * std::sin(x1) + x1 * x1 + x2 * x2 +
                     std::sin(0.5 * t);
    return Am * x + B * f;
  };
  return pl;
}

// Ch. 4 plant with the 75/(s+75) input filter appended. Variants:
//   0: baseline f
//   1: time-varying f plus the (s-1)/(s^2+3s+2) internal filter (cases 2/3)
//   2: baseline f + z^2 from the same internal filter, output C=[1,1]
PlantModel make_double_integrator(int variant) {
  PlantModel pl;
  pl.name = "double_integrator_nl";
  pl.n = 2;
  pl.m = 1;
  pl.p = 1;
  pl.variant = variant;
  const bool has_z = variant != 0;
  pl.n_sim = has_z ? 5 : 3;  // [x1 x2 u_f (zf1 zf2)]
  pl.Am = Matrix{{0.0, 1.0}, {0.0, 0.0}};
  pl.B = Matrix{{0.0}, {1.0}};
  // Position output: x2 alone has a transmission zero at s=0 through the
  // reference model, which leaves the feedforward gain undefined.
  pl.C = variant == 2 ? Matrix{{1.0, 1.0}} : Matrix{{1.0, 0.0}};
  pl.deriv = [variant, has_z](const StateVector& xs, const StateVector& u,
                              double t) -> StateVector {
    const double x1 = xs[0], x2 = xs[1], uf = xs[2];
    StateVector dx = StateVector::Zero(xs.size());
    double z = 0.0;
    if (has_z) {
      // z(s) = (s-1)/(s^2+3s+2) v(s), v = x1 sin(0.2 t) + x2
      const double v = x1 * std::sin(0.2 * t) + x2;
      dx[3] = -3.0 * xs[3] - 2.0 * xs[4] + v;
      dx[4] = xs[3];
      z = xs[3] - xs[4];
    }
    double f;
    if (variant == 1) {
      f = (std::sin(0.4 * t) + 1.0) * x1 * x1 +
          (2.0 * std::cos(0.35 * t) + 0.5) * x2 * x2 +
          (std::sin(0.3 * t) + 0.3) * x1 * std::sin(x1 * x1) +
          std::sin(0.35 * t) * std::cos(0.4 * t) +
          0.5 * x2 * std::cos(x2 * x2 + 0.5 * std::cos(0.3 * t)) +
          std::sin(0.3 * t) * std::cos(0.4 * t) * z * z;
    } else {
      f = 2.0 * x1 * x1 + 2.0 * x2 * x2 + x1 * std::sin(x1 * x1) +
          x2 * std::cos(x2 * x2);
      if (variant == 2) f += z * z;
    }
    dx[0] = x2;
    dx[1] = uf + f;
    dx[2] = 75.0 * (u[0] - uf);
    return dx;
  };
  return pl;
}

PlantModel make_two_link_robot(const std::map<std::string, double>& ov,
                               int variant) {
  PlantModel pl;
  pl.name = "two_link_robot";
  pl.n = 4;
  pl.m = 2;
  pl.p = 2;
  pl.n_sim = 4;
  pl.variant = variant;
  RobotParams rp;
  rp.m1 = getp(ov, "m1", rp.m1);
  rp.l1 = getp(ov, "l1", rp.l1);
  rp.Iz1 = getp(ov, "Iz1", rp.Iz1);
  rp.k1 = getp(ov, "k1", rp.k1);
  rp.m2 = getp(ov, "m2", rp.m2);
  rp.l2 = getp(ov, "l2", rp.l2);
  rp.Iz2 = getp(ov, "Iz2", rp.Iz2);
  rp.k2 = getp(ov, "k2", rp.k2);
  rp.g = getp(ov, "g", rp.g);
  for (double v : {rp.m1, rp.l1, rp.Iz1, rp.m2, rp.l2, rp.Iz2}) {
    if (!(v > 0.0))
      throw ConfigError("two_link_robot: physical parameters must be > 0");
  }
  if (rp.k1 < 0.0 || rp.k2 < 0.0 || rp.g < 0.0)
    throw ConfigError("two_link_robot: k1, k2, g must be >= 0");
  pl.robot = rp;
  // Skeleton used by controllers; scenarios replace it via pole placement.
  pl.Am = block_second_order_am({{{-10.0, 0.5}, {-10.0, -0.5}},
                                 {{-15.0, 0.5}, {-15.0, -0.5}}});
  pl.B = Matrix::Zero(4, 2);
  pl.B.bottomRows(2) = Matrix::Identity(2, 2);
  pl.C = Matrix::Zero(2, 4);
  pl.C.leftCols(2) = Matrix::Identity(2, 2);
  pl.deriv = [rp, variant](const StateVector& x, const StateVector& u,
                           double t) -> StateVector {
    const double q1 = x[0], q2 = x[1];
    Eigen::Vector2d qd(x[2], x[3]);
    Matrix M = inertia_matrix(rp, q2);
    if (variant == 1) {
      M(0, 0) += 0.6 * std::sin(0.3 * t);
      M(0, 1) += 0.7 * std::sin(0.25 * t);
      M(1, 0) += 0.7 * std::sin(0.25 * t);
      M(1, 1) += std::abs(0.5 * std::sin(0.35 * t));
    }
    Eigen::FullPivLU<Matrix> lu(M);
    if (!lu.isInvertible())
      throw NumericError("two_link_robot: singular inertia matrix");
    Matrix Cm = coriolis_matrix(rp, q2, x[2], x[3]);
    Eigen::Vector2d G0 = gravity_vector(rp, q1, q2);
    Eigen::Vector2d qdd = lu.solve(u - Cm * qd - G0);
    StateVector dx(4);
    dx << qd[0], qd[1], qdd[0], qdd[1];
    return dx;
  };
  return pl;
}

PlantModel make_unmatched_mimo(const std::map<std::string, double>& ov) {
  PlantModel pl;
  pl.name = "unmatched_mimo";
  pl.n = 3;
  pl.m = 2;
  pl.p = 2;
  pl.n_sim = 7;  // [x(3) xz(2) zf(2)]
  pl.Am = Matrix{{-1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, {0.0, -1.0, -1.8}};
  pl.B = Matrix{{1.0, 0.0}, {0.0, 0.0}, {1.0, 1.0}};
  pl.C = Matrix{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
  Eigen::VectorXd k(9);
  k << getp(ov, "k1", -1.0), getp(ov, "k2", 1.0), getp(ov, "k3", 0.0),
      getp(ov, "k4", 1.0), getp(ov, "k5", 0.0), getp(ov, "k6", 0.2),
      getp(ov, "k7", 1.0), getp(ov, "k8", 0.6), getp(ov, "k9", -0.7);
  const double lambda = getp(ov, "lambda", 0.3);
  const double omega_u = getp(ov, "omega_u", 5.0);
  const Matrix Adelta{{0.2, -0.2, -0.3}, {-0.2, -0.2, 0.6}, {-0.1, 0.0, -0.9}};
  const Matrix omega{{0.6, -0.2}, {0.2, 1.2}};
  const Matrix Am = pl.Am, Bm = pl.B;
  pl.deriv = [=](const StateVector& xs, const StateVector& u,
                 double t) -> StateVector {
    const StateVector x = xs.head(3);
    const double xz1 = xs[3], xz2 = xs[4];
    // z_u(s) = (-s+1)/(100 s^2 + 8 s + 1) [1 -2 1] x(s)
    const double w = x[0] - 2.0 * x[1] + x[2];
    const double zu = -0.01 * xs[5] + 0.01 * xs[6];
    const double z = 0.1 * (xz1 - xz2) + zu;
    Eigen::Vector3d f;
    f[0] = (k[0] / 3.0) * x.squaredNorm() +
           std::tanh(k[1] / 2.0 * x[0]) * x[0] + k[2] * z;
    f[1] = (k[3] / 2.0) * sec_clamped(x[1]) * x[1] +
           (k[4] / 5.0) * x[2] * x[2] +
           k[5] * (1.0 - std::exp(-lambda * t)) + (k[6] / 2.0) * z;
    f[2] = k[7] * x[2] * std::cos(omega_u * t) + k[8] * z * z;
    StateVector dx(7);
    dx.head(3) = (Am + Adelta) * x + Bm * (omega * u) + f;
    dx[3] = xz2;
    dx[4] = -xz1 + 0.8 * (1.0 - xz1 * xz1) * xz2;
    dx[5] = -0.08 * xs[5] - 0.01 * xs[6] + w;
    dx[6] = xs[5];
    return dx;
  };
  return pl;
}

// f_Delta indices: the printed f uses k1..k9 with the time constants lambda
// and omega_u; index shift above maps k[i] = k_{i+1} except that the second
// row consumes k4..k7 and the third k8, k9.
PlantModel make_mimo_uncertain(bool input_nl) {
  PlantModel pl;
  pl.name = input_nl ? "mimo_uncertain_input_nl" : "mimo_uncertain";
  pl.n = 3;
  pl.m = 3;
  pl.p = 3;
  pl.n_sim = 3;
  pl.Am = Matrix{{-36.0, 36.0, 0.0}, {0.0, 20.0, 0.0}, {0.0, 0.0, -3.0}};
  pl.B = Matrix::Identity(3, 3);
  pl.C = Matrix::Identity(3, 3);
  pl.deriv = [input_nl, A = pl.Am](const StateVector& x, const StateVector& u,
                                   double t) -> StateVector {
    Matrix theta(3, 3);
    theta << 3.0 * std::sin(0.5 * t),
        2.0 * std::sin(0.4 * t) * std::cos(0.3 * t), 0.7 * std::sin(0.2 * t),
        0.9 * std::sin(0.2 * t),
        2.5 * std::sin(0.3 * t) + 0.3 * std::cos(t), std::sin(0.1 * t),
        0.5 * std::sin(0.13 * t), 0.6 * std::cos(0.15 * t),
        1.5 * std::cos(0.7 * t) + 1.6 * std::sin(0.3 * t);
    Eigen::Vector3d df;
    df[0] = x[2] * x[2] + 0.2 * std::sin(x[0]);
    df[1] = -x[0] * x[2] - 0.2 * std::cos(x[2]) * x[0];
    df[2] = x[0] * x[1];
    if (input_nl) {
      df[0] += -2.5 * u[2] * std::cos(u[0]);
      df[1] += 0.7 * u[2] * u[2];
    }
    Eigen::Vector3d d;
    d << 1.0 + std::sin(t), 1.2 + std::cos(t),
        std::sin(t) + std::cos(t) - 1.0;
    return A * x + u + theta.transpose() * x + df + d;
  };
  return pl;
}

}  // namespace

PlantModel make_plant(const std::string& name,
                      const std::map<std::string, double>& overrides) {
  const int variant = static_cast<int>(getp(overrides, "variant", 0.0));
  PlantModel pl;
  if (name == "siso_benchmark") {
    pl = make_siso_benchmark();
  } else if (name == "double_integrator_nl") {
    pl = make_double_integrator(variant);
  } else if (name == "two_link_robot") {
    pl = make_two_link_robot(overrides, variant);
  } else if (name == "unmatched_mimo") {
    pl = make_unmatched_mimo(overrides);
  } else if (name == "mimo_uncertain") {
    pl = make_mimo_uncertain(false);
  } else if (name == "mimo_uncertain_input_nl") {
    pl = make_mimo_uncertain(true);
  } else {
    throw ConfigError("make_plant: unknown plant '" + name + "'");
  }
  pl.params = overrides;
  return pl;
}

StateVector derivative(const PlantModel& plant, const StateVector& x,
                       const StateVector& u, double t) {
  if (x.size() != plant.n_sim || u.size() != plant.m)
    throw ConfigError("plant derivative: dimension mismatch");
  return plant.deriv(x, u, t);
}

std::vector<std::string> plant_names() {
  return {"siso_benchmark",  "double_integrator_nl",
          "two_link_robot",  "unmatched_mimo",
          "mimo_uncertain",  "mimo_uncertain_input_nl"};
}

}  // namespace adaptctl
