#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "mcs/bounds.hpp"
#include "mcs/linops.hpp"
#include "mcs/manifolds.hpp"
#include "mcs/recovery.hpp"

namespace mcs {

// Worst case for recovery over the unit segment from the origin to e1:
// the single measurement row sqrt(N) * (cos g, -sin g, 0, ...) annihilates
// x = (1, tan(pi/2 - g), 0, ...), so recovery returns the origin while the
// nearest segment point to x is x* = e1. The pair ratio on the segment is
// uniformly sqrt(N) cos g = 1 - eps, and the achieved error ratio
// ||x - x_hat|| / ||x - x*|| equals sqrt(N) / (1 - eps).
struct AdversarialInstance {
  Orthoprojector projector;
  Eigen::VectorXd signal;
  double gamma = 0.0;
  double epsilon = 0.0;
  double achieved_ratio = 0.0;
};

inline AdversarialInstance build_adversarial(int ambient_dim, double gamma) {
  if (ambient_dim < 2) throw std::invalid_argument("build_adversarial: ambient_dim must be >= 2");
  if (!(gamma >= 0.0) || !(gamma < M_PI / 2.0)) {
    throw std::invalid_argument("build_adversarial: gamma must lie in [0, pi/2)");
  }
  const double root_n = std::sqrt(static_cast<double>(ambient_dim));
  const double cg = std::cos(gamma);
  if (!(cg < 1.0 / root_n)) {
    throw std::invalid_argument("build_adversarial: requires cos(gamma) < 1/sqrt(N)");
  }

  Eigen::MatrixXd row = Eigen::MatrixXd::Zero(1, ambient_dim);
  row(0, 0) = cg;
  row(0, 1) = -std::sin(gamma);
  AdversarialInstance inst{orthoprojector_from_basis(row, root_n), Eigen::VectorXd(), gamma, 0.0,
                           0.0};

  inst.signal = Eigen::VectorXd::Zero(ambient_dim);
  inst.signal[0] = 1.0;
  inst.signal[1] = std::tan(M_PI / 2.0 - gamma);
  inst.epsilon = 1.0 - root_n * cg;
  inst.achieved_ratio = root_n / (1.0 - inst.epsilon);

  // Construction checks: the signal is annihilated, and segment pairs are
  // contracted uniformly by 1 - eps.
  if (inst.projector.apply(inst.signal).norm() > 1e-10 * inst.signal.norm() * root_n) {
    throw std::runtime_error("build_adversarial: signal not annihilated");
  }
  const ManifoldModel seg = line_segment_manifold(ambient_dim);
  const double target = root_n * cg;
  const std::pair<double, double> pairs[] = {{0.0, 1.0}, {0.0, 0.25}, {0.25, 0.75}, {0.5, 1.0}};
  for (const auto& [a, b] : pairs) {
    const Eigen::VectorXd d = seg.point(a) - seg.point(b);
    const double ratio = inst.projector.apply(d).norm() / d.norm();
    if (std::fabs(ratio - target) > 1e-10) {
      throw std::runtime_error("build_adversarial: segment contraction not uniform");
    }
  }
  return inst;
}

struct TightnessResult {
  double achieved = 0.0;
  double bound = 0.0;
};

// Runs the actual recovery program on the instance and compares the achieved
// error ratio against the deterministic bound at M = 1.
inline TightnessResult verify_tightness(const AdversarialInstance& inst, int grid_density = 1024) {
  const int n = inst.projector.ambient_dim();
  const ManifoldModel seg = line_segment_manifold(n);
  const Measurement y = measure(inst.projector, inst.signal);
  const RecoverySolution sol = recover_signal(y, inst.projector, seg, grid_density);
  const auto [theta_star, x_star] = full_data_optimum(inst.signal, seg, grid_density);

  const double model_error = (inst.signal - x_star).norm();
  if (!(model_error > 0.0)) {
    throw std::runtime_error("verify_tightness: degenerate instance, x lies on the segment");
  }
  TightnessResult out;
  out.achieved = (inst.signal - sol.x_hat).norm() / model_error;
  out.bound = deterministic_bound(n, 1, inst.epsilon);

  // The recovered point should be the origin endpoint, which reproduces the
  // closed-form ratio; tolerate only solver-level slack.
  const double tol = 1e-6 * inst.achieved_ratio + 1e-9;
  if (std::fabs(out.achieved - inst.achieved_ratio) > tol) {
    throw std::runtime_error("verify_tightness: achieved ratio deviates from the closed form");
  }
  return out;
}

}  // namespace mcs
