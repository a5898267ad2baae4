#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "mcs/detail/optimize.hpp"
#include "mcs/linops.hpp"
#include "mcs/manifolds.hpp"

namespace mcs {

struct RecoverySolution {
  double theta_hat = 0.0;
  Eigen::VectorXd x_hat;
  double residual = 0.0;  // ||y - Phi x_hat||
  int grid_density = 0;
  int refinement_iterations = 0;
};

// Signal recovery from compressive measurements: minimizes ||y - Phi x_theta||
// over theta with the same grid + golden-section / Newton scheme as
// nearest_on_manifold, but in the M-dimensional measurement space.
// Ties prefer the smaller parameter; refinement never increases the residual.
inline RecoverySolution recover_signal(const Measurement& y, const Orthoprojector& p,
                                       const ManifoldModel& m, int grid_density = 1024) {
  if (y.y.size() != p.meas_dim()) {
    throw std::invalid_argument("recover_signal: measurement dimension mismatch");
  }
  if (m.ambient_dim() != p.ambient_dim()) {
    throw std::invalid_argument("recover_signal: manifold/projector dimension mismatch");
  }
  const auto objective = [&](double t) { return (y.y - p.apply(m.point_extended(t))).squaredNorm(); };
  const auto r = detail::grid_refine_minimize(objective, m.param_lo(), m.param_hi(), m.periodic(),
                                              grid_density);
  RecoverySolution sol;
  sol.theta_hat = r.theta;
  sol.x_hat = m.point_extended(r.theta);
  sol.residual = std::sqrt(std::max(r.value, 0.0));
  sol.grid_density = grid_density;
  sol.refinement_iterations = r.iterations;
  return sol;
}

// Parameter estimation; coincides with recover_signal's theta_hat by
// construction for parametric models.
inline double estimate_parameter(const Measurement& y, const Orthoprojector& p,
                                 const ManifoldModel& m, int grid_density = 1024) {
  return recover_signal(y, p, m, grid_density).theta_hat;
}

// Full-data optimum (theta*, x*): the nearest manifold point in the ambient
// metric, exposed here so every trial records both optima.
inline std::pair<double, Eigen::VectorXd> full_data_optimum(const Eigen::VectorXd& x,
                                                            const ManifoldModel& m,
                                                            int grid_density = 1024) {
  const NearestPoint np = nearest_on_manifold(m, x, grid_density);
  return {np.theta, np.point};
}

}  // namespace mcs
