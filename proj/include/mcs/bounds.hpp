#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcs {

// Inputs shared by the accuracy bounds. model_error is ||x - x*||, noise_norm
// is ||n||; the geometric quantities describe the manifold.
struct BoundInputs {
  int ambient_dim = 0;     // N
  int meas_dim = 0;        // M
  double epsilon = 0.0;    // isometry slack, in (0, 1)
  double rho = 0.1;        // failure probability, in (0, 1)
  double tau = 0.0;
  double volume = 0.0;
  double regularity = 0.0;
  int intrinsic_dim = 1;   // K
  double model_error = 0.0;
  double noise_norm = 0.0;

  void validate() const {
    if (ambient_dim < 1) throw std::invalid_argument("BoundInputs: ambient_dim must be positive");
    if (meas_dim < 1 || meas_dim > ambient_dim) {
      throw std::invalid_argument("BoundInputs: need 1 <= meas_dim <= ambient_dim");
    }
    if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
      throw std::invalid_argument("BoundInputs: epsilon must lie in (0, 1)");
    }
    if (!(rho > 0.0) || !(rho < 1.0)) {
      throw std::invalid_argument("BoundInputs: rho must lie in (0, 1)");
    }
    if (!(tau > 0.0)) throw std::invalid_argument("BoundInputs: tau must be positive");
    if (!(volume > 0.0)) throw std::invalid_argument("BoundInputs: volume must be positive");
    if (!(regularity > 0.0)) throw std::invalid_argument("BoundInputs: regularity must be positive");
    if (intrinsic_dim < 1) throw std::invalid_argument("BoundInputs: intrinsic_dim must be positive");
    if (model_error < 0.0) throw std::invalid_argument("BoundInputs: model_error must be nonnegative");
    if (noise_norm < 0.0) throw std::invalid_argument("BoundInputs: noise_norm must be nonnegative");
  }
};

struct BoundTerm {
  std::string name;
  double value = 0.0;
};

struct BoundReport {
  double value = 0.0;
  bool precondition_met = true;
  std::vector<BoundTerm> terms;
};

struct DeterministicBound {
  double value = 0.0;
  bool radicand_clamped = false;
};

// Worst-case ratio ||x - x_hat|| / ||x - x*|| for recovery under an
// epsilon-isometric scaled orthoprojector:
// sqrt( 4N/(M(1-eps)^2) - 3 + 2 sqrt( N/(M(1-eps)^2) - 1 ) ).
// epsilon = 0 is allowed (exact-isometry regime). With M <= N the inner
// radicand is nonnegative; a negative value can only arise for inputs outside
// that regime and is clamped and flagged rather than silently accepted.
inline DeterministicBound deterministic_bound_checked(int ambient_dim, int meas_dim,
                                                      double epsilon) {
  if (meas_dim < 1 || meas_dim > ambient_dim) {
    throw std::invalid_argument("deterministic_bound: need 1 <= meas_dim <= ambient_dim");
  }
  if (!(epsilon >= 0.0) || !(epsilon < 1.0)) {
    throw std::invalid_argument("deterministic_bound: epsilon must lie in [0, 1)");
  }
  const double q = static_cast<double>(ambient_dim) /
                   (meas_dim * (1.0 - epsilon) * (1.0 - epsilon));
  DeterministicBound out;
  double inner = q - 1.0;
  if (inner < 0.0) {
    inner = 0.0;
    out.radicand_clamped = true;
  }
  out.value = std::sqrt(4.0 * q - 3.0 + 2.0 * std::sqrt(inner));
  return out;
}

inline double deterministic_bound(int ambient_dim, int meas_dim, double epsilon) {
  return deterministic_bound_checked(ambient_dim, meas_dim, epsilon).value;
}

// Signal recovery accuracy:
// ||x - x_hat|| <= (1 + 0.25 eps) ||x - x*|| + (2 + 0.32 eps) ||n|| + eps^2 tau / (936 N).
inline BoundReport recovery_bound(const BoundInputs& in) {
  in.validate();
  BoundReport r;
  r.terms = {
      {"model_error", (1.0 + 0.25 * in.epsilon) * in.model_error},
      {"noise", (2.0 + 0.32 * in.epsilon) * in.noise_norm},
      {"curvature", in.epsilon * in.epsilon * in.tau / (936.0 * in.ambient_dim)},
  };
  r.value = r.terms[0].value + r.terms[1].value + r.terms[2].value;
  r.precondition_met = true;  // no precondition beyond M <= N
  return r;
}

// Geodesic parameter-estimation accuracy, valid when
// 1.16 ||n|| + ||x - x*|| <= tau / 5:
// d_M(x_hat, x*) <= (4 + 0.5 eps) ||x - x*|| + (4 + 0.64 eps) ||n|| + eps^2 tau / (468 N).
// The value is reported even when the precondition fails, with the flag false.
inline BoundReport parameter_bound(const BoundInputs& in) {
  in.validate();
  BoundReport r;
  r.terms = {
      {"model_error", (4.0 + 0.5 * in.epsilon) * in.model_error},
      {"noise", (4.0 + 0.64 * in.epsilon) * in.noise_norm},
      {"curvature", in.epsilon * in.epsilon * in.tau / (468.0 * in.ambient_dim)},
  };
  r.value = r.terms[0].value + r.terms[1].value + r.terms[2].value;
  r.precondition_met = 1.16 * in.noise_norm + in.model_error <= in.tau / 5.0;
  return r;
}

// Measurement count sufficient for an epsilon-stable embedding with failure
// probability rho: M = min(N, ceil(C K log(N V R / (tau eps)) log(1/rho) / eps^2)).
// The multiplicative constant C is caller-supplied; the harness calibrates it.
inline int required_measurements(int intrinsic_dim, int ambient_dim, double volume,
                                 double regularity, double tau, double epsilon, double rho,
                                 double constant_c) {
  if (intrinsic_dim < 1 || ambient_dim < 1) {
    throw std::invalid_argument("required_measurements: dimensions must be positive");
  }
  if (!(volume > 0.0) || !(regularity > 0.0) || !(tau > 0.0) || !(constant_c > 0.0)) {
    throw std::invalid_argument("required_measurements: geometric inputs must be positive");
  }
  if (!(epsilon > 0.0) || !(epsilon < 1.0) || !(rho > 0.0) || !(rho < 1.0)) {
    throw std::invalid_argument("required_measurements: epsilon and rho must lie in (0, 1)");
  }
  const double arg = ambient_dim * volume * regularity / (tau * epsilon);
  if (!(arg > 1.0)) {
    throw std::invalid_argument("required_measurements: logarithm argument must exceed 1");
  }
  const double raw = constant_c * intrinsic_dim * std::log(arg) * std::log(1.0 / rho) /
                     (epsilon * epsilon);
  const double clamped = std::min(static_cast<double>(ambient_dim), std::ceil(raw));
  return static_cast<int>(clamped);
}

// Euclidean-to-geodesic conversion (Niyogi, Smale & Weinberger Lemma):
// points at Euclidean distance e <= tau/2 are at geodesic distance at most
// tau - tau sqrt(1 - 2 e / tau).
inline double euclidean_to_geodesic(double e, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("euclidean_to_geodesic: tau must be positive");
  if (e < 0.0) throw std::invalid_argument("euclidean_to_geodesic: distance must be nonnegative");
  if (e > tau / 2.0) {
    throw std::invalid_argument("euclidean_to_geodesic: requires e <= tau/2");
  }
  return tau - tau * std::sqrt(1.0 - 2.0 * e / tau);
}

// Right side of the covering-number inequality G(T) <= R^K V K^{K/2} / T^K.
inline double covering_bound(int intrinsic_dim, double volume, double regularity,
                             double resolution) {
  if (intrinsic_dim < 1) throw std::invalid_argument("covering_bound: K must be positive");
  if (!(volume > 0.0) || !(regularity > 0.0)) {
    throw std::invalid_argument("covering_bound: V and R must be positive");
  }
  if (!(resolution > 0.0)) throw std::invalid_argument("covering_bound: T must be positive");
  const double k = intrinsic_dim;
  return std::pow(regularity, k) * volume * std::pow(k, 0.5 * k) / std::pow(resolution, k);
}

}  // namespace mcs
