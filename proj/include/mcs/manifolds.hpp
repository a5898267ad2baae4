#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mcs/detail/optimize.hpp"
#include "mcs/detail/quadrature.hpp"
#include "mcs/rng.hpp"

namespace mcs {

enum class ManifoldKind { Circle, Pulse, Segment };

inline std::string to_string(ManifoldKind k) {
  switch (k) {
    case ManifoldKind::Circle: return "circle";
    case ManifoldKind::Pulse: return "pulse";
    case ManifoldKind::Segment: return "segment";
  }
  throw std::logic_error("unknown manifold kind");
}

inline ManifoldKind manifold_kind_from_string(const std::string& s) {
  if (s == "circle") return ManifoldKind::Circle;
  if (s == "pulse") return ManifoldKind::Pulse;
  if (s == "segment") return ManifoldKind::Segment;
  throw std::invalid_argument("unknown manifold kind: " + s);
}

// Geometric characteristics: condition number tau (1/tau bounds curvature and
// self-approach), K-dimensional volume, and geodesic covering regularity.
struct Characteristics {
  double tau = 0.0;
  double volume = 0.0;
  double regularity = 0.0;
  bool estimated = false;
};

// One-dimensional parametric signal family theta -> x_theta in R^N.
// Instances are immutable; attaching characteristics yields a copy.
class ManifoldModel {
 public:
  ManifoldKind kind() const { return kind_; }
  int ambient_dim() const { return ambient_dim_; }
  int intrinsic_dim() const { return 1; }
  bool periodic() const { return kind_ == ManifoldKind::Circle; }
  double param_lo() const { return 0.0; }
  double param_hi() const { return kind_ == ManifoldKind::Circle ? 2.0 * M_PI : 1.0; }
  double param_span() const { return param_hi() - param_lo(); }

  // Circle: radius kappa. Pulse: width sigma. Segment: unused (1).
  double shape_param() const { return shape_; }

  // Canonical parameter representative: wraps periodic domains, leaves
  // interval parameters untouched.
  double wrap(double theta) const {
    if (!periodic()) return theta;
    double t = std::fmod(theta - param_lo(), param_span());
    if (t < 0.0) t += param_span();
    return param_lo() + t;
  }

  bool in_domain(double theta) const {
    if (periodic()) return std::isfinite(theta);
    const double slack = 1e-9;
    return theta >= param_lo() - slack && theta <= param_hi() + slack;
  }

  Eigen::VectorXd point(double theta) const {
    if (!in_domain(theta)) {
      throw std::invalid_argument("manifold parameter outside domain: " + std::to_string(theta));
    }
    return point_extended(theta);
  }

  // The coordinate formulas extend smoothly a little past the parameter
  // domain; finite-difference tangents and curvatures rely on that, so this
  // entry point skips the domain check.
  Eigen::VectorXd point_extended(double theta) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(ambient_dim_);
    switch (kind_) {
      case ManifoldKind::Circle:
        v[0] = shape_ * std::cos(theta);
        v[1] = shape_ * std::sin(theta);
        break;
      case ManifoldKind::Pulse: {
        const double inv = 1.0 / (2.0 * shape_ * shape_);
        const int n = ambient_dim_;
        for (int i = 1; i <= n; ++i) {
          const double d = static_cast<double>(i) / n - theta;
          v[i - 1] = std::exp(-d * d * inv);
        }
        break;
      }
      case ManifoldKind::Segment:
        v[0] = theta;
        break;
    }
    return v;
  }

  bool has_characteristics() const { return chars_.has_value(); }

  const Characteristics& characteristics() const {
    if (!chars_) {
      throw std::logic_error("manifold characteristics not set; run estimate_characteristics");
    }
    return *chars_;
  }

  ManifoldModel with_characteristics(const Characteristics& c) const {
    ManifoldModel m(*this);
    m.chars_ = c;
    return m;
  }

 private:
  ManifoldModel(ManifoldKind k, int n, double shape) : kind_(k), ambient_dim_(n), shape_(shape) {}

  ManifoldKind kind_;
  int ambient_dim_;
  double shape_;
  std::optional<Characteristics> chars_;

  friend ManifoldModel circle_manifold(int, double);
  friend ManifoldModel pulse_manifold(int, double);
  friend ManifoldModel line_segment_manifold(int);
};

inline ManifoldModel circle_manifold(int ambient_dim, double radius) {
  if (ambient_dim < 2) throw std::invalid_argument("circle_manifold: ambient_dim must be >= 2");
  if (!(radius > 0.0)) throw std::invalid_argument("circle_manifold: radius must be positive");
  ManifoldModel m(ManifoldKind::Circle, ambient_dim, radius);
  // Condition number equals the radius, circumference is 2*pi*kappa, and the
  // covering regularity can be any number above one half.
  return m.with_characteristics({radius, 2.0 * M_PI * radius, 0.51, false});
}

inline ManifoldModel pulse_manifold(int ambient_dim, double pulse_width) {
  if (ambient_dim < 2) throw std::invalid_argument("pulse_manifold: ambient_dim must be >= 2");
  if (!(pulse_width > 0.0) || pulse_width >= 1.0) {
    throw std::invalid_argument("pulse_manifold: pulse_width must be in (0, 1)");
  }
  // Characteristics are left unset: they are numeric estimates, filled in by
  // estimate_characteristics.
  return ManifoldModel(ManifoldKind::Pulse, ambient_dim, pulse_width);
}

inline ManifoldModel line_segment_manifold(int ambient_dim) {
  if (ambient_dim < 2) throw std::invalid_argument("line_segment_manifold: ambient_dim must be >= 2");
  return ManifoldModel(ManifoldKind::Segment, ambient_dim, 1.0);
}

namespace detail {

// Finite-difference tangent and its norm. Central differences over the
// smoothly extended coordinate formulas.
inline Eigen::VectorXd curve_tangent(const ManifoldModel& m, double theta, double h = 1e-6) {
  return (m.point_extended(theta + h) - m.point_extended(theta - h)) / (2.0 * h);
}

inline double curve_speed(const ManifoldModel& m, double theta, double h = 1e-6) {
  return curve_tangent(m, theta, h).norm();
}

// Curvature of the unit-speed reparameterization via the Lagrange identity:
// k = sqrt(|x'|^2 |x''|^2 - (x' . x'')^2) / |x'|^3.
inline double curve_curvature(const ManifoldModel& m, double theta, double h = 1e-4) {
  const Eigen::VectorXd p = m.point_extended(theta + h);
  const Eigen::VectorXd c = m.point_extended(theta);
  const Eigen::VectorXd q = m.point_extended(theta - h);
  const Eigen::VectorXd d1 = (p - q) / (2.0 * h);
  const Eigen::VectorXd d2 = (p - 2.0 * c + q) / (h * h);
  const double a = d1.squaredNorm();
  const double b = d2.squaredNorm();
  const double dot = d1.dot(d2);
  const double num = std::max(a * b - dot * dot, 0.0);
  const double denom = a * std::sqrt(a);
  if (denom <= 0.0) return 0.0;
  return std::sqrt(num) / denom;
}

// Cumulative arc-length table over the parameter domain; monotone, invertible
// by linear interpolation.
struct ArcTable {
  std::vector<double> theta;
  std::vector<double> s;

  double total() const { return s.back(); }

  double s_of_theta(double t) const {
    const auto it = std::upper_bound(theta.begin(), theta.end(), t);
    if (it == theta.begin()) return s.front();
    if (it == theta.end()) return s.back();
    const std::size_t j = static_cast<std::size_t>(it - theta.begin());
    const double w = (t - theta[j - 1]) / (theta[j] - theta[j - 1]);
    return s[j - 1] + w * (s[j] - s[j - 1]);
  }

  double theta_of_s(double v) const {
    const auto it = std::upper_bound(s.begin(), s.end(), v);
    if (it == s.begin()) return theta.front();
    if (it == s.end()) return theta.back();
    const std::size_t j = static_cast<std::size_t>(it - s.begin());
    const double ds = s[j] - s[j - 1];
    const double w = ds > 0.0 ? (v - s[j - 1]) / ds : 0.0;
    return theta[j - 1] + w * (theta[j] - theta[j - 1]);
  }
};

inline ArcTable build_arc_table(const ManifoldModel& m, int segments) {
  ArcTable t;
  t.theta.resize(segments + 1);
  t.s.resize(segments + 1);
  const double lo = m.param_lo();
  const double span = m.param_span();
  std::vector<double> speeds(segments + 1);
  for (int i = 0; i <= segments; ++i) {
    t.theta[i] = lo + span * i / segments;
    speeds[i] = curve_speed(m, t.theta[i]);
  }
  t.s[0] = 0.0;
  for (int i = 1; i <= segments; ++i) {
    const double h = t.theta[i] - t.theta[i - 1];
    t.s[i] = t.s[i - 1] + 0.5 * h * (speeds[i - 1] + speeds[i]);
  }
  return t;
}

}  // namespace detail

inline double geodesic_distance(const ManifoldModel& m, double theta1, double theta2) {
  switch (m.kind()) {
    case ManifoldKind::Circle: {
      const double span = m.param_span();
      double d = std::fabs(m.wrap(theta1) - m.wrap(theta2));
      d = std::min(d, span - d);
      return m.shape_param() * d;
    }
    case ManifoldKind::Segment: {
      if (!m.in_domain(theta1) || !m.in_domain(theta2)) {
        throw std::invalid_argument("geodesic_distance: parameter outside domain");
      }
      return std::fabs(theta1 - theta2);
    }
    case ManifoldKind::Pulse: {
      if (!m.in_domain(theta1) || !m.in_domain(theta2)) {
        throw std::invalid_argument("geodesic_distance: parameter outside domain");
      }
      const double a = std::min(theta1, theta2);
      const double b = std::max(theta1, theta2);
      if (a == b) return 0.0;
      return detail::integrate([&](double t) { return detail::curve_speed(m, t); }, a, b, 1e-7);
    }
  }
  throw std::logic_error("unknown manifold kind");
}

struct NearestPoint {
  double theta = 0.0;
  Eigen::VectorXd point;
  double distance = 0.0;
  int refinement_iterations = 0;
};

// Nearest point on the manifold in the ambient metric: dense grid scan plus
// golden-section / damped-Newton refinement to parameter tolerance 1e-9.
inline NearestPoint nearest_on_manifold(const ManifoldModel& m, const Eigen::VectorXd& x,
                                        int grid_density = 1024) {
  if (x.size() != m.ambient_dim()) {
    throw std::invalid_argument("nearest_on_manifold: vector dimension mismatch");
  }
  const auto objective = [&](double t) { return (x - m.point_extended(t)).squaredNorm(); };
  const auto r = detail::grid_refine_minimize(objective, m.param_lo(), m.param_hi(), m.periodic(),
                                              grid_density);
  NearestPoint np;
  np.theta = r.theta;
  np.point = m.point_extended(r.theta);
  np.distance = std::sqrt(std::max(r.value, 0.0));
  np.refinement_iterations = r.iterations;
  return np;
}

struct CoveringSet {
  double resolution = 0.0;
  std::vector<double> anchors;
};

// Geodesic covering at resolution T. Anchors are swept along the arc-length
// coordinate at spacing 2T, which covers a curve of length L with
// ceil(L / 2T) balls; for one-dimensional manifolds that count matches the
// optimal covering number, so it is a valid upper estimate of G(T).
inline CoveringSet greedy_cover(const ManifoldModel& m, double resolution) {
  if (!(resolution > 0.0)) throw std::invalid_argument("greedy_cover: resolution must be positive");

  detail::ArcTable table = detail::build_arc_table(m, 4096);
  double len = table.total();
  const double fine = 32.0 * len / resolution;
  if (fine > 4096.0) {
    const int segments = static_cast<int>(std::min(fine, 131072.0));
    table = detail::build_arc_table(m, segments);
    len = table.total();
  }

  CoveringSet cover;
  cover.resolution = resolution;
  const double t = resolution;
  const std::size_t count =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / (2.0 * t))));
  cover.anchors.reserve(count);
  if (m.periodic()) {
    for (std::size_t k = 0; k < count; ++k) {
      const double s = std::fmod(t + 2.0 * t * k, len);
      cover.anchors.push_back(m.wrap(table.theta_of_s(s)));
    }
  } else if (2.0 * t >= len) {
    cover.anchors.push_back(table.theta_of_s(0.5 * len));
  } else {
    for (std::size_t k = 0; k < count; ++k) {
      const double s = std::min(t + 2.0 * t * k, len - t);
      cover.anchors.push_back(table.theta_of_s(s));
    }
  }
  std::sort(cover.anchors.begin(), cover.anchors.end());
  return cover;
}

// Numeric estimation of (tau, V, R). V is the arc length; tau combines a
// curvature bound with a self-approach bound refined by a short fixed-point
// iteration; R is backed out of the covering counts that greedy_cover
// produces at three resolutions.
inline Characteristics estimate_characteristics(const ManifoldModel& m, int samples) {
  if (samples < 100) {
    throw std::invalid_argument("estimate_characteristics: need at least 100 samples");
  }
  const double lo = m.param_lo();
  const double span = m.param_span();

  const double volume =
      detail::integrate([&](double t) { return detail::curve_speed(m, t); }, lo, m.param_hi(), 1e-7);

  // Curvature bound on tau.
  double max_curv = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = m.periodic() ? lo + span * i / samples
                                  : lo + span * i / (samples - 1);
    max_curv = std::max(max_curv, detail::curve_curvature(m, t));
  }
  const double tau_curv =
      max_curv > 1e-12 ? 1.0 / max_curv : std::numeric_limits<double>::infinity();

  // Self-approach bound: chord distances between parameter-distant pairs.
  // The pair scan is capped; the chord field is 1-Lipschitz in arc length, so
  // a few thousand samples resolve it far below the tolerance of interest.
  const int n_sa = std::min(samples, 2000);
  Eigen::MatrixXd pts(m.ambient_dim(), n_sa);
  std::vector<double> arc(n_sa);
  const detail::ArcTable table = detail::build_arc_table(m, 8192);
  const double len = table.total();
  for (int i = 0; i < n_sa; ++i) {
    const double t = m.periodic() ? lo + span * i / n_sa : lo + span * i / (n_sa - 1);
    pts.col(i) = m.point_extended(t);
    arc[i] = table.s_of_theta(t);
  }
  const Eigen::MatrixXd gram = pts.transpose() * pts;
  const Eigen::VectorXd sq = gram.diagonal();

  double tau = tau_curv;
  for (int round = 0; round < 10; ++round) {
    double min_chord_sq = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_sa; ++i) {
      for (int j = i + 1; j < n_sa; ++j) {
        double gap = std::fabs(arc[i] - arc[j]);
        if (m.periodic()) gap = std::min(gap, len - gap);
        if (gap > tau) {
          const double d2 = std::max(sq[i] + sq[j] - 2.0 * gram(i, j), 0.0);
          min_chord_sq = std::min(min_chord_sq, d2);
        }
      }
    }
    double next = tau_curv;
    if (std::isfinite(min_chord_sq)) {
      next = std::min(tau_curv, 2.0 * std::sqrt(min_chord_sq));
    }
    if (next == tau) break;
    tau = next;
  }

  // Covering regularity: smallest R with G(T) <= R^K V K^{K/2} / T^K at the
  // probed resolutions; K = 1 here.
  double regularity = 0.0;
  for (const double div : {10.0, 100.0, 1000.0}) {
    const double t = volume / div;
    const auto cover = greedy_cover(m, t);
    regularity = std::max(regularity, static_cast<double>(cover.anchors.size()) * t / volume);
  }

  return Characteristics{tau, volume, regularity, true};
}

// Unit vector orthogonal to the curve's tangent at theta, uniformly random
// over the normal space. Used to build controlled off-manifold signals.
inline Eigen::VectorXd random_normal_direction(const ManifoldModel& m, double theta,
                                               SplitMix64& rng) {
  const int n = m.ambient_dim();
  Eigen::VectorXd tangent = detail::curve_tangent(m, theta);
  const double tn = tangent.norm();
  if (tn > 0.0) tangent /= tn;
  for (int attempt = 0; attempt < 64; ++attempt) {
    Eigen::VectorXd g = rng.gaussian_vector(n);
    if (tn > 0.0) g -= tangent * tangent.dot(g);
    const double gn = g.norm();
    if (gn > 1e-8) return g / gn;
  }
  throw std::runtime_error("random_normal_direction: failed to draw a normal direction");
}

inline void to_json(nlohmann::json& j, const Characteristics& c) {
  j = nlohmann::json{{"tau", c.tau},
                     {"volume", c.volume},
                     {"regularity", c.regularity},
                     {"estimated", c.estimated}};
  if (!std::isfinite(c.tau)) j["tau"] = nullptr;  // JSON has no infinity
}

inline void from_json(const nlohmann::json& j, Characteristics& c) {
  if (j.at("tau").is_null()) {
    c.tau = std::numeric_limits<double>::infinity();
  } else {
    c.tau = j.at("tau").get<double>();
  }
  c.volume = j.at("volume").get<double>();
  c.regularity = j.at("regularity").get<double>();
  c.estimated = j.at("estimated").get<bool>();
}

inline void to_json(nlohmann::json& j, const ManifoldModel& m) {
  j = nlohmann::json{{"kind", to_string(m.kind())}, {"ambient_dim", m.ambient_dim()}};
  switch (m.kind()) {
    case ManifoldKind::Circle: j["radius"] = m.shape_param(); break;
    case ManifoldKind::Pulse: j["width"] = m.shape_param(); break;
    case ManifoldKind::Segment: break;
  }
  if (m.has_characteristics()) j["characteristics"] = m.characteristics();
}

inline ManifoldModel manifold_from_json(const nlohmann::json& j) {
  const auto kind = manifold_kind_from_string(j.at("kind").get<std::string>());
  const int n = j.at("ambient_dim").get<int>();
  ManifoldModel m = [&] {
    switch (kind) {
      case ManifoldKind::Circle: return circle_manifold(n, j.at("radius").get<double>());
      case ManifoldKind::Pulse: return pulse_manifold(n, j.at("width").get<double>());
      case ManifoldKind::Segment: return line_segment_manifold(n);
    }
    throw std::logic_error("unknown manifold kind");
  }();
  if (j.contains("characteristics")) {
    m = m.with_characteristics(j.at("characteristics").get<Characteristics>());
  }
  return m;
}

}  // namespace mcs
