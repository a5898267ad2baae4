#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/QR>
#include <json.hpp>

#include "mcs/rng.hpp"

namespace mcs {

// Scaled random orthoprojector Phi = scale * Xi where Xi has orthonormal rows.
// For operators drawn by make_orthoprojector the scale is sqrt(N/M); the
// complement of an operator keeps the parent's scale, so it is stored
// explicitly rather than derived from the dimensions.
class Orthoprojector {
 public:
  int meas_dim() const { return static_cast<int>(basis_.rows()); }
  int ambient_dim() const { return static_cast<int>(basis_.cols()); }
  double scale() const { return scale_; }

  // Unscaled orthonormal rows Xi.
  const Eigen::MatrixXd& basis() const { return basis_; }

  // The full operator Phi = scale * Xi.
  Eigen::MatrixXd matrix() const { return scale_ * basis_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    if (x.size() != basis_.cols()) {
      throw std::invalid_argument("Orthoprojector::apply: vector dimension mismatch");
    }
    return scale_ * (basis_ * x);
  }

 private:
  Orthoprojector(Eigen::MatrixXd basis, double scale) : basis_(std::move(basis)), scale_(scale) {}

  Eigen::MatrixXd basis_;
  double scale_ = 1.0;

  friend Orthoprojector orthoprojector_from_basis(Eigen::MatrixXd, double);
};

// Validating factory: rows must be orthonormal to 1e-10. Deserialization and
// the adversarial construction funnel through here.
inline Orthoprojector orthoprojector_from_basis(Eigen::MatrixXd basis, double scale) {
  if (basis.rows() < 1 || basis.cols() < 1 || basis.rows() > basis.cols()) {
    throw std::invalid_argument("orthoprojector_from_basis: need 1 <= meas_dim <= ambient_dim");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("orthoprojector_from_basis: scale must be positive");
  }
  const Eigen::MatrixXd gram = basis * basis.transpose();
  const double defect =
      (gram - Eigen::MatrixXd::Identity(basis.rows(), basis.rows())).cwiseAbs().maxCoeff();
  if (defect > 1e-10) {
    throw std::invalid_argument("orthoprojector_from_basis: rows not orthonormal (defect " +
                                std::to_string(defect) + ")");
  }
  return Orthoprojector(std::move(basis), scale);
}

// Draws Phi = sqrt(N/M) * Xi with row span uniform over M-dimensional
// subspaces: a Gaussian matrix is orthonormalized by Householder QR, which
// preserves the row space and hence the rotation-invariant distribution.
inline Orthoprojector make_orthoprojector(int meas_dim, int ambient_dim, std::uint64_t seed) {
  if (meas_dim < 1 || ambient_dim < 1 || meas_dim > ambient_dim) {
    throw std::invalid_argument("make_orthoprojector: need 1 <= meas_dim <= ambient_dim");
  }
  SplitMix64 rng(seed);
  Eigen::MatrixXd g(ambient_dim, meas_dim);  // columns = transposed rows of the draw
  for (int r = 0; r < meas_dim; ++r) {
    for (int c = 0; c < ambient_dim; ++c) {
      g(c, r) = rng.next_gaussian();
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd thin_q =
      qr.householderQ() * Eigen::MatrixXd::Identity(ambient_dim, meas_dim);
  const double scale = std::sqrt(static_cast<double>(ambient_dim) / meas_dim);
  return orthoprojector_from_basis(thin_q.transpose(), scale);
}

// Phi' of the norm-splitting identity: its N-M unscaled rows complete p's rows
// to an orthonormal basis, and it carries the SAME sqrt(N/M) scale as p, so
// that ||Phi x||^2 + ||Phi' x||^2 = (N/M) ||x||^2 for every x.
inline Orthoprojector complement_projector(const Orthoprojector& p) {
  const int m = p.meas_dim();
  const int n = p.ambient_dim();
  if (m >= n) {
    throw std::invalid_argument("complement_projector: operator has no complement (M = N)");
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(p.basis().transpose());
  const Eigen::MatrixXd full_q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return orthoprojector_from_basis(full_q.rightCols(n - m).transpose(), p.scale());
}

struct Measurement {
  Eigen::VectorXd y;
  double noise_norm = 0.0;
};

inline Measurement measure(const Orthoprojector& p, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& noise) {
  if (x.size() != p.ambient_dim()) {
    throw std::invalid_argument("measure: signal dimension mismatch");
  }
  if (noise.size() != p.meas_dim()) {
    throw std::invalid_argument("measure: noise dimension mismatch");
  }
  Measurement out;
  out.y = p.apply(x) + noise;
  out.noise_norm = noise.norm();
  return out;
}

inline Measurement measure(const Orthoprojector& p, const Eigen::VectorXd& x) {
  return measure(p, x, Eigen::VectorXd::Zero(p.meas_dim()));
}

struct Distortion {
  double eps_lo = 0.0;
  double eps_hi = 0.0;
};

// Worst-case pairwise embedding distortion over the given point set:
// eps_lo = 1 - min ||Phi(x1-x2)|| / ||x1-x2||, eps_hi = max ratio - 1.
// Coincident pairs are skipped.
inline Distortion pairwise_distortion(const Orthoprojector& p,
                                      const std::vector<Eigen::VectorXd>& points) {
  if (points.size() < 2) {
    throw std::invalid_argument("pairwise_distortion: need at least two points");
  }
  std::vector<Eigen::VectorXd> projected;
  projected.reserve(points.size());
  for (const auto& x : points) projected.push_back(p.apply(x));

  double min_ratio = std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d = (points[i] - points[j]).norm();
      const double floor_d =
          1e-14 * std::max({points[i].norm(), points[j].norm(), 1.0});
      if (d <= floor_d) continue;
      const double ratio = (projected[i] - projected[j]).norm() / d;
      min_ratio = std::min(min_ratio, ratio);
      max_ratio = std::max(max_ratio, ratio);
      any = true;
    }
  }
  if (!any) {
    throw std::invalid_argument("pairwise_distortion: all points coincident");
  }
  return Distortion{1.0 - min_ratio, max_ratio - 1.0};
}

inline void to_json(nlohmann::json& j, const Orthoprojector& p) {
  std::vector<std::vector<double>> rows(p.meas_dim(), std::vector<double>(p.ambient_dim()));
  for (int r = 0; r < p.meas_dim(); ++r) {
    for (int c = 0; c < p.ambient_dim(); ++c) rows[r][c] = p.basis()(r, c);
  }
  j = nlohmann::json{{"meas_dim", p.meas_dim()},
                     {"ambient_dim", p.ambient_dim()},
                     {"scale", p.scale()},
                     {"rows", rows}};
}

inline Orthoprojector orthoprojector_from_json(const nlohmann::json& j) {
  const int m = j.at("meas_dim").get<int>();
  const int n = j.at("ambient_dim").get<int>();
  const auto rows = j.at("rows").get<std::vector<std::vector<double>>>();
  if (static_cast<int>(rows.size()) != m) {
    throw std::invalid_argument("orthoprojector_from_json: row count mismatch");
  }
  Eigen::MatrixXd basis(m, n);
  for (int r = 0; r < m; ++r) {
    if (static_cast<int>(rows[r].size()) != n) {
      throw std::invalid_argument("orthoprojector_from_json: row length mismatch");
    }
    for (int c = 0; c < n; ++c) basis(r, c) = rows[r][c];
  }
  return orthoprojector_from_basis(std::move(basis), j.at("scale").get<double>());
}

// Binary form: magic, u64 meas_dim, u64 ambient_dim, f64 scale, then the
// unscaled rows as row-major little-endian doubles.
inline constexpr char kProjectorMagic[8] = {'M', 'C', 'S', 'P', 'R', 'O', 'J', '1'};

static_assert(std::endian::native == std::endian::little,
              "binary serialization assumes a little-endian host");

inline void save_binary(const Orthoprojector& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_binary: cannot open " + path);
  out.write(kProjectorMagic, sizeof(kProjectorMagic));
  const std::uint64_t m = static_cast<std::uint64_t>(p.meas_dim());
  const std::uint64_t n = static_cast<std::uint64_t>(p.ambient_dim());
  const double scale = p.scale();
  out.write(reinterpret_cast<const char*>(&m), sizeof(m));
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(&scale), sizeof(scale));
  for (int r = 0; r < p.meas_dim(); ++r) {
    for (int c = 0; c < p.ambient_dim(); ++c) {
      const double v = p.basis()(r, c);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  }
  if (!out) throw std::runtime_error("save_binary: write failed for " + path);
}

inline Orthoprojector load_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_binary: cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || !std::equal(magic, magic + 8, kProjectorMagic)) {
    throw std::runtime_error("load_binary: bad magic in " + path);
  }
  std::uint64_t m = 0, n = 0;
  double scale = 0.0;
  in.read(reinterpret_cast<char*>(&m), sizeof(m));
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  in.read(reinterpret_cast<char*>(&scale), sizeof(scale));
  if (!in || m < 1 || n < m || n > (1u << 24)) {
    throw std::runtime_error("load_binary: bad header in " + path);
  }
  Eigen::MatrixXd basis(static_cast<int>(m), static_cast<int>(n));
  for (std::uint64_t r = 0; r < m; ++r) {
    for (std::uint64_t c = 0; c < n; ++c) {
      double v = 0.0;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      basis(static_cast<int>(r), static_cast<int>(c)) = v;
    }
  }
  if (!in) throw std::runtime_error("load_binary: truncated data in " + path);
  return orthoprojector_from_basis(std::move(basis), scale);
}

}  // namespace mcs
