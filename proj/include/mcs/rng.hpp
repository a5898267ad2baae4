#pragma once

#include <cmath>
#include <cstdint>
#include <Eigen/Dense>

namespace mcs {

// SplitMix64 generator (Steele, Lea & Flood). All randomness in the library
// flows through this generator so that a 64-bit seed pins every result.
// Doubles are IEEE-754 binary64 throughout.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Standard normal via Box-Muller; the pair's second value is cached.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - next_double();  // (0, 1], keeps log finite
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  Eigen::VectorXd gaussian_vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = next_gaussian();
    return v;
  }

  // Uniform on the unit sphere in R^n.
  Eigen::VectorXd sphere_vector(int n) {
    Eigen::VectorXd v = gaussian_vector(n);
    double norm = v.norm();
    while (norm == 0.0) {  // astronomically unlikely, but cheap to handle
      v = gaussian_vector(n);
      norm = v.norm();
    }
    return v / norm;
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derives an independent stream seed from (base, index). Used to give each
// Monte Carlo trial its own generator so parallel and serial runs agree.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  SplitMix64 g(base ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
  return g.next_u64();
}

}  // namespace mcs
