#pragma once

#include <cmath>
#include <stdexcept>

namespace mcs::detail {

// Adaptive Simpson quadrature with the classic Richardson acceptance test.
template <typename F>
double simpson_recurse(const F& f, double a, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double h = b - a;
  const double left = (h / 12.0) * (fa + 4.0 * flm + fm);
  const double right = (h / 12.0) * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(const F& f, double a, double b, double rel_tol = 1e-8, int max_depth = 40) {
  if (!(b >= a)) throw std::invalid_argument("integrate: b must be >= a");
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
  const double scale = std::max(std::abs(whole), 1e-300);
  return simpson_recurse(f, a, b, fa, fm, fb, whole, rel_tol * scale, max_depth);
}

}  // namespace mcs::detail
