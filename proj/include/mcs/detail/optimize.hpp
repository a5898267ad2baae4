#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mcs::detail {

struct SearchResult {
  double theta = 0.0;
  double value = 0.0;
  int iterations = 0;  // refinement evaluations past the grid stage
};

// A candidate wins only when it beats the incumbent by more than float
// noise. Objectives that are constant up to rounding (a point equidistant
// from the whole manifold, say) would otherwise hand the tie to whichever
// parameter the noise happens to favor; with the slack the earlier, smaller
// parameter keeps it.
inline bool improves(double candidate, double incumbent) {
  const double slack = 32.0 * std::numeric_limits<double>::epsilon() *
                       std::max(std::fabs(candidate), std::fabs(incumbent));
  return candidate < incumbent - slack;
}

// Minimizes f over [lo, hi] by a dense grid scan followed by golden-section
// refinement inside the bracketing grid cells and an optional Newton polish.
// For periodic domains the grid omits the duplicated endpoint and the bracket
// may extend past the seam; f must therefore accept unwrapped arguments.
// Ties prefer the smaller parameter (strict improvement only), and the result
// never has a larger value than the best grid point.
template <typename F>
SearchResult grid_refine_minimize(const F& f, double lo, double hi, bool periodic,
                                  int grid_density, double theta_tol = 1e-9) {
  if (!(hi > lo)) throw std::invalid_argument("grid_refine_minimize: empty domain");
  if (grid_density < 2) throw std::invalid_argument("grid_refine_minimize: grid_density < 2");

  const double span = hi - lo;
  // Periodic grids omit the duplicated endpoint; interval grids include both ends.
  const double step = periodic ? span / grid_density : span / (grid_density - 1);

  SearchResult best;
  best.theta = lo;
  best.value = f(lo);
  for (int i = 1; i < grid_density; ++i) {
    const double t = lo + step * i;
    const double v = f(t);
    if (improves(v, best.value)) {
      best.value = v;
      best.theta = t;
    }
  }

  // Bracket around the winning grid point.
  double a = best.theta - step;
  double b = best.theta + step;
  if (!periodic) {
    a = std::max(a, lo);
    b = std::min(b, hi);
  }

  int iters = 0;
  auto consider = [&](double t, double v) {
    if (improves(v, best.value)) {
      best.value = v;
      best.theta = t;
    }
  };

  // Golden-section shrink of [a, b].
  const double invphi = 0.6180339887498949;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  iters += 2;
  consider(c, fc);
  consider(d, fd);
  while (b - a > theta_tol && iters < 200) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
      consider(d, fd);
    }
    ++iters;
  }

  // Newton polish on the smoothed minimum; accepted only while it improves.
  const double h = std::max(1e-7, theta_tol);
  for (int k = 0; k < 5; ++k) {
    const double t = best.theta;
    const double fp = f(t + h);
    const double fm = f(t - h);
    iters += 2;
    const double g1 = (fp - fm) / (2.0 * h);
    const double g2 = (fp - 2.0 * best.value + fm) / (h * h);
    if (!(g2 > 0.0)) break;
    double cand = t - g1 / g2;
    if (!(cand > a) || !(cand < b)) break;
    const double fv = f(cand);
    ++iters;
    if (improves(fv, best.value)) {
      best.value = fv;
      best.theta = cand;
    } else {
      break;
    }
  }

  if (periodic) {
    double t = std::fmod(best.theta - lo, span);
    if (t < 0.0) t += span;
    best.theta = lo + t;
  }
  best.iterations = iters;
  return best;
}

}  // namespace mcs::detail
