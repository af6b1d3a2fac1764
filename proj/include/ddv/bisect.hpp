#pragma once

#include <cmath>
#include <functional>
#include <limits>

namespace ddv {

// Smallest value in [lo, hi] accepted by a predicate that is monotone
// false-then-true (gain searches). Doubles hi until accepted first when
// needed; returns NaN if the predicate never accepts below hi_cap. The
// returned value is always one the predicate accepted.
inline double min_accepted(const std::function<bool(double)>& accepted,
                           double lo, double hi, double rel_tol = 1e-6,
                           double hi_cap = 1e8) {
  if (accepted(lo)) return lo;
  while (!accepted(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > hi_cap) return std::numeric_limits<double>::quiet_NaN();
  }
  while (hi - lo > rel_tol * std::max(1.0, std::abs(hi))) {
    double mid = 0.5 * (lo + hi);
    if (accepted(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

// Largest value accepted by a predicate that is monotone true-then-false
// (passivity-index searches). Expands the bracket downward/upward as needed;
// returns NaN if nothing is accepted above -cap. The returned value is
// always one the predicate accepted.
inline double max_accepted(const std::function<bool(double)>& accepted,
                           double lo, double hi, double rel_tol = 1e-6,
                           double cap = 1e8) {
  while (!accepted(lo)) {
    hi = lo;
    lo = 2.0 * lo - 1.0;
    if (lo < -cap) return std::numeric_limits<double>::quiet_NaN();
  }
  while (accepted(hi)) {
    lo = hi;
    hi = 2.0 * hi + 1.0;
    if (hi > cap) return lo;
  }
  while (hi - lo > rel_tol * std::max(1.0, std::abs(lo))) {
    double mid = 0.5 * (lo + hi);
    if (accepted(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace ddv
