#include "halfwave/cutoffs.hpp"

#include <cmath>

namespace halfwave {

double smooth_glue(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double transition(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double a = smooth_glue(2.0 - r);
  const double b = smooth_glue(r - 1.0);
  return a / (a + b);
}

double annulus_bump(double r, double inner, double outer) {
  const double half = 0.5 * (outer - inner);
  const double rise = 1.0 - transition(1.0 + (r - inner) / half);
  const double fall = transition(1.0 + (r - (outer - half)) / half);
  return rise * fall;
}

double unit_bump(double x) { return transition(1.0 + std::abs(x)); }

}  // namespace halfwave
