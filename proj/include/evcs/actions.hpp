#pragma once

#include <cmath>
#include <stdexcept>

namespace evcs {

// Inclusive bounds of a discrete power grid. Levels are integer multiples of
// the grid step delta_a, so lower and upper must themselves sit on the grid
// and bracket zero: lower <= 0 <= upper.
struct ActionBounds {
  double lower = 0.0;  // kW
  double upper = 0.0;  // kW

  int count(double delta_a) const {
    return static_cast<int>(std::llround((upper - lower) / delta_a)) + 1;
  }
  double at(int k, double delta_a) const { return lower + k * delta_a; }
  bool contains(double a, double delta_a, double tol = 1e-9) const {
    if (a < lower - tol || a > upper + tol) return false;
    double r = a / delta_a;
    return std::abs(r - std::llround(r)) <= tol;
  }
};

// Largest grid multiple <= x, with a small forgiveness band so that values a
// hair below a grid point (from accumulated float error) still count as on it.
inline double snap_down(double x, double delta_a, double tol = 1e-9) {
  return std::floor(x / delta_a + tol) * delta_a;
}

// Smallest grid multiple >= x.
inline double snap_up(double x, double delta_a, double tol = 1e-9) {
  return std::ceil(x / delta_a - tol) * delta_a;
}

// Rounds toward zero onto the grid: never increases magnitude.
inline double snap_toward_zero(double x, double delta_a, double tol = 1e-9) {
  return x >= 0 ? snap_down(x, delta_a, tol) : snap_up(x, delta_a, tol);
}

}  // namespace evcs
