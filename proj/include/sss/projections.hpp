#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "sss/errors.hpp"

namespace sss {

// Shift that projects nonnegative magnitudes onto the simplex face: given
// values a_i >= 0 with sum >= radius > 0, returns theta >= 0 such that
// sum_i (a_i - theta)_+ = radius. Classic sort-and-shift on a scratch copy.
inline double simplex_shift_sorted(std::vector<double>& scratch,
                                   double radius) {
  std::sort(scratch.begin(), scratch.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < scratch.size(); ++i) {
    cumsum += scratch[i];
    const double cand = (cumsum - radius) / static_cast<double>(i + 1);
    if (scratch[i] - cand > 0.0)
      theta = cand;
    else
      break;
  }
  return std::max(theta, 0.0);
}

// Projects v onto {x : x >= 0, sum x = radius}.
inline void project_simplex_inplace(Eigen::VectorXd& v, double radius) {
  std::vector<double> scratch(v.data(), v.data() + v.size());
  const double theta = simplex_shift_sorted(scratch, radius);
  v = (v.array() - theta).max(0.0);
}

// Safeguarded Newton for the same shift: g(theta) = sum (a_i - theta)_+
// is convex, decreasing and piecewise linear, so Newton steps bracketed by
// bisection land exactly in a handful of passes. `hint` warm-starts from
// the previous call's shift.
inline double simplex_shift_newton(const double* data, std::size_t len,
                                   double radius, double hint) {
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < len; ++i) hi = std::max(hi, std::abs(data[i]));
  double theta = std::clamp(hint, lo, hi);
  for (int pass = 0; pass < 60; ++pass) {
    double g = -radius;
    std::size_t active = 0;
    for (std::size_t i = 0; i < len; ++i) {
      const double t = std::abs(data[i]) - theta;
      if (t > 0.0) {
        g += t;
        ++active;
      }
    }
    if (g > 0.0)
      lo = theta;
    else
      hi = theta;
    if (g == 0.0 || hi - lo <= 1e-12 * std::max(1.0, hi)) break;
    double next = (active > 0)
                      ? theta + g / static_cast<double>(active)
                      : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == theta) break;
    theta = next;
  }
  return theta;
}

// Projects a symmetric matrix onto the elementwise l1 ball of the given
// radius. Soft-thresholds by the simplex shift of the magnitudes, which
// preserves symmetry. `theta_hint`, when given, carries the shift across
// a sequence of nearby projections.
inline void project_l1_ball_inplace(Eigen::MatrixXd& m, double radius,
                                    double* theta_hint = nullptr) {
  const double l1 = m.cwiseAbs().sum();
  if (l1 <= radius) {
    if (theta_hint != nullptr) *theta_hint = 0.0;
    return;
  }
  const std::size_t len = static_cast<std::size_t>(m.size());
  double theta;
  if (len <= (1u << 14)) {
    std::vector<double> scratch(len);
    const double* src = m.data();
    for (std::size_t i = 0; i < len; ++i) scratch[i] = std::abs(src[i]);
    theta = simplex_shift_sorted(scratch, radius);
  } else {
    theta = simplex_shift_newton(m.data(), len, radius,
                                 theta_hint != nullptr ? *theta_hint : 0.0);
  }
  if (theta_hint != nullptr) *theta_hint = theta;
  m = m.unaryExpr([theta](double v) {
    const double a = std::abs(v) - theta;
    return a > 0.0 ? (v > 0.0 ? a : -a) : 0.0;
  });
}

}  // namespace sss
