#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "sss/errors.hpp"
#include "sss/models.hpp"

namespace sss {

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2_v<double>);
}

// The standardization of the HC objective at the i-th p-value. The paper's
// source for the Cor-HC construction is ambiguous between the two classical
// denominators, and the reproduced power table constrains the choice; see
// the README. PositionStd divides by the binomial sd at height i/p,
// PValueStd by the sd at the p-value itself (explosive near m = 0).
enum class HcVariant { PositionStd, PValueStd };

struct HcResult {
  Eigen::VectorXd t_stats;   // marginal statistics, coordinate order
  Eigen::VectorXd p_values;  // 2 Phi(-|t_j|), coordinate order
  double hc_score = -std::numeric_limits<double>::infinity();
  int threshold_index = 0;   // 1-based order-statistic index at the max
};

// Cor-HC score: marginal statistics t_j = sum_i y_i x_{j,i} / ||y||,
// two-sided normal p-values, maximized HC objective over the order
// statistics with m_(i) <= 1/2. If no index is eligible the score is the
// -infinity sentinel and the test never rejects.
inline HcResult hc_statistic(const Dataset& dataset,
                             HcVariant variant = HcVariant::PositionStd) {
  const Eigen::Index n = dataset.n();
  const Eigen::Index p = dataset.p();
  if (n < 2) throw TooFewObservations("hc_statistic requires n >= 2");
  const double y_norm2 = dataset.y.squaredNorm();
  if (y_norm2 == 0.0)
    throw DegenerateResponse("response is identically zero");

  HcResult out;
  out.t_stats = (dataset.x.transpose() * dataset.y) / std::sqrt(y_norm2);
  out.p_values.resize(p);
  for (Eigen::Index j = 0; j < p; ++j)
    out.p_values[j] = 2.0 * normal_cdf(-std::abs(out.t_stats[j]));

  std::vector<double> sorted(out.p_values.data(), out.p_values.data() + p);
  std::sort(sorted.begin(), sorted.end());
  const double pd = static_cast<double>(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double m = sorted[static_cast<std::size_t>(i)];
    if (m > 0.5) break;
    const double h = static_cast<double>(i + 1) / pd;
    const double den = (variant == HcVariant::PositionStd)
                           ? std::sqrt(h * (1.0 - h) + 1e-300)
                           : std::sqrt(m * (1.0 - m) + 1e-300);
    const double value = std::sqrt(pd) * (h - m) / den;
    if (value > out.hc_score) {
      out.hc_score = value;
      out.threshold_index = static_cast<int>(i + 1);
    }
  }
  return out;
}

// Rejects when the score strictly exceeds the calibrated threshold.
inline bool hc_test(const Dataset& dataset, double c_hc,
                    HcVariant variant = HcVariant::PositionStd) {
  return hc_statistic(dataset, variant).hc_score > c_hc;
}

}  // namespace sss
