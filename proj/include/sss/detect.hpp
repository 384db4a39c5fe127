#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "sss/errors.hpp"
#include "sss/hc.hpp"
#include "sss/models.hpp"
#include "sss/rng.hpp"
#include "sss/sir.hpp"
#include "sss/sparse_eig.hpp"

namespace sss {

enum class SparseMode { Auto, Exact, Sdp };
enum class AnovaMode { Standardized, Raw };
enum class CalibrationMode { PerDataset, Pooled };

inline const char* to_string(SparseMode m) {
  switch (m) {
    case SparseMode::Auto: return "auto";
    case SparseMode::Exact: return "exact";
    case SparseMode::Sdp: return "sdp";
  }
  return "?";
}

inline const char* to_string(CalibrationMode m) {
  return m == CalibrationMode::PerDataset ? "per_dataset" : "pooled";
}

// Everything a single test evaluation needs besides the data.
struct DetectSettings {
  int h_slices = kDefaultSliceCount;
  int ks = 1;  // k * s in the restricted eigenvalue
  SparseMode sparse_mode = SparseMode::Auto;
  AnovaMode anova_mode = AnovaMode::Standardized;
  HcVariant hc_variant = HcVariant::PositionStd;
  SdpSettings sdp{};
};

// Exact enumeration when the subset count fits the budget, else the SDP.
inline bool use_exact_mode(SparseMode mode, int p, int ks) {
  switch (mode) {
    case SparseMode::Exact: return true;
    case SparseMode::Sdp: return false;
    case SparseMode::Auto:
      return ks >= p || binomial_coefficient(p, ks) <= kEnumerationBudget;
  }
  return false;
}

struct TestStatistics {
  double lambda_max = 0.0;   // lambda_max of the SIR matrix
  double sparse_eig = 0.0;   // restricted eigenvalue (exact or relaxed)
  bool sparse_is_exact = false;
  double anova_t = 0.0;      // (1/n) sum (y~_j^2 - 1)
  double trace_term = 0.0;   // tr(Sigma_hat) / n
};

// Monte-Carlo null quantiles with the calibration metadata needed to
// validate a later test run against them.
struct CalibratedThresholds {
  double tau_n = 0.0;        // lambda_max quantile
  double tau_n_prime = 0.0;  // restricted-eigenvalue quantile
  double tau_n_dprime = 0.0; // anova quantile
  double c_hc = 0.0;         // HC quantile
  double level = 0.05;
  int n_null = 100;
  CalibrationMode mode = CalibrationMode::PerDataset;
  std::uint64_t seed = 0;
  // shape metadata
  int n = 0;
  int p = 0;
  int h_slices = 0;
  int ks = 0;
};

struct TestOutcome {
  TestStatistics statistics;
  CalibratedThresholds thresholds;
  bool reject_psi1 = false;
  bool reject_psi2 = false;
  bool reject_psi3 = false;
  bool reject_sss = false;
  bool reject_sssa = false;
};

namespace detail {

inline double median_inplace(std::vector<double>& v) {
  const std::size_t n = v.size();
  auto mid = v.begin() + n / 2;
  std::nth_element(v.begin(), mid, v.end());
  double hi = *mid;
  if (n % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + n / 2 - 1, v.end());
  return 0.5 * (hi + v[n / 2 - 1]);
}

// Robust scale: MAD / Phi^{-1}(3/4). The ANOVA statistic divides by this
// rather than the sample standard deviation, which would make the
// statistic identically zero.
inline double robust_sigma(const Eigen::VectorXd& y) {
  std::vector<double> work(y.data(), y.data() + y.size());
  const double med = median_inplace(work);
  for (double& v : work) v = std::abs(v - med);
  const double mad = median_inplace(work);
  return mad / 0.6744897501960817;
}

}  // namespace detail

// ANOVA-type statistic t = (1/n) sum(y~_j^2 - 1). Standardized mode
// centers by the mean and scales by the robust sigma, so the statistic is
// invariant under y -> a y + b (a != 0); raw mode uses y as-is, matching
// the known-unit-noise theory.
inline double anova_statistic(const Eigen::VectorXd& y, AnovaMode mode) {
  const double n = static_cast<double>(y.size());
  if (mode == AnovaMode::Raw) return y.squaredNorm() / n - 1.0;
  const double sigma = detail::robust_sigma(y);
  if (sigma <= 0.0) return -1.0;  // constant response
  const double mean = y.mean();
  const double ss = (y.array() - mean).square().sum();
  return ss / (sigma * sigma * n) - 1.0;
}

// All spectral and moment statistics for one dataset. A caller-owned
// SdpSolver can be passed to warm-start chained evaluations; otherwise a
// fresh solver is used.
inline TestStatistics compute_statistics(const Dataset& dataset,
                                         const DetectSettings& settings,
                                         SdpSolver* solver = nullptr) {
  const int p = static_cast<int>(dataset.p());
  if (settings.ks < 1 || settings.ks >= p)
    throw Error("compute_statistics requires 1 <= ks < p");

  TestStatistics out;
  const SlicedSummary summary = slice(dataset, settings.h_slices);
  out.lambda_max = top_eigenvalue(summary);

  const Eigen::MatrixXd lambda = summary.lambda_hat();
  if (use_exact_mode(settings.sparse_mode, p, settings.ks)) {
    out.sparse_eig = exact_sparse_eigenvalue(lambda, settings.ks).value;
    out.sparse_is_exact = true;
  } else if (solver != nullptr) {
    out.sparse_eig = solver->solve(lambda, settings.ks).value;
  } else {
    out.sparse_eig = sdp_sparse_eigenvalue(lambda, settings.ks, settings.sdp).value;
  }

  out.anova_t = anova_statistic(dataset.y, settings.anova_mode);

  // tr(Sigma_hat)/n from per-column sample variances.
  const double n = static_cast<double>(dataset.n());
  const Eigen::RowVectorXd means = dataset.x.colwise().mean();
  double trace = 0.0;
  for (Eigen::Index j = 0; j < dataset.p(); ++j)
    trace += (dataset.x.col(j).array() - means[j]).square().sum() / (n - 1.0);
  out.trace_term = trace / n;
  return out;
}

// Upper quantile convention used throughout: the k-th smallest of m values
// with k = ceil((1 - level) m).
inline double quantile_upper(std::vector<double> values, double level) {
  if (values.empty()) throw Error("quantile of empty sample");
  if (!(level > 0.0 && level < 1.0)) throw Error("level must lie in (0,1)");
  const std::size_t m = values.size();
  const std::size_t k = static_cast<std::size_t>(
      std::ceil((1.0 - level) * static_cast<double>(m)));
  auto nth = values.begin() + (k - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

// One null draw's worth of statistics, also reused by the pooled scheme.
struct NullStatistics {
  double lambda_max = 0.0;
  double sparse_eig = 0.0;
  double anova_t = 0.0;
  double hc_score = 0.0;
};

inline NullStatistics null_statistics(const Eigen::MatrixXd& x,
                                      const Eigen::VectorXd& z,
                                      const DetectSettings& settings,
                                      SdpSolver* solver) {
  Dataset ds;
  ds.x = x;
  ds.y = z;
  const TestStatistics s = compute_statistics(ds, settings, solver);
  NullStatistics out;
  out.lambda_max = s.lambda_max;
  out.sparse_eig = s.sparse_eig;
  out.anova_t = s.anova_t;
  out.hc_score = hc_statistic(ds, settings.hc_variant).hc_score;
  return out;
}

// Thresholds from a collection of null statistics plus shape metadata.
inline CalibratedThresholds thresholds_from_nulls(
    const std::vector<NullStatistics>& nulls, double level,
    CalibrationMode mode, std::uint64_t seed, int n, int p,
    const DetectSettings& settings) {
  if (nulls.size() < 20) throw Error("calibration needs at least 20 null draws");
  std::vector<double> lam, sp, an, hc;
  lam.reserve(nulls.size());
  sp.reserve(nulls.size());
  an.reserve(nulls.size());
  hc.reserve(nulls.size());
  for (const auto& s : nulls) {
    lam.push_back(s.lambda_max);
    sp.push_back(s.sparse_eig);
    an.push_back(s.anova_t);
    hc.push_back(s.hc_score);
  }
  CalibratedThresholds out;
  out.tau_n = quantile_upper(lam, level);
  out.tau_n_prime = quantile_upper(sp, level);
  out.tau_n_dprime = quantile_upper(an, level);
  out.c_hc = quantile_upper(hc, level);
  out.level = level;
  out.n_null = static_cast<int>(nulls.size());
  out.mode = mode;
  out.seed = seed;
  out.n = n;
  out.p = p;
  out.h_slices = settings.h_slices;
  out.ks = settings.ks;
  return out;
}

// Monte-Carlo calibration holding the design fixed: n_null standard-normal
// responses are drawn, all statistics are computed on (x, z), and the
// thresholds are their upper quantiles at the given level.
inline CalibratedThresholds calibrate(const Eigen::MatrixXd& x,
                                      const DetectSettings& settings,
                                      double level, int n_null,
                                      std::uint64_t seed) {
  if (n_null < 20) throw Error("calibration needs at least 20 null draws");
  RngStream rng(seed);
  SdpSolver solver(settings.sdp);
  std::vector<NullStatistics> nulls;
  nulls.reserve(static_cast<std::size_t>(n_null));
  for (int k = 0; k < n_null; ++k) {
    const Eigen::VectorXd z = rng.normal_vector(x.rows());
    nulls.push_back(null_statistics(x, z, settings, &solver));
  }
  return thresholds_from_nulls(nulls, level, CalibrationMode::PerDataset,
                               seed, static_cast<int>(x.rows()),
                               static_cast<int>(x.cols()), settings);
}

// Decision rules. The calibrated tau_n already contains the tr(Sigma)/n
// bulk (the null statistics were computed on the same design), so the raw
// lambda_max is compared against it directly.
inline TestOutcome run_test(const Dataset& dataset,
                            const CalibratedThresholds& thresholds,
                            const DetectSettings& settings,
                            SdpSolver* solver = nullptr) {
  if (thresholds.n != static_cast<int>(dataset.n()) ||
      thresholds.p != static_cast<int>(dataset.p()) ||
      thresholds.h_slices != settings.h_slices ||
      thresholds.ks != settings.ks)
    throw ThresholdMismatch("calibration metadata does not match the dataset");

  TestOutcome out;
  out.statistics = compute_statistics(dataset, settings, solver);
  out.thresholds = thresholds;
  out.reject_psi1 = out.statistics.lambda_max > thresholds.tau_n;
  out.reject_psi2 = out.statistics.sparse_eig > thresholds.tau_n_prime;
  out.reject_psi3 = out.statistics.anova_t > thresholds.tau_n_dprime;
  out.reject_sss = out.reject_psi1 || out.reject_psi2;
  out.reject_sssa = out.reject_sss || out.reject_psi3;
  return out;
}

}  // namespace sss
