#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>
#include <vector>

#include "sss/errors.hpp"
#include "sss/models.hpp"

namespace sss {

inline constexpr int kDefaultSliceCount = 10;
inline constexpr int kMaxSliceCount = 64;

// Slice summary of a dataset: the data are ordered by the response, cut
// into H nearly equal slices, and the covariate mean of each slice is
// recorded. The SIR matrix is Lambda_hat = (1/H) X_H X_H^T where column h
// of the p x H factor X_H is the h-th slice mean.
struct SlicedSummary {
  int h_slices = 0;
  Eigen::MatrixXd slice_means;   // p x H
  std::vector<int> slice_sizes;  // sums to n; sizes differ by at most 1
  bool ties_warning = false;     // > 10% of responses tied
  double tie_fraction = 0.0;

  // H x H Gram form (1/H) X_H^T X_H; shares its nonzero spectrum with
  // the p x p matrix, so eigenvalue work stays O(H^3).
  Eigen::MatrixXd gram() const {
    return (slice_means.transpose() * slice_means) / double(h_slices);
  }

  // Materialized p x p SIR matrix; quadratic in p, intended for the
  // restricted-eigenvalue statistics and small-p inspection.
  Eigen::MatrixXd lambda_hat() const {
    return (slice_means * slice_means.transpose()) / double(h_slices);
  }
};

// Orders observations by response (stable in the original index for tied
// responses), splits them into H slices of size floor(n/H) with the
// remainder spread one-each over the last slices, and averages covariates
// within each slice. When `center` is set the global column means of x are
// subtracted first, since var(E[x|y]) is a centered quantity; the raw
// moment form is kept for hand verification.
inline SlicedSummary slice(const Dataset& dataset, int h_slices,
                           bool center = true) {
  const Eigen::Index n = dataset.n();
  const Eigen::Index p = dataset.p();
  if (h_slices < 2) throw Error("slice count must be at least 2");
  if (h_slices > kMaxSliceCount) throw Error("slice count must be <= 64");
  if (n < 2 * static_cast<Eigen::Index>(h_slices))
    throw TooFewObservations("slicing requires n >= 2H");

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto& y = dataset.y;
  std::stable_sort(order.begin(), order.end(),
                   [&y](Eigen::Index a, Eigen::Index b) { return y[a] < y[b]; });

  // Fraction of observations that share their response with another.
  Eigen::Index tied = 0;
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i;
    while (j < n && y[order[j]] == y[order[i]]) ++j;
    if (j - i > 1) tied += j - i;
    i = j;
  }

  SlicedSummary out;
  out.h_slices = h_slices;
  out.tie_fraction = static_cast<double>(tied) / static_cast<double>(n);
  out.ties_warning = out.tie_fraction > 0.10;

  const Eigen::RowVectorXd col_means =
      center ? Eigen::RowVectorXd(dataset.x.colwise().mean())
             : Eigen::RowVectorXd(Eigen::RowVectorXd::Zero(p));

  const Eigen::Index c = n / h_slices;
  const Eigen::Index r = n % h_slices;
  out.slice_sizes.resize(h_slices);
  out.slice_means.resize(p, h_slices);
  Eigen::Index pos = 0;
  for (int h = 0; h < h_slices; ++h) {
    const Eigen::Index size = c + ((h >= h_slices - r) ? 1 : 0);
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(p);
    for (Eigen::Index k = 0; k < size; ++k) mean += dataset.x.row(order[pos + k]);
    mean /= static_cast<double>(size);
    out.slice_means.col(h) = (mean - col_means).transpose();
    out.slice_sizes[h] = static_cast<int>(size);
    pos += size;
  }
  return out;
}

// lambda_max of the SIR matrix, computed on the H x H Gram form.
inline double top_eigenvalue(const SlicedSummary& summary) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(summary.gram(),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

// The gSNR of a linear model y = beta.x + eps: the unique nonzero
// eigenvalue of var(E[x|y]),
//   lambda = (b0' S S b0 |beta|^2) / (b0' S b0 |beta|^2 + sigma^2),
// with b0 = beta/|beta|. sigma_eps is the noise standard deviation.
struct GsnrOracle {
  double lambda = 0.0;
};

inline GsnrOracle gsnr_linear(const Eigen::VectorXd& beta,
                              const Eigen::MatrixXd& sigma_matrix,
                              double sigma_eps) {
  const double norm2 = beta.squaredNorm();
  if (norm2 == 0.0) throw ZeroBeta("gsnr_linear requires a nonzero beta");
  const Eigen::VectorXd b0 = beta / std::sqrt(norm2);
  const Eigen::VectorXd sb = sigma_matrix * b0;
  const double num = sb.squaredNorm() * norm2;
  const double den = b0.dot(sb) * norm2 + sigma_eps * sigma_eps;
  return GsnrOracle{num / den};
}

}  // namespace sss
