#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <utility>

#include "sss/rng.hpp"

namespace sss {

namespace detail {

// Water level for the spectahedron: given eigenvalues in decreasing order,
// the theta with sum (w_i - theta)_+ = 1 over the leading `count` values.
// Returns (theta, active count).
inline std::pair<double, int> spectahedron_water(const Eigen::VectorXd& w,
                                                 int count) {
  double cumsum = 0.0;
  double theta = w[0] - 1.0;
  int active = 1;
  for (int k = 0; k < count; ++k) {
    cumsum += w[k];
    const double cand = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (w[k] - cand > 0.0) {
      theta = cand;
      active = k + 1;
    } else {
      break;
    }
  }
  return {theta, active};
}

}  // namespace detail

// Projection onto {M PSD, tr M = 1} for a stream of slowly-changing dense
// symmetric matrices. Small matrices use a full eigendecomposition. Large
// ones use warm-started block subspace iteration: the active (above-water)
// Ritz pairs must converge tightly, while the first inactive pair only
// needs its one-sided bound ritz + residual to clear the water level,
// which the spectral gap of a low-rank solution makes cheap.
class SpectahedronProjector {
 public:
  explicit SpectahedronProjector(int full_eig_threshold = 192)
      : full_threshold_(full_eig_threshold), rng_(0x5eed5eedULL) {}

  void reset() { basis_.resize(0, 0); }

  int last_active() const { return last_active_; }

  // tol is the acceptable Frobenius error of the projection, relative to
  // max(1, |top eigenvalue|).
  void project(const Eigen::MatrixXd& v, double tol, Eigen::MatrixXd& out) {
    const int p = static_cast<int>(v.rows());
    if (p <= full_threshold_ || p <= 3) {
      full_projection(v, out);
      return;
    }
    if (subspace_projection(v, tol, out)) return;
    full_projection(v, out);
  }

 private:
  static constexpr int kMaxBlock = 40;
  static constexpr int kMaxSweeps = 40;

  void full_projection(const Eigen::MatrixXd& v, Eigen::MatrixXd& out) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v);
    const int p = static_cast<int>(v.rows());
    const Eigen::VectorXd w = es.eigenvalues().reverse();
    const auto [theta, active] = detail::spectahedron_water(w, p);
    Eigen::MatrixXd vec(p, active);
    Eigen::VectorXd shifted(active);
    for (int i = 0; i < active; ++i) {
      vec.col(i) = es.eigenvectors().col(p - 1 - i);
      shifted[i] = w[i] - theta;
    }
    out.noalias() = vec * shifted.asDiagonal() * vec.transpose();
    last_active_ = active;
  }

  bool subspace_projection(const Eigen::MatrixXd& v, double tol,
                           Eigen::MatrixXd& out) {
    const int p = static_cast<int>(v.rows());
    int b = std::clamp(last_active_ + 4, 6, std::min(kMaxBlock, p - 1));
    ensure_basis(p, b);
    Eigen::MatrixXd z, small, ritz, zr;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      z.noalias() = v.selfadjointView<Eigen::Lower>() * basis_;
      small.noalias() = basis_.transpose() * z;
      small = 0.5 * (small + small.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(small);
      const Eigen::VectorXd w = es.eigenvalues().reverse();
      const Eigen::MatrixXd rot = es.eigenvectors().rowwise().reverse();
      ritz.noalias() = basis_ * rot;
      zr.noalias() = z * rot;

      const auto [theta, active] = detail::spectahedron_water(w, b);
      if (active >= b - 1) {
        // not enough room below the water level; widen the block
        if (b >= std::min(kMaxBlock, p - 1)) return false;
        basis_ = ritz;
        b = std::min({b * 2, kMaxBlock, p - 1});
        ensure_basis(p, b);
        continue;
      }
      const double scale = std::max(1.0, std::abs(w[0]));
      const double budget = tol * scale;
      bool tight_ok = true;
      for (int i = 0; i < active && tight_ok; ++i)
        tight_ok = (zr.col(i) - w[i] * ritz.col(i)).norm() <= budget;
      if (tight_ok) {
        const double probe_resid =
            (zr.col(active) - w[active] * ritz.col(active)).norm();
        if (w[active] + probe_resid <= theta + budget) {
          Eigen::VectorXd shifted(active);
          for (int i = 0; i < active; ++i) shifted[i] = w[i] - theta;
          out.noalias() = ritz.leftCols(active) * shifted.asDiagonal() *
                          ritz.leftCols(active).transpose();
          basis_ = ritz;
          last_active_ = active;
          return true;
        }
      }
      basis_ = zr;  // one power step, already applied to the Ritz basis
      orthonormalize(basis_);
    }
    return false;
  }

  void ensure_basis(Eigen::Index p, int b) {
    if (basis_.rows() == p && basis_.cols() == b) return;
    Eigen::MatrixXd fresh(p, b);
    const int keep =
        (basis_.rows() == p) ? static_cast<int>(std::min<Eigen::Index>(b, basis_.cols())) : 0;
    for (int j = 0; j < b; ++j) {
      if (j < keep) {
        fresh.col(j) = basis_.col(j);
      } else {
        for (Eigen::Index i = 0; i < p; ++i) fresh(i, j) = rng_.normal();
      }
    }
    basis_ = std::move(fresh);
    orthonormalize(basis_);
  }

  static void orthonormalize(Eigen::MatrixXd& q) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
    q = qr.householderQ() * Eigen::MatrixXd::Identity(q.rows(), q.cols());
  }

  int full_threshold_;
  int last_active_ = 1;
  Eigen::MatrixXd basis_;
  RngStream rng_;
};

}  // namespace sss
