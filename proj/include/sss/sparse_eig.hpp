#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "sss/errors.hpp"
#include "sss/partial_eig.hpp"
#include "sss/projections.hpp"

namespace sss {

// ---------------------------------------------------------------------------
// Exact restricted eigenvalue by enumeration
// ---------------------------------------------------------------------------

inline constexpr double kEnumerationBudget = 1e6;

inline double binomial_coefficient(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) {
    c *= static_cast<double>(n - k + i) / static_cast<double>(i);
    if (c > 1e18) return c;
  }
  return c;
}

struct SparseEigResult {
  double value = 0.0;
  std::vector<int> support;
};

inline double sym_top_eigenvalue(const Eigen::MatrixXd& a) {
  if (a.rows() == 1) return a(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

// max over |S| = ks of lambda_max(A_S), enumerated in lexicographic order;
// ties keep the lexicographically smallest support. Guarded by the subset
// budget C(p, ks) <= 1e6.
inline SparseEigResult exact_sparse_eigenvalue(const Eigen::MatrixXd& a,
                                               int ks) {
  const int p = static_cast<int>(a.rows());
  if (ks < 1) throw Error("ks must be at least 1");
  if (ks >= p) {
    SparseEigResult r;
    r.value = sym_top_eigenvalue(a);
    r.support.resize(p);
    for (int i = 0; i < p; ++i) r.support[i] = i;
    return r;
  }
  if (binomial_coefficient(p, ks) > kEnumerationBudget)
    throw EnumerationTooLarge("C(p, ks) exceeds the enumeration budget");

  std::vector<int> idx(ks);
  for (int i = 0; i < ks; ++i) idx[i] = i;
  Eigen::MatrixXd sub(ks, ks);
  SparseEigResult best;
  best.value = -std::numeric_limits<double>::infinity();
  while (true) {
    for (int i = 0; i < ks; ++i)
      for (int j = 0; j < ks; ++j) sub(i, j) = a(idx[i], idx[j]);
    const double lam = sym_top_eigenvalue(sub);
    if (lam > best.value) {
      best.value = lam;
      best.support = idx;
    }
    // next combination
    int i = ks - 1;
    while (i >= 0 && idx[i] == p - ks + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < ks; ++j) idx[j] = idx[j - 1] + 1;
  }
  return best;
}

// Upper bound lambda_max(st_z(A)) + ks z for the relaxed value, where
// st_z soft-thresholds magnitudes: st_z(a) = sign(a) (|a| - z)_+.
inline double soft_threshold_bound(const Eigen::MatrixXd& a, double z,
                                   int ks) {
  if (z < 0.0) throw Error("soft threshold must be nonnegative");
  const Eigen::MatrixXd st = a.unaryExpr([z](double v) {
    const double t = std::abs(v) - z;
    return t > 0.0 ? (v > 0.0 ? t : -t) : 0.0;
  });
  return sym_top_eigenvalue(st) + static_cast<double>(ks) * z;
}

// ---------------------------------------------------------------------------
// SDP relaxation via operator splitting
// ---------------------------------------------------------------------------

struct SdpSettings {
  int max_iterations = 2000;
  double primal_tolerance = 1e-6;
  double dual_tolerance = 1e-6;
  double penalty = 1.0;          // splitting step, adapted at runtime
  bool adaptive_penalty = true;
  int full_eig_threshold = 192;  // below this, dense eigensolver per step
};

struct SdpResult {
  double value = 0.0;
  Eigen::MatrixXd m_matrix;
  int iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int rank = 0;  // active eigenvalues of the returned M
};

// Maximizes tr(A M) over {M PSD, tr M = 1, sum |M_ij| <= ks} by ADMM:
// one block projects onto the spectahedron (eigenvalues onto the
// probability simplex), the other onto the elementwise l1 ball, with a
// scaled dual update between them. Instances keep their iterates and the
// eigensolver basis, so chained solves on nearby matrices warm-start.
class SdpSolver {
 public:
  SdpSolver() = default;
  explicit SdpSolver(SdpSettings settings) : settings_(settings) {}

  SdpSettings& settings() { return settings_; }
  const SdpSettings& settings() const { return settings_; }

  void reset() {
    warm_ = false;
    projector_.reset();
  }

  SdpResult solve(const Eigen::MatrixXd& a, int ks) {
    const int p = static_cast<int>(a.rows());
    if (a.cols() != p) throw Error("sdp_sparse_eigenvalue needs a square matrix");
    if (ks < 1) throw Error("ks must be at least 1");

    SdpResult out;
    if (ks >= p) {
      // l1 constraint is vacuous on the spectahedron; the maximizer is the
      // top eigenvector.
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
      const int top = static_cast<int>(es.eigenvalues().size()) - 1;
      const Eigen::VectorXd v = es.eigenvectors().col(top);
      out.value = es.eigenvalues()[top];
      out.m_matrix.noalias() = v * v.transpose();
      out.converged = true;
      out.rank = 1;
      return out;
    }

    const double radius = static_cast<double>(ks);
    if (!warm_ || m_.rows() != p) {
      m_ = Eigen::MatrixXd::Identity(p, p) / static_cast<double>(p);
      n_ = m_;
      u_ = Eigen::MatrixXd::Zero(p, p);
      rho_ = settings_.penalty;
      l1_theta_ = 0.0;
      projector_ = SpectahedronProjector(settings_.full_eig_threshold);
    }
    const double proj_tol = std::clamp(
        0.05 * std::min(settings_.primal_tolerance, settings_.dual_tolerance),
        1e-12, 1e-6);

    double r_norm = 0.0, s_norm = 0.0;
    int it = 0;
    bool converged = false;
    Eigen::MatrixXd v_work(p, p), n_prev(p, p);
    while (it < settings_.max_iterations) {
      ++it;
      v_work = n_ - u_ + a / rho_;
      projector_.project(v_work, proj_tol, m_);
      n_prev = n_;
      n_ = m_ + u_;
      project_l1_ball_inplace(n_, radius, &l1_theta_);
      u_ += m_ - n_;
      r_norm = (m_ - n_).norm();
      s_norm = rho_ * (n_ - n_prev).norm();
      if (r_norm <= settings_.primal_tolerance &&
          s_norm <= settings_.dual_tolerance) {
        converged = true;
        break;
      }
      if (settings_.adaptive_penalty && it % 10 == 0) {
        if (r_norm > 10.0 * s_norm) {
          rho_ *= 2.0;
          u_ *= 0.5;
        } else if (s_norm > 10.0 * r_norm) {
          rho_ *= 0.5;
          u_ *= 2.0;
        }
      }
    }
    warm_ = true;

    // Feasibility correction: M already satisfies the spectral constraints
    // exactly; pull the off-diagonal mass inside the l1 ball by shrinking
    // toward diag(M), which stays PSD with unit trace.
    out.m_matrix = m_;
    const double l1 = out.m_matrix.cwiseAbs().sum();
    if (l1 > radius) {
      const double d = out.m_matrix.diagonal().cwiseAbs().sum();
      const double gamma = (l1 > d) ? std::max(0.0, (radius - d) / (l1 - d)) : 0.0;
      const Eigen::VectorXd diag = out.m_matrix.diagonal();
      out.m_matrix *= gamma;
      out.m_matrix.diagonal() = diag;
    }
    out.value = out.m_matrix.cwiseProduct(a).sum();
    out.iterations = it;
    out.converged = converged;
    out.primal_residual = r_norm;
    out.dual_residual = s_norm;
    out.rank = projector_.last_active();
    return out;
  }

 private:
  SdpSettings settings_{};
  Eigen::MatrixXd m_, n_, u_;
  double rho_ = 1.0;
  double l1_theta_ = 0.0;
  bool warm_ = false;
  SpectahedronProjector projector_{};
};

// One-shot convenience wrapper.
inline SdpResult sdp_sparse_eigenvalue(const Eigen::MatrixXd& a, int ks,
                                       const SdpSettings& settings = {}) {
  SdpSolver solver(settings);
  return solver.solve(a, ks);
}

}  // namespace sss
