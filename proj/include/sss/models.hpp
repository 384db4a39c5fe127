#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sss/errors.hpp"
#include "sss/rng.hpp"

namespace sss {

// ---------------------------------------------------------------------------
// Covariance specifications
// ---------------------------------------------------------------------------

enum class CovKind { Identity, ToeplitzAR, BlockedBySupport };

// Declarative description of the design covariance Sigma.
//  - ToeplitzAR:        sigma_ij = rho^|i-j|, rho in [0, 1)
//  - BlockedBySupport:  sigma_ij = rho inside S x S and S^c x S^c,
//                       `cross` across the blocks, unit diagonal
struct CovarianceSpec {
  CovKind kind = CovKind::Identity;
  int p = 0;
  double rho = 0.0;
  double cross = 0.1;
};

inline const char* to_string(CovKind k) {
  switch (k) {
    case CovKind::Identity: return "identity";
    case CovKind::ToeplitzAR: return "toeplitz_ar";
    case CovKind::BlockedBySupport: return "blocked_by_support";
  }
  return "?";
}

namespace detail {

// Smallest eigenvalue of the blocked covariance in closed form. The matrix
// is (1-rho) I plus a rank-2 correction spanned by the block indicators, so
// the spectrum is {1-rho} plus the eigenvalues of a 2x2 coupling matrix.
inline double blocked_min_eigenvalue(int p, int s, double rho, double cross) {
  const double a = static_cast<double>(s);
  const double b = static_cast<double>(p - s);
  double lo = (p > 2) ? 1.0 - rho : std::numeric_limits<double>::infinity();
  const double d1 = 1.0 + (a - 1.0) * rho;
  if (b == 0.0) return std::min(lo, d1);
  const double d2 = 1.0 + (b - 1.0) * rho;
  const double off = cross * std::sqrt(a * b);
  const double tr = d1 + d2;
  const double disc = std::sqrt((d1 - d2) * (d1 - d2) + 4.0 * off * off);
  return std::min(lo, 0.5 * (tr - disc));
}

}  // namespace detail

// Realizes the p x p covariance matrix. `support` is required (and must be
// nonempty) only for BlockedBySupport; it lists the indices of S.
inline Eigen::MatrixXd build_covariance(const CovarianceSpec& spec,
                                        const std::vector<int>& support = {}) {
  if (spec.p <= 0) throw Error("covariance dimension must be positive");
  const int p = spec.p;
  Eigen::MatrixXd sigma(p, p);
  switch (spec.kind) {
    case CovKind::Identity:
      sigma.setIdentity();
      break;
    case CovKind::ToeplitzAR: {
      if (spec.rho < 0.0 || spec.rho >= 1.0)
        throw Error("ToeplitzAR rho must lie in [0, 1)");
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
          sigma(i, j) = std::pow(spec.rho, std::abs(i - j));
      break;
    }
    case CovKind::BlockedBySupport: {
      if (support.empty())
        throw Error("BlockedBySupport requires a nonempty support");
      std::vector<char> in_s(p, 0);
      for (int idx : support) {
        if (idx < 0 || idx >= p) throw Error("support index out of range");
        in_s[idx] = 1;
      }
      const int s = static_cast<int>(std::count(in_s.begin(), in_s.end(), 1));
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
          sigma(i, j) = (i == j)        ? 1.0
                        : (in_s[i] == in_s[j]) ? spec.rho
                                                : spec.cross;
      const double min_eig =
          detail::blocked_min_eigenvalue(p, s, spec.rho, spec.cross);
      if (!(min_eig > 1e-10))
        throw NotPositiveDefinite("blocked covariance is not positive definite");
      break;
    }
  }
  return sigma;
}

// ---------------------------------------------------------------------------
// Model specifications
// ---------------------------------------------------------------------------

// Link functions from the simulation study, plus the cubic example with
// vanishing marginal correlations. With u = x.beta and eps ~ N(0, I):
//   I    y = 0.02 (16 u - exp(u)) + sigma eps
//   II   y = 0.2 sin(u/2) exp(u/2) + sigma eps
//   III  y = 0.8 (u - u^3/15) + sigma eps
//   IV   y = sin(u) exp(u/10) sigma eps
//   V    y = kappa u - exp(u) + sigma eps
//   VI   y = kappa (15 u - exp(u)) + 4 sigma eps
//   VII  y = sin(u) exp(10 u kappa) sigma eps
//   CubicExample(k)  y = t - t^3/(3k) + sigma eps, t = x_1 + ... + x_k
enum class Link {
  Null,
  LinearExpI,
  SinExpII,
  CubicIII,
  MultNoiseIV,
  VaryKappaV,
  ScaledVI,
  MultKappaVII,
  CubicExample,
};

enum class SupportKind { FirstS, RandomS };

struct ModelSpec {
  Link link = Link::Null;
  int s = 0;  // support size; for CubicExample this is the paper's k
  SupportKind support = SupportKind::FirstS;
  double kappa = 1.0;     // used by V, VI, VII
  double sigma_eps = 1.0; // noise standard deviation
  bool normalize_beta = false;
};

inline const char* to_string(Link l) {
  switch (l) {
    case Link::Null: return "null";
    case Link::LinearExpI: return "I";
    case Link::SinExpII: return "II";
    case Link::CubicIII: return "III";
    case Link::MultNoiseIV: return "IV";
    case Link::VaryKappaV: return "V";
    case Link::ScaledVI: return "VI";
    case Link::MultKappaVII: return "VII";
    case Link::CubicExample: return "cubic";
  }
  return "?";
}

inline Link link_from_string(const std::string& name) {
  if (name == "null") return Link::Null;
  if (name == "I") return Link::LinearExpI;
  if (name == "II") return Link::SinExpII;
  if (name == "III") return Link::CubicIII;
  if (name == "IV") return Link::MultNoiseIV;
  if (name == "V") return Link::VaryKappaV;
  if (name == "VI") return Link::ScaledVI;
  if (name == "VII") return Link::MultKappaVII;
  if (name == "cubic") return Link::CubicExample;
  throw ConfigError("unknown model link: " + name);
}

// Support sizes used in the simulation study.
inline int default_support_size(Link l) {
  switch (l) {
    case Link::Null: return 0;
    case Link::LinearExpI: return 7;
    case Link::SinExpII: return 10;
    case Link::CubicIII: return 5;
    case Link::MultNoiseIV: return 10;
    case Link::VaryKappaV: return 7;
    case Link::ScaledVI: return 7;
    case Link::MultKappaVII: return 10;
    case Link::CubicExample: return 5;
  }
  return 0;
}

// An n x p design plus response; the unit every test consumes.
struct Dataset {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::optional<ModelSpec> truth;

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index p() const { return x.cols(); }
};

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

// Support positions, ascending. RandomS draws s distinct indices by a
// partial Fisher-Yates shuffle of [0, p), so it is a pure function of the
// stream state.
inline std::vector<int> choose_support(const ModelSpec& spec, int p,
                                       RngStream& rng) {
  if (spec.link == Link::Null || spec.s == 0) return {};
  if (spec.s < 0 || spec.s >= p) throw Error("support size must satisfy 0 <= s < p");
  if (spec.support == SupportKind::FirstS) {
    std::vector<int> out(spec.s);
    for (int i = 0; i < spec.s; ++i) out[i] = i;
    return out;
  }
  std::vector<int> pool(p);
  for (int i = 0; i < p; ++i) pool[i] = i;
  for (int i = 0; i < spec.s; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(p - i)));
    std::swap(pool[i], pool[j]);
  }
  std::vector<int> out(pool.begin(), pool.begin() + spec.s);
  std::sort(out.begin(), out.end());
  return out;
}

// Coefficient vector: exactly s nonzero entries at the support positions.
// Entries are standard normal, except the cubic example where the formula
// fixes them to 1.
inline Eigen::VectorXd sample_beta(const ModelSpec& spec, int p,
                                   const std::vector<int>& support,
                                   RngStream& rng) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  if (spec.link == Link::Null) return beta;
  for (int idx : support)
    beta[idx] = (spec.link == Link::CubicExample) ? 1.0 : rng.normal();
  if (spec.normalize_beta) {
    const double norm = beta.norm();
    if (norm > 0.0) beta /= norm;
  }
  return beta;
}

// Response under the given link. `eps` is a standard normal vector; the
// noise scale sigma_eps multiplies it inside each formula.
inline Eigen::VectorXd link_response(const ModelSpec& spec,
                                     const Eigen::VectorXd& u,
                                     const Eigen::VectorXd& eps) {
  const double sig = spec.sigma_eps;
  const double kap = spec.kappa;
  switch (spec.link) {
    case Link::Null:
      return sig * eps;
    case Link::LinearExpI:
      return (0.02 * (16.0 * u.array() - u.array().exp()) + sig * eps.array())
          .matrix();
    case Link::SinExpII:
      return (0.2 * (u.array() / 2).sin() * (u.array() / 2).exp() +
              sig * eps.array())
          .matrix();
    case Link::CubicIII:
      return (0.8 * (u.array() - u.array().cube() / 15.0) + sig * eps.array())
          .matrix();
    case Link::MultNoiseIV:
      return (u.array().sin() * (u.array() / 10).exp() * sig * eps.array())
          .matrix();
    case Link::VaryKappaV:
      return (kap * u.array() - u.array().exp() + sig * eps.array()).matrix();
    case Link::ScaledVI:
      return (kap * (15.0 * u.array() - u.array().exp()) +
              4.0 * sig * eps.array())
          .matrix();
    case Link::MultKappaVII:
      return (u.array().sin() * (10.0 * kap * u.array()).exp() *
              sig * eps.array())
          .matrix();
    case Link::CubicExample: {
      const double k = static_cast<double>(spec.s);
      return (u.array() - u.array().cube() / (3.0 * k) + sig * eps.array())
          .matrix();
    }
  }
  throw Error("unreachable link");
}

// Lower-level generator used by the experiment runner: the Cholesky factor
// and beta are supplied so they can be cached / pinned across replications.
// Draw order within the stream: X row by row, then eps.
inline Dataset generate_given(const ModelSpec& spec,
                              const Eigen::MatrixXd* chol_lower,
                              const Eigen::VectorXd& beta, int n,
                              RngStream& rng) {
  const int p = static_cast<int>(beta.size());
  Dataset ds;
  ds.x = rng.normal_matrix(n, p);
  if (chol_lower != nullptr)
    ds.x = ds.x * chol_lower->transpose();
  const Eigen::VectorXd u = ds.x * beta;
  const Eigen::VectorXd eps = rng.normal_vector(n);
  ds.y = link_response(spec, u, eps);
  ds.truth = spec;
  if (!ds.x.allFinite() || !ds.y.allFinite())
    throw Error("generated dataset contains non-finite entries");
  return ds;
}

// Full generator: draws support, beta, X and eps from one stream.
// Requires n >= 20 so the default slicing downstream always has room.
inline Dataset generate(const ModelSpec& spec, const CovarianceSpec& cov,
                        int n, RngStream& rng) {
  if (n < 20) throw TooFewObservations("generate requires n >= 20");
  if (spec.link != Link::Null && spec.s >= cov.p)
    throw Error("support size must satisfy s < p");
  const std::vector<int> support = choose_support(spec, cov.p, rng);
  const Eigen::VectorXd beta = sample_beta(spec, cov.p, support, rng);
  if (cov.kind == CovKind::Identity) {
    return generate_given(spec, nullptr, beta, n, rng);
  }
  const Eigen::MatrixXd sigma = build_covariance(cov, support);
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("covariance Cholesky factorization failed");
  const Eigen::MatrixXd lower = llt.matrixL();
  return generate_given(spec, &lower, beta, n, rng);
}

}  // namespace sss
