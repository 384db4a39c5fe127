#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sss/config.hpp"
#include "sss/detect.hpp"
#include "sss/errors.hpp"
#include "sss/hc.hpp"
#include "sss/io.hpp"
#include "sss/models.hpp"
#include "sss/rng.hpp"

namespace sss {

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

// Covariance token: "id", "ar<rho>" (Toeplitz type i), "eq<rho>" (blocked
// type ii).
struct CovToken {
  CovKind kind = CovKind::Identity;
  double rho = 0.0;

  std::string label() const {
    char buf[32];
    switch (kind) {
      case CovKind::Identity: return "id";
      case CovKind::ToeplitzAR:
        std::snprintf(buf, sizeof(buf), "ar%g", rho);
        return buf;
      case CovKind::BlockedBySupport:
        std::snprintf(buf, sizeof(buf), "eq%g", rho);
        return buf;
    }
    return "?";
  }

  static CovToken parse(const std::string& tok) {
    CovToken out;
    if (tok == "id" || tok == "identity") {
      out.kind = CovKind::Identity;
      return out;
    }
    std::string prefix = tok.substr(0, 2);
    const std::string rest = tok.size() > 2 ? tok.substr(2) : "";
    char* end = nullptr;
    const double rho = std::strtod(rest.c_str(), &end);
    if (end != rest.c_str() + rest.size() || rest.empty())
      throw ConfigError("bad covariance token: " + tok);
    if (prefix == "ar") {
      out.kind = rho == 0.0 ? CovKind::Identity : CovKind::ToeplitzAR;
      out.rho = rho;
    } else if (prefix == "eq") {
      out.kind = CovKind::BlockedBySupport;
      out.rho = rho;
    } else {
      throw ConfigError("bad covariance token: " + tok);
    }
    return out;
  }
};

struct Expectation {
  std::string model;
  int dim = 0;
  std::string cov;
  std::string method;
  double power = 0.0;
  double tol = 0.0;
};

struct ExperimentConfig {
  std::vector<Link> models;
  std::vector<int> dims;
  std::vector<CovToken> covs;
  int n = 1000;
  int replications = 100;
  double level = 0.05;
  int h_slices = kDefaultSliceCount;
  int k = 1;
  int s_override = 0;  // 0 keeps each model's default support size
  SupportKind support = SupportKind::FirstS;
  bool fix_beta = false;
  bool normalize_beta = false;
  double sigma_eps = 1.0;
  double blocked_cross = 0.1;
  CalibrationMode calibration = CalibrationMode::Pooled;
  int n_null = 100;  // per-dataset calibration only
  bool run_sss = true;
  bool run_sssa = false;
  bool run_hc = true;
  SparseMode sparse_mode = SparseMode::Sdp;
  AnovaMode anova = AnovaMode::Standardized;
  HcVariant hc_variant = HcVariant::PositionStd;
  std::vector<double> kappa_sweep;  // empty unless the model family uses kappa
  std::uint64_t master_seed = 20240101;
  int workers = 0;  // 0 = hardware concurrency
  SdpSettings sdp{};
  std::vector<Expectation> expectations;

  static ExperimentConfig from_config(const Config& c);
};

inline ExperimentConfig ExperimentConfig::from_config(const Config& c) {
  ExperimentConfig e;
  for (const auto& tok : c.get_list("models")) e.models.push_back(link_from_string(tok));
  if (e.models.empty()) throw ConfigError("config needs models = [...]");
  for (const auto& tok : c.get_list("dims")) e.dims.push_back(static_cast<int>(std::stol(tok)));
  if (e.dims.empty()) throw ConfigError("config needs dims = [...]");
  const auto covs = c.get_list("covs");
  if (covs.empty())
    e.covs.push_back(CovToken{});
  else
    for (const auto& tok : covs) e.covs.push_back(CovToken::parse(tok));
  e.n = static_cast<int>(c.get_int("n", e.n));
  e.replications = static_cast<int>(c.get_int("replications", e.replications));
  if (e.replications < 1) throw ConfigError("replications must be >= 1");
  e.level = c.get_double("level", e.level);
  e.h_slices = static_cast<int>(c.get_int("h_slices", e.h_slices));
  e.k = static_cast<int>(c.get_int("k", e.k));
  e.s_override = static_cast<int>(c.get_int("s", 0));
  const std::string sup = c.get_string("support", "first");
  if (sup == "first")
    e.support = SupportKind::FirstS;
  else if (sup == "random")
    e.support = SupportKind::RandomS;
  else
    throw ConfigError("support must be first or random");
  e.fix_beta = c.get_bool("fix_beta", false);
  e.normalize_beta = c.get_bool("normalize_beta", false);
  e.sigma_eps = c.get_double("sigma_eps", 1.0);
  e.blocked_cross = c.get_double("blocked_cross", 0.1);
  const std::string cal = c.get_string("calibration", "pooled");
  if (cal == "pooled")
    e.calibration = CalibrationMode::Pooled;
  else if (cal == "perdataset" || cal == "per_dataset")
    e.calibration = CalibrationMode::PerDataset;
  else
    throw ConfigError("calibration must be pooled or perdataset");
  e.n_null = static_cast<int>(c.get_int("n_null", e.n_null));
  auto methods = c.get_list("methods");
  if (!methods.empty()) {
    e.run_sss = e.run_sssa = e.run_hc = false;
    for (const auto& m : methods) {
      if (m == "SSS")
        e.run_sss = true;
      else if (m == "SSSa")
        e.run_sssa = true;
      else if (m == "HC")
        e.run_hc = true;
      else
        throw ConfigError("unknown method: " + m);
    }
  }
  const std::string mode = c.get_string("mode", "sdp");
  if (mode == "sdp")
    e.sparse_mode = SparseMode::Sdp;
  else if (mode == "exact")
    e.sparse_mode = SparseMode::Exact;
  else if (mode == "auto")
    e.sparse_mode = SparseMode::Auto;
  else
    throw ConfigError("mode must be exact, sdp or auto");
  const std::string anova = c.get_string("anova", "standardized");
  if (anova == "standardized")
    e.anova = AnovaMode::Standardized;
  else if (anova == "raw")
    e.anova = AnovaMode::Raw;
  else
    throw ConfigError("anova must be standardized or raw");
  const std::string hcv = c.get_string("hc_variant", "position");
  if (hcv == "position")
    e.hc_variant = HcVariant::PositionStd;
  else if (hcv == "pvalue")
    e.hc_variant = HcVariant::PValueStd;
  else
    throw ConfigError("hc_variant must be position or pvalue");
  e.kappa_sweep = c.get_doubles("sweep_kappa");
  e.master_seed = static_cast<std::uint64_t>(c.get_int("master_seed",
      static_cast<std::int64_t>(e.master_seed)));
  e.workers = static_cast<int>(c.get_int("workers", 0));
  e.sdp.max_iterations = static_cast<int>(c.get_int("sdp_max_iterations", 1500));
  e.sdp.primal_tolerance = c.get_double("sdp_tolerance", 1e-5);
  e.sdp.dual_tolerance = e.sdp.primal_tolerance;
  for (const auto& raw : c.get_list("expect")) {
    // model,dim,cov,method,power,tol
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= raw.size()) {
      auto comma = raw.find(',', start);
      if (comma == std::string::npos) comma = raw.size();
      parts.push_back(raw.substr(start, comma - start));
      start = comma + 1;
    }
    if (parts.size() != 6) throw ConfigError("bad expect entry: " + raw);
    Expectation x;
    x.model = parts[0];
    x.dim = std::stoi(parts[1]);
    x.cov = parts[2];
    x.method = parts[3];
    x.power = std::stod(parts[4]);
    x.tol = std::stod(parts[5]);
    e.expectations.push_back(x);
  }
  return e;
}

// ---------------------------------------------------------------------------
// Cells, replication results, report
// ---------------------------------------------------------------------------

struct CellSpec {
  int index = 0;  // position in the expansion; part of every seed
  Link link = Link::Null;
  int s = 0;
  int p = 0;
  CovToken cov;
  double kappa = 1.0;
  int n = 0;

  std::string key() const {
    std::string k = std::string(to_string(link)) + "_p" + std::to_string(p) +
                    "_" + cov.label();
    if (kappa != 1.0) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "_k%g", kappa);
      k += buf;
    }
    return k;
  }
};

struct RepResult {
  std::uint64_t seed = 0;
  TestStatistics stats;
  double hc_alt = 0.0;
  NullStatistics nulls;  // pooled mode: the single z-draw's statistics
  // per-dataset mode fills the flags directly
  bool have_outcome = false;
  bool rej_psi1 = false, rej_psi2 = false, rej_psi3 = false;
  bool rej_sss = false, rej_sssa = false, rej_hc = false;
  std::string error;
};

struct CellResult {
  CellSpec spec;
  std::vector<RepResult> reps;
  std::optional<CalibratedThresholds> pooled_thresholds;
  std::map<std::string, double> power;  // method label -> rejection rate
  std::string error;
};

struct PowerFlag {
  std::string cell;
  std::string method;
  double got = 0.0, want = 0.0, tol = 0.0;
};

struct PowerReport {
  std::uint64_t master_seed = 0;
  std::vector<CellResult> cells;
  std::vector<PowerFlag> flags;
};

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

// Fixed task list + atomic cursor; results land in preassigned slots so
// the outcome is identical for any worker count.
inline void parallel_for(std::size_t count, int workers,
                         const std::function<void(std::size_t)>& fn) {
  if (workers <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    workers = hw == 0 ? 1 : static_cast<int>(hw);
  }
  workers = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(workers), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) break;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

namespace detail {

struct CellContext {
  CellSpec spec;
  ModelSpec model;
  DetectSettings det;
  std::optional<Eigen::MatrixXd> chol_lower;  // cached unless support random
  bool per_rep_covariance = false;
};

inline std::uint64_t stream_seed(std::uint64_t master, int cell, int rep,
                                 std::uint64_t tag) {
  return derive_seed(derive_seed(master, static_cast<std::uint64_t>(cell),
                                 static_cast<std::uint64_t>(rep)),
                     tag);
}

inline CellContext make_cell_context(const ExperimentConfig& cfg,
                                     const CellSpec& spec) {
  CellContext ctx;
  ctx.spec = spec;
  ctx.model.link = spec.link;
  ctx.model.s = spec.s;
  ctx.model.support = cfg.support;
  ctx.model.kappa = spec.kappa;
  ctx.model.sigma_eps = cfg.sigma_eps;
  ctx.model.normalize_beta = cfg.normalize_beta;
  ctx.det.h_slices = cfg.h_slices;
  ctx.det.ks = std::max(1, cfg.k * spec.s);
  ctx.det.sparse_mode = cfg.sparse_mode;
  ctx.det.anova_mode = cfg.anova;
  ctx.det.hc_variant = cfg.hc_variant;
  ctx.det.sdp = cfg.sdp;

  CovarianceSpec cov;
  cov.kind = spec.cov.kind;
  cov.p = spec.p;
  cov.rho = spec.cov.rho;
  cov.cross = cfg.blocked_cross;
  if (cov.kind == CovKind::Identity) {
    ctx.chol_lower.reset();
  } else if (cov.kind == CovKind::BlockedBySupport &&
             cfg.support == SupportKind::RandomS) {
    ctx.per_rep_covariance = true;  // Sigma depends on the drawn support
  } else {
    std::vector<int> support(static_cast<std::size_t>(spec.s));
    for (int i = 0; i < spec.s; ++i) support[static_cast<std::size_t>(i)] = i;
    const Eigen::MatrixXd sigma = build_covariance(cov, support);
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
      throw NotPositiveDefinite("covariance Cholesky factorization failed");
    ctx.chol_lower = Eigen::MatrixXd(llt.matrixL());
  }
  return ctx;
}

inline RepResult run_replication(const ExperimentConfig& cfg,
                                 const CellContext& ctx, int rep) {
  RepResult out;
  out.seed = stream_seed(cfg.master_seed, ctx.spec.index, rep, 2);
  try {
    const int beta_rep = cfg.fix_beta ? 0 : rep;
    RngStream beta_rng(stream_seed(cfg.master_seed, ctx.spec.index, beta_rep, 1));
    RngStream data_rng(out.seed);
    RngStream null_rng(stream_seed(cfg.master_seed, ctx.spec.index, rep, 3));

    const std::vector<int> support =
        choose_support(ctx.model, ctx.spec.p, beta_rng);
    const Eigen::VectorXd beta =
        sample_beta(ctx.model, ctx.spec.p, support, beta_rng);

    const Eigen::MatrixXd* lower = nullptr;
    Eigen::MatrixXd per_rep_lower;
    if (ctx.per_rep_covariance) {
      CovarianceSpec cov;
      cov.kind = ctx.spec.cov.kind;
      cov.p = ctx.spec.p;
      cov.rho = ctx.spec.cov.rho;
      cov.cross = cfg.blocked_cross;
      const Eigen::MatrixXd sigma = build_covariance(cov, support);
      Eigen::LLT<Eigen::MatrixXd> llt(sigma);
      if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("covariance Cholesky factorization failed");
      per_rep_lower = llt.matrixL();
      lower = &per_rep_lower;
    } else if (ctx.chol_lower) {
      lower = &*ctx.chol_lower;
    }

    const Dataset ds =
        generate_given(ctx.model, lower, beta, ctx.spec.n, data_rng);

    SdpSolver solver(ctx.det.sdp);
    out.stats = compute_statistics(ds, ctx.det, &solver);
    out.hc_alt = hc_statistic(ds, ctx.det.hc_variant).hc_score;

    if (cfg.calibration == CalibrationMode::Pooled) {
      const Eigen::VectorXd z = null_rng.normal_vector(ctx.spec.n);
      out.nulls = null_statistics(ds.x, z, ctx.det, &solver);
    } else {
      std::vector<NullStatistics> nulls;
      nulls.reserve(static_cast<std::size_t>(cfg.n_null));
      for (int kdraw = 0; kdraw < cfg.n_null; ++kdraw) {
        const Eigen::VectorXd z = null_rng.normal_vector(ctx.spec.n);
        nulls.push_back(null_statistics(ds.x, z, ctx.det, &solver));
      }
      const CalibratedThresholds thr = thresholds_from_nulls(
          nulls, cfg.level, CalibrationMode::PerDataset, out.seed,
          ctx.spec.n, ctx.spec.p, ctx.det);
      out.have_outcome = true;
      out.rej_psi1 = out.stats.lambda_max > thr.tau_n;
      out.rej_psi2 = out.stats.sparse_eig > thr.tau_n_prime;
      out.rej_psi3 = out.stats.anova_t > thr.tau_n_dprime;
      out.rej_sss = out.rej_psi1 || out.rej_psi2;
      out.rej_sssa = out.rej_sss || out.rej_psi3;
      out.rej_hc = out.hc_alt > thr.c_hc;
    }
  } catch (const std::exception& ex) {
    out.error = ex.what();
  }
  return out;
}

}  // namespace detail

// Expands the configured grid into cells. A kappa sweep multiplies the
// (model, dim, cov) grid; otherwise each model runs at its spec kappa=1.
inline std::vector<CellSpec> expand_cells(const ExperimentConfig& cfg) {
  std::vector<CellSpec> cells;
  const std::vector<double> kappas =
      cfg.kappa_sweep.empty() ? std::vector<double>{1.0} : cfg.kappa_sweep;
  int index = 0;
  for (Link link : cfg.models) {
    const int s = cfg.s_override > 0 ? cfg.s_override
                                     : default_support_size(link);
    for (int p : cfg.dims) {
      for (const CovToken& cov : cfg.covs) {
        for (double kappa : kappas) {
          CellSpec spec;
          spec.index = index++;
          spec.link = link;
          spec.s = s;
          spec.p = p;
          spec.cov = cov;
          spec.kappa = kappa;
          spec.n = cfg.n;
          if (link != Link::Null && (s < 1 || s >= p))
            throw ConfigError("support size must satisfy 1 <= s < p");
          if (link == Link::Null && cfg.s_override == 0)
            throw ConfigError("null-model cells need s to size the test");
          cells.push_back(spec);
        }
      }
    }
  }
  return cells;
}

// Runs every (cell, replication) task, then reduces deterministically.
inline PowerReport run_experiment(const ExperimentConfig& cfg) {
  PowerReport report;
  report.master_seed = cfg.master_seed;
  const std::vector<CellSpec> cells = expand_cells(cfg);

  std::vector<detail::CellContext> contexts;
  contexts.reserve(cells.size());
  std::vector<std::string> context_errors(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    try {
      contexts.push_back(detail::make_cell_context(cfg, cells[i]));
    } catch (const std::exception& ex) {
      context_errors[i] = ex.what();
      detail::CellContext dead;
      dead.spec = cells[i];
      contexts.push_back(std::move(dead));
    }
  }

  const std::size_t reps = static_cast<std::size_t>(cfg.replications);
  std::vector<RepResult> results(cells.size() * reps);
  parallel_for(results.size(), cfg.workers, [&](std::size_t task) {
    const std::size_t ci = task / reps;
    const int rep = static_cast<int>(task % reps);
    if (!context_errors[ci].empty()) {
      results[task].error = context_errors[ci];
      return;
    }
    results[task] = detail::run_replication(cfg, contexts[ci], rep);
  });

  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    CellResult cell;
    cell.spec = cells[ci];
    cell.reps.assign(results.begin() + static_cast<std::ptrdiff_t>(ci * reps),
                     results.begin() + static_cast<std::ptrdiff_t>((ci + 1) * reps));
    for (const auto& r : cell.reps) {
      if (!r.error.empty()) {
        cell.error = r.error;
        break;
      }
    }
    if (cell.error.empty()) {
      if (cfg.calibration == CalibrationMode::Pooled) {
        std::vector<NullStatistics> nulls;
        nulls.reserve(cell.reps.size());
        for (const auto& r : cell.reps) nulls.push_back(r.nulls);
        const CalibratedThresholds thr = thresholds_from_nulls(
            nulls, cfg.level, CalibrationMode::Pooled, cfg.master_seed,
            cell.spec.n, cell.spec.p, contexts[ci].det);
        cell.pooled_thresholds = thr;
        for (auto& r : cell.reps) {
          r.rej_psi1 = r.stats.lambda_max > thr.tau_n;
          r.rej_psi2 = r.stats.sparse_eig > thr.tau_n_prime;
          r.rej_psi3 = r.stats.anova_t > thr.tau_n_dprime;
          r.rej_sss = r.rej_psi1 || r.rej_psi2;
          r.rej_sssa = r.rej_sss || r.rej_psi3;
          r.rej_hc = r.hc_alt > thr.c_hc;
          r.have_outcome = true;
        }
      }
      const double m = static_cast<double>(cell.reps.size());
      double sss = 0.0, sssa = 0.0, hc = 0.0;
      for (const auto& r : cell.reps) {
        sss += r.rej_sss ? 1.0 : 0.0;
        sssa += r.rej_sssa ? 1.0 : 0.0;
        hc += r.rej_hc ? 1.0 : 0.0;
      }
      if (cfg.run_sss) cell.power["SSS"] = sss / m;
      if (cfg.run_sssa) cell.power["SSSa"] = sssa / m;
      if (cfg.run_hc) cell.power["HC"] = hc / m;
    }
    report.cells.push_back(std::move(cell));
  }

  // Reference expectations: deviations are flagged, never silently passed.
  for (const auto& x : cfg.expectations) {
    for (const auto& cell : report.cells) {
      if (to_string(cell.spec.link) != x.model) continue;
      if (cell.spec.p != x.dim) continue;
      if (cell.spec.cov.label() != x.cov) continue;
      auto it = cell.power.find(x.method);
      if (it == cell.power.end()) continue;
      if (std::abs(it->second - x.power) > x.tol) {
        report.flags.push_back(PowerFlag{cell.spec.key(), x.method,
                                         it->second, x.power, x.tol});
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

inline std::string format_power(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// power_table.csv + per-cell raw statistics (JSON lines) + two-column plot
// data (histogram values per cell, power curves for kappa sweeps).
inline void emit_outputs(const PowerReport& report,
                         const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir / "power_table.csv");
    if (!os) throw IoError("cannot write power_table.csv");
    os << "model,p,rho,cov_type,kappa,method,power,replications,master_seed\n";
    for (const auto& cell : report.cells) {
      for (const char* method : {"SSS", "SSSa", "HC"}) {
        auto it = cell.power.find(method);
        if (it == cell.power.end()) continue;
        os << to_string(cell.spec.link) << ',' << cell.spec.p << ','
           << cell.spec.cov.rho << ',' << cell.spec.cov.label() << ','
           << cell.spec.kappa << ',' << method << ','
           << format_power(it->second) << ',' << cell.reps.size() << ','
           << report.master_seed << "\n";
      }
      if (!cell.error.empty()) {
        os << to_string(cell.spec.link) << ',' << cell.spec.p << ','
           << cell.spec.cov.rho << ',' << cell.spec.cov.label() << ','
           << cell.spec.kappa << ",ERROR," << cell.error << ','
           << cell.reps.size() << ',' << report.master_seed << "\n";
      }
    }
  }

  for (const auto& cell : report.cells) {
    if (!cell.error.empty()) continue;
    const std::string key = cell.spec.key();
    {
      std::ofstream os(dir / ("raw_" + key + ".jsonl"));
      for (std::size_t r = 0; r < cell.reps.size(); ++r) {
        const RepResult& rep = cell.reps[r];
        json line{{"rep", r},
                  {"seed", rep.seed},
                  {"statistics", to_json(rep.stats)},
                  {"hc_score", rep.hc_alt},
                  {"reject",
                   {{"psi1", rep.rej_psi1},
                    {"psi2", rep.rej_psi2},
                    {"psi3", rep.rej_psi3},
                    {"sss", rep.rej_sss},
                    {"sssa", rep.rej_sssa},
                    {"hc", rep.rej_hc}}}};
        if (cell.pooled_thresholds) {
          line["null"] = {{"lambda_max", rep.nulls.lambda_max},
                          {"sparse_eig", rep.nulls.sparse_eig},
                          {"anova_t", rep.nulls.anova_t},
                          {"hc_score", rep.nulls.hc_score}};
        }
        os << line.dump() << "\n";
      }
    }
    // histogram columns (replication index, statistic value)
    const auto dump_two_col = [&](const std::string& name,
                                  const std::function<double(const RepResult&)>& get) {
      std::ofstream os(dir / ("hist_" + key + "_" + name + ".tsv"));
      for (std::size_t r = 0; r < cell.reps.size(); ++r)
        os << r << '\t' << format_double(get(cell.reps[r])) << "\n";
    };
    dump_two_col("sparse_alt", [](const RepResult& r) { return r.stats.sparse_eig; });
    dump_two_col("hc_alt", [](const RepResult& r) { return r.hc_alt; });
    if (cell.pooled_thresholds) {
      dump_two_col("sparse_null", [](const RepResult& r) { return r.nulls.sparse_eig; });
      dump_two_col("hc_null", [](const RepResult& r) { return r.nulls.hc_score; });
    }
  }

  // kappa power curves per (model, dim, cov, method)
  struct CurveKey {
    std::string label;
    bool operator<(const CurveKey& o) const { return label < o.label; }
  };
  std::map<std::string, std::vector<std::pair<double, double>>> curves;
  for (const auto& cell : report.cells) {
    if (!cell.error.empty()) continue;
    for (const auto& [method, power] : cell.power) {
      const std::string label = std::string(to_string(cell.spec.link)) + "_p" +
                                std::to_string(cell.spec.p) + "_" +
                                cell.spec.cov.label() + "_" + method;
      curves[label].push_back({cell.spec.kappa, power});
    }
  }
  for (auto& [label, points] : curves) {
    if (points.size() < 2) continue;
    std::sort(points.begin(), points.end());
    std::ofstream os(dir / ("curve_" + label + ".tsv"));
    for (const auto& [kappa, power] : points)
      os << kappa << '\t' << format_power(power) << "\n";
  }

  if (!report.flags.empty()) {
    std::ofstream os(dir / "flags.txt");
    for (const auto& f : report.flags)
      os << f.cell << ' ' << f.method << " got " << format_power(f.got)
         << " expected " << format_power(f.want) << " +/- "
         << format_power(f.tol) << "\n";
  }
}

}  // namespace sss
