// Command-line front end: dataset generation, single-dataset tests,
// threshold calibration, the HC baseline, and the power-study runner.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure,
// 3 reference-power flags present.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "sss/experiments.hpp"
#include "sss/io.hpp"
#include "profiles.hpp"

namespace fs = std::filesystem;

namespace {

sss::CovarianceSpec make_cov(const std::string& kind, double rho, double cross,
                             int p) {
  sss::CovarianceSpec cov;
  cov.p = p;
  cov.rho = rho;
  cov.cross = cross;
  if (kind == "identity" || (kind == "ar" && rho == 0.0))
    cov.kind = sss::CovKind::Identity;
  else if (kind == "ar")
    cov.kind = sss::CovKind::ToeplitzAR;
  else if (kind == "blocked")
    cov.kind = sss::CovKind::BlockedBySupport;
  else
    throw sss::ConfigError("unknown covariance kind: " + kind);
  return cov;
}

sss::DetectSettings make_detect(int h_slices, int ks, const std::string& mode,
                                const std::string& anova,
                                const std::string& hc_variant) {
  sss::DetectSettings det;
  det.h_slices = h_slices;
  det.ks = ks;
  if (mode == "auto")
    det.sparse_mode = sss::SparseMode::Auto;
  else if (mode == "exact")
    det.sparse_mode = sss::SparseMode::Exact;
  else if (mode == "sdp")
    det.sparse_mode = sss::SparseMode::Sdp;
  else
    throw sss::ConfigError("mode must be auto, exact or sdp");
  if (anova == "standardized")
    det.anova_mode = sss::AnovaMode::Standardized;
  else if (anova == "raw")
    det.anova_mode = sss::AnovaMode::Raw;
  else
    throw sss::ConfigError("anova must be standardized or raw");
  if (hc_variant == "position")
    det.hc_variant = sss::HcVariant::PositionStd;
  else if (hc_variant == "pvalue")
    det.hc_variant = sss::HcVariant::PValueStd;
  else
    throw sss::ConfigError("hc-variant must be position or pvalue");
  return det;
}

void emit_json(const sss::json& j, const std::string& out) {
  if (out.empty())
    std::cout << j.dump(2) << "\n";
  else
    sss::write_json(j, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral tests for sparse single-index signal detection"};
  app.require_subcommand(1);

  // ---- gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a dataset (CSV + JSON sidecar)");
  std::string g_model = "III", g_cov = "ar", g_support = "first", g_out = "dataset";
  int g_p = 100, g_n = 1000, g_s = 0;
  double g_rho = 0.0, g_cross = 0.1, g_kappa = 1.0, g_sigma = 1.0;
  bool g_norm = false;
  std::uint64_t g_seed = 1;
  gen->add_option("--model", g_model, "null,I..VII,cubic")->capture_default_str();
  gen->add_option("--cov", g_cov, "identity|ar|blocked")->capture_default_str();
  gen->add_option("--rho", g_rho)->capture_default_str();
  gen->add_option("--cross", g_cross)->capture_default_str();
  gen->add_option("--p", g_p)->capture_default_str();
  gen->add_option("--n", g_n)->capture_default_str();
  gen->add_option("--s", g_s, "support size (0 = model default)")->capture_default_str();
  gen->add_option("--kappa", g_kappa)->capture_default_str();
  gen->add_option("--sigma-eps", g_sigma)->capture_default_str();
  gen->add_option("--support", g_support, "first|random")->capture_default_str();
  gen->add_flag("--normalize-beta", g_norm);
  gen->add_option("--seed", g_seed)->capture_default_str();
  gen->add_option("--out", g_out, "output prefix")->capture_default_str();

  // ---- test ---------------------------------------------------------------
  auto* test = app.add_subcommand("test", "calibrate and test one dataset");
  std::string t_data, t_out, t_mode = "auto", t_anova = "standardized",
              t_hcv = "position", t_dump;
  int t_h = sss::kDefaultSliceCount, t_ks = 5, t_null = 100;
  double t_level = 0.05;
  std::uint64_t t_seed = 1;
  test->add_option("--data", t_data, "dataset CSV")->required();
  test->add_option("--h-slices", t_h)->capture_default_str();
  test->add_option("--ks", t_ks, "restricted eigenvalue support size")->capture_default_str();
  test->add_option("--mode", t_mode, "auto|exact|sdp")->capture_default_str();
  test->add_option("--level", t_level)->capture_default_str();
  test->add_option("--null-reps", t_null)->capture_default_str();
  test->add_option("--seed", t_seed)->capture_default_str();
  test->add_option("--anova", t_anova, "standardized|raw")->capture_default_str();
  test->add_option("--hc-variant", t_hcv, "position|pvalue")->capture_default_str();
  test->add_option("--dump-slice-means", t_dump, "debug CSV of slice means");
  test->add_option("--out", t_out, "outcome JSON (default stdout)");

  // ---- calibrate ----------------------------------------------------------
  auto* cal = app.add_subcommand("calibrate", "Monte-Carlo null thresholds");
  std::string c_data, c_out, c_mode = "auto", c_anova = "standardized",
              c_hcv = "position";
  int c_h = sss::kDefaultSliceCount, c_ks = 5, c_null = 100;
  double c_level = 0.05;
  std::uint64_t c_seed = 1;
  cal->add_option("--data", c_data, "dataset CSV (responses ignored)")->required();
  cal->add_option("--h-slices", c_h)->capture_default_str();
  cal->add_option("--ks", c_ks)->capture_default_str();
  cal->add_option("--mode", c_mode)->capture_default_str();
  cal->add_option("--level", c_level)->capture_default_str();
  cal->add_option("--null-reps", c_null)->capture_default_str();
  cal->add_option("--seed", c_seed)->capture_default_str();
  cal->add_option("--anova", c_anova)->capture_default_str();
  cal->add_option("--hc-variant", c_hcv)->capture_default_str();
  cal->add_option("--out", c_out, "thresholds JSON (default stdout)");

  // ---- hc -----------------------------------------------------------------
  auto* hc = app.add_subcommand("hc", "higher-criticism baseline on a dataset");
  std::string h_data, h_out, h_hcv = "position";
  double h_chc = std::numeric_limits<double>::quiet_NaN();
  hc->add_option("--data", h_data)->required();
  hc->add_option("--c-hc", h_chc, "calibrated threshold; adds a reject flag");
  hc->add_option("--hc-variant", h_hcv)->capture_default_str();
  hc->add_option("--out", h_out, "result JSON (default stdout)");

  // ---- power --------------------------------------------------------------
  auto* power = app.add_subcommand("power", "run a power study");
  std::string p_config, p_profile, p_outdir = "power_out";
  int p_workers = -1;
  std::int64_t p_seed = -1;
  int p_reps = -1;
  power->add_option("--config", p_config, "experiment config file");
  power->add_option("--profile", p_profile, "desk|full|phase built-in config");
  power->add_option("--out-dir", p_outdir)->capture_default_str();
  power->add_option("--workers", p_workers, "0 = all cores")->capture_default_str();
  power->add_option("--master-seed", p_seed, "override the config seed");
  power->add_option("--replications", p_reps, "override the config replications");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      sss::ModelSpec model;
      model.link = sss::link_from_string(g_model);
      model.s = g_s > 0 ? g_s : sss::default_support_size(model.link);
      model.support = g_support == "random" ? sss::SupportKind::RandomS
                                            : sss::SupportKind::FirstS;
      model.kappa = g_kappa;
      model.sigma_eps = g_sigma;
      model.normalize_beta = g_norm;
      const sss::CovarianceSpec cov = make_cov(g_cov, g_rho, g_cross, g_p);
      sss::RngStream rng(g_seed);
      const sss::Dataset ds = sss::generate(model, cov, g_n, rng);
      sss::write_dataset_csv(ds, fs::path(g_out + ".csv"));
      sss::write_json(sss::dataset_sidecar(model, cov, g_n, g_seed),
                      fs::path(g_out + ".json"));
      std::cerr << "wrote " << g_out << ".csv and " << g_out << ".json\n";
    } else if (*test) {
      const sss::Dataset ds = sss::read_dataset_csv(fs::path(t_data));
      const sss::DetectSettings det = make_detect(t_h, t_ks, t_mode, t_anova, t_hcv);
      if (!t_dump.empty()) {
        const sss::SlicedSummary sum = sss::slice(ds, det.h_slices);
        std::ofstream os(t_dump);
        for (int h = 0; h < sum.h_slices; ++h) {
          os << sum.slice_sizes[h];
          for (Eigen::Index j = 0; j < sum.slice_means.rows(); ++j)
            os << ',' << sss::format_double(sum.slice_means(j, h));
          os << "\n";
        }
      }
      const sss::CalibratedThresholds thr =
          sss::calibrate(ds.x, det, t_level, t_null, t_seed);
      const sss::TestOutcome outcome = sss::run_test(ds, thr, det);
      sss::json j = sss::to_json(outcome);
      const sss::HcResult hcr = sss::hc_statistic(ds, det.hc_variant);
      j["hc"] = {{"score", hcr.hc_score}, {"reject", hcr.hc_score > thr.c_hc}};
      emit_json(j, t_out);
    } else if (*cal) {
      const sss::Dataset ds = sss::read_dataset_csv(fs::path(c_data));
      const sss::DetectSettings det = make_detect(c_h, c_ks, c_mode, c_anova, c_hcv);
      const sss::CalibratedThresholds thr =
          sss::calibrate(ds.x, det, c_level, c_null, c_seed);
      emit_json(sss::to_json(thr), c_out);
    } else if (*hc) {
      const sss::Dataset ds = sss::read_dataset_csv(fs::path(h_data));
      const sss::HcVariant variant = h_hcv == "pvalue"
                                         ? sss::HcVariant::PValueStd
                                         : sss::HcVariant::PositionStd;
      const sss::HcResult r = sss::hc_statistic(ds, variant);
      sss::json j = sss::to_json(r);
      if (!std::isnan(h_chc)) j["reject"] = r.hc_score > h_chc;
      emit_json(j, h_out);
    } else if (*power) {
      sss::Config cfg = sss::Config::parse("");
      if (!p_profile.empty()) {
        if (p_profile == "desk")
          cfg = sss::Config::parse(sss_cli::kDeskProfile);
        else if (p_profile == "full")
          cfg = sss::Config::parse(sss_cli::kFullProfile);
        else if (p_profile == "phase")
          cfg = sss::Config::parse(sss_cli::kPhaseProfile);
        else
          throw sss::ConfigError("unknown profile: " + p_profile);
      }
      if (!p_config.empty()) {
        std::ifstream is(p_config);
        if (!is) throw sss::IoError("cannot open " + p_config);
        std::stringstream buf;
        buf << is.rdbuf();
        cfg.override_with(sss::Config::parse(buf.str()));
      }
      if (p_profile.empty() && p_config.empty())
        throw sss::ConfigError("power needs --config and/or --profile");
      if (p_seed >= 0) cfg.set("master_seed", std::to_string(p_seed));
      if (p_workers >= 0) cfg.set("workers", std::to_string(p_workers));
      if (p_reps > 0) cfg.set("replications", std::to_string(p_reps));
      const sss::ExperimentConfig exp = sss::ExperimentConfig::from_config(cfg);
      const sss::PowerReport report = sss::run_experiment(exp);
      sss::emit_outputs(report, fs::path(p_outdir));
      bool cell_errors = false;
      for (const auto& cell : report.cells) {
        if (!cell.error.empty()) {
          std::cerr << "cell " << cell.spec.key() << " failed: " << cell.error
                    << "\n";
          cell_errors = true;
        }
      }
      for (const auto& f : report.flags)
        std::cerr << "flag: " << f.cell << " " << f.method << " got "
                  << f.got << " expected " << f.want << " +/- " << f.tol << "\n";
      std::cerr << "wrote " << p_outdir << "/power_table.csv\n";
      if (cell_errors) return 2;
      if (!report.flags.empty()) return 3;
    }
  } catch (const sss::ConfigError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  } catch (const sss::Error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 0;
}
