#pragma once

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sss/detect.hpp"
#include "sss/errors.hpp"
#include "sss/hc.hpp"
#include "sss/models.hpp"

namespace sss {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Dataset CSV (+ JSON sidecar)
// ---------------------------------------------------------------------------

// Full-precision decimal form that round-trips doubles exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Header row `y,x1,...,xp`, one observation per row, 17 significant digits.
inline void write_dataset_csv(const Dataset& dataset, std::ostream& os) {
  os << "y";
  for (Eigen::Index j = 0; j < dataset.p(); ++j) os << ",x" << (j + 1);
  os << "\n";
  for (Eigen::Index i = 0; i < dataset.n(); ++i) {
    os << format_double(dataset.y[i]);
    for (Eigen::Index j = 0; j < dataset.p(); ++j)
      os << ',' << format_double(dataset.x(i, j));
    os << "\n";
  }
}

inline void write_dataset_csv(const Dataset& dataset,
                              const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_dataset_csv(dataset, os);
}

inline Dataset read_dataset_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty dataset file");
  Eigen::Index p = -1;  // columns after y
  {
    std::size_t commas = 0;
    for (char c : line)
      if (c == ',') ++commas;
    p = static_cast<Eigen::Index>(commas);
  }
  if (p < 1) throw IoError("dataset header must be y,x1,...,xp");
  std::vector<double> values;
  Eigen::Index n = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::size_t pos = 0;
    for (Eigen::Index j = 0; j <= p; ++j) {
      char* end = nullptr;
      const double v = std::strtod(line.c_str() + pos, &end);
      if (end == line.c_str() + pos)
        throw IoError("malformed dataset row " + std::to_string(n + 1));
      values.push_back(v);
      pos = static_cast<std::size_t>(end - line.c_str());
      if (j < p) {
        if (line[pos] != ',')
          throw IoError("malformed dataset row " + std::to_string(n + 1));
        ++pos;
      }
    }
    ++n;
  }
  if (n < 2) throw IoError("dataset needs at least two observations");
  Dataset ds;
  ds.y.resize(n);
  ds.x.resize(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    ds.y[i] = values[static_cast<std::size_t>(i * (p + 1))];
    for (Eigen::Index j = 0; j < p; ++j)
      ds.x(i, j) = values[static_cast<std::size_t>(i * (p + 1) + 1 + j)];
  }
  return ds;
}

inline Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  return read_dataset_csv(is);
}

// ---------------------------------------------------------------------------
// JSON forms
// ---------------------------------------------------------------------------

inline json to_json(const CovarianceSpec& c) {
  return json{{"kind", to_string(c.kind)},
              {"p", c.p},
              {"rho", c.rho},
              {"cross", c.cross}};
}

inline CovarianceSpec covariance_from_json(const json& j) {
  CovarianceSpec c;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "identity")
    c.kind = CovKind::Identity;
  else if (kind == "toeplitz_ar")
    c.kind = CovKind::ToeplitzAR;
  else if (kind == "blocked_by_support")
    c.kind = CovKind::BlockedBySupport;
  else
    throw ConfigError("unknown covariance kind: " + kind);
  c.p = j.at("p").get<int>();
  c.rho = j.value("rho", 0.0);
  c.cross = j.value("cross", 0.1);
  return c;
}

inline json to_json(const ModelSpec& m) {
  return json{{"link", to_string(m.link)},
              {"s", m.s},
              {"support", m.support == SupportKind::FirstS ? "first" : "random"},
              {"kappa", m.kappa},
              {"sigma_eps", m.sigma_eps},
              {"normalize_beta", m.normalize_beta}};
}

inline ModelSpec model_from_json(const json& j) {
  ModelSpec m;
  m.link = link_from_string(j.at("link").get<std::string>());
  m.s = j.at("s").get<int>();
  const std::string sup = j.value("support", "first");
  if (sup == "first")
    m.support = SupportKind::FirstS;
  else if (sup == "random")
    m.support = SupportKind::RandomS;
  else
    throw ConfigError("unknown support kind: " + sup);
  m.kappa = j.value("kappa", 1.0);
  m.sigma_eps = j.value("sigma_eps", 1.0);
  m.normalize_beta = j.value("normalize_beta", false);
  return m;
}

// Sidecar written next to a generated dataset.
inline json dataset_sidecar(const ModelSpec& model, const CovarianceSpec& cov,
                            int n, std::uint64_t seed) {
  return json{{"model", to_json(model)},
              {"covariance", to_json(cov)},
              {"n", n},
              {"seed", seed}};
}

inline json to_json(const TestStatistics& s) {
  return json{{"lambda_max", s.lambda_max},
              {"sparse_eig", s.sparse_eig},
              {"sparse_is_exact", s.sparse_is_exact},
              {"anova_t", s.anova_t},
              {"trace_term", s.trace_term}};
}

inline json to_json(const CalibratedThresholds& t) {
  return json{{"tau_n", t.tau_n},
              {"tau_n_prime", t.tau_n_prime},
              {"tau_n_dprime", t.tau_n_dprime},
              {"c_hc", t.c_hc},
              {"level", t.level},
              {"n_null", t.n_null},
              {"mode", to_string(t.mode)},
              {"seed", t.seed},
              {"n", t.n},
              {"p", t.p},
              {"h_slices", t.h_slices},
              {"ks", t.ks}};
}

inline CalibratedThresholds thresholds_from_json(const json& j) {
  CalibratedThresholds t;
  t.tau_n = j.at("tau_n").get<double>();
  t.tau_n_prime = j.at("tau_n_prime").get<double>();
  t.tau_n_dprime = j.at("tau_n_dprime").get<double>();
  t.c_hc = j.at("c_hc").get<double>();
  t.level = j.at("level").get<double>();
  t.n_null = j.at("n_null").get<int>();
  t.mode = j.at("mode").get<std::string>() == "pooled"
               ? CalibrationMode::Pooled
               : CalibrationMode::PerDataset;
  t.seed = j.at("seed").get<std::uint64_t>();
  t.n = j.at("n").get<int>();
  t.p = j.at("p").get<int>();
  t.h_slices = j.at("h_slices").get<int>();
  t.ks = j.at("ks").get<int>();
  return t;
}

inline json to_json(const TestOutcome& o) {
  return json{{"statistics", to_json(o.statistics)},
              {"thresholds", to_json(o.thresholds)},
              {"reject_psi1", o.reject_psi1},
              {"reject_psi2", o.reject_psi2},
              {"reject_psi3", o.reject_psi3},
              {"reject_sss", o.reject_sss},
              {"reject_sssa", o.reject_sssa}};
}

// -infinity (the never-rejects sentinel) is not a JSON number; encode it
// as null and restore it on read.
inline json to_json(const HcResult& r) {
  json t = json::array();
  for (Eigen::Index j = 0; j < r.t_stats.size(); ++j) t.push_back(r.t_stats[j]);
  json m = json::array();
  for (Eigen::Index j = 0; j < r.p_values.size(); ++j) m.push_back(r.p_values[j]);
  json score;
  if (std::isfinite(r.hc_score)) score = r.hc_score;
  return json{{"t_stats", std::move(t)},
              {"p_values", std::move(m)},
              {"hc_score", score},
              {"threshold_index", r.threshold_index}};
}

inline void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << j.dump(2) << "\n";
}

inline json read_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  return json::parse(is);
}

}  // namespace sss
