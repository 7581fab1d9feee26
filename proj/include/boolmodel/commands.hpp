// The four subcommands of the command-line tool, as library functions that
// write their files into RunConfig::out_dir.
//
// Files written (columns are part of the stable interface):
//   analytic      analytic.csv    gamma,p,d0,d1,d2,s00,s01,s02,s11,s12,s22
//   simulate      samples.csv     index,grain_count,v0,v1,v2
//                 summary.json    means, cov, se, analytic comparison
//   validate      summary.json, validation.json
//   hist          hist_v0.csv, hist_v1.csv, hist_v2.csv   bin_center,weight
//                 hist_summary.json   KS distances and overflow counts
// With a [sweep] list the per-run files go to out_dir/gamma_<value>/.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "boolmodel/analytic.hpp"
#include "boolmodel/config.hpp"
#include "boolmodel/simulate.hpp"
#include "boolmodel/stats.hpp"

namespace boolmodel::cli {

using nlohmann::json;

enum ExitCode : int {
  kOk = 0,
  kValidationFailed = 1,
  kError = 2,
  kInsufficientStatistics = 3,
};

inline constexpr std::array<const char*, 3> kNames{"v0", "v1", "v2"};

/// Table of closed-form densities and covariances over a list of
/// intensities. Rejects b > a.
inline std::string analytic_csv(double a, double b, std::span<const double> gammas) {
  if (b > a) {
    throw std::invalid_argument("analytic: expects b <= a (aspect ratio b/a in (0, 1]); swap a = " +
                                format_double(a) + " and b = " + format_double(b));
  }
  std::ostringstream o;
  o << "gamma,p,d0,d1,d2,s00,s01,s02,s11,s12,s22\n";
  for (double g : gammas) {
    const analytic::RectModel m(a, b, g);
    const auto d = analytic::mean_densities(m);
    const auto s = analytic::cov_matrix(m);
    o << format_double(g) << ',' << format_double(m.p());
    for (double x : d) o << ',' << format_double(x);
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) o << ',' << format_double(s(i, j));
    o << '\n';
  }
  return o.str();
}

inline void write_samples_csv(std::ostream& o, std::span<const SampleResult> results) {
  o << "index,grain_count,v0,v1,v2\n";
  for (const auto& r : results) {
    o << r.index << ',' << r.grain_count << ',' << r.functionals.v0 << ','
      << format_double(r.functionals.v1) << ',' << format_double(r.functionals.v2) << '\n';
  }
}

/// Closed-form target for a spec, available for aligned grains only.
inline std::optional<analytic::CovMatrix> analytic_target(const ModelSpec& spec) {
  if (spec.orientation != Orientation::Aligned) return std::nullopt;
  return analytic::cov_matrix(analytic::RectModel(spec.a, spec.b, spec.gamma));
}

namespace detail {

inline json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json matrix(const Eigen::Matrix3d& m) {
  json out = json::array();
  for (int i = 0; i < 3; ++i) out.push_back({number(m(i, 0)), number(m(i, 1)), number(m(i, 2))});
  return out;
}

inline json spec_json(const ModelSpec& s) {
  return {{"a", s.a},
          {"b", s.b},
          {"gamma", s.gamma},
          {"orientation", s.orientation == Orientation::Aligned ? "aligned" : "isotropic"},
          {"boundary", s.boundary == Boundary::TorusPeriodic ? "torus" : "minus"},
          {"L", s.L},
          {"margin", s.margin},
          {"window_boundary", s.window_boundary == WindowBoundary::Exclude ? "exclude" : "include"},
          {"replications", s.replications},
          {"seed", s.master_seed}};
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("error writing " + path.string());
}

inline std::filesystem::path run_dir(const RunConfig& cfg, double gamma) {
  std::filesystem::path dir(cfg.out_dir);
  if (cfg.gammas) dir /= "gamma_" + format_double(gamma);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace detail

/// Sample means/covariances with the closed-form comparison (aligned only).
inline json summary_json(const ModelSpec& spec, const stats::CovarianceEstimate& est) {
  const double area = spec.window_area();
  json j;
  j["spec"] = detail::spec_json(spec);
  j["M"] = est.M;
  j["B"] = est.B;
  j["window_area"] = area;
  j["mean"] = {est.mean(0), est.mean(1), est.mean(2)};
  j["mean_se"] = {est.mean_se(0), est.mean_se(1), est.mean_se(2)};
  j["mean_density"] = {est.mean(0) / area, est.mean(1) / area, est.mean(2) / area};
  j["cov"] = detail::matrix(est.cov);
  j["se"] = detail::matrix(est.se);
  if (const auto target = analytic_target(spec)) {
    const analytic::RectModel m(spec.a, spec.b, spec.gamma);
    const auto d = analytic::mean_densities(m);
    Eigen::Matrix3d z;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) z(i, k) = (est.cov(i, k) - (*target)(i, k)) / est.se(i, k);
    json mz = json::array();
    for (int i = 0; i < 3; ++i) {
      mz.push_back(detail::number((est.mean(i) / area - d[static_cast<std::size_t>(i)]) /
                                  (est.mean_se(i) / area)));
    }
    j["analytic"] = {{"mean_density", d},
                     {"cov", detail::matrix(*target)},
                     {"z_cov", detail::matrix(z)},
                     {"z_mean_density", mz}};
  } else {
    j["analytic"] = nullptr;
  }
  return j;
}

enum class Verdict { Pass, Fail, InsufficientStatistics };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    default: return "insufficient_statistics";
  }
}

struct EntryCheck {
  int i = 0;
  int j = 0;
  double estimate = 0.0;
  double target = 0.0;
  double se = 0.0;
  double z = 0.0;
  bool pass = false;
};

struct ValidationReport {
  Verdict verdict = Verdict::Fail;
  std::vector<EntryCheck> entries;
  std::size_t M = 0;
  double z_threshold = 4.0;
  double max_abs_z = 0.0;
};

/// z = (estimate - target) / se for the six distinct entries. Fewer than
/// min_samples samples give InsufficientStatistics regardless of z.
inline ValidationReport compare(const stats::CovarianceEstimate& est, const analytic::CovMatrix& target,
                                double z_threshold, std::size_t min_samples) {
  ValidationReport rep;
  rep.M = est.M;
  rep.z_threshold = z_threshold;
  bool all = true;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      EntryCheck e{i, j, est.cov(i, j), target(i, j), est.se(i, j), 0.0, false};
      const double diff = e.estimate - e.target;
      if (e.se > 0.0) {
        e.z = diff / e.se;
      } else {
        e.z = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
      }
      e.pass = std::abs(e.z) <= z_threshold;
      all = all && e.pass;
      rep.max_abs_z = std::max(rep.max_abs_z, std::abs(e.z));
      rep.entries.push_back(e);
    }
  }
  if (est.M < min_samples) {
    rep.verdict = Verdict::InsufficientStatistics;
  } else {
    rep.verdict = all ? Verdict::Pass : Verdict::Fail;
  }
  return rep;
}

inline json validation_json(const ModelSpec& spec, const ValidationReport& rep) {
  json entries = json::array();
  for (const auto& e : rep.entries) {
    entries.push_back({{"entry", std::string("s") + std::to_string(e.i) + std::to_string(e.j)},
                       {"estimate", e.estimate},
                       {"analytic", e.target},
                       {"se", e.se},
                       {"z", detail::number(e.z)},
                       {"pass", e.pass}});
  }
  return {{"spec", detail::spec_json(spec)},
          {"verdict", verdict_name(rep.verdict)},
          {"M", rep.M},
          {"z_threshold", rep.z_threshold},
          {"max_abs_z", detail::number(rep.max_abs_z)},
          {"entries", entries}};
}

struct HistReport {
  std::array<stats::Histogram, 3> hist;
  std::array<double, 3> ks{};
};

/// Histograms and KS distances of the standardized functionals.
inline HistReport histograms(std::span<const SampleResult> results, double lo, double hi, std::size_t bins) {
  if (results.empty()) throw std::invalid_argument("hist: no samples");
  const auto z = stats::standardize(results);
  HistReport rep;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto c = stats::component(z, i);
    rep.hist[i] = stats::histogram(c, lo, hi, bins);
    rep.ks[i] = stats::ks_normal(c);
  }
  return rep;
}

inline std::string histogram_csv(const stats::Histogram& h) {
  std::ostringstream o;
  o << "bin_center,weight\n";
  for (std::size_t k = 0; k < h.bins(); ++k) o << format_double(h.center(k)) << ',' << format_double(h.weights[k]) << '\n';
  return o.str();
}

// ---------------------------------------------------------------------------
// Subcommands. Each returns an ExitCode and reports progress on `log`.

inline int cmd_analytic(const RunConfig& cfg, std::ostream& log) {
  const auto gammas = cfg.intensities();
  const std::string csv = analytic_csv(cfg.a, cfg.b, gammas);
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = std::filesystem::path(cfg.out_dir) / "analytic.csv";
  detail::write_file(path, csv);
  log << "wrote " << path.string() << " (" << gammas.size() << " rows)\n";
  return kOk;
}

struct RunOutput {
  ModelSpec spec;
  std::vector<SampleResult> results;
  std::optional<stats::CovarianceEstimate> estimate;
};

inline RunOutput run_model(const RunConfig& cfg, double gamma, unsigned workers) {
  RunOutput out;
  out.spec = cfg.model_spec(gamma);
  out.results = run(out.spec, workers);
  if (out.results.size() >= 2) {
    out.estimate = stats::estimate_cov(std::span<const SampleResult>(out.results), out.spec.window_area(),
                                       cfg.bootstrap, cfg.bootstrap_seed);
  }
  return out;
}

inline int cmd_simulate(const RunConfig& cfg, unsigned workers, std::ostream& log) {
  for (double g : cfg.intensities()) {
    const auto out = run_model(cfg, g, workers);
    const auto dir = detail::run_dir(cfg, g);
    std::ostringstream csv;
    write_samples_csv(csv, out.results);
    detail::write_file(dir / "samples.csv", csv.str());
    log << "wrote " << (dir / "samples.csv").string() << " (" << out.results.size() << " samples)\n";
    if (out.estimate) {
      detail::write_file(dir / "summary.json", summary_json(out.spec, *out.estimate).dump(2) + "\n");
      log << "wrote " << (dir / "summary.json").string() << "\n";
    } else {
      log << "fewer than 2 samples at gamma = " << format_double(g) << "; no summary written\n";
    }
  }
  return kOk;
}

inline int cmd_validate(const RunConfig& cfg, unsigned workers, std::ostream& log) {
  int code = kOk;
  for (double g : cfg.intensities()) {
    const auto spec = cfg.model_spec(g);
    const auto target = analytic_target(spec);
    if (!target) throw std::invalid_argument("validate: no closed form for isotropic grains");
    validate(spec);
    if (spec.replications < 2) {
      log << "gamma = " << format_double(g) << ": insufficient_statistics (M = " << spec.replications << ")\n";
      code = std::max(code, static_cast<int>(kInsufficientStatistics));
      continue;
    }
    const auto out = run_model(cfg, g, workers);
    const auto rep = compare(*out.estimate, *target, cfg.z_threshold, cfg.min_samples);
    const auto dir = detail::run_dir(cfg, g);
    detail::write_file(dir / "summary.json", summary_json(out.spec, *out.estimate).dump(2) + "\n");
    detail::write_file(dir / "validation.json", validation_json(out.spec, rep).dump(2) + "\n");
    log << "gamma = " << format_double(g) << ": " << verdict_name(rep.verdict)
        << " (M = " << rep.M << ", max |z| = " << rep.max_abs_z << ")\n";
    for (const auto& e : rep.entries) {
      log << "  s" << e.i << e.j << "  estimate " << e.estimate << "  analytic " << e.target << "  se " << e.se
          << "  z " << e.z << (e.pass ? "" : "  FAIL") << "\n";
    }
    if (rep.verdict == Verdict::Fail) code = kValidationFailed;
    if (rep.verdict == Verdict::InsufficientStatistics && code == kOk) code = kInsufficientStatistics;
  }
  return code;
}

inline int cmd_hist(const RunConfig& cfg, unsigned workers, std::ostream& log) {
  for (double g : cfg.intensities()) {
    const auto spec = cfg.model_spec(g);
    if (spec.replications == 0) throw std::invalid_argument("hist: zero samples requested");
    const auto out = run_model(cfg, g, workers);
    const auto rep = histograms(out.results, cfg.hist_min, cfg.hist_max, cfg.hist_bins);
    const auto dir = detail::run_dir(cfg, g);
    json summary{{"spec", detail::spec_json(spec)},
                 {"M", out.results.size()},
                 {"range", {cfg.hist_min, cfg.hist_max}},
                 {"bins", cfg.hist_bins}};
    for (std::size_t i = 0; i < 3; ++i) {
      const auto name = std::string("hist_") + kNames[i] + ".csv";
      detail::write_file(dir / name, histogram_csv(rep.hist[i]));
      summary["functionals"][kNames[i]] = {{"file", name},
                                           {"ks", rep.ks[i]},
                                           {"below", rep.hist[i].below},
                                           {"above", rep.hist[i].above}};
      log << kNames[i] << ": KS = " << rep.ks[i] << ", overflow = " << rep.hist[i].overflow() << "\n";
    }
    detail::write_file(dir / "hist_summary.json", summary.dump(2) + "\n");
    log << "wrote histograms to " << dir.string() << "\n";
  }
  return kOk;
}

}  // namespace boolmodel::cli
