// boolmodel: closed-form tables and Monte Carlo runs for the planar Boolean
// model of rectangles.
//
//   boolmodel analytic|simulate|validate|hist [--config PATH] [--seed U64]
//                                             [--workers N] [--out DIR]
//
// Exit status: 0 success, 1 validation failed, 2 error, 3 insufficient
// statistics.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "boolmodel/commands.hpp"

int main(int argc, char** argv) {
  using namespace boolmodel;

  CLI::App app{"Intrinsic volumes of the planar Boolean model with rectangular grains"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned workers = default_workers();
  std::optional<std::string> out_dir;

  const std::array<std::pair<const char*, const char*>, 4> commands{{
      {"analytic", "closed-form mean densities and covariances over the gamma list"},
      {"simulate", "Monte Carlo samples and covariance summary"},
      {"validate", "Monte Carlo covariances against the closed forms"},
      {"hist", "histograms of the standardized functionals with KS distances"},
  }};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed (overrides [run] seed)");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kOk : cli::kError;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open " + config_path);
      cfg = parse_config(in);
    }
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.out_dir = *out_dir;

    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "analytic") return cli::cmd_analytic(cfg, std::cerr);
    if (name == "simulate") return cli::cmd_simulate(cfg, workers, std::cerr);
    if (name == "validate") return cli::cmd_validate(cfg, workers, std::cerr);
    return cli::cmd_hist(cfg, workers, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kError;
  }
}
