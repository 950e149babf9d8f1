#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kimura/config.hpp"
#include "kimura/oracles.hpp"

namespace {

using kimura::ExperimentConfig;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool has_seed = false;
  int threads = 0;
  int grid_override = 0;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config_path, "Config file (JSON)");
  app->add_option("--out", f.out_dir, "Output directory");
  app->add_option("--seed", f.seed, "RNG seed")->each([&](const std::string&) {
    f.has_seed = true;
  });
  app->add_option("--threads", f.threads, "Worker thread count");
  app->add_option("--grid-override", f.grid_override, "Nodes per axis");
}

ExperimentConfig load_config(const CommonFlags& f) {
  ExperimentConfig cfg;
  if (!f.config_path.empty()) cfg = ExperimentConfig::load(f.config_path);
  if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
  if (f.has_seed) cfg.seed = f.seed;
  if (f.threads > 0) kimura::set_thread_count(f.threads);
  if (f.grid_override > 0) cfg.grid.nodes = f.grid_override;
  return cfg;
}

int run_filtered(const CommonFlags& f, const std::vector<std::string>& keep) {
  ExperimentConfig cfg = load_config(f);
  if (!keep.empty()) {
    std::vector<kimura::ExperimentSpec> kept;
    for (const auto& e : cfg.experiments)
      if (std::find(keep.begin(), keep.end(), e.tag) != keep.end())
        kept.push_back(e);
    if (kept.empty())
      for (const auto& tag : keep)
        if (tag != "*") kept.push_back({tag, {}});
    cfg.experiments = std::move(kept);
  }
  const kimura::RunResult res = kimura::run(cfg);
  std::cout << kimura::render_report(res.bundle);
  return res.exit_status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for degenerate operators on corner domains"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  CommonFlags flags;
  std::string report_path;

  CLI::App* c_validate = app.add_subcommand("validate", "Check operator structure");
  CLI::App* c_solve = app.add_subcommand("solve", "Time-step the initial-value problem");
  CLI::App* c_verify = app.add_subcommand("verify", "Run the estimate experiments");
  CLI::App* c_harnack = app.add_subcommand("harnack", "Run the Harnack-type experiments");
  CLI::App* c_mc = app.add_subcommand("mc-compare", "Monte Carlo cross-validation");
  CLI::App* c_run = app.add_subcommand("run", "Full pipeline from a config");
  CLI::App* c_report = app.add_subcommand("report", "Render a JSON report bundle");
  for (CLI::App* sub : {c_validate, c_solve, c_verify, c_harnack, c_mc, c_run})
    add_common(sub, flags);
  c_report->add_option("bundle", report_path, "Path to report.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (c_report->parsed()) {
      std::ifstream in(report_path);
      if (!in) {
        std::cerr << "cannot open " << report_path << '\n';
        return 1;
      }
      nlohmann::json bundle;
      in >> bundle;
      std::cout << kimura::render_report(bundle);
      return 0;
    }
    if (c_validate->parsed()) {
      ExperimentConfig cfg = load_config(flags);
      cfg.experiments.clear();
      const kimura::RunResult res = kimura::run(cfg);
      std::cout << kimura::render_report(res.bundle);
      return res.exit_status;
    }
    if (c_solve->parsed()) return run_filtered(flags, {"energy"});
    if (c_verify->parsed())
      return run_filtered(
          flags, {"vanishing", "derivative-bound", "carleson", "hopf-oleinik",
                  "quotient", "holder", "elliptic-harnack", "energy", "sobolev",
                  "garding", "hardy", "eigen-benchmark"});
    if (c_harnack->parsed())
      return run_filtered(flags, {"carleson", "hopf-oleinik", "quotient",
                                  "holder", "elliptic-harnack"});
    if (c_mc->parsed()) return run_filtered(flags, {"mc-compare"});
    if (c_run->parsed()) return run_filtered(flags, {});
  } catch (const kimura::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
