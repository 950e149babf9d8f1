#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "kimura/types.hpp"

namespace kimura {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct OperatorSpec {
  std::string family = "model1d_zero";
  std::map<std::string, double> params;
};

struct GridSpec {
  int nodes = 65;  // per axis
  int layers = 10;
  double ratio = 0.5;
};

struct SchemeSpec {
  std::string name = "crank-nicolson";  // or "implicit-euler"
  double dt = 1e-3;
  double t_end = 1.0;
  int save_every = 10;
};

struct ExperimentSpec {
  std::string tag;
  std::map<std::string, double> params;
};

// Full experiment description; round-trips losslessly through JSON and hashes
// deterministically.
struct ExperimentConfig {
  int schema_version = 1;
  OperatorSpec op;
  GridSpec grid;
  SchemeSpec scheme;
  std::vector<ExperimentSpec> experiments;
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
  std::string hash() const;
};

struct RunResult {
  int exit_status = 0;  // 0 all-pass, 1 experiment failure
  nlohmann::json bundle;
};

// Executes validate -> solve -> oracles -> harness in dependency order and
// writes the report bundle (JSON verdicts, CSV series, snapshots) under
// cfg.out_dir when write_files is set.
RunResult run(const ExperimentConfig& cfg, bool write_files = true);

// Renders a report bundle as aligned-column text.
std::string render_report(const nlohmann::json& bundle);

}  // namespace kimura
