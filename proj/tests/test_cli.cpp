#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <string>

#include "doctest.h"
#include "kimura/config.hpp"

using namespace kimura;
using nlohmann::json;

namespace {

ExperimentConfig sample_config() {
  ExperimentConfig c;
  c.op.family = "model1d_b";
  c.op.params = {{"b", 0.5}, {"extent", 2.0}};
  c.grid.nodes = 33;
  c.grid.layers = 8;
  c.grid.ratio = 0.4;
  c.scheme.name = "implicit-euler";
  c.scheme.dt = 0.01;
  c.scheme.t_end = 0.25;
  c.scheme.save_every = 5;
  c.experiments = {{"garding", {{"trials", 10.0}}},
                   {"energy", {}}};
  c.seed = 42;
  c.out_dir = "custom_out";
  return c;
}

}  // namespace

TEST_CASE("config round-trips losslessly through JSON") {
  const ExperimentConfig c = sample_config();
  const json j = c.to_json();
  const ExperimentConfig r = ExperimentConfig::from_json(j);
  CHECK(r.to_json() == j);
  CHECK(r.op.family == c.op.family);
  CHECK(r.op.params.at("b") == 0.5);
  CHECK(r.grid.nodes == 33);
  CHECK(r.scheme.name == "implicit-euler");
  CHECK(r.experiments.size() == 2);
  CHECK(r.experiments[0].params.at("trials") == 10.0);
  CHECK(r.seed == 42);
  CHECK(r.out_dir == "custom_out");
}

TEST_CASE("config hash is deterministic and content sensitive") {
  const ExperimentConfig a = sample_config();
  ExperimentConfig b = sample_config();
  CHECK(a.hash() == b.hash());
  b.scheme.dt = 0.02;
  CHECK(a.hash() != b.hash());
}

TEST_CASE("schema errors name the offending field path") {
  auto expect_error = [](const json& j, const std::string& needle) {
    try {
      ExperimentConfig::from_json(j);
      FAIL("expected ConfigError for ", needle);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_error({{"schema_version", 2}}, "schema_version");
  expect_error({{"grid", {{"nodes", 2}}}}, "grid.nodes");
  expect_error({{"grid", {{"ratio", 1.5}}}}, "grid.ratio");
  expect_error({{"scheme", {{"name", "leapfrog"}}}}, "scheme.name");
  expect_error({{"scheme", {{"dt", -1.0}}}}, "scheme.dt");
  expect_error({{"operator", {{"params", {{"b", "oops"}}}}}},
               "operator.params.b");
  expect_error({{"experiments", {{{"params", json::object()}}}}},
               "experiments[0].tag");
  expect_error(
      {{"experiments", {{{"tag", "carleson"}, {"params", {{"r", -0.1}}}}}}},
      "experiments[0].params.r");
  expect_error(json::array(), "expected a JSON object");
}

TEST_CASE("config loading reports I/O and parse failures") {
  CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/nowhere.json"),
                  ConfigError);
  const auto path =
      (std::filesystem::temp_directory_path() / "kimura_bad.json").string();
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  CHECK_THROWS_AS(ExperimentConfig::load(path), ConfigError);
}

TEST_CASE("empty experiment list runs validation only") {
  ExperimentConfig c;
  c.op.family = "model_s11";
  c.grid.nodes = 9;
  const RunResult r = run(c, false);
  CHECK(r.exit_status == 0);
  CHECK(r.bundle["validation"]["pass"] == true);
  CHECK(r.bundle["experiments"].empty());
  CHECK(r.bundle["config_hash"] == c.hash());
}

TEST_CASE("run bundles are deterministic") {
  ExperimentConfig c;
  c.grid.nodes = 17;
  c.scheme.t_end = 0.1;
  c.scheme.dt = 0.01;
  c.experiments = {{"garding", {{"trials", 10.0}}}};
  const RunResult a = run(c, false);
  const RunResult b = run(c, false);
  CHECK(a.bundle.dump() == b.bundle.dump());
}

TEST_CASE("unknown experiment tags fail the run") {
  ExperimentConfig c;
  c.grid.nodes = 9;
  c.experiments = {{"frobnicate", {}}};
  const RunResult r = run(c, false);
  CHECK(r.exit_status == 1);
  REQUIRE(r.bundle.contains("failure"));
  CHECK(r.bundle["failure"].get<std::string>().find("frobnicate") !=
        std::string::npos);
}

TEST_CASE("run writes the report bundle and artifacts") {
  namespace fs = std::filesystem;
  ExperimentConfig c = sample_config();
  c.scheme.t_end = 0.1;
  c.out_dir = (fs::temp_directory_path() / "kimura_cli_run").string();
  fs::remove_all(c.out_dir);
  const RunResult r = run(c, true);
  CHECK(r.exit_status == 0);
  CHECK(fs::exists(fs::path(c.out_dir) / "report.json"));
  CHECK(fs::exists(fs::path(c.out_dir) / "final.snap"));  // energy solves
  CHECK_FALSE(fs::exists(fs::path(c.out_dir) / "FAILED"));
  for (const auto& e : r.bundle["experiments"])
    CHECK(e["verdict"] == "PASS");
}

TEST_CASE("failed runs leave a marker file") {
  namespace fs = std::filesystem;
  ExperimentConfig c;
  c.op.family = "no_such_family";
  c.out_dir = (fs::temp_directory_path() / "kimura_cli_fail").string();
  fs::remove_all(c.out_dir);
  const RunResult r = run(c, true);
  CHECK(r.exit_status == 1);
  CHECK(fs::exists(fs::path(c.out_dir) / "FAILED"));
}

TEST_CASE("report rendering lists tags and verdicts") {
  ExperimentConfig c;
  c.grid.nodes = 17;
  c.scheme.t_end = 0.1;
  c.scheme.dt = 0.01;
  c.experiments = {{"garding", {{"trials", 5.0}}}};
  const RunResult r = run(c, false);
  const std::string text = render_report(r.bundle);
  CHECK(text.find("garding") != std::string::npos);
  CHECK(text.find("PASS") != std::string::npos);
  CHECK(text.find("config hash") != std::string::npos);
}
