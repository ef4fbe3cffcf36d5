#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rsde/experiment.hpp"

using nlohmann::json;
using rsde::Experiment;
using rsde::RunOptions;

#ifndef RSDE_CONFIG_DIR
#define RSDE_CONFIG_DIR "."
#endif

namespace {

json minimal_config() {
  return json::parse(R"({
    "domain": {"normals": [[1.0]], "offsets": [0.0]},
    "reflection": {"normal": true},
    "model": {"kind": "constant", "b": [0.0], "sigma": [[1.0]], "param_dim": 0},
    "functional": {"running": {"kind": "zero"},
                   "terminal": {"kind": "linear", "w": [1.0]}},
    "alpha": [],
    "x": [0.5],
    "sim": {"horizon": 0.1, "dt": 0.01, "paths": 40, "seed": 12},
    "directions": [{"beta": [], "y": [1.0]}]
  })");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name)
      : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("config parsing round trip") {
  Experiment exp = Experiment::from_json(minimal_config());
  CHECK(exp.domain.num_faces() == 1);
  CHECK(exp.model.param_dim() == 0);
  CHECK(exp.sim.path_count == 40);
  CHECK(exp.sim.seed == 12);
  CHECK(exp.directions.size() == 1);
  CHECK(exp.eps == 1e-4);  // default
  CHECK_FALSE(exp.config_hash.empty());
}

TEST_CASE("shipped example configs parse") {
  Experiment rbm =
      Experiment::from_file(std::string(RSDE_CONFIG_DIR) + "/rbm1d.json");
  CHECK(rbm.domain.dim() == 1);
  Experiment obl =
      Experiment::from_file(std::string(RSDE_CONFIG_DIR) + "/oblique2d.json");
  CHECK(obl.domain.dim() == 2);
  CHECK(obl.model.elliptic());
  CHECK(obl.jitter_dts.size() == 3);
  CHECK_FALSE(obl.reflection.sensitivity.empty());
}

TEST_CASE("config errors are reported as ConfigError") {
  SUBCASE("missing file") {
    CHECK_THROWS_AS(Experiment::from_file("/nonexistent/config.json"),
                    rsde::ConfigError);
  }
  SUBCASE("missing keys") {
    json j = minimal_config();
    j.erase("domain");
    CHECK_THROWS_AS(Experiment::from_json(j), rsde::ConfigError);
  }
  SUBCASE("ragged matrix") {
    json j = minimal_config();
    j["domain"]["normals"] = json::parse("[[1.0, 0.0], [1.0]]");
    CHECK_THROWS_AS(Experiment::from_json(j), rsde::ConfigError);
  }
  SUBCASE("unknown model kind") {
    json j = minimal_config();
    j["model"]["kind"] = "polynomial";
    CHECK_THROWS_AS(Experiment::from_json(j), rsde::ConfigError);
  }
  SUBCASE("horizon not divisible by dt") {
    json j = minimal_config();
    j["sim"]["dt"] = 0.003;
    CHECK_THROWS_AS(Experiment::from_json(j), rsde::ConfigError);
  }
}

TEST_CASE("reports are byte-identical across worker counts") {
  TempDir out1("rsde_test_w1"), out2("rsde_test_w2");
  json j = minimal_config();
  std::ostringstream log;

  j["sim"]["workers"] = 1;
  Experiment e1 = Experiment::from_json(j);
  RunOptions o1;
  o1.out_dir = out1.path.string();
  CHECK(rsde::run_sensitivity(e1, o1, log) == 0);

  j["sim"]["workers"] = 3;
  Experiment e2 = Experiment::from_json(j);
  RunOptions o2;
  o2.out_dir = out2.path.string();
  CHECK(rsde::run_sensitivity(e2, o2, log) == 0);

  // The config hash differs (workers is part of the config), so compare the
  // payload below the header line.
  auto payload = [](const std::string& text) {
    return text.substr(text.find('\n') + 1);
  };
  std::string s1 = slurp((out1.path / "sensitivity.csv").string());
  std::string s2 = slurp((out2.path / "sensitivity.csv").string());
  CHECK(payload(s1) == payload(s2));
  CHECK(s1.rfind("# refldiff-report v1 config=", 0) == 0);
}

TEST_CASE("simulate writes a summary and optional path dumps") {
  TempDir out("rsde_test_sim");
  Experiment exp = Experiment::from_json(minimal_config());
  RunOptions opt;
  opt.out_dir = out.path.string();
  opt.dump_paths = 2;
  std::ostringstream log;
  CHECK(rsde::run_simulate(exp, opt, log) == 0);
  CHECK(std::filesystem::exists(out.path / "summary.csv"));
  CHECK(std::filesystem::exists(out.path / "path_0.csv"));
  CHECK(std::filesystem::exists(out.path / "path_1.csv"));
  CHECK_FALSE(std::filesystem::exists(out.path / "path_2.csv"));
  std::string summary = slurp((out.path / "summary.csv").string());
  CHECK(summary.find("mean_terminal,0,") != std::string::npos);
  CHECK(summary.find("preflight,independent,1") != std::string::npos);
  std::string dump = slurp((out.path / "path_0.csv").string());
  CHECK(dump.find("t,h0,l0,active_mask") != std::string::npos);
}

TEST_CASE("compare-fd runs end to end on the minimal config") {
  TempDir out("rsde_test_cmp");
  json j = minimal_config();
  j["sim"]["paths"] = 300;
  Experiment exp = Experiment::from_json(j);
  RunOptions opt;
  opt.out_dir = out.path.string();
  std::ostringstream log;
  CHECK(rsde::run_compare_fd(exp, opt, log) == 0);
  std::string report = slurp((out.path / "compare_fd.csv").string());
  CHECK(report.find("dir0,") != std::string::npos);
}

TEST_CASE("diagnose writes jitter statistics and occupation levels") {
  TempDir out("rsde_test_diag");
  json j = minimal_config();
  j["jitter"] = json::parse(R"({"window": 20, "dts": [0.01, 0.005]})");
  Experiment exp = Experiment::from_json(j);
  RunOptions opt;
  opt.out_dir = out.path.string();
  std::ostringstream log;
  CHECK(rsde::run_diagnose(exp, opt, log) == 0);
  std::string report = slurp((out.path / "diagnose.csv").string());
  CHECK(report.find("occupation_fraction,,") != std::string::npos);
  CHECK(report.find("occupation_level,") != std::string::npos);
}

TEST_CASE("dependent reflection directions refuse to run without force") {
  json j = minimal_config();
  j["domain"] = json::parse(
      R"({"normals": [[1.0, 0.0], [0.0, 1.0]], "offsets": [0.0, 0.0]})");
  j["reflection"] = json::parse(
      R"({"base": [[1.0, 1.0], [1.0, 1.0]]})");
  j["model"] = json::parse(
      R"({"kind": "constant", "b": [0.0, 0.0],
          "sigma": [[1.0, 0.0], [0.0, 1.0]], "param_dim": 0})");
  j["functional"]["terminal"]["w"] = json::parse("[1.0, 1.0]");
  j["x"] = json::parse("[0.5, 0.5]");
  j["directions"] = json::parse(R"([{"beta": [], "y": [1.0, 0.0]}])");
  Experiment exp = Experiment::from_json(j);
  TempDir out("rsde_test_refuse");
  RunOptions opt;
  opt.out_dir = out.path.string();
  std::ostringstream log;
  CHECK_THROWS_AS(rsde::run_simulate(exp, opt, log), rsde::PreflightRefusal);
  CHECK(rsde::run_preflight(exp, log) == 1);
  opt.force = true;
  // With --force the batch still runs (paths rarely reach the bad corner).
  CHECK(rsde::run_simulate(exp, opt, log) == 0);
}

TEST_CASE("format_number survives a round trip") {
  for (double v : {1.0 / 3.0, 0.1, -2.5e-17, 1234.5678, 0.0}) {
    CHECK(std::stod(rsde::format_number(v)) == v);
  }
}
