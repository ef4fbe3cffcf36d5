#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rsde/diagnostics.hpp"
#include "rsde/functional.hpp"
#include "rsde/sensitivity.hpp"

namespace rsde {

// One experiment = one config file: domain, reflection field, coefficient
// model, functional, evaluation point, simulation settings and directions.
class Experiment {
 public:
  static Experiment from_json(const nlohmann::json& j);
  static Experiment from_file(const std::string& path);

  PolyhedralDomain domain;
  ReflectionField reflection;
  CoefficientModel model;
  Functional functional;
  Eigen::VectorXd alpha;
  Eigen::VectorXd x;
  SimConfig sim;
  std::vector<Direction> directions;
  double eps = 1e-4;
  int jitter_window = 200;
  std::vector<double> jitter_dts;
  std::string config_hash;

  SensitivitySetup setup() const;

  Experiment(PolyhedralDomain d, ReflectionField f, CoefficientModel m)
      : domain(std::move(d)), reflection(std::move(f)), model(std::move(m)) {}
};

struct RunOptions {
  std::string out_dir = ".";
  int dump_paths = 0;    // number of full path dumps for `simulate`
  bool force = false;    // bypass the preflight refusal
};

// Subcommand drivers. Each writes its artifacts under out_dir and logs a
// human-readable summary; returns a process exit status.
int run_preflight(const Experiment& exp, std::ostream& log);
int run_simulate(const Experiment& exp, const RunOptions& opt,
                 std::ostream& log);
int run_sensitivity(const Experiment& exp, const RunOptions& opt,
                    std::ostream& log);
int run_compare_fd(const Experiment& exp, const RunOptions& opt,
                   std::ostream& log);
int run_diagnose(const Experiment& exp, const RunOptions& opt,
                 std::ostream& log);

// 17-significant-digit text form used in every report.
std::string format_number(double v);

}  // namespace rsde
