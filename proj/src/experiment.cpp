#include "rsde/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rsde {

namespace {

using nlohmann::json;

Eigen::VectorXd parse_vector(const json& j) {
  Eigen::VectorXd v(j.size());
  int i = 0;
  for (const auto& e : j) v(i++) = e.get<double>();
  return v;
}

Eigen::MatrixXd parse_matrix(const json& j) {
  if (j.empty()) throw ConfigError("empty matrix in config");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols) {
      throw ConfigError("ragged matrix in config");
    }
    for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

std::vector<Eigen::MatrixXd> parse_matrix_list(const json& j) {
  std::vector<Eigen::MatrixXd> out;
  for (const auto& e : j) out.push_back(parse_matrix(e));
  return out;
}

ParamBox parse_box(const json& j, int param_dim) {
  if (j.contains("box")) {
    return ParamBox{parse_vector(j["box"]["lo"]), parse_vector(j["box"]["hi"])};
  }
  return ParamBox::symmetric(param_dim, 10.0);
}

CoefficientModel parse_model(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  CoefficientModel model = [&] {
    if (kind == "constant") {
      const int m = j.value("param_dim", 0);
      return CoefficientModel::constant(parse_vector(j.at("b")),
                                        parse_matrix(j.at("sigma")), m,
                                        parse_box(j, m));
    }
    if (kind == "affine") {
      Eigen::MatrixXd b_alpha = parse_matrix(j.at("b_alpha"));
      const int m = static_cast<int>(b_alpha.cols());
      return CoefficientModel::affine(
          parse_vector(j.at("b0")), std::move(b_alpha),
          parse_matrix(j.at("b_x")), parse_matrix(j.at("sigma0")),
          parse_matrix_list(j.at("sigma_alpha")),
          parse_matrix_list(j.at("sigma_x")), parse_box(j, m));
    }
    if (kind == "smooth_bounded") {
      Eigen::VectorXd b_wa = parse_vector(j.at("b_wa"));
      const int m = static_cast<int>(b_wa.size());
      return CoefficientModel::smooth_bounded(
          parse_vector(j.at("b0")), parse_vector(j.at("b_amp")),
          std::move(b_wa), parse_vector(j.at("b_wx")),
          parse_matrix(j.at("sigma0")), parse_matrix(j.at("s_amp")),
          parse_vector(j.at("s_wa")), parse_vector(j.at("s_wx")),
          parse_box(j, m));
    }
    throw ConfigError("unknown model kind: " + kind);
  }();
  if (j.value("elliptic", false)) {
    model.set_elliptic(j.value("lambda", 0.0));
  }
  return model;
}

FunctionalPart parse_functional_part(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "zero") return FunctionalPart::zero();
  if (kind == "linear") {
    return FunctionalPart::linear(parse_vector(j.at("w")), j.value("c", 0.0));
  }
  if (kind == "smooth_bounded") {
    return FunctionalPart::smooth_bounded(parse_vector(j.at("w")),
                                          j.value("c", 0.0),
                                          j.value("amp", 1.0));
  }
  throw ConfigError("unknown functional kind: " + kind);
}

Experiment from_json_checked(const json& j);

}  // namespace

Experiment Experiment::from_json(const nlohmann::json& j) {
  try {
    return from_json_checked(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config error: ") + e.what());
  }
}

namespace {

Experiment from_json_checked(const json& j) {
  const json& dj = j.at("domain");
  PolyhedralDomain domain(parse_matrix(dj.at("normals")),
                          parse_vector(dj.at("offsets")),
                          dj.value("face_tol", 1e-9));

  CoefficientModel model = parse_model(j.at("model"));

  ReflectionField field;
  const json& rj = j.at("reflection");
  if (rj.value("normal", false)) {
    field = ReflectionField::normal(domain, model.param_dim());
  } else {
    field.base = parse_matrix(rj.at("base"));
    if (rj.contains("sensitivity")) {
      field.sensitivity = parse_matrix_list(rj["sensitivity"]);
    } else {
      field.sensitivity.assign(
          model.param_dim(),
          Eigen::MatrixXd::Zero(domain.num_faces(), domain.dim()));
    }
  }
  if (field.param_dim() != model.param_dim()) {
    throw ConfigError("reflection and model disagree on parameter dimension");
  }

  Experiment exp(std::move(domain), std::move(field), std::move(model));
  if (j.contains("functional")) {
    exp.functional.running = parse_functional_part(j["functional"].at("running"));
    exp.functional.terminal =
        parse_functional_part(j["functional"].at("terminal"));
  }
  exp.alpha = parse_vector(j.at("alpha"));
  exp.x = parse_vector(j.at("x"));

  const json& sj = j.at("sim");
  exp.sim.horizon = sj.at("horizon").get<double>();
  exp.sim.dt = sj.at("dt").get<double>();
  exp.sim.path_count = sj.at("paths").get<int>();
  exp.sim.seed = sj.value("seed", 0ULL);
  exp.sim.workers = sj.value("workers", 1);
  exp.sim.step_count();  // validate early

  if (j.contains("directions")) {
    for (const auto& d : j["directions"]) {
      exp.directions.push_back(
          Direction{parse_vector(d.at("beta")), parse_vector(d.at("y"))});
    }
  }
  exp.eps = j.value("eps", 1e-4);
  if (j.contains("jitter")) {
    exp.jitter_window = j["jitter"].value("window", 200);
    if (j["jitter"].contains("dts")) {
      for (const auto& dt : j["jitter"]["dts"]) {
        exp.jitter_dts.push_back(dt.get<double>());
      }
    }
  }

  std::ostringstream hash;
  hash << std::hex << std::hash<std::string>{}(j.dump());
  exp.config_hash = hash.str();
  return exp;
}

}  // namespace

Experiment Experiment::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return from_json(j);
}

SensitivitySetup Experiment::setup() const {
  SensitivitySetup s;
  s.domain = &domain;
  s.reflection = &reflection;
  s.model = &model;
  s.functional = &functional;
  s.alpha = alpha;
  s.x = x;
  s.sim = sim;
  return s;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_report(const RunOptions& opt, const Experiment& exp,
                          const std::string& name) {
  std::filesystem::create_directories(opt.out_dir);
  const std::string path = opt.out_dir + "/" + name;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "# refldiff-report v1 config=" << exp.config_hash
      << " seed=" << exp.sim.seed << "\n";
  return out;
}

std::uint64_t active_mask(const ActiveSet& active) {
  std::uint64_t mask = 0;
  for (int i : active) mask |= (1ULL << i);
  return mask;
}

PreflightReport preflight_or_refuse(const Experiment& exp,
                                    const RunOptions& opt, std::ostream& log) {
  PreflightReport report = preflight(exp.domain, exp.reflection, exp.alpha);
  if (!report.independent) {
    std::ostringstream witness;
    for (int i : report.dependent_witness) witness << " " << i;
    if (!opt.force) {
      throw PreflightRefusal("dependent reflection directions on active set {" +
                             witness.str() + " }");
    }
    log << "warning: dependent reflection directions on active set {"
        << witness.str() << " }, continuing (--force)\n";
  }
  return report;
}

void write_preflight_line(std::ofstream& out, const PreflightReport& report) {
  out << "preflight,independent," << (report.independent ? 1 : 0) << "\n";
  out << "preflight,w_empty," << (report.w_empty ? 1 : 0) << "\n";
}

}  // namespace

int run_preflight(const Experiment& exp, std::ostream& log) {
  PreflightReport report = preflight(exp.domain, exp.reflection, exp.alpha);
  log << "independence: " << (report.independent ? "Independent" : "Dependent")
      << "\n";
  if (!report.independent) {
    log << "witness active set:";
    for (int i : report.dependent_witness) log << " " << i;
    log << "\n";
  }
  log << "W empty: " << (report.w_empty ? "yes" : "no") << "\n";
  return report.independent && report.w_empty ? 0 : 1;
}

int run_simulate(const Experiment& exp, const RunOptions& opt,
                 std::ostream& log) {
  PreflightReport pf = preflight_or_refuse(exp, opt, log);
  const ReflectionMatrix rm =
      reflection_matrix(exp.reflection, exp.domain, exp.alpha);

  const int dump = std::min(opt.dump_paths, exp.sim.path_count);
  std::vector<ReflectedPath> dumps(dump);
  BatchSummary summary = simulate_batch(
      exp.domain, rm.r, exp.model, exp.alpha, exp.x, exp.sim,
      [&](int p, const ReflectedPath& path) {
        if (p < dump) dumps[p] = path;
      });

  std::ofstream out = open_report(opt, exp, "summary.csv");
  write_preflight_line(out, pf);
  out << "paths,," << summary.path_count << "\n";
  for (int c = 0; c < summary.mean_terminal.size(); ++c) {
    out << "mean_terminal," << c << ","
        << format_number(summary.mean_terminal(c)) << "\n";
    out << "se_terminal," << c << "," << format_number(summary.se_terminal(c))
        << "\n";
  }
  out << "boundary_fraction,," << format_number(summary.boundary_fraction)
      << "\n";

  for (int p = 0; p < dump; ++p) {
    std::ostringstream name;
    name << "path_" << p << ".csv";
    std::ofstream pout = open_report(opt, exp, name.str());
    pout << "t";
    for (int c = 0; c < exp.domain.dim(); ++c) pout << ",h" << c;
    for (int i = 0; i < exp.domain.num_faces(); ++i) pout << ",l" << i;
    pout << ",active_mask\n";
    Eigen::VectorXd cum = Eigen::VectorXd::Zero(exp.domain.num_faces());
    for (int k = 0; k <= dumps[p].steps(); ++k) {
      if (k > 0) cum += dumps[p].dl.row(k - 1).transpose();
      pout << format_number(k * exp.sim.dt);
      for (int c = 0; c < exp.domain.dim(); ++c) {
        pout << "," << format_number(dumps[p].z(k, c));
      }
      for (int i = 0; i < exp.domain.num_faces(); ++i) {
        pout << "," << format_number(cum(i));
      }
      pout << "," << active_mask(dumps[p].active[k]) << "\n";
    }
  }

  log << "simulated " << summary.path_count << " paths; mean terminal = [";
  for (int c = 0; c < summary.mean_terminal.size(); ++c) {
    log << (c ? ", " : "") << summary.mean_terminal(c);
  }
  log << "]\n";
  return 0;
}

namespace {

std::vector<Direction> effective_directions(const Experiment& exp) {
  if (!exp.directions.empty()) return exp.directions;
  return basis_directions(exp.model.param_dim(), exp.domain.dim());
}

}  // namespace

int run_sensitivity(const Experiment& exp, const RunOptions& opt,
                    std::ostream& log) {
  PreflightReport pf = preflight_or_refuse(exp, opt, log);
  const std::vector<Direction> directions = effective_directions(exp);
  GradientEstimate grad = ipa_gradient(exp.setup(), directions);

  std::ofstream out = open_report(opt, exp, "sensitivity.csv");
  write_preflight_line(out, pf);
  out << "theta,," << format_number(grad.theta.mean) << ","
      << format_number(grad.theta.se) << "\n";
  for (size_t d = 0; d < grad.components.size(); ++d) {
    out << "ipa," << d << "," << format_number(grad.components[d].mean) << ","
        << format_number(grad.components[d].se) << "\n";
  }
  log << "theta = " << grad.theta.mean << " (se " << grad.theta.se << ")\n";
  for (size_t d = 0; d < grad.components.size(); ++d) {
    log << "ipa[" << d << "] = " << grad.components[d].mean << " (se "
        << grad.components[d].se << ")\n";
  }
  return 0;
}

int run_compare_fd(const Experiment& exp, const RunOptions& opt,
                   std::ostream& log) {
  PreflightReport pf = preflight_or_refuse(exp, opt, log);
  const std::vector<Direction> directions = effective_directions(exp);
  GradientEstimate grad = ipa_gradient(exp.setup(), directions);
  std::vector<MeanSe> fd;
  for (const Direction& d : directions) {
    fd.push_back(fd_gradient(exp.setup(), d, exp.eps));
  }
  std::vector<CompareRow> rows = compare(grad, fd);

  std::ofstream out = open_report(opt, exp, "compare_fd.csv");
  write_preflight_line(out, pf);
  out << "eps,," << format_number(exp.eps) << "\n";
  bool all_pass = true;
  for (const CompareRow& row : rows) {
    out << row.label << "," << format_number(row.ipa.mean) << ","
        << format_number(row.ipa.se) << "," << format_number(row.fd.mean)
        << "," << format_number(row.fd.se) << "," << format_number(row.z)
        << "," << (row.pass ? 1 : 0) << "\n";
    log << row.label << ": ipa " << row.ipa.mean << " fd " << row.fd.mean
        << " z " << row.z << (row.pass ? " PASS" : " FAIL") << "\n";
    all_pass = all_pass && row.pass;
  }
  return all_pass ? 0 : 1;
}

int run_diagnose(const Experiment& exp, const RunOptions& opt,
                 std::ostream& log) {
  PreflightReport pf = preflight(exp.domain, exp.reflection, exp.alpha);
  const ReflectionMatrix rm =
      reflection_matrix(exp.reflection, exp.domain, exp.alpha);

  JitterStats stats = jitter_stats(exp.domain, rm.r, exp.model, exp.alpha,
                                   exp.x, exp.sim, exp.jitter_window);
  std::ofstream out = open_report(opt, exp, "diagnose.csv");
  write_preflight_line(out, pf);
  out << "jitter_window,," << stats.window << "\n";
  out << "occupation_fraction,," << format_number(stats.occupation_fraction)
      << "\n";
  out << "corner_entries,," << stats.corner_entries << "\n";
  out << "condition3_rate,," << format_number(stats.condition3_rate) << "\n";
  out << "corner_start_paths,," << stats.corner_start_paths << "\n";
  out << "condition4_rate,," << format_number(stats.condition4_rate) << "\n";
  out << "smooth_visits,," << stats.smooth_visits << "\n";
  out << "condition1_rate,," << format_number(stats.condition1_rate) << "\n";

  if (!exp.jitter_dts.empty()) {
    auto levels = occupation_levels(exp.domain, rm.r, exp.model, exp.alpha,
                                    exp.x, exp.sim, exp.jitter_dts);
    for (const auto& [dt, frac] : levels) {
      out << "occupation_level," << format_number(dt) << ","
          << format_number(frac) << "\n";
    }
  }

  log << "occupation fraction " << stats.occupation_fraction
      << ", condition-3 rate " << stats.condition3_rate
      << ", condition-4 rate " << stats.condition4_rate << "\n";
  return 0;
}

}  // namespace rsde
