#include "rsde/sensitivity.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "rsde/rng.hpp"

namespace rsde {

MeanSe mean_se(const Eigen::VectorXd& samples) {
  MeanSe out;
  out.n = static_cast<int>(samples.size());
  if (out.n == 0) return out;
  out.mean = samples.mean();
  if (out.n > 1) {
    const double ss = (samples.array() - out.mean).square().sum();
    out.se = std::sqrt(ss / (out.n - 1)) / std::sqrt(static_cast<double>(out.n));
  }
  return out;
}

double path_theta(const Functional& functional, const ReflectedPath& path) {
  double running = 0.0;
  if (functional.running.kind != FunctionalPart::Kind::Zero) {
    for (int k = 0; k < path.steps(); ++k) {
      running += functional.running.value(path.z.row(k).transpose());
    }
    running *= path.dt;
  }
  return running + functional.terminal.value(path.terminal());
}

double path_ipa(const Functional& functional, const ReflectedPath& path,
                const DerivativeState& state) {
  double running = 0.0;
  if (functional.running.kind != FunctionalPart::Kind::Zero) {
    for (int k = 0; k < path.steps(); ++k) {
      running += functional.running.gradient(path.z.row(k).transpose())
                     .dot(state.j.row(k).transpose());
    }
    running *= path.dt;
  }
  return running +
         functional.terminal.gradient(path.terminal()).dot(state.terminal());
}

std::vector<Direction> basis_directions(int param_dim, int state_dim) {
  std::vector<Direction> directions;
  for (int m = 0; m < param_dim; ++m) {
    Direction d{Eigen::VectorXd::Zero(param_dim),
                Eigen::VectorXd::Zero(state_dim)};
    d.beta(m) = 1.0;
    directions.push_back(std::move(d));
  }
  for (int j = 0; j < state_dim; ++j) {
    Direction d{Eigen::VectorXd::Zero(param_dim),
                Eigen::VectorXd::Zero(state_dim)};
    d.y(j) = 1.0;
    directions.push_back(std::move(d));
  }
  return directions;
}

MeanSe estimate_theta(const SensitivitySetup& setup) {
  const ReflectionMatrix rm =
      reflection_matrix(*setup.reflection, *setup.domain, setup.alpha);
  Eigen::VectorXd samples(setup.sim.path_count);
  for_each_path(setup.sim.workers, setup.sim.path_count, [&](int p) {
    ReflectedPath path = simulate_path(*setup.domain, rm.r, *setup.model,
                                       setup.alpha, setup.x, setup.sim, p);
    samples(p) = path_theta(*setup.functional, path);
  });
  return mean_se(samples);
}

GradientEstimate ipa_gradient(const SensitivitySetup& setup,
                              const std::vector<Direction>& directions) {
  const ReflectionMatrix rm =
      reflection_matrix(*setup.reflection, *setup.domain, setup.alpha);

  // Full state-space bases are only meaningful from the interior; on the
  // boundary the user must supply tangent-cone directions explicitly.
  const bool on_boundary = !active_set(*setup.domain, setup.x).empty();
  if (on_boundary) {
    int state_dirs = 0;
    for (const auto& d : directions) {
      if (d.y.cwiseAbs().maxCoeff() > 0.0) ++state_dirs;
    }
    if (state_dirs >= setup.domain->dim()) {
      throw PreflightRefusal(
          "full state-basis Jacobian assembly needs an interior start; "
          "supply tangent-cone directions instead");
    }
  }

  ProjectionCache cache(*setup.domain, rm.r);
  const int paths = setup.sim.path_count;
  const int dirs = static_cast<int>(directions.size());
  Eigen::MatrixXd samples(paths, dirs);
  Eigen::VectorXd theta_samples(paths);
  for_each_path(setup.sim.workers, paths, [&](int p) {
    ReflectedPath path = simulate_path(*setup.domain, rm.r, *setup.model,
                                       setup.alpha, setup.x, setup.sim, p);
    theta_samples(p) = path_theta(*setup.functional, path);
    for (int d = 0; d < dirs; ++d) {
      DerivativeState state =
          simulate_derivative(*setup.domain, rm, *setup.model, setup.alpha,
                              path, directions[d], cache);
      samples(p, d) = path_ipa(*setup.functional, path, state);
    }
  });

  GradientEstimate estimate;
  estimate.directions = directions;
  estimate.theta = mean_se(theta_samples);
  for (int d = 0; d < dirs; ++d) {
    estimate.components.push_back(mean_se(samples.col(d)));
  }
  return estimate;
}

MeanSe fd_gradient(const SensitivitySetup& setup, const Direction& direction,
                   double eps) {
  const Eigen::VectorXd alpha_pert = setup.alpha + eps * direction.beta;
  const Eigen::VectorXd x_pert = setup.x + eps * direction.y;
  setup.model->require_in_box(alpha_pert);
  if (membership(*setup.domain, x_pert).region == Region::Outside) {
    throw DomainViolation("perturbed start lies outside the domain");
  }
  const ReflectionMatrix rm_base =
      reflection_matrix(*setup.reflection, *setup.domain, setup.alpha);
  const ReflectionMatrix rm_pert =
      reflection_matrix(*setup.reflection, *setup.domain, alpha_pert);

  const int n = setup.sim.step_count();
  const int paths = setup.sim.path_count;
  const double root_dt = std::sqrt(setup.sim.dt);
  Eigen::VectorXd quotients(paths);
  for_each_path(setup.sim.workers, paths, [&](int p) {
    // Both runs consume the identical increment block (common random numbers).
    GaussianStream stream(setup.sim.seed, static_cast<std::uint64_t>(p));
    Eigen::MatrixXd dw(n, setup.model->noise_dim());
    for (int k = 0; k < n; ++k) {
      for (int c = 0; c < setup.model->noise_dim(); ++c) {
        dw(k, c) = root_dt * stream.next();
      }
    }
    ReflectedPath base =
        simulate_path_with(*setup.domain, rm_base.r, *setup.model, setup.alpha,
                           setup.x, setup.sim.dt, dw);
    ReflectedPath pert =
        simulate_path_with(*setup.domain, rm_pert.r, *setup.model, alpha_pert,
                           x_pert, setup.sim.dt, dw);
    quotients(p) = (path_theta(*setup.functional, pert) -
                    path_theta(*setup.functional, base)) /
                   eps;
  });
  return mean_se(quotients);
}

std::vector<CompareRow> compare(const GradientEstimate& ipa,
                                const std::vector<MeanSe>& fd,
                                double z_threshold) {
  if (fd.size() != ipa.components.size()) {
    throw ConfigError("IPA and FD component counts differ");
  }
  std::vector<CompareRow> rows;
  for (size_t d = 0; d < fd.size(); ++d) {
    CompareRow row;
    std::ostringstream label;
    label << "dir" << d;
    row.label = label.str();
    row.ipa = ipa.components[d];
    row.fd = fd[d];
    const double denom = std::sqrt(row.ipa.se * row.ipa.se +
                                   row.fd.se * row.fd.se);
    const double diff = row.ipa.mean - row.fd.mean;
    row.z = denom > 0.0 ? std::abs(diff) / denom
                        : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    row.pass = row.z <= z_threshold;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace rsde
