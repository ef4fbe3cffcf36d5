#include "rsde/simulate.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "rsde/rng.hpp"

namespace rsde {

int SimConfig::step_count() const {
  if (horizon <= 0.0 || dt <= 0.0 || path_count < 1) {
    throw ConfigError("horizon, dt and path_count must be positive");
  }
  const double ratio = horizon / dt;
  const int n = static_cast<int>(std::llround(ratio));
  if (n < 1 || std::abs(ratio - n) > 1e-9 * ratio) {
    std::ostringstream msg;
    msg << "horizon " << horizon << " is not an integer multiple of dt " << dt;
    throw ConfigError(msg.str());
  }
  return n;
}

ReflectedPath simulate_path_with(const PolyhedralDomain& domain,
                                 const Eigen::MatrixXd& r,
                                 const CoefficientModel& model,
                                 const Eigen::VectorXd& alpha,
                                 const Eigen::VectorXd& x, double dt,
                                 const Eigen::MatrixXd& dw) {
  model.require_in_box(alpha);
  if (membership(domain, x).region == Region::Outside) {
    throw DomainViolation("initial condition outside the domain");
  }
  const int n = static_cast<int>(dw.rows());
  const int j = domain.dim();

  ReflectedPath path;
  path.dt = dt;
  path.z.resize(n + 1, j);
  path.dw = dw;
  path.dl.resize(n, domain.num_faces());
  path.active.resize(n + 1);
  path.drift.resize(n, j);
  path.sigma.resize(n);

  path.z.row(0) = x.transpose();
  path.active[0] = active_set(domain, x);

  Eigen::VectorXd zk = x;
  Eigen::VectorXd b(j);
  Eigen::MatrixXd sigma(j, model.noise_dim());
  for (int k = 0; k < n; ++k) {
    model.eval(alpha, zk, b, sigma);
    path.drift.row(k) = b.transpose();
    path.sigma[k] = sigma;
    Eigen::VectorXd v = zk + b * dt + sigma * dw.row(k).transpose();
    EspStepResult step;
    try {
      step = esp_step(domain, r, v);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << e.what() << " (at step " << k << ")";
      throw NoConvergence(msg.str());
    }
    zk = step.z;
    path.z.row(k + 1) = zk.transpose();
    path.dl.row(k) = step.dl.transpose();
    path.active[k + 1] = step.active;
  }
  return path;
}

ReflectedPath simulate_path(const PolyhedralDomain& domain,
                            const Eigen::MatrixXd& r,
                            const CoefficientModel& model,
                            const Eigen::VectorXd& alpha,
                            const Eigen::VectorXd& x, const SimConfig& cfg,
                            int path_index) {
  const int n = cfg.step_count();
  const double root_dt = std::sqrt(cfg.dt);
  GaussianStream stream(cfg.seed, static_cast<std::uint64_t>(path_index));
  Eigen::MatrixXd dw(n, model.noise_dim());
  for (int k = 0; k < n; ++k) {
    for (int c = 0; c < model.noise_dim(); ++c) {
      dw(k, c) = root_dt * stream.next();
    }
  }
  return simulate_path_with(domain, r, model, alpha, x, cfg.dt, dw);
}

void for_each_path(int workers, int count, const std::function<void(int)>& fn) {
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

BatchSummary simulate_batch(
    const PolyhedralDomain& domain, const Eigen::MatrixXd& r,
    const CoefficientModel& model, const Eigen::VectorXd& alpha,
    const Eigen::VectorXd& x, const SimConfig& cfg,
    const std::function<void(int, const ReflectedPath&)>& sink) {
  const int paths = cfg.path_count;
  const int j = domain.dim();
  Eigen::MatrixXd terminals(paths, j);
  Eigen::VectorXd occupation(paths);

  for_each_path(cfg.workers, paths, [&](int p) {
    ReflectedPath path = simulate_path(domain, r, model, alpha, x, cfg, p);
    terminals.row(p) = path.terminal().transpose();
    int boundary_steps = 0;
    for (int k = 1; k <= path.steps(); ++k) {
      if (!path.active[k].empty()) ++boundary_steps;
    }
    occupation(p) = static_cast<double>(boundary_steps) / path.steps();
    if (sink) sink(p, path);
  });

  // Fixed-order reduction so the summary is worker-count independent.
  BatchSummary summary;
  summary.path_count = paths;
  summary.seed = cfg.seed;
  summary.mean_terminal = Eigen::VectorXd::Zero(j);
  summary.se_terminal = Eigen::VectorXd::Zero(j);
  for (int p = 0; p < paths; ++p) {
    summary.mean_terminal += terminals.row(p).transpose();
    summary.boundary_fraction += occupation(p);
  }
  summary.mean_terminal /= paths;
  summary.boundary_fraction /= paths;
  if (paths > 1) {
    Eigen::VectorXd ss = Eigen::VectorXd::Zero(j);
    for (int p = 0; p < paths; ++p) {
      Eigen::VectorXd d = terminals.row(p).transpose() - summary.mean_terminal;
      ss += d.cwiseProduct(d);
    }
    summary.se_terminal =
        (ss / (paths - 1)).cwiseSqrt() / std::sqrt(static_cast<double>(paths));
  }
  return summary;
}

}  // namespace rsde
