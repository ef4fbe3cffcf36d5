#include "rsde/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "rsde/projection.hpp"
#include "rsde/rng.hpp"

namespace rsde {

namespace {

bool window_sees_each_face_alone(const std::vector<ActiveSet>& active,
                                 const ActiveSet& faces, int from, int to) {
  for (int face : faces) {
    bool seen = false;
    for (int s = from; s <= to; ++s) {
      if (active[s].size() == 1 && active[s][0] == face) {
        seen = true;
        break;
      }
    }
    if (!seen) return false;
  }
  return true;
}

}  // namespace

JitterStats jitter_stats(const PolyhedralDomain& domain,
                         const Eigen::MatrixXd& r,
                         const CoefficientModel& model,
                         const Eigen::VectorXd& alpha, const Eigen::VectorXd& x,
                         const SimConfig& cfg, int window) {
  JitterStats stats;
  stats.window = window;
  long boundary_steps = 0;
  long total_steps = 0;
  long cond3_hits = 0;
  long cond4_hits = 0;
  long cond1_hits = 0;
  std::mutex mutex;

  for_each_path(cfg.workers, cfg.path_count, [&](int p) {
    ReflectedPath path = simulate_path(domain, r, model, alpha, x, cfg, p);
    const int n = path.steps();
    long local_boundary = 0, local_corners = 0, local_c3 = 0;
    long local_smooth = 0, local_c1 = 0;
    bool corner_start = path.active[0].size() >= 2;
    bool c4 = false;
    if (corner_start) {
      c4 = window_sees_each_face_alone(path.active, path.active[0], 1,
                                       std::min(window, n));
    }
    for (int k = 1; k <= n; ++k) {
      if (!path.active[k].empty()) ++local_boundary;
      if (path.active[k].size() >= 2 && path.active[k - 1] != path.active[k]) {
        ++local_corners;
        if (window_sees_each_face_alone(path.active, path.active[k],
                                        std::max(1, k - window), k - 1)) {
          ++local_c3;
        }
      }
      if (path.active[k].size() == 1) {
        ++local_smooth;
        // Condition 1 proxy: pushing is nonconstant in a window around the
        // visit to the smooth boundary part.
        const int lo = std::max(0, k - 1 - window);
        const int hi = std::min(n - 1, k - 1 + window);
        double pushed = 0.0;
        for (int s = lo; s <= hi; ++s) pushed += path.dl.row(s).lpNorm<1>();
        if (pushed > 0.0) ++local_c1;
      }
    }
    std::lock_guard<std::mutex> lock(mutex);
    boundary_steps += local_boundary;
    total_steps += n;
    stats.corner_entries += local_corners;
    cond3_hits += local_c3;
    stats.smooth_visits += local_smooth;
    cond1_hits += local_c1;
    if (corner_start) {
      ++stats.corner_start_paths;
      if (c4) ++cond4_hits;
    }
  });

  if (total_steps > 0) {
    stats.occupation_fraction =
        static_cast<double>(boundary_steps) / total_steps;
  }
  if (stats.corner_entries > 0) {
    stats.condition3_rate =
        static_cast<double>(cond3_hits) / stats.corner_entries;
  }
  if (stats.corner_start_paths > 0) {
    stats.condition4_rate =
        static_cast<double>(cond4_hits) / stats.corner_start_paths;
  }
  if (stats.smooth_visits > 0) {
    stats.condition1_rate = static_cast<double>(cond1_hits) / stats.smooth_visits;
  }
  return stats;
}

std::vector<std::pair<double, double>> occupation_levels(
    const PolyhedralDomain& domain, const Eigen::MatrixXd& r,
    const CoefficientModel& model, const Eigen::VectorXd& alpha,
    const Eigen::VectorXd& x, const SimConfig& cfg,
    const std::vector<double>& dts) {
  std::vector<std::pair<double, double>> levels;
  for (double dt : dts) {
    SimConfig level_cfg = cfg;
    level_cfg.dt = dt;
    BatchSummary summary = simulate_batch(domain, r, model, alpha, x, level_cfg);
    levels.emplace_back(dt, summary.boundary_fraction);
  }
  return levels;
}

double esm_lipschitz_probe(const PolyhedralDomain& domain,
                           const Eigen::MatrixXd& r, const Eigen::VectorXd& x0,
                           int n_pairs, int path_len, double step_scale,
                           std::uint64_t seed) {
  const int j = domain.dim();
  double max_ratio = 0.0;
  for (int pair = 0; pair < n_pairs; ++pair) {
    GaussianStream stream(seed, static_cast<std::uint64_t>(pair));
    Eigen::MatrixXd df1(path_len, j), df2(path_len, j);
    for (int k = 0; k < path_len; ++k) {
      for (int c = 0; c < j; ++c) df1(k, c) = step_scale * stream.next();
      for (int c = 0; c < j; ++c) df2(k, c) = step_scale * stream.next();
    }
    EspPath p1 = esp_path(domain, r, x0, df1);
    EspPath p2 = esp_path(domain, r, x0, df2);
    Eigen::VectorXd f1 = x0, f2 = x0;
    double sup_h = 0.0, sup_f = 0.0;
    for (int k = 0; k < path_len; ++k) {
      f1 += df1.row(k).transpose();
      f2 += df2.row(k).transpose();
      sup_f = std::max(sup_f, (f1 - f2).norm());
      sup_h = std::max(
          sup_h, (p1.h.row(k + 1) - p2.h.row(k + 1)).norm());
    }
    if (sup_f == 0.0) continue;  // identical pair, ratio undefined
    max_ratio = std::max(max_ratio, sup_h / sup_f);
  }
  return max_ratio;
}

double derivative_lipschitz_probe(const PolyhedralDomain& domain,
                                  const Eigen::MatrixXd& r,
                                  const ReflectedPath& path, int n_pairs,
                                  std::uint64_t seed) {
  const int j = domain.dim();
  const int n = path.steps();
  ProjectionCache cache(domain, r);
  double max_ratio = 0.0;
  for (int pair = 0; pair < n_pairs; ++pair) {
    GaussianStream stream(seed, static_cast<std::uint64_t>(pair));
    // Two forcing sequences through the same jump schedule.
    Eigen::VectorXd psi1 = Eigen::VectorXd::Zero(j);
    Eigen::VectorXd psi2 = Eigen::VectorXd::Zero(j);
    Eigen::VectorXd phi1 = psi1, phi2 = psi2;
    if (!path.active[0].empty()) {
      const auto& proj = cache.get(path.active[0]);
      phi1 = apply(proj, psi1);
      phi2 = apply(proj, psi2);
    }
    double sup_phi = 0.0, sup_psi = 0.0;
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXd dpsi1(j), dpsi2(j);
      for (int c = 0; c < j; ++c) dpsi1(c) = stream.next();
      for (int c = 0; c < j; ++c) dpsi2(c) = stream.next();
      psi1 += dpsi1;
      psi2 += dpsi2;
      phi1 += dpsi1;
      phi2 += dpsi2;
      if (!path.active[k + 1].empty()) {
        const auto& proj = cache.get(path.active[k + 1]);
        phi1 = apply(proj, phi1);
        phi2 = apply(proj, phi2);
      }
      sup_psi = std::max(sup_psi, (psi1 - psi2).norm());
      sup_phi = std::max(sup_phi, (phi1 - phi2).norm());
    }
    if (sup_psi == 0.0) continue;
    max_ratio = std::max(max_ratio, sup_phi / sup_psi);
  }
  return max_ratio;
}

PreflightReport preflight(const PolyhedralDomain& domain,
                          const ReflectionField& field,
                          const Eigen::VectorXd& alpha) {
  const ReflectionMatrix rm = reflection_matrix(field, domain, alpha);
  PreflightReport report;
  IndependenceReport ind = check_independence(domain, rm.r);
  report.independent = ind.independent;
  report.dependent_witness = ind.witness;
  report.w_empty = check_w_empty(domain, rm.r);
  return report;
}

}  // namespace rsde
