#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "rsde/coefficients.hpp"
#include "rsde/esp.hpp"
#include "rsde/geometry.hpp"
#include "rsde/reflection.hpp"

namespace rsde {

struct SimConfig {
  double horizon = 1.0;
  double dt = 1e-3;
  int path_count = 1;
  std::uint64_t seed = 0;
  int workers = 1;

  int step_count() const;  // validates T/dt integrality
};

// One discrete trajectory of the constrained diffusion with everything the
// derivative recursion needs: driving increments, per-face pushing, active
// sets and cached coefficient evaluations.
struct ReflectedPath {
  double dt = 0.0;
  Eigen::MatrixXd z;    // (n+1) x J
  Eigen::MatrixXd dw;   // n x K
  Eigen::MatrixXd dl;   // n x N
  std::vector<ActiveSet> active;       // n+1
  Eigen::MatrixXd drift;               // n x J, b(alpha, Z_k)
  std::vector<Eigen::MatrixXd> sigma;  // n entries, J x K at Z_k

  int steps() const { return static_cast<int>(dw.rows()); }
  Eigen::VectorXd terminal() const { return z.row(z.rows() - 1).transpose(); }
};

ReflectedPath simulate_path(const PolyhedralDomain& domain,
                            const Eigen::MatrixXd& r,
                            const CoefficientModel& model,
                            const Eigen::VectorXd& alpha,
                            const Eigen::VectorXd& x, const SimConfig& cfg,
                            int path_index);

// Replay with externally supplied Brownian increments (n x K).
ReflectedPath simulate_path_with(const PolyhedralDomain& domain,
                                 const Eigen::MatrixXd& r,
                                 const CoefficientModel& model,
                                 const Eigen::VectorXd& alpha,
                                 const Eigen::VectorXd& x, double dt,
                                 const Eigen::MatrixXd& dw);

// Runs fn(path_index) for indices [0, count) on a pool of `workers` threads.
// Callers own determinism: write into per-index slots and reduce in order.
void for_each_path(int workers, int count, const std::function<void(int)>& fn);

struct BatchSummary {
  int path_count = 0;
  std::uint64_t seed = 0;
  Eigen::VectorXd mean_terminal;
  Eigen::VectorXd se_terminal;
  double boundary_fraction = 0.0;  // fraction of steps with nonempty active set
};

// Embarrassingly parallel batch; summary independent of worker count. The
// optional sink sees every path (called from worker threads, indexed).
BatchSummary simulate_batch(
    const PolyhedralDomain& domain, const Eigen::MatrixXd& r,
    const CoefficientModel& model, const Eigen::VectorXd& alpha,
    const Eigen::VectorXd& x, const SimConfig& cfg,
    const std::function<void(int, const ReflectedPath&)>& sink = {});

}  // namespace rsde
