#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rsde/coefficients.hpp"
#include "rsde/esp.hpp"
#include "rsde/reflection.hpp"
#include "rsde/simulate.hpp"

namespace rsde {

// Window-based proxies for the boundary-visit behavior of simulated paths.
// These are advisory statistics, not assertions: the underlying sample-path
// statements are about infinitely many visits and cannot be decided at a
// fixed step size.
struct JitterStats {
  double occupation_fraction = 0.0;  // steps with nonempty active set
  long corner_entries = 0;           // steps entering a set with |A| >= 2
  double condition3_rate = 0.0;      // trailing window saw each face alone
  long corner_start_paths = 0;       // paths started at a corner
  double condition4_rate = 0.0;      // leading window saw each face alone
  long smooth_visits = 0;            // steps on exactly one face
  double condition1_rate = 0.0;      // pushing nonconstant near the visit
  int window = 0;
};

JitterStats jitter_stats(const PolyhedralDomain& domain,
                         const Eigen::MatrixXd& r,
                         const CoefficientModel& model,
                         const Eigen::VectorXd& alpha, const Eigen::VectorXd& x,
                         const SimConfig& cfg, int window);

// Mean boundary occupation fraction per step-size level (same horizon/seed).
std::vector<std::pair<double, double>> occupation_levels(
    const PolyhedralDomain& domain, const Eigen::MatrixXd& r,
    const CoefficientModel& model, const Eigen::VectorXd& alpha,
    const Eigen::VectorXd& x, const SimConfig& cfg,
    const std::vector<double>& dts);

// Empirical sup-norm ratio ||h1 - h2|| / ||f1 - f2|| of the constraint map
// over random driving-path pairs started at x0.
double esm_lipschitz_probe(const PolyhedralDomain& domain,
                           const Eigen::MatrixXd& r, const Eigen::VectorXd& x0,
                           int n_pairs, int path_len, double step_scale,
                           std::uint64_t seed);

// Sup-norm ratio of the jump recursion along a stored path for two random
// forcing sequences sharing the path's jump schedule.
double derivative_lipschitz_probe(const PolyhedralDomain& domain,
                                  const Eigen::MatrixXd& r,
                                  const ReflectedPath& path, int n_pairs,
                                  std::uint64_t seed);

struct PreflightReport {
  bool independent = true;
  ActiveSet dependent_witness;
  bool w_empty = true;
};

PreflightReport preflight(const PolyhedralDomain& domain,
                          const ReflectionField& field,
                          const Eigen::VectorXd& alpha);

}  // namespace rsde
