#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rsde/geometry.hpp"

namespace rsde {

struct EspStepResult {
  Eigen::VectorXd z;    // constrained point in G
  Eigen::VectorXd dl;   // nonnegative per-face pushing increments
  ActiveSet active;     // active set at z
  int iterations = 0;
};

// One discrete constraint step: find z in G and dl >= 0 with
// z = v + R*dl and dl_i * slack_i(z) = 0 for all faces, by active-set
// iteration. max_iter <= 0 means the default cap of 4*N.
EspStepResult esp_step(const PolyhedralDomain& domain, const Eigen::MatrixXd& r,
                       const Eigen::VectorXd& v, int max_iter = 0);

struct EspPath {
  Eigen::MatrixXd h;               // (n+1) x J constrained states
  Eigen::MatrixXd dl;              // n x N pushing increments
  std::vector<ActiveSet> active;   // n+1 active sets
};

// Applies esp_step along a sequence of driving increments (n x J rows).
EspPath esp_path(const PolyhedralDomain& domain, const Eigen::MatrixXd& r,
                 const Eigen::VectorXd& x0, const Eigen::MatrixXd& increments);

struct DecomposeReport {
  double max_residual = 0.0;         // worst ||dg_k - R dl_k||
  double max_complementarity = 0.0;  // worst dl_k^i * slack_i(h_k)
  Eigen::MatrixXd dl;                // recovered per-step increments (n x N)
};

// Recovers per-face increments from a cumulative pushing path g by
// nonnegative least squares on the active columns of R, and reports the
// reconstruction and complementarity residuals. Diagnostic only.
DecomposeReport decompose_check(const PolyhedralDomain& domain,
                                const Eigen::MatrixXd& r,
                                const Eigen::MatrixXd& h,
                                const Eigen::MatrixXd& g_cumulative);

}  // namespace rsde
