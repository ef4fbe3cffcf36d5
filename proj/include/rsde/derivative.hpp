#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rsde/coefficients.hpp"
#include "rsde/projection.hpp"
#include "rsde/reflection.hpp"
#include "rsde/simulate.hpp"

namespace rsde {

// Perturbation direction: beta for the parameter, y for the initial state.
struct Direction {
  Eigen::VectorXd beta;
  Eigen::VectorXd y;
};

struct JumpRecord {
  int step;
  ActiveSet active;
  Eigen::VectorXd before;
  Eigen::VectorXd after;
};

// Jump-linear process along a stored path: linear SDE updates between
// boundary events, reflection-sensitivity forcing against the pushing
// increments, and a projection jump whenever the step lands on the boundary.
struct DerivativeState {
  Eigen::MatrixXd j;  // (n+1) x J
  Eigen::MatrixXd k;  // (n+1) x J cumulative constraining term
  std::vector<JumpRecord> jumps;

  Eigen::VectorXd terminal() const { return j.row(j.rows() - 1).transpose(); }
};

// Applies the derivative projection at the initial active set: identity for
// interior starts. y must lie in the local tangent cone when x is on the
// boundary.
Eigen::VectorXd project_initial(const PolyhedralDomain& domain,
                                ProjectionCache& cache,
                                const Eigen::VectorXd& x,
                                const Eigen::VectorXd& y);

DerivativeState simulate_derivative(const PolyhedralDomain& domain,
                                    const ReflectionMatrix& reflection,
                                    const CoefficientModel& model,
                                    const Eigen::VectorXd& alpha,
                                    const ReflectedPath& path,
                                    const Direction& direction,
                                    ProjectionCache& cache);

}  // namespace rsde
