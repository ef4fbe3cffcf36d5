// Independent reference computations used by the test suites. Everything in
// here is deliberately written against the problem statements, not against
// the library's solver paths.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

// Classical one-dimensional reflection map on [0, inf):
// h_k = f_k + max(0, max_{j<=k}(-f_j)) for the cumulative path f.
inline Eigen::VectorXd skorokhod_1d(double x0, const Eigen::VectorXd& df) {
  const int n = static_cast<int>(df.size());
  Eigen::VectorXd h(n + 1);
  double f = x0;
  double running = std::max(0.0, -f);
  h(0) = f + running;
  for (int k = 0; k < n; ++k) {
    f += df(k);
    running = std::max(running, -f);
    h(k + 1) = f + running;
  }
  return h;
}

// Fixed-point iteration for the orthant reflection map with R = I - Q,
// Q >= 0 with small norm: l_k = componentwise running max of
// ((Q l)_j - f_j)^+ over j <= k. Returns the constrained path h = f + R l.
inline Eigen::MatrixXd orthant_fixed_point(const Eigen::VectorXd& x0,
                                           const Eigen::MatrixXd& df,
                                           const Eigen::MatrixXd& q,
                                           int max_sweeps = 200,
                                           double tol = 1e-13) {
  const int n = static_cast<int>(df.rows());
  const int j = static_cast<int>(df.cols());
  Eigen::MatrixXd f(n + 1, j);
  f.row(0) = x0.transpose();
  for (int k = 0; k < n; ++k) f.row(k + 1) = f.row(k) + df.row(k);

  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n + 1, j);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(n + 1, j);
    Eigen::VectorXd running = Eigen::VectorXd::Zero(j);
    for (int k = 0; k <= n; ++k) {
      Eigen::VectorXd candidate =
          (q * l.row(k).transpose() - f.row(k).transpose()).cwiseMax(0.0);
      running = running.cwiseMax(candidate);
      next.row(k) = running.transpose();
    }
    change = (next - l).cwiseAbs().maxCoeff();
    l = next;
    if (change < tol) break;
  }
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(j, j) - q;
  Eigen::MatrixXd h(n + 1, j);
  for (int k = 0; k <= n; ++k) {
    h.row(k) = f.row(k) + (r * l.row(k).transpose()).transpose();
  }
  return h;
}

// Projection-onto-H oracle: solve y = D w + H c exactly (D active direction
// columns, H orthonormal basis of the active nullspace) and return H c.
inline Eigen::VectorXd project_via_basis(const Eigen::MatrixXd& d,
                                         const Eigen::MatrixXd& h,
                                         const Eigen::VectorXd& y) {
  const int j = static_cast<int>(y.size());
  Eigen::MatrixXd sys(j, d.cols() + h.cols());
  sys.leftCols(d.cols()) = d;
  sys.rightCols(h.cols()) = h;
  Eigen::VectorXd coeffs = sys.colPivHouseholderQr().solve(y);
  return h * coeffs.tail(h.cols());
}

inline double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

}  // namespace oracle
