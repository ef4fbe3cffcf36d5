#include "rsde/esp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rsde {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kPushClamp = 1e-14;

// Solves the equality system <v + sum_j dl_j d_j, n_i> = c_i over the active
// subset. Throws SingularActiveSystem on a rank-deficient system.
Eigen::VectorXd solve_active(const PolyhedralDomain& domain,
                             const Eigen::MatrixXd& r,
                             const Eigen::VectorXd& v,
                             const std::vector<int>& active) {
  const int m = static_cast<int>(active.size());
  Eigen::MatrixXd sys(m, m);
  Eigen::VectorXd rhs(m);
  for (int a = 0; a < m; ++a) {
    rhs(a) = -domain.slack(v, active[a]);
    for (int b = 0; b < m; ++b) {
      sys(a, b) = domain.normal(active[a]).dot(r.col(active[b]));
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
  lu.setThreshold(kPivotTol);
  if (lu.rank() < m) {
    throw SingularActiveSystem("linearly dependent active directions");
  }
  return lu.solve(rhs);
}

}  // namespace

EspStepResult esp_step(const PolyhedralDomain& domain, const Eigen::MatrixXd& r,
                       const Eigen::VectorXd& v, int max_iter) {
  const int n = domain.num_faces();
  if (max_iter <= 0) max_iter = 4 * n;

  EspStepResult result;
  result.dl = Eigen::VectorXd::Zero(n);

  // Identity on the interior: feasible targets pass through bit-exactly.
  {
    const double tol = domain.tol_at(v);
    bool feasible = true;
    for (int i = 0; i < n; ++i) {
      if (domain.slack(v, i) < -tol) {
        feasible = false;
        break;
      }
    }
    if (feasible) {
      result.z = v;
      result.active = active_set(domain, v);
      return result;
    }
  }

  std::vector<int> active;
  for (int i = 0; i < n; ++i) {
    if (domain.slack(v, i) < -domain.tol_at(v)) active.push_back(i);
  }

  for (int iter = 1; iter <= max_iter; ++iter) {
    result.iterations = iter;
    Eigen::VectorXd dl_active =
        active.empty() ? Eigen::VectorXd() : solve_active(domain, r, v, active);

    // Drop faces assigned negative push.
    std::vector<int> kept;
    for (size_t a = 0; a < active.size(); ++a) {
      if (dl_active(static_cast<int>(a)) >= -kPushClamp) {
        kept.push_back(active[a]);
      }
    }
    if (kept.size() != active.size()) {
      active = std::move(kept);
      continue;
    }

    Eigen::VectorXd z = v;
    for (size_t a = 0; a < active.size(); ++a) {
      z += dl_active(static_cast<int>(a)) * r.col(active[a]);
    }

    // Add the lowest-index violated face, if any.
    const double tol = domain.tol_at(z);
    int violated = -1;
    for (int i = 0; i < n; ++i) {
      if (domain.slack(z, i) < -tol &&
          !std::binary_search(active.begin(), active.end(), i)) {
        violated = i;
        break;
      }
    }
    if (violated >= 0) {
      active.insert(std::upper_bound(active.begin(), active.end(), violated),
                    violated);
      continue;
    }

    result.z = z;
    for (size_t a = 0; a < active.size(); ++a) {
      const double push = dl_active(static_cast<int>(a));
      result.dl(active[a]) = push < kPushClamp ? 0.0 : push;
    }
    result.active = active_set(domain, z);
    return result;
  }
  std::ostringstream msg;
  msg << "constraint step did not converge within " << max_iter
      << " active-set iterations";
  throw NoConvergence(msg.str());
}

EspPath esp_path(const PolyhedralDomain& domain, const Eigen::MatrixXd& r,
                 const Eigen::VectorXd& x0, const Eigen::MatrixXd& increments) {
  if (membership(domain, x0).region == Region::Outside) {
    throw DomainViolation("initial point lies outside the domain");
  }
  const int steps = static_cast<int>(increments.rows());
  EspPath path;
  path.h.resize(steps + 1, domain.dim());
  path.dl.resize(steps, domain.num_faces());
  path.active.resize(steps + 1);
  path.h.row(0) = x0.transpose();
  path.active[0] = active_set(domain, x0);
  Eigen::VectorXd h = x0;
  for (int k = 0; k < steps; ++k) {
    EspStepResult step = esp_step(domain, r, h + increments.row(k).transpose());
    h = step.z;
    path.h.row(k + 1) = h.transpose();
    path.dl.row(k) = step.dl.transpose();
    path.active[k + 1] = step.active;
  }
  return path;
}

namespace {

// Lawson-Hanson nonnegative least squares, sized for a handful of columns.
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const int m = static_cast<int>(a.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  std::vector<bool> passive(m, false);
  for (int outer = 0; outer < 3 * m + 10; ++outer) {
    Eigen::VectorXd w = a.transpose() * (b - a * x);
    int best = -1;
    double best_w = 1e-12 * (1.0 + b.norm());
    for (int i = 0; i < m; ++i) {
      if (!passive[i] && w(i) > best_w) {
        best = i;
        best_w = w(i);
      }
    }
    if (best < 0) break;
    passive[best] = true;
    for (int inner = 0; inner < 3 * m + 10; ++inner) {
      std::vector<int> p;
      for (int i = 0; i < m; ++i) {
        if (passive[i]) p.push_back(i);
      }
      Eigen::MatrixXd ap(a.rows(), static_cast<int>(p.size()));
      for (size_t i = 0; i < p.size(); ++i) ap.col(static_cast<int>(i)) = a.col(p[i]);
      Eigen::VectorXd s =
          ap.colPivHouseholderQr().solve(b);
      bool all_pos = true;
      for (int i = 0; i < s.size(); ++i) {
        if (s(i) < 0.0) all_pos = false;
      }
      if (all_pos) {
        x.setZero();
        for (size_t i = 0; i < p.size(); ++i) x(p[i]) = s(static_cast<int>(i));
        break;
      }
      // Step back to the boundary of the feasible region.
      double alpha = 1.0;
      for (size_t i = 0; i < p.size(); ++i) {
        const double si = s(static_cast<int>(i));
        const double xi = x(p[i]);
        if (si < 0.0) alpha = std::min(alpha, xi / (xi - si));
      }
      for (size_t i = 0; i < p.size(); ++i) {
        const double si = s(static_cast<int>(i));
        x(p[i]) += alpha * (si - x(p[i]));
        if (x(p[i]) <= kPushClamp) {
          x(p[i]) = 0.0;
          passive[p[i]] = false;
        }
      }
    }
  }
  return x;
}

}  // namespace

DecomposeReport decompose_check(const PolyhedralDomain& domain,
                                const Eigen::MatrixXd& r,
                                const Eigen::MatrixXd& h,
                                const Eigen::MatrixXd& g_cumulative) {
  if (h.rows() != g_cumulative.rows()) {
    throw ConfigError("path and pushing sequences differ in length");
  }
  const int steps = static_cast<int>(h.rows()) - 1;
  DecomposeReport report;
  report.dl = Eigen::MatrixXd::Zero(std::max(steps, 0), domain.num_faces());
  for (int k = 0; k < steps; ++k) {
    Eigen::VectorXd dg =
        (g_cumulative.row(k + 1) - g_cumulative.row(k)).transpose();
    Eigen::VectorXd hk = h.row(k + 1).transpose();
    ActiveSet active = active_set(domain, hk);
    Eigen::VectorXd dl = Eigen::VectorXd::Zero(domain.num_faces());
    if (!active.empty()) {
      Eigen::MatrixXd cols(domain.dim(), static_cast<int>(active.size()));
      for (size_t a = 0; a < active.size(); ++a) {
        cols.col(static_cast<int>(a)) = r.col(active[a]);
      }
      Eigen::VectorXd sol = nnls(cols, dg);
      for (size_t a = 0; a < active.size(); ++a) {
        dl(active[a]) = sol(static_cast<int>(a));
      }
    }
    report.dl.row(k) = dl.transpose();
    report.max_residual =
        std::max(report.max_residual, (dg - r * dl).norm());
    for (int i = 0; i < domain.num_faces(); ++i) {
      report.max_complementarity = std::max(
          report.max_complementarity, dl(i) * std::abs(domain.slack(hk, i)));
    }
  }
  return report;
}

}  // namespace rsde
