#include "rsde/derivative.hpp"

#include <sstream>

namespace rsde {

Eigen::VectorXd project_initial(const PolyhedralDomain& domain,
                                ProjectionCache& cache,
                                const Eigen::VectorXd& x,
                                const Eigen::VectorXd& y) {
  ActiveSet active = active_set(domain, x);
  if (active.empty()) return y;
  if (!tangent_cone_contains(domain, active, y)) {
    throw DomainViolation(
        "initial direction leaves the tangent cone at the starting point");
  }
  return apply(cache.get(active), y);
}

DerivativeState simulate_derivative(const PolyhedralDomain& domain,
                                    const ReflectionMatrix& reflection,
                                    const CoefficientModel& model,
                                    const Eigen::VectorXd& alpha,
                                    const ReflectedPath& path,
                                    const Direction& direction,
                                    ProjectionCache& cache) {
  const int n = path.steps();
  const int j = domain.dim();
  model.require_in_box(alpha);
  if (direction.beta.size() != model.param_dim() ||
      direction.y.size() != j) {
    throw ConfigError("direction dimensions do not match model/domain");
  }

  const bool constant_reflection = reflection.prime_is_zero();
  Eigen::MatrixXd rprime;
  if (!constant_reflection) rprime = reflection.prime(direction.beta);

  DerivativeState state;
  state.j.resize(n + 1, j);
  state.k.resize(n + 1, j);

  Eigen::VectorXd x0 = path.z.row(0).transpose();
  Eigen::VectorXd jk = project_initial(domain, cache, x0, direction.y);
  Eigen::VectorXd kk = jk - direction.y;  // initial projection displacement
  state.j.row(0) = jk.transpose();
  state.k.row(0) = kk.transpose();
  if (!path.active[0].empty() && (jk - direction.y).norm() > 0.0) {
    state.jumps.push_back({0, path.active[0], direction.y, jk});
  }

  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd zk = path.z.row(k).transpose();
    Eigen::VectorXd jstar =
        jk + model.jacobian_step(alpha, zk, direction.beta, jk, path.dt,
                                 path.dw.row(k).transpose());
    if (!constant_reflection) {
      jstar += rprime * path.dl.row(k).transpose();
    }
    const ActiveSet& active = path.active[k + 1];
    Eigen::VectorXd jnext = jstar;
    if (!active.empty()) {
      try {
        jnext = apply(cache.get(active), jstar);
      } catch (const SingularSystem& e) {
        std::ostringstream msg;
        msg << e.what() << " (at step " << k + 1 << ")";
        throw SingularSystem(msg.str());
      }
      if ((jnext - jstar).norm() > 0.0) {
        state.jumps.push_back({k + 1, active, jstar, jnext});
      }
    }
    kk += jnext - jstar;
    jk = jnext;
    state.j.row(k + 1) = jk.transpose();
    state.k.row(k + 1) = kk.transpose();
  }
  return state;
}

}  // namespace rsde
