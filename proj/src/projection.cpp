#include "rsde/projection.hpp"

namespace rsde {

DerivativeProjection build_projection(const PolyhedralDomain& domain,
                                      const Eigen::MatrixXd& r,
                                      const ActiveSet& active) {
  const int j = domain.dim();
  DerivativeProjection projection;
  projection.active = active;
  if (active.empty()) {
    projection.matrix = Eigen::MatrixXd::Identity(j, j);
    return projection;
  }
  const int m = static_cast<int>(active.size());
  Eigen::MatrixXd a(m, j);  // stacked active normals
  Eigen::MatrixXd d(j, m);  // active direction columns
  for (int k = 0; k < m; ++k) {
    a.row(k) = domain.normal(active[k]);
    d.col(k) = r.col(active[k]);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a * d);
  lu.setThreshold(1e-10);
  if (lu.rank() < m) {
    throw SingularSystem(
        "active normals/directions pairing is singular (W-set point)");
  }
  projection.matrix =
      Eigen::MatrixXd::Identity(j, j) - d * lu.solve(a);
  return projection;
}

const DerivativeProjection& ProjectionCache::get(const ActiveSet& active) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(active);
    if (it != cache_.end()) return it->second;
  }
  DerivativeProjection built = build_projection(domain_, r_, active);
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.emplace(active, std::move(built)).first->second;
}

}  // namespace rsde
