#pragma once

#include <Eigen/Dense>
#include <map>
#include <mutex>
#include <vector>

#include "rsde/geometry.hpp"

namespace rsde {

// Linear operator mapping R^J onto H_x along the span of the active
// reflection directions. Idempotent; kills the active direction span; acts as
// the identity on H_x.
struct DerivativeProjection {
  Eigen::MatrixXd matrix;  // J x J
  ActiveSet active;
};

// L = I - D (A D)^{-1} A with A the stacked active normals and D the active
// direction columns of r. Identity for the empty active set. Throws
// SingularSystem when A*D is singular beyond threshold (W-set encounter or
// dependent directions).
DerivativeProjection build_projection(const PolyhedralDomain& domain,
                                      const Eigen::MatrixXd& r,
                                      const ActiveSet& active);

inline Eigen::VectorXd apply(const DerivativeProjection& projection,
                             const Eigen::VectorXd& y) {
  return projection.matrix * y;
}

// Per-active-set cache. Construction is idempotent, so concurrent
// lookup-or-build only needs the map guarded.
class ProjectionCache {
 public:
  ProjectionCache(const PolyhedralDomain& domain, Eigen::MatrixXd r)
      : domain_(domain), r_(std::move(r)) {}

  const DerivativeProjection& get(const ActiveSet& active);

 private:
  const PolyhedralDomain& domain_;
  Eigen::MatrixXd r_;
  std::map<ActiveSet, DerivativeProjection> cache_;
  std::mutex mutex_;
};

}  // namespace rsde
