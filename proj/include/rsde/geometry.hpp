#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rsde/errors.hpp"

namespace rsde {

// Sorted list of face indices (0-based).
using ActiveSet = std::vector<int>;

// Convex polyhedron G = { x : <x, n_i> >= c_i, i = 0..N-1 } with unit inward
// normals n_i. The half-space representation is assumed minimal; duplicate or
// redundant half-spaces distort active-set detection and are the caller's
// responsibility to avoid.
class PolyhedralDomain {
 public:
  PolyhedralDomain(Eigen::MatrixXd normals, Eigen::VectorXd offsets,
                   double face_tol = 1e-9);

  int num_faces() const { return static_cast<int>(normals_.rows()); }
  int dim() const { return static_cast<int>(normals_.cols()); }
  const Eigen::MatrixXd& normals() const { return normals_; }
  const Eigen::VectorXd& offsets() const { return offsets_; }
  double face_tol() const { return face_tol_; }

  Eigen::RowVectorXd normal(int i) const { return normals_.row(i); }
  double slack(const Eigen::VectorXd& x, int i) const {
    return normals_.row(i).dot(x) - offsets_(i);
  }
  // Relative threshold used for active-face detection at x.
  double tol_at(const Eigen::VectorXd& x) const {
    return face_tol_ * (1.0 + x.norm());
  }

  static PolyhedralDomain orthant(int j, double face_tol = 1e-9);
  static PolyhedralDomain half_line(double face_tol = 1e-9);
  // Two faces in the plane with the given inward normals, vertex at origin.
  static PolyhedralDomain wedge(const Eigen::Vector2d& n1,
                                const Eigen::Vector2d& n2,
                                double face_tol = 1e-9);

 private:
  Eigen::MatrixXd normals_;  // N x J, unit rows
  Eigen::VectorXd offsets_;  // N
  double face_tol_;
};

enum class Region { Interior, Boundary, Outside };

struct Membership {
  Region region = Region::Interior;
  ActiveSet active;           // faces at distance <= tol (Boundary only)
  Eigen::VectorXd deficits;   // per-face max(0, c_i - <x,n_i>) (Outside only)
};

// Faces with slack <= tol_at(x). Throws DomainViolation if some slack is
// below -tol_at(x).
ActiveSet active_set(const PolyhedralDomain& domain, const Eigen::VectorXd& x);

Membership membership(const PolyhedralDomain& domain, const Eigen::VectorXd& x);

// Orthonormal basis of H = intersection of { y : <y, n_i> = 0 } over the
// active faces, returned as columns. Empty active set gives the identity.
Eigen::MatrixXd subspace_basis(const PolyhedralDomain& domain,
                               const ActiveSet& active);

// Membership of y in the local tangent cone at a point with the given
// active set: <y, n_i> >= -face_tol for every active i.
bool tangent_cone_contains(const PolyhedralDomain& domain,
                           const ActiveSet& active, const Eigen::VectorXd& y);

// Active sets realizable on G, found by intersecting subsets of face
// hyperplanes (rank-filtered) and pushing the witness point into the relative
// interior of the remaining faces. Subset enumeration is capped; throws
// EnumerationOverflow past max_subsets.
std::vector<ActiveSet> realizable_active_sets(const PolyhedralDomain& domain,
                                              long max_subsets = 200000);

struct IndependenceReport {
  bool independent = true;
  ActiveSet witness;  // first failing active set when dependent
};

// Checks linear independence of the active reflection-direction columns of
// directions (J x N) over every realizable active set.
IndependenceReport check_independence(const PolyhedralDomain& domain,
                                      const Eigen::MatrixXd& directions,
                                      long max_subsets = 200000);

// True iff span(active directions plus H_x) = R^J for every realizable
// active set of size >= 2 (empty W-set check).
bool check_w_empty(const PolyhedralDomain& domain,
                   const Eigen::MatrixXd& directions,
                   long max_subsets = 200000);

}  // namespace rsde
