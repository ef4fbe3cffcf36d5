#include "rsde/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace rsde {

PolyhedralDomain::PolyhedralDomain(Eigen::MatrixXd normals,
                                   Eigen::VectorXd offsets, double face_tol)
    : normals_(std::move(normals)),
      offsets_(std::move(offsets)),
      face_tol_(face_tol) {
  if (normals_.rows() < 1 || normals_.cols() < 1) {
    throw ConfigError("domain needs at least one face and one dimension");
  }
  if (offsets_.size() != normals_.rows()) {
    throw ConfigError("offset count does not match face count");
  }
  if (face_tol_ < 0.0) {
    throw ConfigError("face_tol must be nonnegative");
  }
  for (int i = 0; i < normals_.rows(); ++i) {
    if (std::abs(normals_.row(i).norm() - 1.0) > 1e-12) {
      std::ostringstream msg;
      msg << "normal " << i << " is not unit length";
      throw ConfigError(msg.str());
    }
  }
}

PolyhedralDomain PolyhedralDomain::orthant(int j, double face_tol) {
  return PolyhedralDomain(Eigen::MatrixXd::Identity(j, j),
                          Eigen::VectorXd::Zero(j), face_tol);
}

PolyhedralDomain PolyhedralDomain::half_line(double face_tol) {
  return orthant(1, face_tol);
}

PolyhedralDomain PolyhedralDomain::wedge(const Eigen::Vector2d& n1,
                                         const Eigen::Vector2d& n2,
                                         double face_tol) {
  Eigen::MatrixXd n(2, 2);
  n.row(0) = n1.normalized();
  n.row(1) = n2.normalized();
  return PolyhedralDomain(n, Eigen::VectorXd::Zero(2), face_tol);
}

ActiveSet active_set(const PolyhedralDomain& domain, const Eigen::VectorXd& x) {
  const double tol = domain.tol_at(x);
  ActiveSet active;
  for (int i = 0; i < domain.num_faces(); ++i) {
    const double s = domain.slack(x, i);
    if (s < -tol) {
      std::ostringstream msg;
      msg << "point violates face " << i << " by " << -s;
      throw DomainViolation(msg.str());
    }
    if (s <= tol) active.push_back(i);
  }
  return active;
}

Membership membership(const PolyhedralDomain& domain,
                      const Eigen::VectorXd& x) {
  const double tol = domain.tol_at(x);
  Membership m;
  Eigen::VectorXd deficits = Eigen::VectorXd::Zero(domain.num_faces());
  bool outside = false;
  for (int i = 0; i < domain.num_faces(); ++i) {
    const double s = domain.slack(x, i);
    if (s < -tol) {
      outside = true;
      deficits(i) = -s;
    } else if (s <= tol) {
      m.active.push_back(i);
    }
  }
  if (outside) {
    m.region = Region::Outside;
    m.deficits = deficits;
    m.active.clear();
  } else if (!m.active.empty()) {
    m.region = Region::Boundary;
  } else {
    m.region = Region::Interior;
  }
  return m;
}

Eigen::MatrixXd subspace_basis(const PolyhedralDomain& domain,
                               const ActiveSet& active) {
  const int j = domain.dim();
  if (active.empty()) return Eigen::MatrixXd::Identity(j, j);
  Eigen::MatrixXd a(static_cast<int>(active.size()), j);
  for (size_t r = 0; r < active.size(); ++r) {
    a.row(static_cast<int>(r)) = domain.normal(active[r]);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const double thresh = 1e-12 * std::max(1.0, svd.singularValues()(0));
  int rank = 0;
  for (int k = 0; k < svd.singularValues().size(); ++k) {
    if (svd.singularValues()(k) > thresh) ++rank;
  }
  return svd.matrixV().rightCols(j - rank);
}

bool tangent_cone_contains(const PolyhedralDomain& domain,
                           const ActiveSet& active, const Eigen::VectorXd& y) {
  for (int i : active) {
    if (domain.normal(i).dot(y) < -domain.face_tol()) return false;
  }
  return true;
}

namespace {

// Tries to move the witness x within the affine subspace { <x,n_i> = c_i,
// i in subset } until every face outside the subset has strictly positive
// slack. Returns false if no such point is found.
bool push_to_relative_interior(const PolyhedralDomain& domain,
                               const ActiveSet& subset,
                               const Eigen::MatrixXd& null_basis,
                               Eigen::VectorXd& x) {
  if (null_basis.cols() == 0) {
    // Subset pins a single point; realizable iff the point is feasible and
    // no extra face is active beyond the subset's own hyperplanes.
    for (int i = 0; i < domain.num_faces(); ++i) {
      if (std::binary_search(subset.begin(), subset.end(), i)) continue;
      if (domain.slack(x, i) <= domain.face_tol()) return false;
    }
    return true;
  }
  const double target = 10.0 * domain.tol_at(x) + 1e-9;
  for (int iter = 0; iter < 200; ++iter) {
    Eigen::VectorXd push = Eigen::VectorXd::Zero(domain.dim());
    bool all_clear = true;
    for (int i = 0; i < domain.num_faces(); ++i) {
      if (std::binary_search(subset.begin(), subset.end(), i)) continue;
      if (domain.slack(x, i) < target) {
        all_clear = false;
        push += domain.normal(i).transpose();
      }
    }
    if (all_clear) return true;
    Eigen::VectorXd step = null_basis * (null_basis.transpose() * push);
    const double norm = step.norm();
    if (norm < 1e-14) return false;  // cannot improve inside the subspace
    x += step * (std::max(target, 1e-3) / norm);
  }
  return false;
}

}  // namespace

std::vector<ActiveSet> realizable_active_sets(const PolyhedralDomain& domain,
                                              long max_subsets) {
  const int n = domain.num_faces();
  const int j = domain.dim();
  std::set<ActiveSet> found;
  found.insert(ActiveSet{});

  long examined = 0;
  // Enumerate subsets of size 1..min(N, J) in lexicographic order.
  const int max_size = std::min(n, j);
  std::vector<int> idx;
  std::function<void(int)> recurse = [&](int start) {
    if (!idx.empty()) {
      if (++examined > max_subsets) {
        throw EnumerationOverflow("active-set enumeration exceeded cap");
      }
      ActiveSet subset(idx.begin(), idx.end());
      Eigen::MatrixXd a(static_cast<int>(subset.size()), j);
      Eigen::VectorXd c(static_cast<int>(subset.size()));
      for (size_t r = 0; r < subset.size(); ++r) {
        a.row(static_cast<int>(r)) = domain.normal(subset[r]);
        c(static_cast<int>(r)) = domain.offsets()(subset[r]);
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(
          a, Eigen::ComputeThinU | Eigen::ComputeFullV);
      const double thresh = 1e-10 * std::max(1.0, svd.singularValues()(0));
      int rank = 0;
      for (int k = 0; k < svd.singularValues().size(); ++k) {
        if (svd.singularValues()(k) > thresh) ++rank;
      }
      if (rank == static_cast<int>(subset.size())) {
        Eigen::VectorXd x = svd.solve(c);
        if ((a * x - c).norm() <= 1e-8 * (1.0 + c.norm())) {
          Eigen::MatrixXd null_basis = svd.matrixV().rightCols(j - rank);
          if (push_to_relative_interior(domain, subset, null_basis, x)) {
            found.insert(subset);
          }
        }
      }
    }
    if (static_cast<int>(idx.size()) == max_size) return;
    for (int i = start; i < n; ++i) {
      idx.push_back(i);
      recurse(i + 1);
      idx.pop_back();
    }
  };
  recurse(0);
  return std::vector<ActiveSet>(found.begin(), found.end());
}

namespace {

int rank_of(const Eigen::MatrixXd& m) {
  if (m.cols() == 0 || m.rows() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const double thresh = 1e-10 * std::max(1.0, svd.singularValues()(0));
  int rank = 0;
  for (int k = 0; k < svd.singularValues().size(); ++k) {
    if (svd.singularValues()(k) > thresh) ++rank;
  }
  return rank;
}

}  // namespace

IndependenceReport check_independence(const PolyhedralDomain& domain,
                                      const Eigen::MatrixXd& directions,
                                      long max_subsets) {
  IndependenceReport report;
  for (const ActiveSet& active : realizable_active_sets(domain, max_subsets)) {
    if (active.size() < 2) continue;
    Eigen::MatrixXd d(domain.dim(), static_cast<int>(active.size()));
    for (size_t k = 0; k < active.size(); ++k) {
      d.col(static_cast<int>(k)) = directions.col(active[k]);
    }
    if (rank_of(d) < static_cast<int>(active.size())) {
      report.independent = false;
      report.witness = active;
      return report;
    }
  }
  return report;
}

bool check_w_empty(const PolyhedralDomain& domain,
                   const Eigen::MatrixXd& directions, long max_subsets) {
  for (const ActiveSet& active : realizable_active_sets(domain, max_subsets)) {
    if (active.size() < 2) continue;
    Eigen::MatrixXd h = subspace_basis(domain, active);
    Eigen::MatrixXd stacked(domain.dim(),
                            static_cast<int>(active.size()) + h.cols());
    for (size_t k = 0; k < active.size(); ++k) {
      stacked.col(static_cast<int>(k)) = directions.col(active[k]);
    }
    stacked.rightCols(h.cols()) = h;
    if (rank_of(stacked) < domain.dim()) return false;
  }
  return true;
}

}  // namespace rsde
