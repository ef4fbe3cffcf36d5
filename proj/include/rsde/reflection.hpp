#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rsde/geometry.hpp"

namespace rsde {

// Parameterized reflection directions d_i(alpha) = d_i^0 + D_i' alpha, one per
// face, given before normalization. The sensitivity entry for parameter m holds
// the rows dd_i/dalpha_m.
struct ReflectionField {
  Eigen::MatrixXd base;                     // N x J rows d_i^0
  std::vector<Eigen::MatrixXd> sensitivity; // M entries, each N x J

  int param_dim() const { return static_cast<int>(sensitivity.size()); }

  // Normal reflection with M zero-sensitivity parameters.
  static ReflectionField normal(const PolyhedralDomain& domain, int param_dim);
};

// Reflection matrix R(alpha) (columns d_i(alpha)/<d_i(alpha),n_i>) together
// with the exact parameter Jacobian of the normalized map.
struct ReflectionMatrix {
  Eigen::MatrixXd r;                 // J x N
  std::vector<Eigen::MatrixXd> dr;   // M entries, each J x N

  int param_dim() const { return static_cast<int>(dr.size()); }

  // R'(alpha)[beta] as a J x N matrix.
  Eigen::MatrixXd prime(const Eigen::VectorXd& beta) const;
  bool prime_is_zero() const;
};

// Throws DegenerateDirection if some <d_i(alpha), n_i> <= 0.
ReflectionMatrix reflection_matrix(const ReflectionField& field,
                                   const PolyhedralDomain& domain,
                                   const Eigen::VectorXd& alpha);

}  // namespace rsde
