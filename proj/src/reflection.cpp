#include "rsde/reflection.hpp"

#include <sstream>

namespace rsde {

ReflectionField ReflectionField::normal(const PolyhedralDomain& domain,
                                        int param_dim) {
  ReflectionField field;
  field.base = domain.normals();
  field.sensitivity.assign(
      param_dim,
      Eigen::MatrixXd::Zero(domain.num_faces(), domain.dim()));
  return field;
}

Eigen::MatrixXd ReflectionMatrix::prime(const Eigen::VectorXd& beta) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(r.rows(), r.cols());
  for (int m = 0; m < param_dim(); ++m) out += beta(m) * dr[m];
  return out;
}

bool ReflectionMatrix::prime_is_zero() const {
  for (const auto& d : dr) {
    if (d.cwiseAbs().maxCoeff() > 0.0) return false;
  }
  return true;
}

ReflectionMatrix reflection_matrix(const ReflectionField& field,
                                   const PolyhedralDomain& domain,
                                   const Eigen::VectorXd& alpha) {
  const int n = domain.num_faces();
  const int j = domain.dim();
  const int m = field.param_dim();
  if (field.base.rows() != n || field.base.cols() != j) {
    throw ConfigError("reflection base shape does not match domain");
  }
  if (alpha.size() != m) {
    throw ConfigError("alpha dimension does not match reflection field");
  }

  ReflectionMatrix out;
  out.r.resize(j, n);
  out.dr.assign(m, Eigen::MatrixXd::Zero(j, n));

  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd d = field.base.row(i).transpose();
    for (int p = 0; p < m; ++p) {
      d += alpha(p) * field.sensitivity[p].row(i).transpose();
    }
    const double s = domain.normal(i).dot(d);
    if (s <= 0.0) {
      std::ostringstream msg;
      msg << "direction " << i << " has nonpositive normal component " << s;
      throw DegenerateDirection(msg.str());
    }
    out.r.col(i) = d / s;
    // Quotient rule for d_i(alpha) / <d_i(alpha), n_i>.
    for (int p = 0; p < m; ++p) {
      Eigen::VectorXd dp = field.sensitivity[p].row(i).transpose();
      const double sp = domain.normal(i).dot(dp);
      out.dr[p].col(i) = (dp * s - d * sp) / (s * s);
    }
  }
  return out;
}

}  // namespace rsde
