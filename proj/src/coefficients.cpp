#include "rsde/coefficients.hpp"

#include <cmath>

namespace rsde {

Eigen::MatrixXd CoefficientJacobian::sigma_dir(const Eigen::VectorXd& beta,
                                               const Eigen::VectorXd& y) const {
  Eigen::MatrixXd out;
  if (!sigma_alpha.empty()) {
    out = Eigen::MatrixXd::Zero(sigma_alpha[0].rows(), sigma_alpha[0].cols());
  } else {
    out = Eigen::MatrixXd::Zero(sigma_x[0].rows(), sigma_x[0].cols());
  }
  for (size_t m = 0; m < sigma_alpha.size(); ++m) {
    out += beta(static_cast<int>(m)) * sigma_alpha[m];
  }
  for (size_t j = 0; j < sigma_x.size(); ++j) {
    out += y(static_cast<int>(j)) * sigma_x[j];
  }
  return out;
}

void CoefficientModel::require_in_box(const Eigen::VectorXd& alpha) const {
  if (alpha.size() != m_) {
    throw OutOfBox("alpha has wrong dimension for model");
  }
  if (!box_.contains(alpha)) {
    throw OutOfBox("alpha outside configured parameter box");
  }
}

void CoefficientModel::eval(const Eigen::VectorXd& alpha,
                            const Eigen::VectorXd& x, Eigen::VectorXd& b,
                            Eigen::MatrixXd& sigma) const {
  require_in_box(alpha);
  switch (kind_) {
    case CoefficientKind::Constant:
      b = b0_;
      sigma = sigma0_;
      return;
    case CoefficientKind::Affine: {
      b = b0_ + b_alpha_ * alpha + b_x_ * x;
      sigma = sigma0_;
      for (int m = 0; m < m_; ++m) sigma += alpha(m) * sigma_alpha_[m];
      for (int j = 0; j < j_; ++j) sigma += x(j) * sigma_x_[j];
      return;
    }
    case CoefficientKind::SmoothBounded: {
      const double ub = b_wa_.dot(alpha) + b_wx_.dot(x);
      const double us = s_wa_.dot(alpha) + s_wx_.dot(x);
      b = b0_ + std::tanh(ub) * b_amp_;
      sigma = sigma0_ + std::sin(us) * s_amp_;
      return;
    }
  }
}

CoefficientJacobian CoefficientModel::eval_jacobian(
    const Eigen::VectorXd& alpha, const Eigen::VectorXd& x) const {
  require_in_box(alpha);
  CoefficientJacobian jac;
  jac.b_alpha = Eigen::MatrixXd::Zero(j_, m_);
  jac.b_x = Eigen::MatrixXd::Zero(j_, j_);
  jac.sigma_alpha.assign(m_, Eigen::MatrixXd::Zero(j_, k_));
  jac.sigma_x.assign(j_, Eigen::MatrixXd::Zero(j_, k_));
  switch (kind_) {
    case CoefficientKind::Constant:
      return jac;
    case CoefficientKind::Affine:
      jac.b_alpha = b_alpha_;
      jac.b_x = b_x_;
      jac.sigma_alpha = sigma_alpha_;
      jac.sigma_x = sigma_x_;
      return jac;
    case CoefficientKind::SmoothBounded: {
      const double ub = b_wa_.dot(alpha) + b_wx_.dot(x);
      const double us = s_wa_.dot(alpha) + s_wx_.dot(x);
      const double th = std::tanh(ub);
      const double sech2 = 1.0 - th * th;
      const double cs = std::cos(us);
      for (int m = 0; m < m_; ++m) {
        jac.b_alpha.col(m) = sech2 * b_wa_(m) * b_amp_;
        jac.sigma_alpha[m] = cs * s_wa_(m) * s_amp_;
      }
      for (int j = 0; j < j_; ++j) {
        jac.b_x.col(j) = sech2 * b_wx_(j) * b_amp_;
        jac.sigma_x[j] = cs * s_wx_(j) * s_amp_;
      }
      return jac;
    }
  }
  return jac;
}

Eigen::VectorXd CoefficientModel::jacobian_step(const Eigen::VectorXd& alpha,
                                                const Eigen::VectorXd& x,
                                                const Eigen::VectorXd& beta,
                                                const Eigen::VectorXd& y,
                                                double dt,
                                                const Eigen::VectorXd& dw) const {
  switch (kind_) {
    case CoefficientKind::Constant:
      return Eigen::VectorXd::Zero(j_);
    case CoefficientKind::Affine: {
      Eigen::VectorXd out = (b_alpha_ * beta + b_x_ * y) * dt;
      for (int m = 0; m < m_; ++m) out += beta(m) * (sigma_alpha_[m] * dw);
      for (int j = 0; j < j_; ++j) out += y(j) * (sigma_x_[j] * dw);
      return out;
    }
    case CoefficientKind::SmoothBounded: {
      const double ub = b_wa_.dot(alpha) + b_wx_.dot(x);
      const double us = s_wa_.dot(alpha) + s_wx_.dot(x);
      const double th = std::tanh(ub);
      const double sech2 = 1.0 - th * th;
      const double cs = std::cos(us);
      const double db = sech2 * (b_wa_.dot(beta) + b_wx_.dot(y));
      const double ds = cs * (s_wa_.dot(beta) + s_wx_.dot(y));
      return db * dt * b_amp_ + ds * (s_amp_ * dw);
    }
  }
  return Eigen::VectorXd::Zero(j_);
}

double CoefficientModel::jacobian_bound() const {
  switch (kind_) {
    case CoefficientKind::Constant:
      return 0.0;
    case CoefficientKind::Affine: {
      double bound = b_alpha_.norm() + b_x_.norm();
      for (const auto& s : sigma_alpha_) bound += s.norm();
      for (const auto& s : sigma_x_) bound += s.norm();
      return bound;
    }
    case CoefficientKind::SmoothBounded: {
      // |tanh'| <= 1 and |sin'| <= 1, so the weight norms dominate.
      const double wb = std::sqrt(b_wa_.squaredNorm() + b_wx_.squaredNorm());
      const double ws = std::sqrt(s_wa_.squaredNorm() + s_wx_.squaredNorm());
      return b_amp_.norm() * wb + s_amp_.norm() * ws;
    }
  }
  return 0.0;
}

CoefficientModel CoefficientModel::constant(Eigen::VectorXd b0,
                                            Eigen::MatrixXd sigma0,
                                            int param_dim, ParamBox box) {
  CoefficientModel model;
  model.kind_ = CoefficientKind::Constant;
  model.j_ = static_cast<int>(b0.size());
  model.k_ = static_cast<int>(sigma0.cols());
  model.m_ = param_dim;
  model.b0_ = std::move(b0);
  model.sigma0_ = std::move(sigma0);
  model.box_ = std::move(box);
  return model;
}

CoefficientModel CoefficientModel::affine(
    Eigen::VectorXd b0, Eigen::MatrixXd b_alpha, Eigen::MatrixXd b_x,
    Eigen::MatrixXd sigma0, std::vector<Eigen::MatrixXd> sigma_alpha,
    std::vector<Eigen::MatrixXd> sigma_x, ParamBox box) {
  CoefficientModel model;
  model.kind_ = CoefficientKind::Affine;
  model.j_ = static_cast<int>(b0.size());
  model.k_ = static_cast<int>(sigma0.cols());
  model.m_ = static_cast<int>(b_alpha.cols());
  model.b0_ = std::move(b0);
  model.b_alpha_ = std::move(b_alpha);
  model.b_x_ = std::move(b_x);
  model.sigma0_ = std::move(sigma0);
  model.sigma_alpha_ = std::move(sigma_alpha);
  model.sigma_x_ = std::move(sigma_x);
  model.box_ = std::move(box);
  if (static_cast<int>(model.sigma_alpha_.size()) != model.m_ ||
      static_cast<int>(model.sigma_x_.size()) != model.j_) {
    throw ConfigError("affine model sigma sensitivity counts are wrong");
  }
  return model;
}

CoefficientModel CoefficientModel::smooth_bounded(
    Eigen::VectorXd b0, Eigen::VectorXd b_amp, Eigen::VectorXd b_wa,
    Eigen::VectorXd b_wx, Eigen::MatrixXd sigma0, Eigen::MatrixXd s_amp,
    Eigen::VectorXd s_wa, Eigen::VectorXd s_wx, ParamBox box) {
  CoefficientModel model;
  model.kind_ = CoefficientKind::SmoothBounded;
  model.j_ = static_cast<int>(b0.size());
  model.k_ = static_cast<int>(sigma0.cols());
  model.m_ = static_cast<int>(b_wa.size());
  model.b0_ = std::move(b0);
  model.b_amp_ = std::move(b_amp);
  model.b_wa_ = std::move(b_wa);
  model.b_wx_ = std::move(b_wx);
  model.sigma0_ = std::move(sigma0);
  model.s_amp_ = std::move(s_amp);
  model.s_wa_ = std::move(s_wa);
  model.s_wx_ = std::move(s_wx);
  model.box_ = std::move(box);
  if (model.s_wa_.size() != model.m_ || model.b_wx_.size() != model.j_ ||
      model.s_wx_.size() != model.j_) {
    throw ConfigError("smooth-bounded model weight dimensions are wrong");
  }
  return model;
}

}  // namespace rsde
