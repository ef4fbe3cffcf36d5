#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rsde/errors.hpp"

namespace rsde {

// Product-of-intervals parameter box U.
struct ParamBox {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  bool contains(const Eigen::VectorXd& alpha) const {
    for (int m = 0; m < alpha.size(); ++m) {
      if (alpha(m) < lo(m) || alpha(m) > hi(m)) return false;
    }
    return true;
  }
  static ParamBox symmetric(int m, double half_width) {
    return ParamBox{Eigen::VectorXd::Constant(m, -half_width),
                    Eigen::VectorXd::Constant(m, half_width)};
  }
};

// Jacobians of (b, sigma) at a point, as linear maps on (beta, y).
struct CoefficientJacobian {
  Eigen::MatrixXd b_alpha;                 // J x M
  Eigen::MatrixXd b_x;                     // J x J
  std::vector<Eigen::MatrixXd> sigma_alpha;  // M entries, J x K
  std::vector<Eigen::MatrixXd> sigma_x;      // J entries, J x K

  Eigen::VectorXd drift_dir(const Eigen::VectorXd& beta,
                            const Eigen::VectorXd& y) const {
    return b_alpha * beta + b_x * y;
  }
  Eigen::MatrixXd sigma_dir(const Eigen::VectorXd& beta,
                            const Eigen::VectorXd& y) const;
};

enum class CoefficientKind { Constant, Affine, SmoothBounded };

// Closed registry of drift/diffusion models with analytic Jacobians. The
// registry shape guarantees globally bounded Jacobians (and Lipschitz
// Jacobians for SmoothBounded) without expression parsing.
//
//   Constant:       b = b0,                sigma = sigma0
//   Affine:         b = b0 + Ba a + Bx x,  sigma = sigma0 + sum a_m Sa_m
//                                                         + sum x_j Sx_j
//   SmoothBounded:  b = b0 + b_amp tanh(<b_wa,a> + <b_wx,x>)
//                   sigma = sigma0 + s_amp sin(<s_wa,a> + <s_wx,x>)
class CoefficientModel {
 public:
  CoefficientKind kind() const { return kind_; }
  int param_dim() const { return m_; }
  int state_dim() const { return j_; }
  int noise_dim() const { return k_; }
  const ParamBox& box() const { return box_; }
  bool elliptic() const { return elliptic_; }
  double ellipticity() const { return lambda_; }

  void eval(const Eigen::VectorXd& alpha, const Eigen::VectorXd& x,
            Eigen::VectorXd& b, Eigen::MatrixXd& sigma) const;
  CoefficientJacobian eval_jacobian(const Eigen::VectorXd& alpha,
                                    const Eigen::VectorXd& x) const;

  // b'(alpha,x)[beta,y] * dt + sigma'(alpha,x)[beta,y] * dw without
  // materializing the Jacobian; this is the derivative recursion's hot path.
  Eigen::VectorXd jacobian_step(const Eigen::VectorXd& alpha,
                                const Eigen::VectorXd& x,
                                const Eigen::VectorXd& beta,
                                const Eigen::VectorXd& y, double dt,
                                const Eigen::VectorXd& dw) const;

  // Declared bound dominating ||b'|| + ||sigma'|| over the box.
  double jacobian_bound() const;

  void require_in_box(const Eigen::VectorXd& alpha) const;

  static CoefficientModel constant(Eigen::VectorXd b0, Eigen::MatrixXd sigma0,
                                   int param_dim, ParamBox box);
  static CoefficientModel affine(Eigen::VectorXd b0, Eigen::MatrixXd b_alpha,
                                 Eigen::MatrixXd b_x, Eigen::MatrixXd sigma0,
                                 std::vector<Eigen::MatrixXd> sigma_alpha,
                                 std::vector<Eigen::MatrixXd> sigma_x,
                                 ParamBox box);
  static CoefficientModel smooth_bounded(
      Eigen::VectorXd b0, Eigen::VectorXd b_amp, Eigen::VectorXd b_wa,
      Eigen::VectorXd b_wx, Eigen::MatrixXd sigma0, Eigen::MatrixXd s_amp,
      Eigen::VectorXd s_wa, Eigen::VectorXd s_wx, ParamBox box);

  CoefficientModel& set_elliptic(double lambda) {
    elliptic_ = true;
    lambda_ = lambda;
    return *this;
  }

 private:
  CoefficientKind kind_ = CoefficientKind::Constant;
  int m_ = 0, j_ = 0, k_ = 0;
  ParamBox box_;
  bool elliptic_ = false;
  double lambda_ = 0.0;

  Eigen::VectorXd b0_;
  Eigen::MatrixXd sigma0_;
  // Affine pieces.
  Eigen::MatrixXd b_alpha_;
  Eigen::MatrixXd b_x_;
  std::vector<Eigen::MatrixXd> sigma_alpha_;
  std::vector<Eigen::MatrixXd> sigma_x_;
  // SmoothBounded pieces.
  Eigen::VectorXd b_amp_, b_wa_, b_wx_;
  Eigen::MatrixXd s_amp_;
  Eigen::VectorXd s_wa_, s_wx_;
};

}  // namespace rsde
