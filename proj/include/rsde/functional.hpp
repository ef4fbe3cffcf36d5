#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "rsde/errors.hpp"

namespace rsde {

// Closed registry of path functionals with bounded-gradient members and
// analytic gradients, mirroring the coefficient registry.
struct FunctionalPart {
  enum class Kind { Zero, Linear, SmoothBounded };
  Kind kind = Kind::Zero;
  Eigen::VectorXd w;
  double c = 0.0;
  double amp = 1.0;

  double value(const Eigen::VectorXd& x) const {
    switch (kind) {
      case Kind::Zero:
        return 0.0;
      case Kind::Linear:
        return w.dot(x) + c;
      case Kind::SmoothBounded:
        return amp * std::tanh(w.dot(x) + c);
    }
    return 0.0;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
    switch (kind) {
      case Kind::Zero:
        return Eigen::VectorXd::Zero(x.size());
      case Kind::Linear:
        return w;
      case Kind::SmoothBounded: {
        const double th = std::tanh(w.dot(x) + c);
        return amp * (1.0 - th * th) * w;
      }
    }
    return Eigen::VectorXd::Zero(x.size());
  }

  static FunctionalPart zero() { return {}; }
  static FunctionalPart linear(Eigen::VectorXd w, double c = 0.0) {
    return {Kind::Linear, std::move(w), c, 1.0};
  }
  static FunctionalPart smooth_bounded(Eigen::VectorXd w, double c,
                                       double amp) {
    return {Kind::SmoothBounded, std::move(w), c, amp};
  }
};

// Theta integrand: running cost plus terminal cost.
struct Functional {
  FunctionalPart running;
  FunctionalPart terminal;
};

}  // namespace rsde
