#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rsde/derivative.hpp"
#include "rsde/functional.hpp"
#include "rsde/simulate.hpp"

namespace rsde {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  int n = 0;
};

MeanSe mean_se(const Eigen::VectorXd& samples);

// Everything one experiment needs, by reference; the owner keeps the parts
// alive for the duration of the run.
struct SensitivitySetup {
  const PolyhedralDomain* domain = nullptr;
  const ReflectionField* reflection = nullptr;
  const CoefficientModel* model = nullptr;
  const Functional* functional = nullptr;
  Eigen::VectorXd alpha;
  Eigen::VectorXd x;
  SimConfig sim;
};

// Per-path discrete functional: sum_k zeta1(Z_k) dt + zeta2(Z_T), left
// endpoint in the Riemann sum.
double path_theta(const Functional& functional, const ReflectedPath& path);

// Per-path IPA integrand: sum_k zeta1'(Z_k)[J_k] dt + zeta2'(Z_T)[J_T].
double path_ipa(const Functional& functional, const ReflectedPath& path,
                const DerivativeState& state);

// Unit directions spanning the parameter space followed by the state space.
std::vector<Direction> basis_directions(int param_dim, int state_dim);

MeanSe estimate_theta(const SensitivitySetup& setup);

struct GradientEstimate {
  std::vector<Direction> directions;
  std::vector<MeanSe> components;
  MeanSe theta;  // estimated on the same batch
};

// Monte Carlo IPA gradient along the given directions; one simulation pass,
// all derivative recursions share the stored path. Full-basis assembly over
// the state space requires an interior start (refused otherwise).
GradientEstimate ipa_gradient(const SensitivitySetup& setup,
                              const std::vector<Direction>& directions);

// Common-random-numbers forward difference quotient along one direction at
// step eps, with paired-sample standard error.
MeanSe fd_gradient(const SensitivitySetup& setup, const Direction& direction,
                   double eps);

struct CompareRow {
  std::string label;
  MeanSe ipa;
  MeanSe fd;
  double z = 0.0;
  bool pass = true;
};

std::vector<CompareRow> compare(const GradientEstimate& ipa,
                                const std::vector<MeanSe>& fd,
                                double z_threshold = 3.0);

}  // namespace rsde
