#include <doctest.h>

#include <random>

#include "rsde/derivative.hpp"

using rsde::CoefficientModel;
using rsde::Direction;
using rsde::ParamBox;
using rsde::PolyhedralDomain;
using rsde::ProjectionCache;
using rsde::ReflectionField;
using rsde::ReflectionMatrix;
using rsde::SimConfig;

namespace {

struct Fixture2d {
  PolyhedralDomain domain = PolyhedralDomain::orthant(2);
  ReflectionField field;
  ReflectionMatrix rm;
  CoefficientModel model;
  Eigen::VectorXd alpha;

  Fixture2d()
      : model(CoefficientModel::smooth_bounded(
            Eigen::VectorXd::Zero(2), Eigen::VectorXd::Constant(2, 0.4),
            Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Constant(2, 0.3),
            Eigen::MatrixXd::Identity(2, 2),
            Eigen::MatrixXd::Constant(2, 2, 0.15),
            Eigen::VectorXd::Constant(1, 0.4), Eigen::VectorXd::Constant(2, 0.2),
            ParamBox::symmetric(1, 5.0))) {
    field.base.resize(2, 2);
    field.base << 1.0, 0.5,   // face 0 direction (1, 0.5)
                  0.0, 1.0;   // face 1 normal
    Eigen::MatrixXd sens = Eigen::MatrixXd::Zero(2, 2);
    sens(0, 1) = 1.0;  // face-0 direction tilts with alpha
    field.sensitivity = {sens};
    alpha = Eigen::VectorXd::Constant(1, 0.2);
    rm = rsde::reflection_matrix(field, domain, alpha);
  }

  rsde::ReflectedPath path(int steps, double dt, const Eigen::VectorXd& x,
                           std::uint64_t seed, int index) const {
    SimConfig cfg;
    cfg.horizon = steps * dt;
    cfg.dt = dt;
    cfg.seed = seed;
    return rsde::simulate_path(domain, rm.r, model, alpha, x, cfg, index);
  }
};

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("project_initial") {
  auto domain = PolyhedralDomain::orthant(2);
  Eigen::MatrixXd r(2, 2);
  r << 1.0, 0.0,
       0.5, 1.0;
  ProjectionCache cache(domain, r);
  SUBCASE("interior start passes the direction through") {
    Eigen::VectorXd y = vec2(0.3, -0.7);
    Eigen::VectorXd j0 = rsde::project_initial(domain, cache, vec2(1.0, 1.0), y);
    CHECK((j0 - y).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("boundary start projects along the face direction") {
    Eigen::VectorXd j0 =
        rsde::project_initial(domain, cache, vec2(0.0, 1.0), vec2(1.0, 0.0));
    CHECK(j0(0) == doctest::Approx(0.0));
    CHECK(j0(1) == doctest::Approx(-0.5));
  }
  SUBCASE("directions outside the tangent cone are rejected") {
    CHECK_THROWS_AS(
        rsde::project_initial(domain, cache, vec2(0.0, 1.0), vec2(-1.0, 0.0)),
        rsde::DomainViolation);
  }
}

TEST_CASE("interior-only paths carry the direction unchanged (constant model)") {
  auto domain = PolyhedralDomain::half_line();
  auto field = ReflectionField::normal(domain, 0);
  auto rm = rsde::reflection_matrix(field, domain, Eigen::VectorXd());
  auto model = CoefficientModel::constant(Eigen::VectorXd::Zero(1),
                                          Eigen::MatrixXd::Identity(1, 1), 0,
                                          ParamBox::symmetric(0, 1.0));
  SimConfig cfg;
  cfg.horizon = 0.1;
  cfg.dt = 1e-3;
  cfg.seed = 21;
  auto path = rsde::simulate_path(domain, rm.r, model, Eigen::VectorXd(),
                                  Eigen::VectorXd::Constant(1, 50.0), cfg, 0);
  ProjectionCache cache(domain, rm.r);
  Direction dir{Eigen::VectorXd(), Eigen::VectorXd::Constant(1, 2.5)};
  auto state = rsde::simulate_derivative(domain, rm, model, Eigen::VectorXd(),
                                         path, dir, cache);
  for (int k = 0; k <= path.steps(); ++k) {
    CHECK(state.j(k, 0) == 2.5);
    CHECK(state.k(k, 0) == 0.0);
  }
  CHECK(state.jumps.empty());
}

TEST_CASE("1d hitting path flattens the state sensitivity") {
  auto domain = PolyhedralDomain::half_line();
  auto field = ReflectionField::normal(domain, 0);
  auto rm = rsde::reflection_matrix(field, domain, Eigen::VectorXd());
  auto model = CoefficientModel::constant(Eigen::VectorXd::Constant(1, -1.0),
                                          Eigen::MatrixXd::Zero(1, 1), 0,
                                          ParamBox::symmetric(0, 1.0));
  SimConfig cfg;
  cfg.horizon = 1.0;
  cfg.dt = 1e-3;
  auto path = rsde::simulate_path(domain, rm.r, model, Eigen::VectorXd(),
                                  Eigen::VectorXd::Constant(1, 0.5), cfg, 0);
  ProjectionCache cache(domain, rm.r);
  Direction dir{Eigen::VectorXd(), Eigen::VectorXd::Ones(1)};
  auto state = rsde::simulate_derivative(domain, rm, model, Eigen::VectorXd(),
                                         path, dir, cache);
  CHECK(state.j(100, 0) == 1.0);            // before the hit
  CHECK(state.j(499, 0) == 1.0);
  CHECK(state.j(600, 0) == 0.0);            // absorbed by the projection
  CHECK(state.terminal()(0) == 0.0);
  CHECK(state.k(1000, 0) == -1.0);          // constraining part ate the unit
  CHECK_FALSE(state.jumps.empty());
  CHECK(state.jumps.front().active == rsde::ActiveSet{0});
}

TEST_CASE("the recursion is linear in the direction") {
  Fixture2d fx;
  auto path = fx.path(400, 1e-3, vec2(0.05, 0.05), 77, 3);
  ProjectionCache cache(fx.domain, fx.rm.r);
  std::mt19937 gen(43);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Direction d1{Eigen::VectorXd::Constant(1, gauss(gen)),
                 vec2(gauss(gen), gauss(gen))};
    Direction d2{Eigen::VectorXd::Constant(1, gauss(gen)),
                 vec2(gauss(gen), gauss(gen))};
    const double a = gauss(gen), b = gauss(gen);
    Direction combo{a * d1.beta + b * d2.beta, a * d1.y + b * d2.y};
    auto s1 = rsde::simulate_derivative(fx.domain, fx.rm, fx.model, fx.alpha,
                                        path, d1, cache);
    auto s2 = rsde::simulate_derivative(fx.domain, fx.rm, fx.model, fx.alpha,
                                        path, d2, cache);
    auto sc = rsde::simulate_derivative(fx.domain, fx.rm, fx.model, fx.alpha,
                                        path, combo, cache);
    CHECK((sc.j - a * s1.j - b * s2.j).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("boundary steps keep the derivative in the active nullspace") {
  Fixture2d fx;
  ProjectionCache cache(fx.domain, fx.rm.r);
  Direction dir{Eigen::VectorXd::Constant(1, 1.0), vec2(1.0, -0.5)};
  for (int p = 0; p < 10; ++p) {
    auto path = fx.path(500, 1e-3, vec2(0.05, 0.05), 101, p);
    auto state = rsde::simulate_derivative(fx.domain, fx.rm, fx.model, fx.alpha,
                                           path, dir, cache);
    bool saw_boundary = false;
    for (int k = 1; k <= path.steps(); ++k) {
      for (int i : path.active[k]) {
        saw_boundary = true;
        CHECK(std::abs(fx.domain.normal(i).dot(state.j.row(k).transpose())) <
              1e-8);
      }
    }
    CHECK(saw_boundary);
  }
}

TEST_CASE("constraining increments live in the active direction span") {
  Fixture2d fx;
  ProjectionCache cache(fx.domain, fx.rm.r);
  Direction dir{Eigen::VectorXd::Constant(1, 0.7), vec2(0.4, 0.9)};
  auto path = fx.path(500, 1e-3, vec2(0.05, 0.05), 55, 1);
  auto state = rsde::simulate_derivative(fx.domain, fx.rm, fx.model, fx.alpha,
                                         path, dir, cache);
  for (int k = 0; k < path.steps(); ++k) {
    Eigen::VectorXd dk =
        (state.k.row(k + 1) - state.k.row(k)).transpose();
    if (dk.norm() < 1e-14) continue;
    const auto& active = path.active[k + 1];
    REQUIRE_FALSE(active.empty());
    Eigen::MatrixXd d(2, active.size());
    for (size_t i = 0; i < active.size(); ++i) d.col(i) = fx.rm.r.col(active[i]);
    Eigen::VectorXd residual = dk - d * d.colPivHouseholderQr().solve(dk);
    CHECK(residual.norm() < 1e-8 * (1.0 + dk.norm()));
  }
}

TEST_CASE("state telescopes into forcing plus constraining parts") {
  Fixture2d fx;
  ProjectionCache cache(fx.domain, fx.rm.r);
  Direction dir{Eigen::VectorXd::Constant(1, 1.3), vec2(0.2, -0.1)};
  auto path = fx.path(300, 1e-3, vec2(0.05, 0.05), 31, 0);
  auto state = rsde::simulate_derivative(fx.domain, fx.rm, fx.model, fx.alpha,
                                         path, dir, cache);
  Eigen::MatrixXd rprime = fx.rm.prime(dir.beta);
  Eigen::VectorXd sum = state.j.row(0).transpose();
  for (int k = 0; k < path.steps(); ++k) {
    sum += fx.model.jacobian_step(fx.alpha, path.z.row(k).transpose(), dir.beta,
                                  state.j.row(k).transpose(), path.dt,
                                  path.dw.row(k).transpose());
    sum += rprime * path.dl.row(k).transpose();
    Eigen::VectorXd expected =
        sum + (state.k.row(k + 1) - state.k.row(0)).transpose();
    CHECK((state.j.row(k + 1).transpose() - expected).cwiseAbs().maxCoeff() <
          1e-10);
  }
}

TEST_CASE("repeat runs are bit-identical") {
  Fixture2d fx;
  ProjectionCache cache(fx.domain, fx.rm.r);
  Direction dir{Eigen::VectorXd::Constant(1, 0.9), vec2(0.3, 0.6)};
  auto path = fx.path(200, 1e-3, vec2(0.05, 0.05), 13, 2);
  auto s1 = rsde::simulate_derivative(fx.domain, fx.rm, fx.model, fx.alpha,
                                      path, dir, cache);
  auto s2 = rsde::simulate_derivative(fx.domain, fx.rm, fx.model, fx.alpha,
                                      path, dir, cache);
  CHECK((s1.j - s2.j).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s1.k - s2.k).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mismatched direction dimensions are rejected") {
  Fixture2d fx;
  ProjectionCache cache(fx.domain, fx.rm.r);
  auto path = fx.path(10, 1e-3, vec2(0.5, 0.5), 1, 0);
  Direction bad{Eigen::VectorXd::Zero(3), vec2(0.0, 0.0)};
  CHECK_THROWS_AS(rsde::simulate_derivative(fx.domain, fx.rm, fx.model,
                                            fx.alpha, path, bad, cache),
                  rsde::ConfigError);
}
