#include <cmath>
#include <limits>

#include "doctest.h"
#include "specsim/dynamics.hpp"
#include "specsim/errors.hpp"

using namespace specsim;

namespace {

Eigen::VectorXd vecd(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Eigen::MatrixXd running_A() {
  Eigen::MatrixXd A(2, 2);
  A << 2.0, 0.0, 0.0, 0.1;
  return A;
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("linear model step") {
    Eigen::MatrixXd B(2, 1);
    B << 1.0, 0.0;
    const LinearModel m(running_A(), B);
    CHECK(m.state_dim() == 2);
    CHECK(m.control_dim() == 1);
    CHECK_FALSE(m.has_control_bounds());

    const Eigen::VectorXd x1 = m.step(vecd({1.0, 3.0}), vecd({0.5}), 0);
    CHECK(x1(0) == doctest::Approx(2.5));
    CHECK(x1(1) == doctest::Approx(0.3));
    // Unbounded: clamp is the identity.
    CHECK(m.clamp(vecd({123.0})) == vecd({123.0}));
    CHECK_THROWS_AS(m.control_bounds(), ConfigError);
  }

  TEST_CASE("linear model validation") {
    Eigen::MatrixXd A(2, 3), B(2, 1);
    A.setZero();
    B.setZero();
    CHECK_THROWS_AS(LinearModel(A, B), ConfigError);
    Eigen::MatrixXd A2(2, 2), B2(3, 1);
    A2.setZero();
    B2.setZero();
    CHECK_THROWS_AS(LinearModel(A2, B2), ConfigError);
  }

  TEST_CASE("second coordinate stays zero when the input row is zero") {
    // The plant variant with B = (1, 0): starting from x2 = 0, the second
    // state obeys x2' = 0.1 * x2 and remains identically zero.
    Eigen::MatrixXd B(2, 1);
    B << 1.0, 0.0;
    const LinearModel m(running_A(), B);
    const Controller c([](int t, const Eigen::VectorXd&) {
      return vecd({std::sin(0.7 * t) * 3.0});
    }, "probe");
    const Trajectory traj = simulate(m, vecd({0.0, 0.0}), c, 20);
    CHECK(traj.horizon() == 20);
    for (int t = 0; t <= 20; ++t) CHECK(traj.states(t, 1) == 0.0);
  }

  TEST_CASE("vertical flight step and clamping") {
    const QuadrotorVertical m(15.0);
    CHECK(m.time_step() == doctest::Approx(0.01));
    CHECK(m.gravity() == doctest::Approx(-9.8));
    const Eigen::VectorXd x1 = m.step(vecd({1.0, 0.0}), vecd({1.0}), 0);
    CHECK(x1(0) == doctest::Approx(1.0));          // z + T v = 1 + 0
    CHECK(x1(1) == doctest::Approx(0.052));        // v + T(k u + g)
    CHECK(m.clamp(vecd({2.0}))(0) == doctest::Approx(1.0));
    CHECK(m.clamp(vecd({-0.5}))(0) == doctest::Approx(0.0));
    const auto [lo, hi] = m.control_bounds();
    CHECK(lo(0) == doctest::Approx(0.0));
    CHECK(hi(0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(QuadrotorVertical(-1.0), ConfigError);
  }

  TEST_CASE("simulate clamps before stepping and records post-clamp") {
    const QuadrotorVertical m(15.0);
    const Controller c([](int, const Eigen::VectorXd&) {
      return vecd({5.0});  // far above the admissible box
    }, "saturating");
    const Trajectory traj = simulate(m, vecd({1.0, 0.0}), c, 3);
    for (int t = 0; t < 3; ++t) CHECK(traj.controls(t, 0) == 1.0);
    // Same rollout as feeding u = 1 directly.
    Eigen::VectorXd x = vecd({1.0, 0.0});
    for (int t = 0; t < 3; ++t) x = m.step(x, vecd({1.0}), t);
    CHECK(traj.states(3, 0) == doctest::Approx(x(0)));
    CHECK(traj.states(3, 1) == doctest::Approx(x(1)));
  }

  TEST_CASE("bicycle step, saturation, and bounds") {
    const KinematicBicycle m;  // defaults: l=2.5, T=0.03
    CHECK(m.state_dim() == 4);
    CHECK(m.control_dim() == 2);

    // Hand-check one explicit-Euler step from (0, 0, 0.1, 2.0), u=(1, 0.2).
    const double l = 2.5, T = 0.03;
    const Eigen::VectorXd x1 =
        m.step(vecd({0.0, 0.0, 0.1, 2.0}), vecd({1.0, 0.2}), 0);
    CHECK(x1(0) == doctest::Approx(T * 2.0 * std::cos(0.1)).epsilon(1e-12));
    CHECK(x1(1) == doctest::Approx(T * 2.0 * std::sin(0.1)).epsilon(1e-12));
    CHECK(x1(2) ==
          doctest::Approx(0.1 + T * 2.0 / l * std::tan(0.2)).epsilon(1e-12));
    CHECK(x1(3) == doctest::Approx(2.0 + T * 1.0).epsilon(1e-12));

    // Speed saturates at [0, v_max] inside the step itself.
    const double v_max = 10.0 / 3.6;
    const Eigen::VectorXd fast =
        m.step(vecd({0.0, 0.0, 0.0, v_max}), vecd({3.0, 0.0}), 0);
    CHECK(fast(3) == doctest::Approx(v_max));
    const Eigen::VectorXd slow =
        m.step(vecd({0.0, 0.0, 0.0, 0.0}), vecd({-3.0, 0.0}), 0);
    CHECK(slow(3) == doctest::Approx(0.0));

    const auto [lo, hi] = m.control_bounds();
    CHECK(lo(0) == doctest::Approx(-3.0));
    CHECK(hi(0) == doctest::Approx(3.0));
    CHECK(hi(1) == doctest::Approx(std::numbers::pi / 4));
    CHECK(m.clamp(vecd({10.0, -3.0}))(0) == doctest::Approx(3.0));
    CHECK(m.clamp(vecd({10.0, -3.0}))(1) ==
          doctest::Approx(-std::numbers::pi / 4));
  }

  TEST_CASE("simulate is deterministic and validates arguments") {
    const QuadrotorVertical m(15.0);
    const Controller c([](int t, const Eigen::VectorXd& x) {
      return vecd({0.5 + 0.3 * std::sin(x(0) + t)});
    }, "wiggle");
    const Trajectory a = simulate(m, vecd({1.2, 0.4}), c, 50);
    const Trajectory b = simulate(m, vecd({1.2, 0.4}), c, 50);
    CHECK(a.states == b.states);
    CHECK(a.controls == b.controls);

    CHECK_THROWS_AS(simulate(m, vecd({1.0}), c, 5), ConfigError);
    CHECK_THROWS_AS(simulate(m, vecd({1.0, 0.0}), c, -1), ConfigError);
    CHECK_THROWS_AS(simulate(m, vecd({1.0, 0.0}),
                             Controller::null_controller(), 5),
                    RuntimeFailure);
  }

  TEST_CASE("divergence reports the offending step") {
    // An expanding scalar plant overflows to infinity after a few doublings.
    Eigen::MatrixXd A(1, 1), B(1, 1);
    A << 2.0;
    B << 1.0;
    const LinearModel m(A, B);
    const Controller c([](int, const Eigen::VectorXd&) { return vecd({0.0}); },
                       "coast");
    try {
      simulate(m, vecd({1e306}), c, 10);
      FAIL("expected DivergenceError");
    } catch (const DivergenceError& err) {
      // 1e306 doubles past DBL_MAX between steps 9 and 10 of its own accord;
      // with horizon 10 the overflow lands inside the rollout.
      CHECK(err.step() >= 0);
      CHECK(err.step() < 10);
    }
  }

  TEST_CASE("controller basics") {
    const Controller n = Controller::null_controller();
    CHECK(n.is_null());
    CHECK(n.descriptor() == "null");
    CHECK_THROWS_AS(n.act(0, vecd({0.0})), RuntimeFailure);

    const Controller c([](int, const Eigen::VectorXd& x) { return -x; },
                       "negate");
    CHECK_FALSE(c.is_null());
    CHECK(c.descriptor() == "negate");
    CHECK(c.act(3, vecd({2.0}))(0) == doctest::Approx(-2.0));
  }

  TEST_CASE("model registry") {
    auto& reg = ModelRegistry::instance();
    CHECK(reg.contains("linear"));
    CHECK(reg.contains("quadrotor-vertical"));
    CHECK(reg.contains("kinematic-bicycle"));
    CHECK_FALSE(reg.contains("unobtainium"));
    CHECK_THROWS_AS(reg.make("unobtainium", nlohmann::json::object()),
                    ConfigError);

    const nlohmann::json params = {{"type", "quadrotor-vertical"}, {"k", 15.0}};
    const ModelPtr m = reg.make("quadrotor-vertical", params);
    CHECK(m->state_dim() == 2);
    const auto quad = std::dynamic_pointer_cast<const QuadrotorVertical>(m);
    REQUIRE(quad);
    CHECK(quad->thrust_gain() == doctest::Approx(15.0));

    // Unknown keys are configuration errors everywhere.
    const nlohmann::json bad = {{"type", "quadrotor-vertical"},
                                {"k", 15.0},
                                {"turbo", true}};
    CHECK_THROWS_AS(reg.make("quadrotor-vertical", bad), ConfigError);
    const nlohmann::json missing = {{"type", "quadrotor-vertical"}};
    CHECK_THROWS_AS(reg.make("quadrotor-vertical", missing), ConfigError);
  }
}
