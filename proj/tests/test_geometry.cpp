#include <cmath>
#include <limits>

#include "doctest.h"
#include "property_checks.hpp"
#include "specsim/errors.hpp"
#include "specsim/geometry.hpp"
#include "specsim/rng.hpp"

using namespace specsim;

namespace {
Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}
Eigen::VectorXd vec1(double a) {
  Eigen::VectorXd v(1);
  v << a;
  return v;
}
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("trivial sets are explicit extended values") {
    const Eigen::VectorXd x = vec2(0.3, -1.0);
    CHECK(signed_distance(x, SetExpr::empty()) == kInf);
    CHECK(signed_distance(x, SetExpr::all()) == -kInf);
    CHECK(std::isinf(signed_distance(x, SetExpr::union_of({}))));
    CHECK(signed_distance(x, SetExpr::union_of({})) > 0.0);
  }

  TEST_CASE("ball distances, both measurement norms") {
    const SetExpr ball = SetExpr::ball(vec2(0.0, 0.0), 1.0);
    CHECK(signed_distance(vec2(3.0, 0.0), ball) == doctest::Approx(2.0));
    CHECK(signed_distance(vec2(0.0, 0.0), ball) == doctest::Approx(-1.0));
    CHECK(signed_distance(vec2(1.0, 0.0), ball) == doctest::Approx(0.0));

    // Chebyshev measurement of a Euclidean ball: the outside distance comes
    // from a bisection, the inside one from the worst corner in closed form.
    CHECK(signed_distance(vec2(2.0, 2.0), ball, Norm::Infinity) ==
          doctest::Approx(2.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(signed_distance(vec2(3.0, 0.5), ball, Norm::Infinity) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(signed_distance(vec2(0.5, 0.0), ball, Norm::Infinity) ==
          doctest::Approx(-0.41143782776614768).epsilon(1e-12));
    CHECK(signed_distance(vec2(0.0, 0.0), ball, Norm::Infinity) ==
          doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
  }

  TEST_CASE("ball distance is 1-Lipschitz in its measurement norm") {
    Rng rng(314);
    const SetExpr ball = SetExpr::ball(vec2(0.5, -0.25), 0.8);
    for (int i = 0; i < 1000; ++i) {
      const Eigen::VectorXd x = props::random_vec(rng, 2, -3.0, 3.0);
      const Eigen::VectorXd y = props::random_vec(rng, 2, -3.0, 3.0);
      for (Norm norm : {Norm::Euclidean, Norm::Infinity}) {
        const double hx = signed_distance(x, ball, norm);
        const double hy = signed_distance(y, ball, norm);
        const double d = norm == Norm::Euclidean
                             ? (x - y).norm()
                             : (x - y).cwiseAbs().maxCoeff();
        CHECK(std::abs(hx - hy) <= d + 1e-9);
      }
    }
  }

  TEST_CASE("box distances") {
    const SetExpr box = SetExpr::box(vec2(-1.0, -1.0), vec2(1.0, 1.0));
    CHECK(signed_distance(vec2(2.0, 3.0), box) ==
          doctest::Approx(std::sqrt(5.0)));
    CHECK(signed_distance(vec2(2.0, 3.0), box, Norm::Infinity) ==
          doctest::Approx(2.0));
    CHECK(signed_distance(vec2(0.2, 0.5), box) == doctest::Approx(-0.5));
    CHECK(signed_distance(vec2(0.2, 0.5), box, Norm::Infinity) ==
          doctest::Approx(-0.5));
    CHECK(signed_distance(vec2(1.0, 0.0), box) == doctest::Approx(0.0));
  }

  TEST_CASE("half-space distances use the dual norm scale") {
    const SetExpr hs = SetExpr::half_space(vec2(1.0, 1.0), 1.0);  // x+y >= 1
    CHECK(signed_distance(vec2(0.0, 0.0), hs) ==
          doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(signed_distance(vec2(0.0, 0.0), hs, Norm::Infinity) ==
          doctest::Approx(0.5));
    CHECK(signed_distance(vec2(1.0, 1.0), hs) ==
          doctest::Approx(-1.0 / std::sqrt(2.0)));
  }

  TEST_CASE("coordinate projection evaluates the set on a slice") {
    // {z >= 1} as a half-space over coordinate 0 of a 2-D state.
    const SetExpr wall = SetExpr::half_space(vec1(1.0), 1.0).onto({0});
    CHECK(signed_distance(vec2(0.4, 99.0), wall) == doctest::Approx(0.6));
    CHECK(signed_distance(vec2(0.4, -5.0), wall) == doctest::Approx(0.6));
    CHECK(signed_distance(vec2(1.5, 0.0), wall) == doctest::Approx(-0.5));
  }

  TEST_CASE("complement negates the signed distance") {
    Rng rng(271);
    for (int i = 0; i < 1000; ++i) {
      const SetExpr k = props::random_avoid(rng, 2);
      const Eigen::VectorXd x = props::random_vec(rng, 2, -4.0, 4.0);
      for (Norm norm : {Norm::Euclidean, Norm::Infinity}) {
        const double h = signed_distance(x, k, norm);
        const double hc = signed_distance(x, SetExpr::complement(k), norm);
        if (std::isinf(h)) {
          CHECK(hc == -h);  // Approx cannot compare infinities
        } else {
          CHECK(hc == doctest::Approx(-h).epsilon(1e-12));
        }
      }
    }
  }

  TEST_CASE("union takes the member minimum") {
    const SetExpr a = SetExpr::ball(vec2(2.0, 0.0), 0.5);
    const SetExpr b = SetExpr::box(vec2(-3.0, -3.0), vec2(-2.0, -2.0));
    const SetExpr u = SetExpr::union_of({a, b});
    Rng rng(55);
    for (int i = 0; i < 500; ++i) {
      const Eigen::VectorXd x = props::random_vec(rng, 2, -4.0, 4.0);
      const double expect =
          std::min(signed_distance(x, a), signed_distance(x, b));
      CHECK(signed_distance(x, u) == doctest::Approx(expect).epsilon(1e-12));
    }
  }

  TEST_CASE("euclidean ball inflation is exact") {
    Rng rng(77);
    for (int i = 0; i < 1000; ++i) {
      const Eigen::VectorXd c = props::random_vec(rng, 3, -2.0, 2.0);
      const double r = rng.uniform(0.1, 2.0);
      const double d = rng.uniform(0.0, 1.5);
      const Eigen::VectorXd x = props::random_vec(rng, 3, -4.0, 4.0);
      CHECK(signed_distance(x, SetExpr::ball(c, r)) - d ==
            doctest::Approx(signed_distance(x, SetExpr::ball(c, r + d)))
                .epsilon(1e-12));
    }
  }

  TEST_CASE("membership agrees with the sign of the distance") {
    Rng rng(88);
    for (int i = 0; i < 1000; ++i) {
      const SetExpr k = props::random_avoid(rng, 2);
      const Eigen::VectorXd x = props::random_vec(rng, 2, -4.0, 4.0);
      const double h = signed_distance(x, k);
      if (h < -1e-12) CHECK(contains_with_margin(x, k, 0.0));
      if (h > 1e-12) CHECK_FALSE(contains_with_margin(x, k, 0.0));
      // Expanded membership: h <= d.
      if (h < 0.5 - 1e-12) CHECK(contains_with_margin(x, k, 0.5));
    }
  }

  TEST_CASE("factory validation") {
    CHECK_THROWS_AS(SetExpr::ball(vec2(0, 0), -1.0), ConfigError);
    CHECK_THROWS_AS(SetExpr::box(vec2(1, 0), vec2(0, 1)), ConfigError);
    CHECK_THROWS_AS(SetExpr::half_space(vec2(0, 0), 1.0), ConfigError);
    CHECK_THROWS_AS(SetExpr::ball(vec2(0, 0), 1.0).onto({0, 0}), ConfigError);
    CHECK_THROWS_AS(SetExpr::ball(vec2(0, 0), 1.0).onto({-1}), ConfigError);
  }

  TEST_CASE("norm names round-trip") {
    CHECK(norm_from_string(to_string(Norm::Euclidean)) == Norm::Euclidean);
    CHECK(norm_from_string(to_string(Norm::Infinity)) == Norm::Infinity);
    CHECK_THROWS_AS(norm_from_string("manhattan"), ConfigError);
  }
}
