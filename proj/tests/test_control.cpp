#include <cmath>
#include <memory>

#include "doctest.h"
#include "specsim/control.hpp"
#include "specsim/errors.hpp"
#include "specsim/reach.hpp"
#include "specsim/rng.hpp"

using namespace specsim;

namespace {

Eigen::VectorXd vecd(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.begin()->size());
  Eigen::MatrixXd m(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

std::shared_ptr<const LinearModel> tracking_abstraction() {
  return std::make_shared<LinearModel>(mat({{2.0, 0.0}, {0.0, 0.1}}),
                                       mat({{1.0}, {0.1}}));
}

Environment tracking_environment(double target, int horizon = 20) {
  Environment e;
  e.id = "track";
  e.x0 = vecd({0.0, 0.0});
  e.avoid = TimeVaryingSet::constant(horizon, SetExpr::empty());
  e.reach = TimeVaryingSet::constant(horizon, SetExpr::all())
                .with_entry(horizon, SetExpr::ball(vecd({target, 0.0}), 0.5));
  e.validate();
  return e;
}

KernelPtr test_kernel(double gain = 15.0, int nodes = 81) {
  const auto model = std::make_shared<QuadrotorVertical>(gain);
  const SetExpr avoid =
      SetExpr::complement(SetExpr::box(vecd({0.5}), vecd({2.5}))).onto({0});
  KernelGridSpec spec;
  spec.n0 = nodes;
  spec.n1 = nodes;
  return std::make_shared<SafetyKernel>(compute_kernel(
      model, avoid, 0.0, spec, scalar_levels(0.0, 1.0, 11), 100));
}

}  // namespace

TEST_SUITE("control") {
  TEST_CASE("riccati fixed point: frozen scalar instance") {
    const auto r = solve_dare(mat({{2.0}}), mat({{1.0}}), mat({{1.0}}),
                              mat({{1.0}}));
    CHECK(r.P(0, 0) == doctest::Approx(4.2360679774997896).epsilon(1e-12));
    CHECK(r.K(0, 0) == doctest::Approx(1.618033988749895).epsilon(1e-12));
    CHECK(r.closed_loop_radius ==
          doctest::Approx(0.381966011250105).epsilon(1e-9));
    CHECK(r.residual <= 1e-10);
    CHECK(r.iterations >= 1);
  }

  TEST_CASE("riccati fixed point: degenerate instances") {
    // Zero state penalty on a stable plant: P = 0, K = 0.
    const auto z = solve_dare(mat({{0.5}}), mat({{1.0}}), mat({{0.0}}),
                              mat({{1.0}}));
    CHECK(z.P(0, 0) == doctest::Approx(0.0));
    CHECK(z.closed_loop_radius == doctest::Approx(0.5).epsilon(1e-9));

    // A = 0: the map fixes P = Q immediately.
    const auto q = solve_dare(mat({{0.0}}), mat({{1.0}}), mat({{3.0}}),
                              mat({{2.0}}));
    CHECK(q.P(0, 0) == doctest::Approx(3.0));
    CHECK(q.K(0, 0) == doctest::Approx(0.0));

    // Unstabilizable pair (B = 0, |A| > 1) cannot converge to a stable loop.
    CHECK_THROWS_AS(solve_dare(mat({{2.0}}), mat({{0.0}}), mat({{1.0}}),
                               mat({{1.0}})),
                    RuntimeFailure);
  }

  TEST_CASE("riccati residual verified against the map, 2-D") {
    const Eigen::MatrixXd A = mat({{1.1, 0.3}, {-0.2, 0.8}});
    const Eigen::MatrixXd B = mat({{0.5}, {1.0}});
    const Eigen::MatrixXd Q = 2.0 * Eigen::MatrixXd::Identity(2, 2);
    const Eigen::MatrixXd R = Eigen::MatrixXd::Identity(1, 1);
    const auto r = solve_dare(A, B, Q, R);
    const Eigen::MatrixXd next =
        A.transpose() * r.P * A -
        A.transpose() * r.P * B *
            (R + B.transpose() * r.P * B).inverse() * B.transpose() * r.P * A +
        Q;
    CHECK((next - r.P).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(r.closed_loop_radius < 1.0);
  }

  TEST_CASE("lqr tracking: feedforward at the target") {
    const LqrScheme scheme(tracking_abstraction(), 0.1, 100.0);
    const Environment e = tracking_environment(2.0);
    const Controller c = scheme.controller_for(1.0, e);
    // At x = x* the feedback term vanishes; least squares on
    // (I - A) x* = B u gives u = -2 / 1.01.
    const Eigen::VectorXd u = c.act(0, vecd({2.0, 0.0}));
    CHECK(u(0) == doctest::Approx(-1.9801980198019802).epsilon(1e-12));
    CHECK(c.descriptor().rfind("lqr(q=", 0) == 0);
    CHECK(c.descriptor().find(",ffres=") != std::string::npos);
  }

  TEST_CASE("lqr descriptor replays bit-exactly") {
    const LqrScheme scheme(tracking_abstraction(), 0.1, 100.0);
    const Environment e = tracking_environment(-3.25);
    Rng rng(1234);
    const Controller c = scheme.sample(e, rng);
    const Controller replay = scheme.reconstruct(c.descriptor(), e);
    for (int t = 0; t < 5; ++t) {
      const Eigen::VectorXd x = vecd({0.3 * t - 1.0, 0.1 * t});
      CHECK(c.act(t, x) == replay.act(t, x));
    }
    CHECK_THROWS_AS(scheme.reconstruct("useq(u=1)", e), ConfigError);
  }

  TEST_CASE("lqr requires a full-state terminal ball") {
    const LqrScheme scheme(tracking_abstraction(), 0.1, 100.0);
    Environment e;
    e.id = "no-target";
    e.x0 = vecd({0.0, 0.0});
    e.avoid = TimeVaryingSet::constant(3, SetExpr::empty());
    e.reach = TimeVaryingSet::constant(3, SetExpr::all());
    CHECK_THROWS_AS(scheme.controller_for(1.0, e), ConfigError);
  }

  TEST_CASE("uniform sequences stay in the box and replay exactly") {
    const UniformSequenceScheme scheme(vecd({0.0, -1.0}), vecd({1.0, 1.0}), 7);
    Environment e;
    e.id = "any";
    e.x0 = vecd({0.0});
    e.avoid = TimeVaryingSet::constant(7, SetExpr::empty());
    e.reach = TimeVaryingSet::constant(7, SetExpr::all());

    Rng rng(99);
    const Controller c = scheme.sample(e, rng);
    CHECK(c.descriptor().rfind("useq(u=", 0) == 0);
    for (int t = 0; t < 7; ++t) {
      const Eigen::VectorXd u = c.act(t, vecd({123.0}));
      CHECK(u(0) >= 0.0);
      CHECK(u(0) <= 1.0);
      CHECK(u(1) >= -1.0);
      CHECK(u(1) <= 1.0);
      // Open loop: the state argument is ignored.
      CHECK(u == c.act(t, vecd({-55.0})));
    }
    const Controller replay = scheme.reconstruct(c.descriptor(), e);
    for (int t = 0; t < 7; ++t) {
      CHECK(c.act(t, vecd({0.0})) == replay.act(t, vecd({0.0})));
    }

    CHECK_THROWS_AS(UniformSequenceScheme(vecd({1.0}), vecd({0.0}), 7),
                    ConfigError);
    CHECK_THROWS_AS(UniformSequenceScheme(vecd({0.0}), vecd({1.0}), 0),
                    ConfigError);
    CHECK_THROWS_AS(scheme.reconstruct("useq(u=1;2)", e), ConfigError);
  }

  TEST_CASE("finite sequences enumerate the scalar product set") {
    const auto seqs =
        FiniteSequenceScheme::scalar_product({-1.0, 0.0, 1.0}, 2);
    REQUIRE(seqs.size() == 9);
    for (const auto& s : seqs) {
      CHECK(s.rows() == 2);
      CHECK(s.cols() == 1);
    }
    const FiniteSequenceScheme scheme(seqs, 2);

    Environment e;
    e.id = "any";
    e.x0 = vecd({0.0});
    e.avoid = TimeVaryingSet::constant(2, SetExpr::empty());
    e.reach = TimeVaryingSet::constant(2, SetExpr::all());

    const auto all = scheme.enumerate(e);
    REQUIRE(all.has_value());
    REQUIRE(all->size() == 9);
    for (std::size_t i = 0; i < all->size(); ++i) {
      CHECK((*all)[i].descriptor() == "seq(i=" + std::to_string(i) + ")");
      for (int t = 0; t < 2; ++t) {
        CHECK((*all)[i].act(t, vecd({0.0}))(0) == seqs[i](t, 0));
      }
    }

    const Controller replay = scheme.reconstruct("seq(i=4)", e);
    CHECK(replay.act(0, vecd({0.0}))(0) == seqs[4](0, 0));
    CHECK_THROWS_AS(scheme.reconstruct("seq(i=9)", e), ConfigError);

    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
      CHECK_FALSE(scheme.sample(e, rng).is_null());
    }
  }

  TEST_CASE("least-restrictive scheme: band, filtering, and replay") {
    const KernelPtr kernel = test_kernel();
    const LeastRestrictiveScheme scheme(kernel, 100);
    CHECK(scheme.band() == doctest::Approx(kernel->cell_diagonal()));
    const LeastRestrictiveScheme wide(kernel, 100, 0.5);
    CHECK(wide.band() == doctest::Approx(0.5));

    Environment safe;
    safe.id = "hover";
    safe.x0 = vecd({1.5, 0.0});
    safe.avoid = TimeVaryingSet::constant(
        100,
        SetExpr::complement(SetExpr::box(vecd({0.5}), vecd({2.5}))).onto({0}));
    safe.reach = TimeVaryingSet::constant(100, SetExpr::all());

    Environment doomed = safe;
    doomed.id = "crash";
    doomed.x0 = vecd({0.52, -3.9});  // near the floor, falling fast

    Rng rng(7);
    REQUIRE(kernel->member(safe.x0));
    CHECK_FALSE(kernel->member(doomed.x0));
    const Controller c = scheme.sample(safe, rng);
    REQUIRE_FALSE(c.is_null());
    CHECK(c.descriptor().rfind("lr(levels=", 0) == 0);
    CHECK(scheme.sample(doomed, rng).is_null());

    // The sampled filter never leaves the safe corridor on the abstraction.
    const Trajectory traj = simulate(*kernel->model(), safe.x0, c, 100);
    CHECK(satisfies(traj, safe, 0.0));

    // Descriptor replay reproduces the rollout bit-exactly.
    const Controller replay = scheme.reconstruct(c.descriptor(), safe);
    const Trajectory again = simulate(*kernel->model(), safe.x0, replay, 100);
    CHECK(traj.states == again.states);
    CHECK(traj.controls == again.controls);

    CHECK_THROWS_AS(scheme.reconstruct("lr(levels=00)", safe), ConfigError);
  }

  TEST_CASE("least-restrictive permissible class is the raw open loop") {
    const KernelPtr kernel = test_kernel();
    const LeastRestrictiveScheme scheme(kernel, 100);

    Environment e;
    e.id = "raw";
    e.x0 = vecd({0.52, -3.9});  // outside the kernel: raw draws don't care
    e.avoid = TimeVaryingSet::constant(100, SetExpr::empty());
    e.reach = TimeVaryingSet::constant(100, SetExpr::all());

    Rng rng(11);
    const Controller raw = scheme.sample_permissible(e, rng);
    REQUIRE_FALSE(raw.is_null());
    CHECK(raw.descriptor().rfind("useq(u=", 0) == 0);
    for (int t = 0; t < 100; ++t) {
      const double u = raw.act(t, vecd({0.0, 0.0}))(0);
      CHECK(u >= 0.0);
      CHECK(u <= 1.0);
    }
    // The scheme's reconstruct dispatches open-loop descriptors too.
    const Controller replay = scheme.reconstruct(raw.descriptor(), e);
    for (int t = 0; t < 100; ++t) {
      CHECK(raw.act(t, vecd({0.0, 0.0})) == replay.act(t, vecd({0.0, 0.0})));
    }
  }

  TEST_CASE("feasible rejection sampling semantics") {
    // One-step integrator; catalog holds one violating and one satisfying
    // open-loop move.
    const LinearModel plant(mat({{1.0}}), mat({{1.0}}));
    Environment e;
    e.id = "gate";
    e.x0 = vecd({0.0});
    e.avoid = TimeVaryingSet::constant(1, SetExpr::empty());
    e.reach = TimeVaryingSet::constant(1, SetExpr::all())
                  .with_entry(1, SetExpr::ball(vecd({0.0}), 1.0));

    const FiniteSequenceScheme bad({mat({{5.0}})}, 1);
    const FiniteSequenceScheme good({mat({{0.0}})}, 1);

    Rng r1(1);
    const FeasibleDraw none = sample_feasible(bad, e, plant, 0.0, r1, 13);
    CHECK(none.controller.is_null());
    CHECK(none.attempts == 13);

    Rng r2(1);
    const FeasibleDraw hit = sample_feasible(good, e, plant, 0.5, r2, 13);
    CHECK_FALSE(hit.controller.is_null());
    CHECK(hit.attempts == 1);

    // A margin beyond the terminal ball radius rejects even the good move.
    Rng r3(1);
    CHECK(sample_feasible(good, e, plant, 1.25, r3, 4).controller.is_null());

    // Scheme-declared infeasibility short-circuits without burning the cap.
    const KernelPtr kernel = test_kernel();
    const LeastRestrictiveScheme lr(kernel, 100);
    Environment doomed;
    doomed.id = "crash";
    doomed.x0 = vecd({0.52, -3.9});
    doomed.avoid = TimeVaryingSet::constant(100, SetExpr::empty());
    doomed.reach = TimeVaryingSet::constant(100, SetExpr::all());
    Rng r4(1);
    const FeasibleDraw blocked =
        sample_feasible(lr, doomed, *kernel->model(), 0.0, r4, 50);
    CHECK(blocked.controller.is_null());
    CHECK(blocked.attempts == 1);

    Rng r5(1);
    CHECK_THROWS_AS(sample_feasible(good, e, plant, 0.0, r5, 0), ConfigError);
  }
}
