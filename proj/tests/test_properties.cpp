#include "doctest.h"
#include "property_checks.hpp"
#include "specsim/presets.hpp"

using namespace specsim;

// Fast smoke versions of the randomized property suites; the acceptance
// binary runs the same generators at full scale.
TEST_SUITE("properties") {
  TEST_CASE("per-sample metric ordering on the tracking preset") {
    const RunBundle b = load_preset("running-example");
    const props::Tally t = props::metric_ordering(b, 200, 33);
    CHECK(t.trials == 200);
    CHECK(t.failures == 0);
  }

  TEST_CASE("violation margin is bounded by trajectory distance") {
    const props::Tally t = props::synthetic_ordering(100, 17);
    CHECK(t.hits >= 100);
    CHECK(t.failures == 0);
  }

  TEST_CASE("satisfaction is monotone in the margin") {
    const props::Tally t = props::margin_monotonicity(200, 5);
    CHECK(t.trials == 200);
    CHECK(t.failures == 0);
  }

  TEST_CASE("margin-d satisfaction survives d-bounded perturbation") {
    const props::Tally t = props::distance_implication(150, 29);
    CHECK(t.hits >= 150);
    CHECK(t.failures == 0);
  }

  TEST_CASE("riccati solutions verify on random stabilizable pairs") {
    const props::DareTally t = props::dare_random(150, 101);
    CHECK(t.trials == 150);
    CHECK(t.solved + t.rejected == 150);
    CHECK(t.solved >= 100);  // refusals (unstabilizable draws) stay rare
    CHECK(t.failures == 0);
    CHECK(t.max_residual <= 1e-9);
  }

  TEST_CASE("kernel margins nest") {
    CHECK(props::kernel_margin_nesting({0.0, 0.3}, 31, 31) == 0);
  }
}
