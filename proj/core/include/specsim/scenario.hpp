#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specsim/control.hpp"
#include "specsim/metrics.hpp"
#include "specsim/rng.hpp"
#include "specsim/spec.hpp"

namespace specsim {

// ---------------------------------------------------------------------------
// Environment spaces
// ---------------------------------------------------------------------------

// A distribution over environments. `sample` must consume randomness only
// from the given stream so that per-sample seeds replay exactly.
class EnvironmentSpace {
 public:
  virtual ~EnvironmentSpace() = default;
  virtual Environment sample(Rng& rng) const = 0;
  // Finite spaces can enumerate their members for exhaustive estimation.
  virtual std::optional<std::vector<Environment>> enumerate() const {
    return std::nullopt;
  }
  virtual std::string name() const = 0;
};

using EnvironmentSpacePtr = std::shared_ptr<const EnvironmentSpace>;

// Terminal reach target: a ball whose center coordinates are drawn uniformly
// per environment. Coordinates not listed in `varying` stay at `center`.
struct TerminalBall {
  Eigen::VectorXd center;       // base center (fixed coordinates)
  std::vector<int> varying;     // indices of center coordinates to draw
  Eigen::VectorXd lo, hi;       // per-varying-coordinate bounds
  double radius = 0.0;
  int step = -1;                // -1: final step of the horizon
};

// Environments with a box-uniform initial state, optional drawn terminal
// ball, and fixed avoid/reach structure everywhere else.
class BoxSampledSpace final : public EnvironmentSpace {
 public:
  BoxSampledSpace(std::string name, Eigen::VectorXd x0_lo,
                  Eigen::VectorXd x0_hi, int horizon, SetExpr avoid,
                  SetExpr reach_default,
                  std::optional<TerminalBall> terminal = std::nullopt);

  Environment sample(Rng& rng) const override;
  std::string name() const override { return name_; }

  const Eigen::VectorXd& x0_lo() const { return x0_lo_; }
  const Eigen::VectorXd& x0_hi() const { return x0_hi_; }

 private:
  std::string name_;
  Eigen::VectorXd x0_lo_, x0_hi_;
  int horizon_;
  SetExpr avoid_;
  SetExpr reach_default_;
  std::optional<TerminalBall> terminal_;
};

// A finite, explicitly listed set of environments (uniformly sampled).
class FiniteSpace final : public EnvironmentSpace {
 public:
  FiniteSpace(std::string name, std::vector<Environment> members);
  Environment sample(Rng& rng) const override;
  std::optional<std::vector<Environment>> enumerate() const override {
    return members_;
  }
  std::string name() const override { return name_; }

 private:
  std::string name_;
  std::vector<Environment> members_;
};

// ---------------------------------------------------------------------------
// Estimation
// ---------------------------------------------------------------------------

// Smallest N with N >= (2/eps) * (ln(1/beta) + 1). Both arguments must lie
// in (0, 1).
std::int64_t sample_size(double eps, double beta);

struct ScenarioConfig {
  MetricKind kind = MetricKind::SPEC;
  double eps = 0.01;
  double beta = 1e-6;
  std::uint64_t seed = 0;
  int threads = 0;            // 0: hardware concurrency
  int feasibility_cap = 100;  // rejection draws per sample
  // Adaptive tightening: feasible draws must beat the running maximum
  // (forces sequential evaluation).
  bool adaptive = false;
  std::optional<std::int64_t> sample_count;  // override N (testing only)
};

struct Estimate {
  double d_hat = 0.0;
  std::int64_t n = 0;
  std::int64_t argmax_index = -1;
  std::int64_t null_samples = 0;       // no feasible controller found
  std::int64_t violating_samples = 0;  // xi_S broke the spec
  double eps = 0.0;
  double beta = 0.0;
  MetricKind kind = MetricKind::SPEC;
  std::uint64_t seed = 0;
  // All evaluations when persist_samples; otherwise only the argmax and the
  // samples whose system rollout violated the spec.
  std::vector<SampleEvaluation> samples;
};

// Draws N = sample_size(eps, beta) environment/controller pairs and returns
// the empirical maximum distance. Per-sample streams are split from the
// master seed, so results are identical for any thread count.
Estimate estimate(const ScenarioConfig& config, const EnvironmentSpace& space,
                  const ControllerScheme& scheme, const DynamicalModel& system,
                  const DynamicalModel& abstraction,
                  const NormConfig& norm_config, bool persist_samples = false);

// Exhaustive variant: walks the full (environment, controller) product of a
// finite space and an enumerable scheme. Infeasible controllers are skipped;
// an environment with no feasible controller contributes a null sample.
Estimate estimate_exhaustive(MetricKind kind, const EnvironmentSpace& space,
                             const ControllerScheme& scheme,
                             const DynamicalModel& system,
                             const DynamicalModel& abstraction,
                             const NormConfig& norm_config,
                             double feasibility_margin = 0.0);

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationResult {
  std::int64_t n = 0;
  std::int64_t events = 0;   // xi_M satisfied at margin d_hat, xi_S violated
  double fraction = 0.0;
  double d_hat = 0.0;
};

// Draws a fresh batch and counts how often the tightened abstraction verdict
// disagrees with the system: xi_M |= phi(e; d_hat) while xi_S |/= phi(e).
// With d_hat from `estimate` at (eps, beta), the fraction should not exceed
// eps except with probability beta.
ValidationResult validate_guarantee(double d_hat, std::int64_t n,
                                    std::uint64_t seed,
                                    const EnvironmentSpace& space,
                                    const ControllerScheme& scheme,
                                    const DynamicalModel& system,
                                    const DynamicalModel& abstraction,
                                    const NormConfig& norm_config,
                                    int feasibility_cap = 100, int threads = 0);

// Fraction of environments (over `n` draws) whose abstraction rollout under
// a feasible controller stays clear of the spec at margin d. Useful for
// reporting how conservative a margin is.
double estimate_safe_env_fraction(double d, std::int64_t n, std::uint64_t seed,
                                  const EnvironmentSpace& space,
                                  const ControllerScheme& scheme,
                                  const DynamicalModel& abstraction,
                                  const NormConfig& norm_config,
                                  int feasibility_cap = 100, int threads = 0);

}  // namespace specsim
