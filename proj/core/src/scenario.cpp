#include "specsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "specsim/errors.hpp"
#include "specsim/parallel.hpp"
#include "specsim/serialize.hpp"

namespace specsim {

// ---------------------------------------------------------------------------
// Environment spaces
// ---------------------------------------------------------------------------

BoxSampledSpace::BoxSampledSpace(std::string name, Eigen::VectorXd x0_lo,
                                 Eigen::VectorXd x0_hi, int horizon,
                                 SetExpr avoid, SetExpr reach_default,
                                 std::optional<TerminalBall> terminal)
    : name_(std::move(name)),
      x0_lo_(std::move(x0_lo)),
      x0_hi_(std::move(x0_hi)),
      horizon_(horizon),
      avoid_(std::move(avoid)),
      reach_default_(std::move(reach_default)),
      terminal_(std::move(terminal)) {
  if (x0_lo_.size() != x0_hi_.size()) {
    throw ConfigError("x0 bounds must have matching dimensions");
  }
  if ((x0_lo_.array() > x0_hi_.array()).any()) {
    throw ConfigError("x0 lower bound exceeds upper bound");
  }
  if (horizon_ <= 0) throw ConfigError("horizon must be positive");
  if (terminal_) {
    if (terminal_->lo.size() != static_cast<Eigen::Index>(terminal_->varying.size()) ||
        terminal_->hi.size() != static_cast<Eigen::Index>(terminal_->varying.size())) {
      throw ConfigError("terminal ball bounds must match varying coordinates");
    }
    if (terminal_->radius < 0.0) {
      throw ConfigError("terminal ball radius must be nonnegative");
    }
    if (terminal_->step > horizon_) {
      throw ConfigError("terminal ball step exceeds horizon");
    }
  }
}

Environment BoxSampledSpace::sample(Rng& rng) const {
  Environment e;
  e.id = name_;
  // Draw order is fixed (x0 coordinates, then terminal center coordinates)
  // and every coordinate consumes a draw even when its bounds coincide, so
  // a seed always reproduces the same environment.
  e.x0.resize(x0_lo_.size());
  for (Eigen::Index i = 0; i < x0_lo_.size(); ++i) {
    e.x0[i] = rng.uniform(x0_lo_[i], x0_hi_[i]);
  }
  e.params["x0"] = vector_to_json(e.x0);

  e.avoid = TimeVaryingSet::constant(horizon_, avoid_);
  e.reach = TimeVaryingSet::constant(horizon_, reach_default_);
  if (terminal_) {
    Eigen::VectorXd center = terminal_->center;
    for (std::size_t k = 0; k < terminal_->varying.size(); ++k) {
      center[terminal_->varying[k]] = rng.uniform(terminal_->lo[static_cast<Eigen::Index>(k)],
                                                  terminal_->hi[static_cast<Eigen::Index>(k)]);
    }
    const int step = terminal_->step < 0 ? horizon_ : terminal_->step;
    e.reach = e.reach.with_entry(step, SetExpr::ball(center, terminal_->radius));
    e.params["target_center"] = vector_to_json(center);
  }
  e.validate();
  return e;
}

FiniteSpace::FiniteSpace(std::string name, std::vector<Environment> members)
    : name_(std::move(name)), members_(std::move(members)) {
  if (members_.empty()) {
    throw ConfigError("finite environment space must not be empty");
  }
  for (const Environment& e : members_) e.validate();
}

Environment FiniteSpace::sample(Rng& rng) const {
  return members_[static_cast<std::size_t>(
      rng.uniform_int(static_cast<std::uint64_t>(members_.size())))];
}

// ---------------------------------------------------------------------------
// Estimation
// ---------------------------------------------------------------------------

std::int64_t sample_size(double eps, double beta) {
  if (!(eps > 0.0) || !(eps < 1.0)) {
    throw ConfigError("eps must lie in (0, 1)");
  }
  if (!(beta > 0.0) || !(beta < 1.0)) {
    throw ConfigError("beta must lie in (0, 1)");
  }
  const double bound = (2.0 / eps) * (std::log(1.0 / beta) + 1.0);
  return static_cast<std::int64_t>(std::ceil(bound));
}

namespace {

// Draws environment and controller from the per-sample stream and evaluates.
SampleEvaluation run_one(MetricKind kind, std::int64_t index,
                         std::uint64_t master_seed,
                         const EnvironmentSpace& space,
                         const ControllerScheme& scheme,
                         const DynamicalModel& system,
                         const DynamicalModel& abstraction,
                         const NormConfig& norm_config, double margin,
                         int feasibility_cap, bool keep_trajectories) {
  const std::uint64_t seed_i =
      split_seed(master_seed, static_cast<std::uint64_t>(index));
  Rng rng(seed_i);
  const Environment e = space.sample(rng);
  Controller u = Controller::null_controller();
  int attempts = 0;
  if (uses_feasible_sampling(kind)) {
    FeasibleDraw draw = sample_feasible(scheme, e, abstraction, margin, rng,
                                        feasibility_cap, norm_config.norm);
    u = std::move(draw.controller);
    attempts = draw.attempts;
  } else {
    u = scheme.sample_permissible(e, rng);
  }
  SampleEvaluation eval;
  try {
    eval = evaluate_sample(kind, e, u, system, abstraction, norm_config,
                           keep_trajectories);
  } catch (DivergenceError& err) {
    err.annotate_sample(index, seed_i);
    throw;
  }
  eval.index = index;
  eval.seed = seed_i;
  eval.attempts = attempts;
  return eval;
}

// Sequential reduction keeps argmax selection deterministic: ties go to the
// lowest sample index.
void reduce_into(Estimate& out, std::vector<SampleEvaluation> samples) {
  for (SampleEvaluation& s : samples) {
    if (s.is_null) ++out.null_samples;
    if (s.sat_S.has_value() && !*s.sat_S) ++out.violating_samples;
    if (out.argmax_index < 0 || s.d > out.d_hat) {
      out.d_hat = s.d;
      out.argmax_index = s.index;
    }
  }
  out.samples = std::move(samples);
}

}  // namespace

Estimate estimate(const ScenarioConfig& config, const EnvironmentSpace& space,
                  const ControllerScheme& scheme, const DynamicalModel& system,
                  const DynamicalModel& abstraction,
                  const NormConfig& norm_config, bool persist_samples) {
  if (config.adaptive && !uses_feasible_sampling(config.kind)) {
    throw ConfigError(
        "adaptive tightening requires a feasibility-based metric");
  }
  if (config.adaptive && !scheme.feasibility_monotone()) {
    throw ConfigError(
        "adaptive tightening requires a feasibility-monotone scheme");
  }
  if (config.feasibility_cap < 1) {
    throw ConfigError("feasibility cap must be at least 1");
  }
  const std::int64_t n =
      config.sample_count ? *config.sample_count
                          : sample_size(config.eps, config.beta);
  if (n < 1) throw ConfigError("sample count must be at least 1");

  Estimate out;
  out.n = n;
  out.eps = config.eps;
  out.beta = config.beta;
  out.kind = config.kind;
  out.seed = config.seed;

  std::vector<SampleEvaluation> samples(static_cast<std::size_t>(n));
  if (config.adaptive) {
    // The feasibility margin ratchets up to the running maximum, which makes
    // later samples strictly harder to satisfy; evaluation is sequential.
    double running = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      SampleEvaluation s =
          run_one(config.kind, i, config.seed, space, scheme, system,
                  abstraction, norm_config, running, config.feasibility_cap,
                  persist_samples);
      running = std::max(running, s.d);
      samples[static_cast<std::size_t>(i)] = std::move(s);
    }
  } else {
    parallel_for(n, config.threads, [&](std::int64_t i) {
      samples[static_cast<std::size_t>(i)] =
          run_one(config.kind, i, config.seed, space, scheme, system,
                  abstraction, norm_config, 0.0, config.feasibility_cap,
                  persist_samples);
    });
  }
  reduce_into(out, std::move(samples));
  if (!persist_samples) {
    // Keep violating samples (their trajectories feed the run artifacts) and
    // the argmax; drop the rest to bound memory.
    std::vector<SampleEvaluation> kept;
    for (SampleEvaluation& s : out.samples) {
      if (s.has_trajectories || s.index == out.argmax_index) {
        kept.push_back(std::move(s));
      }
    }
    out.samples = std::move(kept);
  }
  return out;
}

Estimate estimate_exhaustive(MetricKind kind, const EnvironmentSpace& space,
                             const ControllerScheme& scheme,
                             const DynamicalModel& system,
                             const DynamicalModel& abstraction,
                             const NormConfig& norm_config,
                             double feasibility_margin) {
  const auto envs = space.enumerate();
  if (!envs) {
    throw ConfigError("environment space '" + space.name() +
                      "' is not enumerable");
  }

  Estimate out;
  out.kind = kind;
  const bool feasible_only = uses_feasible_sampling(kind);
  std::int64_t index = 0;
  std::vector<SampleEvaluation> samples;
  for (const Environment& e : *envs) {
    const auto controllers = scheme.enumerate(e);
    if (!controllers) {
      throw ConfigError("controller scheme '" + scheme.name() +
                        "' is not enumerable");
    }
    bool any_feasible = false;
    for (const Controller& u : *controllers) {
      if (feasible_only) {
        const Trajectory traj_M = simulate(abstraction, e.x0, u, e.horizon());
        if (!satisfies(traj_M, e, feasibility_margin, norm_config.norm)) {
          continue;
        }
      }
      any_feasible = true;
      SampleEvaluation s =
          evaluate_sample(kind, e, u, system, abstraction, norm_config);
      s.index = index++;
      samples.push_back(std::move(s));
    }
    if (feasible_only && !any_feasible) {
      SampleEvaluation s = evaluate_sample(kind, e, Controller::null_controller(),
                                           system, abstraction, norm_config);
      s.index = index++;
      samples.push_back(std::move(s));
    }
  }
  out.n = index;
  reduce_into(out, std::move(samples));
  return out;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

ValidationResult validate_guarantee(double d_hat, std::int64_t n,
                                    std::uint64_t seed,
                                    const EnvironmentSpace& space,
                                    const ControllerScheme& scheme,
                                    const DynamicalModel& system,
                                    const DynamicalModel& abstraction,
                                    const NormConfig& norm_config,
                                    int feasibility_cap, int threads) {
  if (n < 1) throw ConfigError("validation batch size must be at least 1");
  if (d_hat < 0.0) throw ConfigError("margin must be nonnegative");
  ValidationResult out;
  out.n = n;
  out.d_hat = d_hat;
  std::vector<char> event(static_cast<std::size_t>(n), 0);
  parallel_for(n, threads, [&](std::int64_t i) {
    const std::uint64_t seed_i = split_seed(seed, static_cast<std::uint64_t>(i));
    Rng rng(seed_i);
    const Environment e = space.sample(rng);
    FeasibleDraw draw = sample_feasible(scheme, e, abstraction, 0.0, rng,
                                        feasibility_cap, norm_config.norm);
    if (draw.controller.is_null()) return;
    Trajectory traj_M;
    Trajectory traj_S;
    try {
      traj_M = simulate(abstraction, e.x0, draw.controller, e.horizon());
      traj_S = simulate(system, e.x0, draw.controller, e.horizon());
    } catch (DivergenceError& err) {
      err.annotate_sample(i, seed_i);
      throw;
    }
    // The event the scenario bound controls: the abstraction still clears
    // the spec after tightening by d_hat, yet the system violates it.
    if (satisfies(traj_M, e, d_hat, norm_config.norm) &&
        !satisfies(traj_S, e, 0.0, norm_config.norm)) {
      event[static_cast<std::size_t>(i)] = 1;
    }
  });
  for (char c : event) out.events += c;
  out.fraction = static_cast<double>(out.events) / static_cast<double>(n);
  return out;
}

double estimate_safe_env_fraction(double d, std::int64_t n, std::uint64_t seed,
                                  const EnvironmentSpace& space,
                                  const ControllerScheme& scheme,
                                  const DynamicalModel& abstraction,
                                  const NormConfig& norm_config,
                                  int feasibility_cap, int threads) {
  if (n < 1) throw ConfigError("batch size must be at least 1");
  std::vector<char> ok(static_cast<std::size_t>(n), 0);
  parallel_for(n, threads, [&](std::int64_t i) {
    Rng rng(split_seed(seed, static_cast<std::uint64_t>(i)));
    const Environment e = space.sample(rng);
    FeasibleDraw draw = sample_feasible(scheme, e, abstraction, d, rng,
                                        feasibility_cap, norm_config.norm);
    if (!draw.controller.is_null()) ok[static_cast<std::size_t>(i)] = 1;
  });
  std::int64_t count = 0;
  for (char c : ok) count += c;
  return static_cast<double>(count) / static_cast<double>(n);
}

}  // namespace specsim
