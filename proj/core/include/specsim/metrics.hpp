#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "specsim/dynamics.hpp"
#include "specsim/spec.hpp"

namespace specsim {

// The four per-sample distances:
//   SSM            sup-norm trajectory distance over raw scheme draws
//   SSM_FEASIBLE   the same distance, but over feasible draws only
//   SSM_FALSIFYING SSM_FEASIBLE zeroed when the system satisfied the spec
//   SPEC           the abstraction's margin of violation (zero when the
//                  system satisfied)
enum class MetricKind { SSM, SSM_FEASIBLE, SSM_FALSIFYING, SPEC };

std::string to_string(MetricKind kind);
MetricKind metric_from_string(const std::string& s);

// True for the kinds whose controllers come from rejection sampling over
// the feasible set (everything except raw SSM).
bool uses_feasible_sampling(MetricKind kind);

struct SampleEvaluation {
  std::int64_t index = -1;
  std::uint64_t seed = 0;
  std::string env_id;
  std::string controller = "null";  // descriptor; "null" for u_phi
  bool is_null = true;
  int attempts = 0;  // rejection-sampling draws consumed (0 for raw kinds)
  std::optional<bool> sat_M;  // absent on null-controller samples
  std::optional<bool> sat_S;
  double d = 0.0;
  bool has_trajectories = false;
  Trajectory traj_S, traj_M;  // kept when persisting or when xi_S violated
};

// Rolls the controller out on both models and computes the sample distance
// for the chosen metric. Null controllers yield d = 0 without rollouts.
SampleEvaluation evaluate_sample(MetricKind kind, const Environment& e,
                                 const Controller& u,
                                 const DynamicalModel& system,
                                 const DynamicalModel& abstraction,
                                 const NormConfig& norm_config,
                                 bool keep_trajectories = false);

}  // namespace specsim
