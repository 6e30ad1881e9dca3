#include "specsim/metrics.hpp"

#include "specsim/errors.hpp"

namespace specsim {

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::SSM:
      return "ssm";
    case MetricKind::SSM_FEASIBLE:
      return "ssm-feasible";
    case MetricKind::SSM_FALSIFYING:
      return "ssm-falsifying";
    case MetricKind::SPEC:
      return "spec";
  }
  throw RuntimeFailure("unhandled metric kind");
}

MetricKind metric_from_string(const std::string& s) {
  if (s == "ssm") return MetricKind::SSM;
  if (s == "ssm-feasible") return MetricKind::SSM_FEASIBLE;
  if (s == "ssm-falsifying") return MetricKind::SSM_FALSIFYING;
  if (s == "spec") return MetricKind::SPEC;
  throw ConfigError("unknown metric '" + s +
                    "' (expected ssm, ssm-feasible, ssm-falsifying, or spec)");
}

bool uses_feasible_sampling(MetricKind kind) { return kind != MetricKind::SSM; }

SampleEvaluation evaluate_sample(MetricKind kind, const Environment& e,
                                 const Controller& u,
                                 const DynamicalModel& system,
                                 const DynamicalModel& abstraction,
                                 const NormConfig& norm_config,
                                 bool keep_trajectories) {
  SampleEvaluation out;
  out.env_id = e.id;
  out.controller = u.descriptor();
  out.is_null = u.is_null();
  if (u.is_null()) {
    // No feasible controller was found (or the least-restrictive scheme
    // rejected x0): the sample contributes zero.
    out.d = 0.0;
    return out;
  }

  Trajectory traj_S = simulate(system, e.x0, u, e.horizon());
  Trajectory traj_M = simulate(abstraction, e.x0, u, e.horizon());
  const bool sat_S = satisfies(traj_S, e, 0.0, norm_config.norm);
  const bool sat_M = satisfies(traj_M, e, 0.0, norm_config.norm);
  out.sat_S = sat_S;
  out.sat_M = sat_M;

  switch (kind) {
    case MetricKind::SSM:
    case MetricKind::SSM_FEASIBLE:
      out.d = sup_trajectory_distance(traj_S, traj_M, norm_config);
      break;
    case MetricKind::SSM_FALSIFYING:
      out.d = sat_S ? 0.0 : sup_trajectory_distance(traj_S, traj_M, norm_config);
      break;
    case MetricKind::SPEC:
      out.d = margin_of_violation(traj_M, !sat_S, e, norm_config.norm);
      break;
  }

  if (keep_trajectories || !sat_S) {
    out.traj_S = std::move(traj_S);
    out.traj_M = std::move(traj_M);
    out.has_trajectories = true;
  }
  return out;
}

}  // namespace specsim
