#pragma once

#include <Eigen/Dense>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "specsim/geometry.hpp"

namespace specsim {

// A schedule of sets over the discrete horizon {0..H}: a default set plus
// per-step overrides.
struct TimeVaryingSet {
  int horizon = 0;
  SetExpr default_set = SetExpr::all();
  std::map<int, SetExpr> entries;

  static TimeVaryingSet constant(int horizon, SetExpr s);
  TimeVaryingSet with_entry(int step, SetExpr s) const;

  const SetExpr& at(int t) const;
};

// One reach-avoid environment: initial state, an avoid schedule A(t), a
// reach schedule R(t), and an opaque parameter bag carried into run records.
struct Environment {
  std::string id;
  Eigen::VectorXd x0;
  TimeVaryingSet avoid;
  TimeVaryingSet reach;
  nlohmann::json params = nlohmann::json::object();

  int horizon() const { return avoid.horizon; }
  void validate() const;  // avoid.H == reach.H, etc.
};

// Time-indexed rollout: states has H+1 rows, controls has H rows (recorded
// after clamping).
struct Trajectory {
  Eigen::MatrixXd states;    // (H+1) x state_dim
  Eigen::MatrixXd controls;  // H x control_dim

  int horizon() const { return static_cast<int>(states.rows()) - 1; }
};

// Norm used for trajectory distances, with an optional coordinate subset
// (e.g. the vertical-flight study measures z only).
struct NormConfig {
  Norm norm = Norm::Euclidean;
  std::vector<int> coords;  // empty = all coordinates
};

// True iff the trajectory meets the specification tightened by margin d:
// for every t, the state is strictly farther than d from the avoid set
// (h(x, A(t)) > d) and inside the reach set with margin d (h(x, R(t)) <= -d).
// d = 0 gives the plain specification. Boundary ties resolve toward
// violation on the avoid side and toward membership on the reach side.
bool satisfies(const Trajectory& traj, const Environment& e, double margin,
               Norm norm = Norm::Euclidean);

// The abstraction trajectory's smallest safety margin across the horizon,
// counted only when the system violated the plain specification (otherwise
// 0). Steps where A(t) is empty or R(t) is everything contribute +infinity
// and so never bind.
double margin_of_violation(const Trajectory& traj_M, bool system_violated,
                           const Environment& e, Norm norm = Norm::Euclidean);

// max over t of || xi_S(t) - xi_M(t) || restricted to coords.
double sup_trajectory_distance(const Trajectory& traj_S,
                               const Trajectory& traj_M,
                               const NormConfig& norm_config);

// CSV export, one row per step: t, x..., u... (controls blank on the final
// row, which has no control).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace specsim
