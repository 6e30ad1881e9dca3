#include "specsim/spec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "specsim/errors.hpp"

namespace specsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TimeVaryingSet TimeVaryingSet::constant(int horizon, SetExpr s) {
  if (horizon < 0) throw ConfigError("horizon must be >= 0");
  TimeVaryingSet tv;
  tv.horizon = horizon;
  tv.default_set = std::move(s);
  return tv;
}

TimeVaryingSet TimeVaryingSet::with_entry(int step, SetExpr s) const {
  if (step < 0 || step > horizon) {
    throw ConfigError("time-varying set entry at step " +
                      std::to_string(step) + " outside horizon 0.." +
                      std::to_string(horizon));
  }
  TimeVaryingSet tv = *this;
  tv.entries[step] = std::move(s);
  return tv;
}

const SetExpr& TimeVaryingSet::at(int t) const {
  if (t < 0 || t > horizon) {
    throw ConfigError("time-varying set queried at step " + std::to_string(t) +
                      " outside horizon 0.." + std::to_string(horizon));
  }
  auto it = entries.find(t);
  return it == entries.end() ? default_set : it->second;
}

void Environment::validate() const {
  if (avoid.horizon != reach.horizon) {
    throw ConfigError("environment '" + id +
                      "': avoid and reach horizons differ");
  }
  if (x0.size() == 0) {
    throw ConfigError("environment '" + id + "': empty initial state");
  }
}

bool satisfies(const Trajectory& traj, const Environment& e, double margin,
               Norm norm) {
  if (margin < 0.0) throw ConfigError("specification margin must be >= 0");
  if (traj.horizon() != e.horizon()) {
    throw ConfigError("satisfies: trajectory horizon " +
                      std::to_string(traj.horizon()) +
                      " != environment horizon " +
                      std::to_string(e.horizon()));
  }
  const int H = traj.horizon();
  for (int t = 0; t <= H; ++t) {
    const Eigen::VectorXd x = traj.states.row(t);
    const double h_avoid = signed_distance(x, e.avoid.at(t), norm);
    if (!(h_avoid > margin)) return false;  // NaN-safe: NaN fails
    const double h_reach = signed_distance(x, e.reach.at(t), norm);
    if (!(h_reach <= -margin)) return false;
  }
  return true;
}

double margin_of_violation(const Trajectory& traj_M, bool system_violated,
                           const Environment& e, Norm norm) {
  if (!system_violated) return 0.0;
  if (traj_M.horizon() != e.horizon()) {
    throw ConfigError("margin_of_violation: horizon mismatch");
  }
  const int H = traj_M.horizon();
  double m = kInf;
  for (int t = 0; t <= H; ++t) {
    const Eigen::VectorXd x = traj_M.states.row(t);
    m = std::min(m, signed_distance(x, e.avoid.at(t), norm));
    m = std::min(m, -signed_distance(x, e.reach.at(t), norm));
  }
  return m;
}

double sup_trajectory_distance(const Trajectory& traj_S,
                               const Trajectory& traj_M,
                               const NormConfig& norm_config) {
  if (traj_S.horizon() != traj_M.horizon()) {
    throw ConfigError("sup_trajectory_distance: horizon mismatch");
  }
  if (traj_S.states.cols() != traj_M.states.cols()) {
    throw ConfigError("sup_trajectory_distance: state dimension mismatch");
  }
  double best = 0.0;
  for (int t = 0; t <= traj_S.horizon(); ++t) {
    Eigen::VectorXd diff = traj_S.states.row(t) - traj_M.states.row(t);
    if (!norm_config.coords.empty()) {
      Eigen::VectorXd sub(static_cast<Eigen::Index>(norm_config.coords.size()));
      for (std::size_t i = 0; i < norm_config.coords.size(); ++i) {
        const int c = norm_config.coords[i];
        if (c < 0 || c >= diff.size()) {
          throw ConfigError("sup_trajectory_distance: coord out of range");
        }
        sub[static_cast<Eigen::Index>(i)] = diff[c];
      }
      diff.swap(sub);
    }
    const double v = norm_config.norm == Norm::Euclidean
                         ? diff.norm()
                         : diff.cwiseAbs().maxCoeff();
    best = std::max(best, v);
  }
  return best;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const int H = traj.horizon();
  const int n = static_cast<int>(traj.states.cols());
  const int m = static_cast<int>(traj.controls.cols());
  os << "t";
  for (int j = 0; j < n; ++j) os << ",x" << j;
  for (int j = 0; j < m; ++j) os << ",u" << j;
  os << "\n";
  char buf[64];
  for (int t = 0; t <= H; ++t) {
    os << t;
    for (int j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", traj.states(t, j));
      os << ',' << buf;
    }
    for (int j = 0; j < m; ++j) {
      os << ',';
      if (t < H) {
        std::snprintf(buf, sizeof(buf), "%.17g", traj.controls(t, j));
        os << buf;
      }
    }
    os << "\n";
  }
}

}  // namespace specsim
