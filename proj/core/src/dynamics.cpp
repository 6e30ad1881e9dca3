#include "specsim/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "specsim/errors.hpp"
#include "specsim/serialize.hpp"

namespace specsim {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::VectorXd> DynamicalModel::control_bounds()
    const {
  throw ConfigError("model '" + descriptor() +
                    "' has unbounded controls; no control box to sample");
}

LinearModel::LinearModel(Eigen::MatrixXd A, Eigen::MatrixXd B)
    : A_(std::move(A)), B_(std::move(B)) {
  if (A_.rows() != A_.cols()) throw ConfigError("linear model: A must be square");
  if (B_.rows() != A_.rows()) {
    throw ConfigError("linear model: B row count must match A");
  }
  if (B_.cols() < 1) throw ConfigError("linear model: B needs >= 1 column");
}

Eigen::VectorXd LinearModel::step(const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& u, int) const {
  return A_ * x + B_ * u;
}

std::string LinearModel::descriptor() const {
  std::ostringstream os;
  os << "linear(n=" << state_dim() << ",m=" << control_dim() << ")";
  return os.str();
}

QuadrotorVertical::QuadrotorVertical(double thrust_gain, double time_step,
                                     double gravity)
    : k_(thrust_gain), T_(time_step), g_(gravity) {
  if (!(thrust_gain > 0.0)) {
    throw ConfigError("quadrotor: thrust gain must be > 0");
  }
  if (!(time_step > 0.0)) throw ConfigError("quadrotor: time step must be > 0");
}

Eigen::VectorXd QuadrotorVertical::step(const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& u, int) const {
  Eigen::VectorXd next(2);
  next[0] = x[0] + T_ * x[1];
  next[1] = x[1] + T_ * (k_ * u[0] + g_);
  return next;
}

Eigen::VectorXd QuadrotorVertical::clamp(const Eigen::VectorXd& u) const {
  Eigen::VectorXd c(1);
  c[0] = std::min(1.0, std::max(0.0, u[0]));
  return c;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> QuadrotorVertical::control_bounds()
    const {
  Eigen::VectorXd lo(1), hi(1);
  lo[0] = 0.0;
  hi[0] = 1.0;
  return {lo, hi};
}

std::string QuadrotorVertical::descriptor() const {
  return "quadrotor-vertical(k=" + fmt(k_) + ",T=" + fmt(T_) +
         ",g=" + fmt(g_) + ")";
}

KinematicBicycle::KinematicBicycle(double wheelbase, double time_step,
                                   double v_max, double steer_max,
                                   double accel_max)
    : l_(wheelbase),
      T_(time_step),
      v_max_(v_max),
      steer_max_(steer_max),
      accel_max_(accel_max) {
  if (!(wheelbase > 0.0)) throw ConfigError("bicycle: wheelbase must be > 0");
  if (!(time_step > 0.0)) throw ConfigError("bicycle: time step must be > 0");
  if (!(v_max > 0.0)) throw ConfigError("bicycle: v_max must be > 0");
}

Eigen::VectorXd KinematicBicycle::step(const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& u, int) const {
  const double v = x[3];
  Eigen::VectorXd next(4);
  next[0] = x[0] + T_ * v * std::cos(x[2]);
  next[1] = x[1] + T_ * v * std::sin(x[2]);
  next[2] = x[2] + T_ * (v / l_) * std::tan(u[1]);
  next[3] = std::min(v_max_, std::max(0.0, v + T_ * u[0]));
  return next;
}

Eigen::VectorXd KinematicBicycle::clamp(const Eigen::VectorXd& u) const {
  Eigen::VectorXd c(2);
  c[0] = std::min(accel_max_, std::max(-accel_max_, u[0]));
  c[1] = std::min(steer_max_, std::max(-steer_max_, u[1]));
  return c;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> KinematicBicycle::control_bounds()
    const {
  Eigen::VectorXd lo(2), hi(2);
  lo << -accel_max_, -steer_max_;
  hi << accel_max_, steer_max_;
  return {lo, hi};
}

std::string KinematicBicycle::descriptor() const {
  return "kinematic-bicycle(l=" + fmt(l_) + ",T=" + fmt(T_) + ")";
}

Controller Controller::null_controller() { return Controller(); }

Controller::Controller(Policy policy, std::string descriptor)
    : policy_(std::move(policy)), descriptor_(std::move(descriptor)) {
  if (!policy_) throw ConfigError("controller requires a policy");
}

Eigen::VectorXd Controller::act(int t, const Eigen::VectorXd& x) const {
  if (is_null()) {
    throw RuntimeFailure("the null controller cannot act; callers must treat "
                         "it as 'no feasible controller'");
  }
  return policy_(t, x);
}

Trajectory simulate(const DynamicalModel& model, const Eigen::VectorXd& x0,
                    const Controller& controller, int horizon) {
  if (controller.is_null()) {
    throw RuntimeFailure("simulate: refusing to roll out the null controller");
  }
  if (x0.size() != model.state_dim()) {
    throw ConfigError("simulate: x0 dimension " + std::to_string(x0.size()) +
                      " != model state dimension " +
                      std::to_string(model.state_dim()));
  }
  if (horizon < 0) throw ConfigError("simulate: horizon must be >= 0");

  Trajectory traj;
  traj.states.resize(horizon + 1, model.state_dim());
  traj.controls.resize(horizon, model.control_dim());
  traj.states.row(0) = x0;

  Eigen::VectorXd x = x0;
  for (int t = 0; t < horizon; ++t) {
    Eigen::VectorXd u = controller.act(t, x);
    if (u.size() != model.control_dim()) {
      throw ConfigError("simulate: control dimension mismatch at step " +
                        std::to_string(t));
    }
    u = model.clamp(u);
    traj.controls.row(t) = u;
    x = model.step(x, u, t);
    if (!x.allFinite()) {
      throw DivergenceError("simulate: non-finite state after step " +
                                std::to_string(t) + " under controller " +
                                controller.descriptor(),
                            t);
    }
    traj.states.row(t + 1) = x;
  }
  return traj;
}

ModelRegistry& ModelRegistry::instance() {
  static ModelRegistry registry;
  return registry;
}

void ModelRegistry::register_factory(const std::string& name,
                                     Factory factory) {
  if (factories_.count(name)) {
    throw ConfigError("model '" + name + "' already registered");
  }
  factories_[name] = std::move(factory);
}

bool ModelRegistry::contains(const std::string& name) const {
  return factories_.count(name) > 0;
}

ModelPtr ModelRegistry::make(const std::string& name,
                             const nlohmann::json& params) const {
  auto it = factories_.find(name);
  if (it == factories_.end()) {
    throw ConfigError("unknown model type '" + name + "'");
  }
  try {
    return it->second(params);
  } catch (const nlohmann::json::exception& err) {
    throw ConfigError("model '" + name + "': " + err.what());
  }
}

ModelRegistry::ModelRegistry() {
  factories_["linear"] = [](const nlohmann::json& p) -> ModelPtr {
    check_keys(p, {"type", "A", "B"}, "model linear");
    return std::make_shared<LinearModel>(matrix_from_json(p.at("A"), "A"),
                                         matrix_from_json(p.at("B"), "B"));
  };
  factories_["quadrotor-vertical"] = [](const nlohmann::json& p) -> ModelPtr {
    check_keys(p, {"type", "k", "T", "g"}, "model quadrotor-vertical");
    return std::make_shared<QuadrotorVertical>(
        p.at("k").get<double>(), p.value("T", 0.01), p.value("g", -9.8));
  };
  factories_["kinematic-bicycle"] = [](const nlohmann::json& p) -> ModelPtr {
    check_keys(p, {"type", "wheelbase", "T", "v_max", "steer_max", "accel_max"},
               "model kinematic-bicycle");
    return std::make_shared<KinematicBicycle>(
        p.value("wheelbase", 2.5), p.value("T", 0.03),
        p.value("v_max", 10.0 / 3.6), p.value("steer_max", std::numbers::pi / 4),
        p.value("accel_max", 3.0));
  };
}

}  // namespace specsim
