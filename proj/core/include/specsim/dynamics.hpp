#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <numbers>
#include <string>
#include <utility>

#include "specsim/spec.hpp"

namespace specsim {

// Deterministic discrete-time plant. Immutable after construction; step()
// assumes the control has already been clamped (the rollout engine clamps
// and records controls post-clamp).
class DynamicalModel {
 public:
  virtual ~DynamicalModel() = default;

  virtual int state_dim() const = 0;
  virtual int control_dim() const = 0;
  virtual Eigen::VectorXd step(const Eigen::VectorXd& x,
                               const Eigen::VectorXd& u, int t) const = 0;

  // Clamp a raw control to the model's admissible box; identity when the
  // model is unbounded.
  virtual Eigen::VectorXd clamp(const Eigen::VectorXd& u) const { return u; }

  // Per-coordinate admissible control box, when the model has one.
  virtual bool has_control_bounds() const { return false; }
  virtual std::pair<Eigen::VectorXd, Eigen::VectorXd> control_bounds() const;

  virtual std::string descriptor() const = 0;
};

using ModelPtr = std::shared_ptr<const DynamicalModel>;

// x' = A x + B u, unbounded controls.
class LinearModel : public DynamicalModel {
 public:
  LinearModel(Eigen::MatrixXd A, Eigen::MatrixXd B);

  int state_dim() const override { return static_cast<int>(A_.rows()); }
  int control_dim() const override { return static_cast<int>(B_.cols()); }
  Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                       int t) const override;
  std::string descriptor() const override;

  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::MatrixXd& B() const { return B_; }

 private:
  Eigen::MatrixXd A_, B_;
};

// Vertical flight: state (z, v), control u in [0,1],
// z' = z + T v,  v' = v + T (k u + g).
class QuadrotorVertical : public DynamicalModel {
 public:
  explicit QuadrotorVertical(double thrust_gain, double time_step = 0.01,
                             double gravity = -9.8);

  int state_dim() const override { return 2; }
  int control_dim() const override { return 1; }
  Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                       int t) const override;
  Eigen::VectorXd clamp(const Eigen::VectorXd& u) const override;
  bool has_control_bounds() const override { return true; }
  std::pair<Eigen::VectorXd, Eigen::VectorXd> control_bounds() const override;
  std::string descriptor() const override;

  double thrust_gain() const { return k_; }
  double time_step() const { return T_; }
  double gravity() const { return g_; }

 private:
  double k_, T_, g_;
};

// Kinematic bicycle: state (x, y, heading, speed), control (accel, steer).
// Explicit Euler at the configured step; speed saturates at [0, v_max],
// steering clamps to +-steer_max.
class KinematicBicycle : public DynamicalModel {
 public:
  KinematicBicycle(double wheelbase = 2.5, double time_step = 0.03,
                   double v_max = 10.0 / 3.6,
                   double steer_max = std::numbers::pi / 4,
                   double accel_max = 3.0);

  int state_dim() const override { return 4; }
  int control_dim() const override { return 2; }
  Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                       int t) const override;
  Eigen::VectorXd clamp(const Eigen::VectorXd& u) const override;
  bool has_control_bounds() const override { return true; }
  std::pair<Eigen::VectorXd, Eigen::VectorXd> control_bounds() const override;
  std::string descriptor() const override;

 private:
  double l_, T_, v_max_, steer_max_, accel_max_;
};

// A concrete policy u(t, x). The null controller stands in for "no feasible
// controller exists" and must never reach the rollout engine.
class Controller {
 public:
  using Policy = std::function<Eigen::VectorXd(int, const Eigen::VectorXd&)>;

  static Controller null_controller();
  Controller(Policy policy, std::string descriptor);

  bool is_null() const { return !policy_; }
  const std::string& descriptor() const { return descriptor_; }
  Eigen::VectorXd act(int t, const Eigen::VectorXd& x) const;

 private:
  Controller() = default;
  Policy policy_;
  std::string descriptor_ = "null";
};

// Rolls the policy out for `horizon` steps from x0. Controls are clamped
// before stepping and recorded post-clamp. Throws DivergenceError (carrying
// the step index) if a non-finite state appears.
Trajectory simulate(const DynamicalModel& model, const Eigen::VectorXd& x0,
                    const Controller& controller, int horizon);

// Descriptor-keyed constructor table so configs (and downstream users) can
// instantiate models by name.
class ModelRegistry {
 public:
  using Factory = std::function<ModelPtr(const nlohmann::json& params)>;

  static ModelRegistry& instance();

  void register_factory(const std::string& name, Factory factory);
  bool contains(const std::string& name) const;
  ModelPtr make(const std::string& name, const nlohmann::json& params) const;

 private:
  ModelRegistry();
  std::map<std::string, Factory> factories_;
};

}  // namespace specsim
