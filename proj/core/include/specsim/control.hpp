#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "specsim/dynamics.hpp"
#include "specsim/reach.hpp"
#include "specsim/rng.hpp"
#include "specsim/spec.hpp"

namespace specsim {

struct DareResult {
  Eigen::MatrixXd P;  // fixed point of the Riccati map
  Eigen::MatrixXd K;  // (R + B'PB)^-1 B'PA
  double residual = 0.0;
  int iterations = 0;
  double closed_loop_radius = 0.0;  // spectral radius of A - BK, < 1
};

// Discrete-time algebraic Riccati equation by fixed-point iteration from
// P0 = Q. Throws RuntimeFailure when the iteration does not converge within
// the cap or the resulting closed loop is not stable.
DareResult solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                      const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                      double tol = 1e-10, int max_iterations = 100000);

// A samplable family of controllers. Sampling is deterministic given the
// rng; descriptors reconstruct the sampled controller given the scheme and
// the environment, so every run record can be replayed.
class ControllerScheme {
 public:
  virtual ~ControllerScheme() = default;

  virtual Controller sample(const Environment& e, Rng& rng) const = 0;
  virtual Controller reconstruct(const std::string& descriptor,
                                 const Environment& e) const = 0;

  // Draw from the underlying permissible class U rather than the scheme's
  // own (possibly safety-filtered) distribution. Raw distance estimates use
  // this; by default the two coincide.
  virtual Controller sample_permissible(const Environment& e, Rng& rng) const {
    return sample(e, rng);
  }

  // Declares that the feasible sets at margins d1 > d2 nest:
  // every controller feasible at d1 is feasible at d2.
  virtual bool feasibility_monotone() const { return true; }

  // Finite schemes can enumerate every controller for an environment.
  virtual std::optional<std::vector<Controller>> enumerate(
      [[maybe_unused]] const Environment& e) const {
    return std::nullopt;
  }

  virtual std::string name() const = 0;
};

using SchemePtr = std::shared_ptr<const ControllerScheme>;

// LQR tracking family on a linear abstraction: draws the state penalty q
// log-uniformly from [q_lo, q_hi], solves the Riccati equation with Q = qI,
// R = I, reads the tracking target x* from the environment's terminal reach
// ball, and computes the feedforward from the steady-state equation
// (I - A) x* = B u_ff by least squares. u(t, x) = u_ff - K (x - x*).
class LqrScheme : public ControllerScheme {
 public:
  LqrScheme(std::shared_ptr<const LinearModel> abstraction, double q_lo,
            double q_hi);

  Controller sample(const Environment& e, Rng& rng) const override;
  Controller reconstruct(const std::string& descriptor,
                         const Environment& e) const override;
  std::string name() const override { return "lqr"; }

  // The concrete member for a given penalty (exposed for tests/replay).
  Controller controller_for(double q, const Environment& e) const;

 private:
  std::shared_ptr<const LinearModel> abstraction_;
  double q_lo_, q_hi_;
};

// Open-loop sequences with each control coordinate drawn i.i.d. uniformly
// from the model's admissible box at every step.
class UniformSequenceScheme : public ControllerScheme {
 public:
  UniformSequenceScheme(Eigen::VectorXd lo, Eigen::VectorXd hi, int horizon);

  Controller sample(const Environment& e, Rng& rng) const override;
  Controller reconstruct(const std::string& descriptor,
                         const Environment& e) const override;
  std::string name() const override { return "uniform-sequence"; }

  Controller controller_for(const Eigen::MatrixXd& sequence) const;

 private:
  Eigen::VectorXd lo_, hi_;
  int horizon_;
};

// A finite catalog of open-loop sequences, drawn uniformly; enumerable, so
// estimators can walk the whole family.
class FiniteSequenceScheme : public ControllerScheme {
 public:
  FiniteSequenceScheme(std::vector<Eigen::MatrixXd> sequences, int horizon);

  Controller sample(const Environment& e, Rng& rng) const override;
  Controller reconstruct(const std::string& descriptor,
                         const Environment& e) const override;
  std::optional<std::vector<Controller>> enumerate(
      const Environment& e) const override;
  std::string name() const override { return "finite-sequence"; }

  // All length-H sequences over the given scalar levels (m = 1).
  static std::vector<Eigen::MatrixXd> scalar_product(
      const std::vector<double>& levels, int horizon);

 private:
  Controller controller_for(std::size_t index) const;
  std::vector<Eigen::MatrixXd> sequences_;
  int horizon_;
};

// Least-restrictive safety family backed by a viability kernel on the
// abstraction: while the kernel value at the current state clears the
// safety band the controller plays a pre-drawn uniform random level from
// the kernel's discretized control set; inside the band it plays the
// kernel's one-step-lookahead safe action. Environments starting outside
// the kernel get the null controller immediately.
class LeastRestrictiveScheme : public ControllerScheme {
 public:
  LeastRestrictiveScheme(KernelPtr kernel, int horizon,
                         std::optional<double> band_override = std::nullopt);

  Controller sample(const Environment& e, Rng& rng) const override;
  Controller reconstruct(const std::string& descriptor,
                         const Environment& e) const override;
  // The permissible class behind the filter: open-loop sequences drawn
  // uniformly from the model's admissible box.
  Controller sample_permissible(const Environment& e, Rng& rng) const override;
  std::string name() const override { return "least-restrictive"; }

  double band() const { return band_; }
  const KernelPtr& kernel() const { return kernel_; }

 private:
  Controller controller_for(std::vector<int> level_indices) const;
  KernelPtr kernel_;
  int horizon_;
  double band_;
  std::shared_ptr<const UniformSequenceScheme> raw_;
};

// Draws from the scheme until the abstraction rollout satisfies the
// specification tightened by `margin`, up to `cap` attempts. Exhaustion and
// scheme-declared infeasibility both yield the null controller (modeled
// outcome, not an error). attempts counts scheme draws consumed.
struct FeasibleDraw {
  Controller controller = Controller::null_controller();
  int attempts = 0;
};

FeasibleDraw sample_feasible(const ControllerScheme& scheme,
                             const Environment& e,
                             const DynamicalModel& abstraction, double margin,
                             Rng& rng, int cap, Norm norm = Norm::Euclidean);

}  // namespace specsim
