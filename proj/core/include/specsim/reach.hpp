#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <istream>
#include <memory>
#include <ostream>
#include <vector>

#include "specsim/dynamics.hpp"
#include "specsim/geometry.hpp"

namespace specsim {

// Regular 2-D node grid with bilinear interpolation. Queries outside the
// bounds return the caller-supplied off-grid value, so stored node values
// stay finite.
struct Grid2D {
  double lo0 = 0.0, hi0 = 1.0, lo1 = 0.0, hi1 = 1.0;
  int n0 = 2, n1 = 2;          // node counts per axis, >= 2
  Eigen::MatrixXd values;      // n0 x n1

  static Grid2D make(double lo0, double hi0, int n0, double lo1, double hi1,
                     int n1);

  double step0() const { return (hi0 - lo0) / (n0 - 1); }
  double step1() const { return (hi1 - lo1) / (n1 - 1); }
  double cell_diagonal() const;
  double node0(int i) const { return lo0 + step0() * i; }
  double node1(int j) const { return lo1 + step1() * j; }
  bool in_bounds(double x0, double x1) const;
  double interp(double x0, double x1, double off_value) const;
};

struct KernelGridSpec {
  double lo0 = 0.0, hi0 = 3.0;
  double lo1 = -4.0, hi1 = 4.0;
  int n0 = 201, n1 = 201;
};

// Discrete-time viability kernel for a 2-D model: the set of states from
// which some admissible control keeps the trajectory out of the avoid set
// (expanded by `margin`) for the whole horizon. values(i,j) is the optimal
// worst-case safety margin from node (i,j); the kernel is {V >= 0}.
class SafetyKernel {
 public:
  SafetyKernel(Grid2D grid, ModelPtr model,
               std::vector<Eigen::VectorXd> controls, int horizon,
               double margin, double off_value, Eigen::MatrixXi argmax);

  // The warn-once flag is not movable by default.
  SafetyKernel(SafetyKernel&& other) noexcept
      : grid_(std::move(other.grid_)),
        model_(std::move(other.model_)),
        controls_(std::move(other.controls_)),
        horizon_(other.horizon_),
        margin_(other.margin_),
        off_value_(other.off_value_),
        argmax_(std::move(other.argmax_)),
        warned_oob_(other.warned_oob_.load()) {}

  const Grid2D& grid() const { return grid_; }
  const ModelPtr& model() const { return model_; }
  const std::vector<Eigen::VectorXd>& controls() const { return controls_; }
  int horizon() const { return horizon_; }
  double margin() const { return margin_; }
  double off_value() const { return off_value_; }
  double cell_diagonal() const { return grid_.cell_diagonal(); }

  // Interpolated kernel value; off-grid states get off_value (unsafe).
  double value(const Eigen::VectorXd& x) const;

  // Membership with the boundary counted as safe; out-of-bounds states are
  // not members (a warning is logged once per kernel).
  bool member(const Eigen::VectorXd& x) const;

  // One-step-lookahead optimal safe control at x: argmax over the control
  // set of the successor's kernel value (first maximizer on ties).
  const Eigen::VectorXd& safe_action(const Eigen::VectorXd& x) const;

  // Per-node best control index (same lookahead evaluated at the nodes).
  const Eigen::MatrixXi& node_argmax() const { return argmax_; }

 private:
  Grid2D grid_;
  ModelPtr model_;
  std::vector<Eigen::VectorXd> controls_;
  int horizon_;
  double margin_;
  double off_value_;
  Eigen::MatrixXi argmax_;
  mutable std::atomic<bool> warned_oob_{false};
};

using KernelPtr = std::shared_ptr<const SafetyKernel>;

// Backward value iteration V_H = m, V_t = min(m, max_u V_{t+1}(f(x,u)))
// with m(x) = h(x, avoid) - margin and bilinear interpolation for off-grid
// successors (treated as unsafe via a finite floor value). Sweeps run in
// parallel over grid rows; the result is deterministic.
SafetyKernel compute_kernel(ModelPtr model, const SetExpr& avoid,
                            double margin, const KernelGridSpec& spec,
                            const std::vector<Eigen::VectorXd>& controls,
                            int horizon, Norm norm = Norm::Euclidean,
                            unsigned threads = 0);

// Evenly spaced scalar control levels spanning [lo, hi].
std::vector<Eigen::VectorXd> scalar_levels(double lo, double hi, int count);

// CSV rows (x0, x1, value) at node coordinates, header included, printed so
// a round-trip re-parse reproduces the values bit-exactly.
void export_kernel_csv(std::ostream& os, const SafetyKernel& kernel);
Grid2D import_grid_csv(std::istream& is);

// Number of cells where `inner` claims safety (V >= 0) but `outer` does not
// (V < 0). Grids must have identical shape. Zero means cellwise containment.
long containment_violations(const Grid2D& inner, const Grid2D& outer);

}  // namespace specsim
