#include "specsim/reach.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include "specsim/errors.hpp"
#include "specsim/parallel.hpp"

namespace specsim {

Grid2D Grid2D::make(double lo0, double hi0, int n0, double lo1, double hi1,
                    int n1) {
  if (n0 < 2 || n1 < 2) throw ConfigError("grid needs >= 2 nodes per axis");
  if (!(hi0 > lo0) || !(hi1 > lo1)) {
    throw ConfigError("grid bounds must satisfy lo < hi");
  }
  Grid2D g;
  g.lo0 = lo0;
  g.hi0 = hi0;
  g.lo1 = lo1;
  g.hi1 = hi1;
  g.n0 = n0;
  g.n1 = n1;
  g.values = Eigen::MatrixXd::Zero(n0, n1);
  return g;
}

double Grid2D::cell_diagonal() const { return std::hypot(step0(), step1()); }

bool Grid2D::in_bounds(double x0, double x1) const {
  return x0 >= lo0 && x0 <= hi0 && x1 >= lo1 && x1 <= hi1;
}

double Grid2D::interp(double x0, double x1, double off_value) const {
  if (!in_bounds(x0, x1)) return off_value;
  double fi = (x0 - lo0) / step0();
  double fj = (x1 - lo1) / step1();
  int i = std::min(static_cast<int>(fi), n0 - 2);
  int j = std::min(static_cast<int>(fj), n1 - 2);
  i = std::max(i, 0);
  j = std::max(j, 0);
  const double fz = fi - i;
  const double fv = fj - j;
  return values(i, j) * (1 - fz) * (1 - fv) + values(i + 1, j) * fz * (1 - fv) +
         values(i, j + 1) * (1 - fz) * fv + values(i + 1, j + 1) * fz * fv;
}

SafetyKernel::SafetyKernel(Grid2D grid, ModelPtr model,
                           std::vector<Eigen::VectorXd> controls, int horizon,
                           double margin, double off_value,
                           Eigen::MatrixXi argmax)
    : grid_(std::move(grid)),
      model_(std::move(model)),
      controls_(std::move(controls)),
      horizon_(horizon),
      margin_(margin),
      off_value_(off_value),
      argmax_(std::move(argmax)) {}

double SafetyKernel::value(const Eigen::VectorXd& x) const {
  return grid_.interp(x[0], x[1], off_value_);
}

bool SafetyKernel::member(const Eigen::VectorXd& x) const {
  if (!grid_.in_bounds(x[0], x[1])) {
    if (!warned_oob_.exchange(true)) {
      std::cerr << "[specsim] warning: kernel membership queried outside the "
                   "grid at ("
                << x[0] << ", " << x[1] << "); treating as unsafe\n";
    }
    return false;
  }
  return value(x) >= 0.0;
}

const Eigen::VectorXd& SafetyKernel::safe_action(
    const Eigen::VectorXd& x) const {
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_idx = 0;
  for (std::size_t c = 0; c < controls_.size(); ++c) {
    const Eigen::VectorXd next = model_->step(x, controls_[c], 0);
    const double v = grid_.interp(next[0], next[1], off_value_);
    if (v > best) {
      best = v;
      best_idx = c;
    }
  }
  return controls_[best_idx];
}

SafetyKernel compute_kernel(ModelPtr model, const SetExpr& avoid,
                            double margin, const KernelGridSpec& spec,
                            const std::vector<Eigen::VectorXd>& controls,
                            int horizon, Norm norm, unsigned threads) {
  if (!model) throw ConfigError("compute_kernel: null model");
  if (model->state_dim() != 2) {
    throw ConfigError("compute_kernel: needs a 2-D state model, got " +
                      std::to_string(model->state_dim()) + "-D");
  }
  if (controls.empty()) throw ConfigError("compute_kernel: empty control set");
  if (horizon < 0) throw ConfigError("compute_kernel: horizon must be >= 0");
  if (margin < 0.0) throw ConfigError("compute_kernel: margin must be >= 0");

  Grid2D grid = Grid2D::make(spec.lo0, spec.hi0, spec.n0, spec.lo1, spec.hi1,
                             spec.n1);
  const int n0 = grid.n0, n1 = grid.n1;

  // Stage margin m(x) = h(x, avoid) - d at the nodes.
  Eigen::MatrixXd m(n0, n1);
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      Eigen::VectorXd x(2);
      x << grid.node0(i), grid.node1(j);
      m(i, j) = signed_distance(x, avoid, norm) - margin;
    }
  }
  if (!m.allFinite()) {
    throw ConfigError("compute_kernel: avoid set gives non-finite margins on "
                      "the grid (is it empty or everything?)");
  }
  const double off_value = m.minCoeff() - 1.0;  // definitively unsafe, finite

  // Precompute each node's successor under each control once; the dynamics
  // are time-invariant for every model this solver accepts.
  const std::size_t nc = controls.size();
  std::vector<Eigen::MatrixXd> succ0(nc), succ1(nc);
  bool left_grid = false;
  for (std::size_t c = 0; c < nc; ++c) {
    succ0[c].resize(n0, n1);
    succ1[c].resize(n0, n1);
    for (int i = 0; i < n0; ++i) {
      for (int j = 0; j < n1; ++j) {
        Eigen::VectorXd x(2);
        x << grid.node0(i), grid.node1(j);
        const Eigen::VectorXd next = model->step(x, controls[c], 0);
        succ0[c](i, j) = next[0];
        succ1[c](i, j) = next[1];
        left_grid = left_grid || !grid.in_bounds(next[0], next[1]);
      }
    }
  }
  if (left_grid) {
    static std::atomic<bool> warned{false};
    if (!warned.exchange(true)) {
      std::cerr << "[specsim] note: some successors leave the kernel grid and "
                   "are treated as unsafe\n";
    }
  }

  grid.values = m;
  Eigen::MatrixXd next_values(n0, n1);
  for (int sweep = 0; sweep < horizon; ++sweep) {
    const Grid2D& current = grid;
    parallel_for(static_cast<std::size_t>(n0), threads, [&](std::size_t row) {
      const int i = static_cast<int>(row);
      for (int j = 0; j < n1; ++j) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < nc; ++c) {
          best = std::max(best, current.interp(succ0[c](i, j), succ1[c](i, j),
                                               off_value));
        }
        next_values(i, j) = std::min(m(i, j), best);
      }
    });
    grid.values.swap(next_values);
  }

  // Store the per-node one-step argmax against the converged values.
  Eigen::MatrixXi argmax(n0, n1);
  parallel_for(static_cast<std::size_t>(n0), threads, [&](std::size_t row) {
    const int i = static_cast<int>(row);
    for (int j = 0; j < n1; ++j) {
      double best = -std::numeric_limits<double>::infinity();
      int best_idx = 0;
      for (std::size_t c = 0; c < nc; ++c) {
        const double v =
            grid.interp(succ0[c](i, j), succ1[c](i, j), off_value);
        if (v > best) {
          best = v;
          best_idx = static_cast<int>(c);
        }
      }
      argmax(i, j) = best_idx;
    }
  });

  return SafetyKernel(std::move(grid), std::move(model), controls, horizon,
                      margin, off_value, std::move(argmax));
}

std::vector<Eigen::VectorXd> scalar_levels(double lo, double hi, int count) {
  if (count < 2) throw ConfigError("scalar_levels: need >= 2 levels");
  std::vector<Eigen::VectorXd> levels;
  levels.reserve(count);
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd u(1);
    u[0] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
    levels.push_back(u);
  }
  return levels;
}

void export_kernel_csv(std::ostream& os, const SafetyKernel& kernel) {
  const Grid2D& g = kernel.grid();
  os << "x0,x1,value\n";
  char buf[64];
  for (int i = 0; i < g.n0; ++i) {
    for (int j = 0; j < g.n1; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", g.node0(i));
      os << buf << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", g.node1(j));
      os << buf << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", g.values(i, j));
      os << buf << '\n';
    }
  }
}

Grid2D import_grid_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw RuntimeFailure("kernel CSV: empty input");
  std::vector<double> c0, c1, val;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    double v[3];
    for (int k = 0; k < 3; ++k) {
      if (!std::getline(row, cell, ',')) {
        throw RuntimeFailure("kernel CSV: expected 3 columns");
      }
      v[k] = std::stod(cell);
    }
    c0.push_back(v[0]);
    c1.push_back(v[1]);
    val.push_back(v[2]);
  }
  if (val.empty()) throw RuntimeFailure("kernel CSV: no rows");
  // Rows are x0-major: count distinct x1 values in the first block.
  int n1 = 1;
  while (n1 < static_cast<int>(val.size()) && c0[n1] == c0[0]) ++n1;
  if (val.size() % n1 != 0) {
    throw RuntimeFailure("kernel CSV: row count not divisible by column count");
  }
  const int n0 = static_cast<int>(val.size()) / n1;
  Grid2D g = Grid2D::make(c0.front(), c0.back(), n0, c1.front(),
                          c1[static_cast<std::size_t>(n1) - 1], n1);
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      g.values(i, j) = val[static_cast<std::size_t>(i) * n1 + j];
    }
  }
  return g;
}

long containment_violations(const Grid2D& inner, const Grid2D& outer) {
  if (inner.n0 != outer.n0 || inner.n1 != outer.n1) {
    throw ConfigError("containment: grids must have identical shape");
  }
  long bad = 0;
  for (int i = 0; i < inner.n0; ++i) {
    for (int j = 0; j < inner.n1; ++j) {
      if (inner.values(i, j) >= 0.0 && outer.values(i, j) < 0.0) ++bad;
    }
  }
  return bad;
}

}  // namespace specsim
