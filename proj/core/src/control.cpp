#include "specsim/control.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <sstream>

#include "specsim/errors.hpp"

namespace specsim {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Extracts the argument list of "name(args)" after verifying the name.
std::string descriptor_args(const std::string& descriptor,
                            const std::string& name) {
  const std::string prefix = name + "(";
  if (descriptor.rfind(prefix, 0) != 0 || descriptor.back() != ')') {
    throw ConfigError("descriptor '" + descriptor + "' is not a " + name +
                      " controller");
  }
  return descriptor.substr(prefix.size(),
                           descriptor.size() - prefix.size() - 1);
}

Eigen::MatrixXd parse_sequence(const std::string& text, int horizon) {
  std::vector<std::vector<double>> rows;
  std::istringstream steps(text);
  std::string step;
  while (std::getline(steps, step, ';')) {
    std::vector<double> row;
    std::istringstream cells(step);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (static_cast<int>(rows.size()) != horizon) {
    throw ConfigError("sequence descriptor has " +
                      std::to_string(rows.size()) + " steps, expected " +
                      std::to_string(horizon));
  }
  Eigen::MatrixXd seq(horizon, rows.empty() ? 0 : rows.front().size());
  for (int t = 0; t < horizon; ++t) {
    if (static_cast<Eigen::Index>(rows[t].size()) != seq.cols()) {
      throw ConfigError("sequence descriptor has ragged steps");
    }
    for (Eigen::Index j = 0; j < seq.cols(); ++j) seq(t, j) = rows[t][j];
  }
  return seq;
}

std::string encode_sequence(const Eigen::MatrixXd& seq) {
  std::string out;
  for (Eigen::Index t = 0; t < seq.rows(); ++t) {
    if (t) out += ';';
    for (Eigen::Index j = 0; j < seq.cols(); ++j) {
      if (j) out += ',';
      out += fmt(seq(t, j));
    }
  }
  return out;
}

Controller open_loop_controller(Eigen::MatrixXd sequence,
                                std::string descriptor) {
  const int horizon = static_cast<int>(sequence.rows());
  return Controller(
      [seq = std::move(sequence), horizon](int t, const Eigen::VectorXd&) {
        if (t < 0 || t >= horizon) {
          throw RuntimeFailure("open-loop controller queried at step " +
                               std::to_string(t) + " beyond its horizon");
        }
        return Eigen::VectorXd(seq.row(t));
      },
      std::move(descriptor));
}

constexpr char kLevelChars[] = "0123456789abcdef";

}  // namespace

DareResult solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                      const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                      double tol, int max_iterations) {
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  if (A.cols() != n) throw ConfigError("solve_dare: A must be square");
  if (B.rows() != n) throw ConfigError("solve_dare: B rows must match A");
  if (Q.rows() != n || Q.cols() != n) {
    throw ConfigError("solve_dare: Q must be n x n");
  }
  if (R.rows() != m || R.cols() != m) {
    throw ConfigError("solve_dare: R must be m x m");
  }

  auto riccati_map = [&](const Eigen::MatrixXd& P) -> Eigen::MatrixXd {
    const Eigen::MatrixXd BtPB = R + B.transpose() * P * B;
    const Eigen::MatrixXd K = BtPB.ldlt().solve(B.transpose() * P * A);
    return A.transpose() * P * A - A.transpose() * P * B * K + Q;
  };

  // Iterates are re-symmetrized: rounding during large transients (strongly
  // unstable A) otherwise drifts P off the symmetric manifold, after which
  // the LDLT solve — which reads a single triangle — answers for a different
  // matrix and the iteration can settle on a spurious fixed point.
  Eigen::MatrixXd P = 0.5 * (Q + Q.transpose());
  int iterations = 0;
  double diff = std::numeric_limits<double>::infinity();
  while (iterations < max_iterations) {
    const Eigen::MatrixXd mapped = riccati_map(P);
    const Eigen::MatrixXd next = 0.5 * (mapped + mapped.transpose());
    diff = (next - P).cwiseAbs().maxCoeff();
    P = next;
    ++iterations;
    if (diff <= tol) break;
  }
  if (diff > tol) {
    throw RuntimeFailure("solve_dare: no convergence within " +
                         std::to_string(max_iterations) +
                         " iterations (last delta " + fmt(diff) + ")");
  }

  DareResult result;
  result.P = P;
  result.K = (R + B.transpose() * P * B)
                 .ldlt()
                 .solve(B.transpose() * P * A);
  result.residual = (riccati_map(P) - P).cwiseAbs().maxCoeff();
  result.iterations = iterations;

  const Eigen::MatrixXd closed = A - B * result.K;
  result.closed_loop_radius =
      closed.eigenvalues().cwiseAbs().maxCoeff();
  if (!(result.closed_loop_radius < 1.0)) {
    throw RuntimeFailure(
        "solve_dare: closed loop is not stable (spectral radius " +
        fmt(result.closed_loop_radius) + "); the pair is not stabilizable");
  }
  return result;
}

LqrScheme::LqrScheme(std::shared_ptr<const LinearModel> abstraction,
                     double q_lo, double q_hi)
    : abstraction_(std::move(abstraction)), q_lo_(q_lo), q_hi_(q_hi) {
  if (!abstraction_) throw ConfigError("lqr scheme: null abstraction");
  if (!(q_lo > 0.0) || !(q_hi >= q_lo)) {
    throw ConfigError("lqr scheme: need 0 < q_lo <= q_hi");
  }
}

Controller LqrScheme::controller_for(double q, const Environment& e) const {
  const int H = e.horizon();
  const SetExpr& terminal = e.reach.at(H);
  if (terminal.kind != SetExpr::Kind::Ball || !terminal.coords.empty() ||
      terminal.a.size() != abstraction_->state_dim()) {
    throw ConfigError(
        "lqr scheme: environment '" + e.id +
        "' has no full-state terminal reach ball to read the target from");
  }
  const Eigen::VectorXd x_star = terminal.a;

  const Eigen::MatrixXd& A = abstraction_->A();
  const Eigen::MatrixXd& B = abstraction_->B();
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  const Eigen::MatrixXd Q = q * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd R = Eigen::MatrixXd::Identity(m, m);
  const DareResult dare = solve_dare(A, B, Q, R);

  // Steady-state feedforward: least squares on (I - A) x* = B u_ff. Exact
  // tracking can be impossible; the residual rides along in the descriptor.
  const Eigen::VectorXd rhs =
      (Eigen::MatrixXd::Identity(n, n) - A) * x_star;
  const Eigen::VectorXd u_ff =
      B.completeOrthogonalDecomposition().solve(rhs);
  const double ff_residual = (B * u_ff - rhs).norm();

  std::string descriptor =
      "lqr(q=" + fmt(q) + ",ffres=" + fmt(ff_residual) + ")";
  return Controller(
      [K = dare.K, u_ff, x_star](int, const Eigen::VectorXd& x) {
        return Eigen::VectorXd(u_ff - K * (x - x_star));
      },
      std::move(descriptor));
}

Controller LqrScheme::sample(const Environment& e, Rng& rng) const {
  return controller_for(rng.log_uniform(q_lo_, q_hi_), e);
}

Controller LqrScheme::reconstruct(const std::string& descriptor,
                                  const Environment& e) const {
  const std::string args = descriptor_args(descriptor, "lqr");
  if (args.rfind("q=", 0) != 0) {
    throw ConfigError("lqr descriptor missing q: " + descriptor);
  }
  return controller_for(std::stod(args.substr(2)), e);
}

UniformSequenceScheme::UniformSequenceScheme(Eigen::VectorXd lo,
                                             Eigen::VectorXd hi, int horizon)
    : lo_(std::move(lo)), hi_(std::move(hi)), horizon_(horizon) {
  if (lo_.size() != hi_.size() || lo_.size() == 0) {
    throw ConfigError("uniform-sequence scheme: bad control bounds");
  }
  if ((lo_.array() > hi_.array()).any()) {
    throw ConfigError("uniform-sequence scheme: lo > hi");
  }
  if (horizon < 1) throw ConfigError("uniform-sequence scheme: horizon < 1");
}

Controller UniformSequenceScheme::controller_for(
    const Eigen::MatrixXd& sequence) const {
  return open_loop_controller(sequence, "useq(u=" + encode_sequence(sequence) +
                                            ")");
}

Controller UniformSequenceScheme::sample(const Environment&, Rng& rng) const {
  Eigen::MatrixXd seq(horizon_, lo_.size());
  for (int t = 0; t < horizon_; ++t) {
    for (Eigen::Index j = 0; j < lo_.size(); ++j) {
      seq(t, j) = rng.uniform(lo_[j], hi_[j]);
    }
  }
  return controller_for(seq);
}

Controller UniformSequenceScheme::reconstruct(const std::string& descriptor,
                                              const Environment&) const {
  const std::string args = descriptor_args(descriptor, "useq");
  if (args.rfind("u=", 0) != 0) {
    throw ConfigError("useq descriptor missing u: " + descriptor);
  }
  return controller_for(parse_sequence(args.substr(2), horizon_));
}

FiniteSequenceScheme::FiniteSequenceScheme(
    std::vector<Eigen::MatrixXd> sequences, int horizon)
    : sequences_(std::move(sequences)), horizon_(horizon) {
  if (sequences_.empty()) {
    throw ConfigError("finite-sequence scheme: empty catalog");
  }
  for (const auto& s : sequences_) {
    if (static_cast<int>(s.rows()) != horizon) {
      throw ConfigError("finite-sequence scheme: sequence length mismatch");
    }
  }
}

Controller FiniteSequenceScheme::controller_for(std::size_t index) const {
  return open_loop_controller(sequences_[index],
                              "seq(i=" + std::to_string(index) + ")");
}

Controller FiniteSequenceScheme::sample(const Environment&, Rng& rng) const {
  return controller_for(
      static_cast<std::size_t>(rng.uniform_int(sequences_.size())));
}

Controller FiniteSequenceScheme::reconstruct(const std::string& descriptor,
                                             const Environment&) const {
  const std::string args = descriptor_args(descriptor, "seq");
  if (args.rfind("i=", 0) != 0) {
    throw ConfigError("seq descriptor missing i: " + descriptor);
  }
  const std::size_t index = std::stoul(args.substr(2));
  if (index >= sequences_.size()) {
    throw ConfigError("seq descriptor index out of range: " + descriptor);
  }
  return controller_for(index);
}

std::optional<std::vector<Controller>> FiniteSequenceScheme::enumerate(
    const Environment&) const {
  std::vector<Controller> all;
  all.reserve(sequences_.size());
  for (std::size_t i = 0; i < sequences_.size(); ++i) {
    all.push_back(controller_for(i));
  }
  return all;
}

std::vector<Eigen::MatrixXd> FiniteSequenceScheme::scalar_product(
    const std::vector<double>& levels, int horizon) {
  if (levels.empty() || horizon < 1) {
    throw ConfigError("scalar_product: need levels and horizon >= 1");
  }
  std::size_t total = 1;
  for (int t = 0; t < horizon; ++t) total *= levels.size();
  std::vector<Eigen::MatrixXd> out;
  out.reserve(total);
  for (std::size_t code = 0; code < total; ++code) {
    Eigen::MatrixXd seq(horizon, 1);
    std::size_t rest = code;
    for (int t = 0; t < horizon; ++t) {
      seq(t, 0) = levels[rest % levels.size()];
      rest /= levels.size();
    }
    out.push_back(seq);
  }
  return out;
}

LeastRestrictiveScheme::LeastRestrictiveScheme(
    KernelPtr kernel, int horizon, std::optional<double> band_override)
    : kernel_(std::move(kernel)), horizon_(horizon) {
  if (!kernel_) throw ConfigError("least-restrictive scheme: null kernel");
  if (horizon < 1) {
    throw ConfigError("least-restrictive scheme: horizon < 1");
  }
  if (kernel_->controls().size() > sizeof(kLevelChars) - 1) {
    throw ConfigError(
        "least-restrictive scheme: control set too large for descriptors");
  }
  band_ = band_override.value_or(kernel_->cell_diagonal());
  if (!(band_ > 0.0)) {
    throw ConfigError("least-restrictive scheme: band must be > 0");
  }
  if (!kernel_->model()->has_control_bounds()) {
    throw ConfigError(
        "least-restrictive scheme: the kernel model must declare control "
        "bounds");
  }
  auto [lo, hi] = kernel_->model()->control_bounds();
  raw_ = std::make_shared<UniformSequenceScheme>(std::move(lo), std::move(hi),
                                                 horizon_);
}

Controller LeastRestrictiveScheme::controller_for(
    std::vector<int> level_indices) const {
  std::string levels_text(level_indices.size(), '0');
  for (std::size_t t = 0; t < level_indices.size(); ++t) {
    levels_text[t] = kLevelChars[level_indices[t]];
  }
  return Controller(
      [kernel = kernel_, band = band_,
       idx = std::move(level_indices)](int t, const Eigen::VectorXd& x) {
        if (t < 0 || t >= static_cast<int>(idx.size())) {
          throw RuntimeFailure(
              "least-restrictive controller queried beyond its horizon");
        }
        if (kernel->value(x) >= band) return kernel->controls()[idx[t]];
        return kernel->safe_action(x);
      },
      "lr(levels=" + levels_text + ")");
}

Controller LeastRestrictiveScheme::sample(const Environment& e,
                                          Rng& rng) const {
  if (!kernel_->member(e.x0)) return Controller::null_controller();
  std::vector<int> idx(static_cast<std::size_t>(horizon_));
  for (int t = 0; t < horizon_; ++t) {
    idx[t] = static_cast<int>(rng.uniform_int(kernel_->controls().size()));
  }
  return controller_for(std::move(idx));
}

Controller LeastRestrictiveScheme::sample_permissible(const Environment& e,
                                                      Rng& rng) const {
  return raw_->sample(e, rng);
}

Controller LeastRestrictiveScheme::reconstruct(const std::string& descriptor,
                                               const Environment& e) const {
  // Raw draws from the permissible class carry open-loop descriptors.
  if (descriptor.rfind("useq(", 0) == 0) return raw_->reconstruct(descriptor, e);
  const std::string args = descriptor_args(descriptor, "lr");
  if (args.rfind("levels=", 0) != 0) {
    throw ConfigError("lr descriptor missing levels: " + descriptor);
  }
  const std::string levels_text = args.substr(7);
  if (static_cast<int>(levels_text.size()) != horizon_) {
    throw ConfigError("lr descriptor has wrong horizon: " + descriptor);
  }
  std::vector<int> idx(levels_text.size());
  for (std::size_t t = 0; t < levels_text.size(); ++t) {
    const char* pos = std::strchr(kLevelChars, levels_text[t]);
    if (!pos || levels_text[t] == '\0') {
      throw ConfigError("lr descriptor has bad level char: " + descriptor);
    }
    idx[t] = static_cast<int>(pos - kLevelChars);
    if (idx[t] >= static_cast<int>(kernel_->controls().size())) {
      throw ConfigError("lr descriptor level out of range: " + descriptor);
    }
  }
  return controller_for(std::move(idx));
}

FeasibleDraw sample_feasible(const ControllerScheme& scheme,
                             const Environment& e,
                             const DynamicalModel& abstraction, double margin,
                             Rng& rng, int cap, Norm norm) {
  if (cap < 1) throw ConfigError("sample_feasible: cap must be >= 1");
  for (int attempt = 1; attempt <= cap; ++attempt) {
    Controller candidate = scheme.sample(e, rng);
    if (candidate.is_null()) {
      // The scheme itself declares the environment infeasible.
      return {Controller::null_controller(), attempt};
    }
    const Trajectory traj =
        simulate(abstraction, e.x0, candidate, e.horizon());
    if (satisfies(traj, e, margin, norm)) {
      return {std::move(candidate), attempt};
    }
  }
  return {Controller::null_controller(), cap};
}

}  // namespace specsim
