#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace specsim {

enum class Norm { Euclidean, Infinity };

std::string to_string(Norm n);
Norm norm_from_string(const std::string& s);

// Composable geometric set over state vectors. Signed distance is the sole
// primitive all specification semantics are built on: h(x, K) is the
// distance from x to K when x is outside and minus the distance to K's
// complement when x is inside. Construction goes through the factory
// functions, which enforce the structural invariants.
struct SetExpr {
  enum class Kind { Empty, All, Ball, Box, HalfSpace, Complement, Union };

  Kind kind = Kind::Empty;
  Eigen::VectorXd a;  // Ball center | Box lower corner | HalfSpace normal
  Eigen::VectorXd b;  // Box upper corner
  double c = 0.0;     // Ball radius | HalfSpace offset
  std::vector<SetExpr> children;  // Complement: 1 member; Union: any
  // Optional projection: the set constrains only these state coordinates
  // (distance is measured in the projected subspace); empty = all.
  std::vector<int> coords;

  static SetExpr empty();
  static SetExpr all();
  static SetExpr ball(Eigen::VectorXd center, double radius);
  static SetExpr box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  // Half-space {x : normal·x >= offset}.
  static SetExpr half_space(Eigen::VectorXd normal, double offset);
  static SetExpr complement(SetExpr inner);
  static SetExpr union_of(std::vector<SetExpr> members);

  // Returns a copy of this set constrained to the given state coordinates.
  SetExpr onto(std::vector<int> coordinates) const;
};

// Signed distance from x to K under the given state-space norm. Empty ->
// +infinity, All -> -infinity; Complement flips the sign; Union combines by
// pointwise minimum (exact outside the union and for disjoint members).
// Throws ConfigError on dimension mismatches.
double signed_distance(const Eigen::VectorXd& x, const SetExpr& K,
                       Norm norm = Norm::Euclidean);

// Membership in K expanded by d (Minkowski sum realized as a threshold):
// h(x, K) <= d. Negative d tests membership in the interior-shrunk set.
// Ties (h == d) count as membership.
bool contains_with_margin(const Eigen::VectorXd& x, const SetExpr& K, double d,
                          Norm norm = Norm::Euclidean);

}  // namespace specsim
