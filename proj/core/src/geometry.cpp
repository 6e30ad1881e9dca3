#include "specsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "specsim/errors.hpp"

namespace specsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

std::string to_string(Norm n) {
  return n == Norm::Euclidean ? "euclidean" : "infinity";
}

Norm norm_from_string(const std::string& s) {
  if (s == "euclidean") return Norm::Euclidean;
  if (s == "infinity") return Norm::Infinity;
  throw ConfigError("unknown norm '" + s + "' (use euclidean or infinity)");
}

SetExpr SetExpr::empty() { return SetExpr{}; }

SetExpr SetExpr::all() {
  SetExpr s;
  s.kind = Kind::All;
  return s;
}

SetExpr SetExpr::ball(Eigen::VectorXd center, double radius) {
  require(radius >= 0.0, "ball radius must be >= 0");
  require(center.size() > 0, "ball center must be non-empty");
  SetExpr s;
  s.kind = Kind::Ball;
  s.a = std::move(center);
  s.c = radius;
  return s;
}

SetExpr SetExpr::box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  require(lo.size() == hi.size(), "box corners must have equal dimension");
  require(lo.size() > 0, "box corners must be non-empty");
  require((lo.array() <= hi.array()).all(),
          "box requires lo <= hi componentwise");
  SetExpr s;
  s.kind = Kind::Box;
  s.a = std::move(lo);
  s.b = std::move(hi);
  return s;
}

SetExpr SetExpr::half_space(Eigen::VectorXd normal, double offset) {
  require(normal.size() > 0 && normal.norm() > 0.0,
          "half-space normal must be nonzero");
  SetExpr s;
  s.kind = Kind::HalfSpace;
  s.a = std::move(normal);
  s.c = offset;
  return s;
}

SetExpr SetExpr::complement(SetExpr inner) {
  SetExpr s;
  s.kind = Kind::Complement;
  s.children.push_back(std::move(inner));
  return s;
}

SetExpr SetExpr::union_of(std::vector<SetExpr> members) {
  SetExpr s;
  s.kind = Kind::Union;
  s.children = std::move(members);
  return s;
}

SetExpr SetExpr::onto(std::vector<int> coordinates) const {
  require(!coordinates.empty(), "projection index list must be non-empty");
  std::set<int> seen(coordinates.begin(), coordinates.end());
  require(seen.size() == coordinates.size(),
          "projection indices must be distinct");
  require(*seen.begin() >= 0, "projection indices must be non-negative");
  SetExpr s = *this;
  s.coords = std::move(coordinates);
  return s;
}

namespace {

// Distance in the infinity norm from y >= 0 (componentwise |x - c|) to the
// Euclidean ball of radius r centered at the origin. Outside: smallest t
// with sum_i max(y_i - t, 0)^2 <= r^2, found by bisection (the function is
// continuous and strictly decreasing until it reaches 0). Inside: largest t
// with ||y + t*1||_2 <= r, a quadratic with a closed form.
double linf_to_euclidean_ball(const Eigen::VectorXd& y, double r) {
  const double n = static_cast<double>(y.size());
  const double sq = y.squaredNorm();
  if (sq <= r * r) {
    // Inside: sum (y_i + t)^2 = r^2  =>  n t^2 + 2 S t + (sq - r^2) = 0.
    const double s = y.sum();
    const double disc = s * s - n * (sq - r * r);
    const double t = (-s + std::sqrt(std::max(disc, 0.0))) / n;
    return -t;
  }
  double lo = 0.0, hi = y.maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double g = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      const double e = y[i] - mid;
      if (e > 0.0) g += e * e;
    }
    if (g > r * r) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

double distance_impl(const Eigen::VectorXd& x, const SetExpr& K, Norm norm);

double primitive_distance(const Eigen::VectorXd& x, const SetExpr& K,
                          Norm norm) {
  switch (K.kind) {
    case SetExpr::Kind::Empty:
      return kInf;
    case SetExpr::Kind::All:
      return -kInf;
    case SetExpr::Kind::Ball: {
      require(x.size() == K.a.size(),
              "signed_distance: point/ball dimension mismatch");
      if (norm == Norm::Euclidean) return (x - K.a).norm() - K.c;
      return linf_to_euclidean_ball((x - K.a).cwiseAbs(), K.c);
    }
    case SetExpr::Kind::Box: {
      require(x.size() == K.a.size(),
              "signed_distance: point/box dimension mismatch");
      const Eigen::ArrayXd under = (K.a - x).array();
      const Eigen::ArrayXd over = (x - K.b).array();
      const Eigen::ArrayXd outside = under.max(over).max(0.0);
      if ((outside > 0.0).any()) {
        return norm == Norm::Euclidean ? std::sqrt((outside * outside).sum())
                                       : outside.maxCoeff();
      }
      // Inside: distance to the nearest face, identical in both norms.
      return -(-under).min(-over).minCoeff();
    }
    case SetExpr::Kind::HalfSpace: {
      require(x.size() == K.a.size(),
              "signed_distance: point/half-space dimension mismatch");
      const double slack = K.c - K.a.dot(x);  // positive outside {n.x >= c}
      const double scale = norm == Norm::Euclidean
                               ? K.a.norm()
                               : K.a.cwiseAbs().sum();  // dual norm of L-inf
      return slack / scale;
    }
    case SetExpr::Kind::Complement:
      return -distance_impl(x, K.children.front(), norm);
    case SetExpr::Kind::Union: {
      double best = kInf;  // union of nothing is empty
      for (const SetExpr& m : K.children) {
        best = std::min(best, distance_impl(x, m, norm));
      }
      return best;
    }
  }
  throw RuntimeFailure("signed_distance: unreachable set kind");
}

double distance_impl(const Eigen::VectorXd& x, const SetExpr& K, Norm norm) {
  if (K.coords.empty()) return primitive_distance(x, K, norm);
  Eigen::VectorXd projected(static_cast<Eigen::Index>(K.coords.size()));
  for (std::size_t i = 0; i < K.coords.size(); ++i) {
    const int c = K.coords[i];
    require(c >= 0 && c < x.size(),
            "signed_distance: projection index out of range");
    projected[static_cast<Eigen::Index>(i)] = x[c];
  }
  return primitive_distance(projected, K, norm);
}

}  // namespace

double signed_distance(const Eigen::VectorXd& x, const SetExpr& K, Norm norm) {
  return distance_impl(x, K, norm);
}

bool contains_with_margin(const Eigen::VectorXd& x, const SetExpr& K, double d,
                          Norm norm) {
  return signed_distance(x, K, norm) <= d;
}

}  // namespace specsim
