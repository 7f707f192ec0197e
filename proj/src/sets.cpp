#include "hippa/sets.hpp"

#include <cmath>
#include <sstream>

namespace hippa {

ConvexSet ConvexSet::whole_space(Eigen::Index dim) {
  if (dim < 1) throw std::invalid_argument("ConvexSet: dim must be >= 1");
  ConvexSet s;
  s.kind_ = Kind::whole_space;
  s.dim_ = dim;
  return s;
}

ConvexSet ConvexSet::ball(Vector center, double radius) {
  require_finite(center, "ConvexSet::ball center");
  if (!(radius > 0.0)) throw std::invalid_argument("ConvexSet::ball: radius must be > 0");
  ConvexSet s;
  s.kind_ = Kind::ball;
  s.dim_ = center.size();
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

ConvexSet ConvexSet::box(Vector lower, Vector upper) {
  require_finite(lower, "ConvexSet::box lower");
  require_same_dim(lower, upper, "ConvexSet::box");
  if (((upper - lower).array() < 0.0).any())
    throw std::invalid_argument("ConvexSet::box: lower must be <= upper componentwise");
  ConvexSet s;
  s.kind_ = Kind::box;
  s.dim_ = lower.size();
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  return s;
}

ConvexSet ConvexSet::halfspace(Vector a, double beta) {
  require_finite(a, "ConvexSet::halfspace a");
  if (a.norm() == 0.0) throw std::invalid_argument("ConvexSet::halfspace: a must be nonzero");
  ConvexSet s;
  s.kind_ = Kind::halfspace;
  s.dim_ = a.size();
  s.a_ = std::move(a);
  s.beta_ = beta;
  return s;
}

bool ConvexSet::contains(const Vector& x, double tol) const {
  if (x.size() != dim_) throw std::invalid_argument("ConvexSet::contains: dimension mismatch");
  return (x - project(x)).norm() <= tol;
}

Vector ConvexSet::project(const Vector& x) const {
  if (x.size() != dim_) throw std::invalid_argument("ConvexSet::project: dimension mismatch");
  switch (kind_) {
    case Kind::whole_space:
      return x;
    case Kind::ball: {
      const Vector d = x - center_;
      const double n = d.norm();
      if (n <= radius_) return x;
      return center_ + (radius_ / n) * d;
    }
    case Kind::box:
      return x.cwiseMax(lower_).cwiseMin(upper_);
    case Kind::halfspace: {
      const double g = a_.dot(x) - beta_;
      if (g <= 0.0) return x;
      return x - (g / a_.squaredNorm()) * a_;
    }
  }
  throw std::logic_error("ConvexSet::project: unknown kind");
}

bool ConvexSet::feasible_direction(const Vector& x, const Vector& d, double probe) const {
  if (!contains(x, 1e-9))
    throw std::invalid_argument("ConvexSet::feasible_direction: x is not feasible");
  require_same_dim(x, d, "feasible_direction");
  if (kind_ == Kind::whole_space) return true;
  // Probe from the projected point so boundary roundoff cannot flip the answer.
  return contains(project(x) + probe * d, 1e-12 + 1e-9 * probe * d.norm());
}

std::string ConvexSet::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::whole_space: os << "whole_space(dim=" << dim_ << ")"; break;
    case Kind::ball: os << "ball(r=" << radius_ << ", dim=" << dim_ << ")"; break;
    case Kind::box: os << "box(dim=" << dim_ << ")"; break;
    case Kind::halfspace: os << "halfspace(dim=" << dim_ << ")"; break;
  }
  return os.str();
}

}  // namespace hippa
