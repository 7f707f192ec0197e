#ifndef HIPPA_SETS_HPP
#define HIPPA_SETS_HPP

#include "hippa/core.hpp"

namespace hippa {

/// Closed convex feasible set with an exact Euclidean projection.
/// Supported kinds: the whole space, a ball, an axis-aligned box, and a
/// halfspace <a, x> <= beta.
class ConvexSet {
 public:
  enum class Kind { whole_space, ball, box, halfspace };

  static ConvexSet whole_space(Eigen::Index dim);
  static ConvexSet ball(Vector center, double radius);
  static ConvexSet box(Vector lower, Vector upper);
  static ConvexSet halfspace(Vector a, double beta);

  Kind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const Vector& normal() const { return a_; }
  double offset() const { return beta_; }

  bool contains(const Vector& x, double tol = 1e-9) const;
  Vector project(const Vector& x) const;

  /// Finite-probe approximation of membership in the cone of feasible
  /// directions: true iff x + probe * d stays in the set.
  bool feasible_direction(const Vector& x, const Vector& d, double probe = 1e-6) const;

  std::string describe() const;

 private:
  ConvexSet() = default;

  Kind kind_ = Kind::whole_space;
  Eigen::Index dim_ = 0;
  Vector center_;   // ball
  double radius_ = 0.0;
  Vector lower_, upper_;  // box
  Vector a_;        // halfspace
  double beta_ = 0.0;
};

}  // namespace hippa

#endif  // HIPPA_SETS_HPP
