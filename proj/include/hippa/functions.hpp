#ifndef HIPPA_FUNCTIONS_HPP
#define HIPPA_FUNCTIONS_HPP

#include "hippa/core.hpp"
#include "hippa/sets.hpp"

#include <limits>
#include <memory>
#include <vector>

namespace hippa {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Quadratic structure f(y) = y'P y + r'y + s, kept alongside the generic
/// evaluator so the proximal subproblem can be solved in closed form.
struct QuadraticForm {
  Matrix P;
  Vector r;
  double s = 0.0;
};

/// Radial structure f(x) = profile(|x - center|) with a nondecreasing
/// profile; enables the exact 1-D reduction of the proximal subproblem.
/// The derivative, when present, lets the inner solver polish the radial
/// stationarity equation to machine precision.
struct RadialProfile {
  std::function<double(double)> profile;
  Vector center;
  std::function<double(double)> derivative;  // optional
};

/// A triple (x, y, lambda) at which the quasiconvexity inequality fails.
struct WitnessTriple {
  Vector x;
  Vector y;
  double lambda = 0.5;
};

/// Evaluatable objective R^n -> R u {+inf} with optional analytic gradient,
/// declared modulus, and known minimizer metadata.
struct ObjectiveFunction {
  std::function<double(const Vector&)> eval;
  std::function<Vector(const Vector&)> grad;  // empty when unavailable
  Eigen::Index dim = 0;
  std::optional<ConvexSet> domain_hint;
  std::optional<Modulus> modulus;
  std::optional<Vector> known_minimizer;
  std::optional<double> known_inf;
  std::string label;

  std::optional<QuadraticForm> quadratic;
  std::optional<RadialProfile> radial;
  std::optional<WitnessTriple> not_quasiconvex_witness;

  double operator()(const Vector& x) const { return eval(x); }
  bool has_grad() const { return static_cast<bool>(grad); }
};

/// Map R^n -> R^m with a distance lower bound |T(x)-T(y)| >= phi(|x-y|).
/// When the map is affine, T(x) = A x - b, the representation is stored so
/// composite functions keep gradients and radial structure.
struct UniformlyRegularMap {
  std::function<Vector(const Vector&)> apply;
  Modulus regularity_modulus;
  bool is_homogeneous_additive = false;
  Eigen::Index dim_in = 0;
  Eigen::Index dim_out = 0;
  std::optional<Matrix> linear;
  Vector offset;
};

/// f(x) = |x|^q with the modulus of the norm-power family:
///   q in (1,2): (q kappa(q) r^(q-2) / 2, 2) on the ball of radius
///               radius_hint (default 1);
///   q == 2:     (1, 2) globally;
///   q > 2:      (sigma_hat(q), q) globally;
///   q in (0,1]: no declared modulus (estimated empirically), ball-local.
ObjectiveFunction norm_power(double q, Eigen::Index dim,
                             std::optional<double> radius_hint = std::nullopt);

/// f(x) = |A x - b|^q for a full-column-rank A. The inner map has
/// regularity modulus sigma_min * t; the composite modulus follows the
/// composition rule applied to the norm-power modulus.
ObjectiveFunction affine_norm_power(const Matrix& A, const Vector& b, double q,
                                    std::optional<double> radius_hint = std::nullopt);

enum class QuotientCase { affine, nonneg_concave, nonpos_convex };

/// f = h / g with modulus rho/M. The case selects which hypothesis of the
/// quotient rule the caller asserts; g must stay positive and <= M.
ObjectiveFunction quotient(const ObjectiveFunction& h, const ObjectiveFunction& g,
                           QuotientCase which, double M);

/// f + a; same modulus, shifted known_inf.
ObjectiveFunction shift_add(const ObjectiveFunction& f, double a);

/// b * f for b > 0; modulus scales to b*rho.
ObjectiveFunction scale(const ObjectiveFunction& f, double b);

/// f + indicator of C: +inf outside C, unchanged inside.
ObjectiveFunction restrict(const ObjectiveFunction& f, const ConvexSet& C);

/// x -> h(T(x)); modulus is the composition phi_h o theta_T, which for power
/// bounds (rho_h, q_h), (rho_T, q_T) is (rho_h * rho_T^q_h, q_h * q_T).
/// When T is not declared homogeneous additive the caller must assert the
/// convex-pair hypothesis explicitly.
ObjectiveFunction compose(const UniformlyRegularMap& T, const ObjectiveFunction& h,
                          bool caller_asserts_convex_pair = false);

UniformlyRegularMap make_scaling_map(double c, Eigen::Index dim);
UniformlyRegularMap make_affine_map(const Matrix& A, const Vector& b);

/// The three functions that defeat quasiconvexity, each carrying a stored
/// witness triple:
///   sum_shifted  : 1-D psi(x-1) + psi(x+1), psi(t) = t^2 except psi(0) = -1
///   lq_sum       : sum_i |x_i|^q in R^2, q in (0,1)
///   lq_norm      : (sum_i |x_i|^q)^(1/q) in R^2, q in (0,1)
std::vector<ObjectiveFunction> counterexample_suite(double q = 0.5);

/// Central finite differences of f at x.
Vector finite_difference_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                                  double h = 1e-7);

}  // namespace hippa

#endif  // HIPPA_FUNCTIONS_HPP
