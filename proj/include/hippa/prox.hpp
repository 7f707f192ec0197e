#ifndef HIPPA_PROX_HPP
#define HIPPA_PROX_HPP

#include "hippa/functions.hpp"

#include <cstdint>

namespace hippa {

enum class ProxMethod { closed_form, radial_1d, projected_gradient, grid_oracle };

const char* to_string(ProxMethod m);

/// Result of one evaluation of the high-order proximal operator
///   argmin_{y in C} f(y) + (1/(p gamma)) |x - y|^p,
/// together with the envelope value at the minimizer.
struct ProxResult {
  Vector minimizer;
  double envelope_value = 0.0;
  double subproblem_residual = 0.0;  // projected-gradient norm at return
  std::int64_t inner_iterations = 0;
  ProxMethod method = ProxMethod::projected_gradient;
};

/// Thrown when the inner solver hits its iteration cap; carries the best
/// iterate found so the caller can keep a partial trajectory.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, ProxResult best)
      : std::runtime_error(what), best_result(std::move(best)) {}
  ProxResult best_result;
};

/// Evaluate the proximal operator to the requested inner tolerance.
/// Dispatch order: closed form (quadratic f, p = 2, unconstrained), radial
/// 1-D reduction (radial f, radially symmetric C about the same center),
/// grid search (dim <= 2 and no gradient), projected gradient with Armijo
/// backtracking otherwise (finite differences when no analytic gradient).
ProxResult prox(const ObjectiveFunction& f, const ConvexSet& C, const ProxParams& params,
                const Vector& x, double inner_tol = 1e-10);

/// Envelope value of the subproblem (finite for every finite x).
double moreau_env(const ObjectiveFunction& f, const ConvexSet& C, const ProxParams& params,
                  const Vector& x, double inner_tol = 1e-10);

/// Bounding box and target resolution for the brute-force oracle.
struct GridSpec {
  Vector lo;
  Vector hi;
  double h = 1e-4;
};

/// Exhaustive minimization of the subproblem over the grid intersected
/// with C (dim <= 2 only). Falls back to coarse-to-fine refinement when a
/// full sweep would exceed an evaluation cap; the one-cell guarantee then
/// requires a unimodal subproblem.
ProxResult prox_grid_oracle(const ObjectiveFunction& f, const ConvexSet& C,
                            const ProxParams& params, const Vector& x, const GridSpec& spec);

}  // namespace hippa

#endif  // HIPPA_PROX_HPP
