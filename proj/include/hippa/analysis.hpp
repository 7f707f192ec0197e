#ifndef HIPPA_ANALYSIS_HPP
#define HIPPA_ANALYSIS_HPP

#include "hippa/algorithm.hpp"

namespace hippa {

enum class RateRegime { linear, superlinear, inconclusive };

const char* to_string(RateRegime r);

/// Empirical convergence-rate classification of a run against a known
/// minimizer. Errors below the numerical floor (1e-12) are excluded; the
/// fit uses the last half of the usable iterates.
struct RateEstimate {
  RateRegime regime = RateRegime::inconclusive;
  std::optional<double> linear_factor;      // geometric mean of tail ratios
  std::optional<double> superlinear_degree; // slope of log e_{k+1} vs log e_k
  std::pair<std::size_t, std::size_t> tail_window{0, 0};
  double residual = 0.0;                    // regression RMS
  std::string diagnostic;
};

struct CheckWitness {
  Vector x;
  Vector y;
  double lambda = 0.0;
  double violation = 0.0;
};

struct CheckReport {
  std::string name;
  bool passed = false;
  std::int64_t samples = 0;
  std::optional<CheckWitness> witness;  // present iff not passed
  double slack_used = 0.0;
  std::string detail;
};

/// Domain sampler; draws points from the region a property is claimed on.
struct Sampler {
  std::function<Vector(Rng&)> draw;
};

Sampler ball_sampler(Vector center, double radius);
Sampler set_sampler(const ConvexSet& C);
/// domain_hint-driven sampler, defaulting to a ball around the origin.
Sampler default_sampler(const ObjectiveFunction& f, double radius = 2.0);

RateEstimate estimate_rate(const Trajectory& traj, const Vector& xbar);

/// The four guaranteed regimes, keyed by how (p, q) relate.
enum class RateCase { local_linear_small_p, linear_p2, linear_pq, superlinear };

/// Classify (p, modulus) into a guaranteed regime, if any.
std::optional<RateCase> classify_rate_case(double p, const Modulus& m);

/// The guaranteed contraction factor (or, for the superlinear case, the
/// rate degree (p-1)/(q-1)). sigma_p is required for the small-p case.
double theoretical_rate(RateCase which, double p, double q, double rho, double gamma_min,
                        std::optional<double> sigma_p = std::nullopt);

/// sigma_p for auditing a small-p run: kappa(p) r^(p-2) / 2 with r = twice
/// the largest iterate norm of the run.
double sigma_p_for_run(const Trajectory& traj, double p);

/// Check the per-iterate contraction inequality of the rate analysis for
/// every consecutive pair (for p in (1,2), from the first index whose step
/// norm is below 1). Relative slack 1e-8.
CheckReport verify_iterate_inequality(const Trajectory& traj, const Vector& xbar,
                                      const Modulus& modulus, double p,
                                      std::optional<double> sigma_p = std::nullopt);

/// f(lx+(1-l)y) + l(1-l) phi(|x-y|) <= max{f(x), f(y)} on random samples.
/// With no modulus the plain quasiconvexity inequality is tested. A stored
/// counterexample witness on f is always tried first.
CheckReport check_uniform_quasiconvexity(const ObjectiveFunction& f, const Sampler& sampler,
                                         const std::optional<Modulus>& modulus,
                                         std::int64_t n_samples, std::uint64_t seed);

/// 1-D uniform quasiconvexity of t -> f(y + t (x-y)/|x-y|) on a grid over
/// [0, |x-y|], with the same modulus.
CheckReport check_line_segment(const ObjectiveFunction& f, const Vector& x, const Vector& y,
                               const std::optional<Modulus>& modulus, int n_grid = 41);

/// Differential characterization: f(x) <= f(y) implies
/// <grad f(y), x-y> <= -phi(|y-x|), plus the generalized monotonicity
/// implication spot-check.
CheckReport check_differential(const ObjectiveFunction& f, const Modulus& modulus,
                               std::int64_t n_samples, std::uint64_t seed);

/// Growth around the minimizer: f(xbar) + phi(|y-xbar|)/4 <= f(y).
CheckReport check_growth(const ObjectiveFunction& f, const Vector& xbar, const Modulus& modulus,
                         std::int64_t n_samples, std::uint64_t seed);

/// Empirical liminf of f(x)/|x|^m along sampled rays: positive over the top
/// decade of radii and not decaying geometrically.
CheckReport check_supercoercivity(const ObjectiveFunction& f, int m, int n_directions = 8,
                                  std::uint64_t seed = 0, double r_max = 1e6);

/// Finite-difference Hessian at xbar has smallest eigenvalue >= rho.
CheckReport check_local_strong_convexity(const ObjectiveFunction& f, const Vector& xbar,
                                         double rho);

/// Dini lower directional derivative estimates along feasible directions;
/// stationary iff all are >= -slack with slack 1e-6 (1 + |f(x)|).
CheckReport check_stationarity(const ObjectiveFunction& f, const ConvexSet& C, const Vector& x,
                               int n_directions = 16, std::uint64_t seed = 0);

/// Fit the largest power bound rho t^q consistent with sampled
/// quasiconvexity slacks (log-domain regression for q, lower envelope for
/// rho); the result is re-verified on a fresh sample before returning.
Modulus estimate_modulus(const ObjectiveFunction& f, const Sampler& sampler,
                         std::int64_t n_samples, std::uint64_t seed);

}  // namespace hippa

#endif  // HIPPA_ANALYSIS_HPP
