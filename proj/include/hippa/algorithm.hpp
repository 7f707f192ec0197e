#ifndef HIPPA_ALGORITHM_HPP
#define HIPPA_ALGORITHM_HPP

#include "hippa/prox.hpp"

#include <vector>

namespace hippa {

enum class GammaScheduleKind { constant, uniform_random, geometric };

/// Rule producing gamma_k inside the open interval (gamma_min, gamma_max).
struct GammaSchedule {
  GammaScheduleKind kind = GammaScheduleKind::constant;
  double value = 0.0;       // constant (0 -> midpoint of the interval)
  std::uint64_t seed = 0;   // uniform_random
  double g0 = 1.0;          // geometric
  double factor = 1.0;      // geometric

  static GammaSchedule constant_gamma(double g);
  static GammaSchedule uniform_random(std::uint64_t seed);
  static GammaSchedule geometric(double g0, double factor);
};

struct RunConfig {
  double p = 2.0;
  double gamma_min = 0.5;
  double gamma_max = 2.0;
  GammaSchedule schedule;
  double epsilon = 1e-8;           // stop when the step norm drops below
  std::int64_t max_iter = 1000000;
  double inner_tol = 0.0;          // 0 -> min(1e-10, epsilon/100)

  double resolved_inner_tol() const;
  void validate() const;
};

/// Convenience: constant gamma with a tight bracketing interval.
RunConfig make_run_config(double p, double gamma, double epsilon,
                          std::int64_t max_iter = 1000000);

enum class StopReason { step_tol, max_iter, fixed_point, error };

const char* to_string(StopReason r);

/// Complete record of one solver run.
struct Trajectory {
  std::vector<Vector> iterates;     // x^0 ... x^N
  std::vector<double> f_values;     // f(x^k), one per iterate
  std::vector<double> env_values;   // envelope of each proximal step
  std::vector<double> step_norms;   // |x^{k+1} - x^k|
  std::vector<double> gammas;       // gamma_k used per step
  StopReason stop_reason = StopReason::max_iter;
  double wall_time = 0.0;           // seconds
  std::int64_t effective_iterations = 0;  // steps that actually moved
  std::string error_message;        // nonempty iff stop_reason == error
  std::vector<std::string> notes;

  std::size_t steps() const { return step_norms.size(); }
};

/// Run the outer proximal-point loop from x0 (projected onto C with a
/// logged note if infeasible) until the step norm reaches epsilon, an exact
/// fixed point is detected, or max_iter is exhausted.
Trajectory run(const ObjectiveFunction& f, const ConvexSet& C, const RunConfig& cfg,
               const Vector& x0);

/// ceil(p * gamma_max * (f_x0 - f_inf) / epsilon^p), saturated at the
/// largest representable count.
std::uint64_t iteration_bound(const RunConfig& cfg, double f_x0, double f_inf);

enum class AuditStatus { passed, failed, skipped };

struct AuditCheck {
  std::string name;
  AuditStatus status = AuditStatus::skipped;
  std::string detail;
};

struct AuditReport {
  std::vector<AuditCheck> checks;
  bool all_passed() const;   // skipped checks do not fail the audit
  bool any_skipped() const;
};

/// Verify the run record against the convergence guarantees: monotone f and
/// envelope decrease, step-power summability, boundedness, realized
/// iterations against the a-priori bound, and gamma range membership.
/// Checks needing minimizer/infimum metadata are skipped when f lacks it.
AuditReport audit_trajectory(const Trajectory& traj, const RunConfig& cfg,
                             const ObjectiveFunction* f = nullptr);

}  // namespace hippa

#endif  // HIPPA_ALGORITHM_HPP
