#include "hippa/algorithm.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace hippa {

GammaSchedule GammaSchedule::constant_gamma(double g) {
  GammaSchedule s;
  s.kind = GammaScheduleKind::constant;
  s.value = g;
  return s;
}

GammaSchedule GammaSchedule::uniform_random(std::uint64_t seed) {
  GammaSchedule s;
  s.kind = GammaScheduleKind::uniform_random;
  s.seed = seed;
  return s;
}

GammaSchedule GammaSchedule::geometric(double g0, double factor) {
  if (!(g0 > 0.0) || !(factor > 0.0))
    throw std::invalid_argument("GammaSchedule::geometric: g0 and factor must be > 0");
  GammaSchedule s;
  s.kind = GammaScheduleKind::geometric;
  s.g0 = g0;
  s.factor = factor;
  return s;
}

double RunConfig::resolved_inner_tol() const {
  if (inner_tol > 0.0) return inner_tol;
  return std::min(1e-10, epsilon / 100.0);
}

void RunConfig::validate() const {
  if (!(p > 1.0)) throw std::invalid_argument("RunConfig: p must be > 1");
  if (!(gamma_min > 0.0)) throw std::invalid_argument("RunConfig: gamma_min must be > 0");
  if (!(gamma_max > gamma_min))
    throw std::invalid_argument("RunConfig: gamma_max must exceed gamma_min");
  if (!(epsilon > 0.0)) throw std::invalid_argument("RunConfig: epsilon must be > 0");
  if (max_iter < 1) throw std::invalid_argument("RunConfig: max_iter must be >= 1");
  if (schedule.kind == GammaScheduleKind::constant && schedule.value != 0.0 &&
      !(schedule.value > gamma_min && schedule.value < gamma_max))
    throw std::invalid_argument("RunConfig: constant gamma must lie in (gamma_min, gamma_max)");
}

RunConfig make_run_config(double p, double gamma, double epsilon, std::int64_t max_iter) {
  RunConfig cfg;
  cfg.p = p;
  cfg.gamma_min = gamma * (1.0 - 1e-9);
  cfg.gamma_max = gamma * (1.0 + 1e-9);
  cfg.schedule = GammaSchedule::constant_gamma(gamma);
  cfg.epsilon = epsilon;
  cfg.max_iter = max_iter;
  return cfg;
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::step_tol: return "step_tol";
    case StopReason::max_iter: return "max_iter";
    case StopReason::fixed_point: return "fixed_point";
    case StopReason::error: return "error";
  }
  return "unknown";
}

namespace {

class GammaGenerator {
 public:
  GammaGenerator(const RunConfig& cfg) : cfg_(cfg), rng_(cfg.schedule.seed) {}

  double operator()(std::int64_t k) {
    const GammaSchedule& s = cfg_.schedule;
    switch (s.kind) {
      case GammaScheduleKind::constant:
        return s.value != 0.0 ? s.value : 0.5 * (cfg_.gamma_min + cfg_.gamma_max);
      case GammaScheduleKind::uniform_random:
        return cfg_.gamma_min + rng_.uniform() * (cfg_.gamma_max - cfg_.gamma_min);
      case GammaScheduleKind::geometric: {
        const double raw = s.g0 * std::pow(s.factor, static_cast<double>(k));
        const double lo = std::nextafter(cfg_.gamma_min, cfg_.gamma_max);
        const double hi = std::nextafter(cfg_.gamma_max, cfg_.gamma_min);
        return std::clamp(raw, lo, hi);
      }
    }
    throw std::logic_error("GammaGenerator: unknown schedule kind");
  }

 private:
  const RunConfig& cfg_;
  Rng rng_;
};

double fixed_point_tol(const Vector& x) { return 1e-14 * (1.0 + x.norm()); }

}  // namespace

Trajectory run(const ObjectiveFunction& f, const ConvexSet& C, const RunConfig& cfg,
               const Vector& x0) {
  cfg.validate();
  require_finite(x0, "run x0");
  const auto t_start = std::chrono::steady_clock::now();

  Trajectory traj;
  Vector x = x0;
  if (!C.contains(x, 1e-9)) {
    x = C.project(x);
    traj.notes.push_back("x0 infeasible; projected onto " + C.describe());
  }
  traj.iterates.push_back(x);
  traj.f_values.push_back(f.eval(x));
  if (!std::isfinite(traj.f_values.back()))
    throw std::domain_error("run: objective not finite at the start point");

  GammaGenerator gamma(cfg);
  const double inner_tol = cfg.resolved_inner_tol();

  for (std::int64_t k = 0;; ++k) {
    if (k >= cfg.max_iter) {
      traj.stop_reason = StopReason::max_iter;
      break;
    }
    const double g = gamma(k);
    ProxResult step;
    try {
      step = prox(f, C, ProxParams(cfg.p, g), x, inner_tol);
    } catch (const ConvergenceError& e) {
      traj.stop_reason = StopReason::error;
      traj.error_message = e.what();
      break;
    }
    const double move = (step.minimizer - x).norm();
    traj.gammas.push_back(g);
    traj.env_values.push_back(step.envelope_value);
    traj.step_norms.push_back(move);
    traj.iterates.push_back(step.minimizer);
    traj.f_values.push_back(f.eval(step.minimizer));
    x = step.minimizer;

    if (move <= fixed_point_tol(x)) {
      traj.stop_reason = StopReason::fixed_point;
      break;
    }
    ++traj.effective_iterations;
    if (move <= cfg.epsilon) {
      traj.stop_reason = StopReason::step_tol;
      break;
    }
  }

  traj.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return traj;
}

std::uint64_t iteration_bound(const RunConfig& cfg, double f_x0, double f_inf) {
  if (f_x0 < f_inf) throw std::invalid_argument("iteration_bound: f_x0 < f_inf");
  const long double gap = static_cast<long double>(f_x0) - static_cast<long double>(f_inf);
  const long double raw = static_cast<long double>(cfg.p) * cfg.gamma_max * gap /
                          std::pow(static_cast<long double>(cfg.epsilon), cfg.p);
  if (raw >= 1.8e19L) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(std::ceil(raw));
}

bool AuditReport::all_passed() const {
  for (const auto& c : checks)
    if (c.status == AuditStatus::failed) return false;
  return true;
}

bool AuditReport::any_skipped() const {
  for (const auto& c : checks)
    if (c.status == AuditStatus::skipped) return true;
  return false;
}

namespace {

std::string at_index(const char* what, std::size_t k, double a, double b) {
  std::ostringstream os;
  os << what << " violated at step " << k << " (" << a << " -> " << b << ")";
  return os.str();
}

}  // namespace

AuditReport audit_trajectory(const Trajectory& traj, const RunConfig& cfg,
                             const ObjectiveFunction* f) {
  AuditReport rep;
  const std::size_t n = traj.steps();

  {
    AuditCheck c{"f_decreasing", AuditStatus::passed, ""};
    for (std::size_t k = 0; k < n; ++k) {
      const bool tiny = traj.step_norms[k] <= fixed_point_tol(traj.iterates[k]);
      const double a = traj.f_values[k], b = traj.f_values[k + 1];
      if (tiny ? b > a : b >= a) {
        c.status = AuditStatus::failed;
        c.detail = at_index("monotone f decrease", k, a, b);
        break;
      }
    }
    rep.checks.push_back(std::move(c));
  }
  {
    AuditCheck c{"env_decreasing", AuditStatus::passed, ""};
    for (std::size_t k = 0; k + 1 < n; ++k) {
      // env_{k+1} <= env_k - penalty_k, strict exactly when step k moved.
      const bool tiny = traj.step_norms[k] <= fixed_point_tol(traj.iterates[k]);
      const double a = traj.env_values[k], b = traj.env_values[k + 1];
      if (tiny ? b > a : b >= a) {
        c.status = AuditStatus::failed;
        c.detail = at_index("monotone envelope decrease", k, a, b);
        break;
      }
    }
    rep.checks.push_back(std::move(c));
  }
  {
    AuditCheck c{"gamma_in_range", AuditStatus::passed, ""};
    for (std::size_t k = 0; k < n; ++k) {
      if (!(traj.gammas[k] > cfg.gamma_min && traj.gammas[k] < cfg.gamma_max)) {
        c.status = AuditStatus::failed;
        c.detail = at_index("gamma range", k, traj.gammas[k], cfg.gamma_min);
        break;
      }
    }
    rep.checks.push_back(std::move(c));
  }
  {
    AuditCheck c{"step_summability", AuditStatus::skipped, "needs known infimum"};
    if (f && f->known_inf) {
      double sum = 0.0;
      for (double s : traj.step_norms) sum += std::pow(s, cfg.p);
      const double bound = cfg.p * cfg.gamma_max * (traj.f_values.front() - *f->known_inf) + 1e-6;
      if (sum <= bound) {
        c.status = AuditStatus::passed;
        c.detail = "";
      } else {
        c.status = AuditStatus::failed;
        std::ostringstream os;
        os << "sum step^p = " << sum << " exceeds " << bound;
        c.detail = os.str();
      }
    }
    rep.checks.push_back(std::move(c));
  }
  {
    AuditCheck c{"bounded_iterates", AuditStatus::passed, ""};
    if (f && f->known_minimizer) {
      const double e0 = (traj.iterates.front() - *f->known_minimizer).norm();
      for (std::size_t k = 0; k < traj.iterates.size(); ++k) {
        const double ek = (traj.iterates[k] - *f->known_minimizer).norm();
        if (ek > e0 * (1.0 + 1e-9) + 1e-9) {
          c.status = AuditStatus::failed;
          c.detail = at_index("sublevel ball containment", k, ek, e0);
          break;
        }
      }
    } else {
      const double f0 = traj.f_values.front();
      for (std::size_t k = 0; k < traj.f_values.size(); ++k) {
        if (traj.f_values[k] > f0 + 1e-9) {
          c.status = AuditStatus::failed;
          c.detail = at_index("sublevel containment", k, traj.f_values[k], f0);
          break;
        }
      }
    }
    rep.checks.push_back(std::move(c));
  }
  {
    AuditCheck c{"iteration_bound", AuditStatus::skipped, "needs known infimum"};
    if (f && f->known_inf) {
      const std::uint64_t bound = iteration_bound(cfg, traj.f_values.front(), *f->known_inf);
      if (static_cast<std::uint64_t>(traj.effective_iterations) <= bound) {
        c.status = AuditStatus::passed;
        c.detail = "";
      } else {
        c.status = AuditStatus::failed;
        std::ostringstream os;
        os << traj.effective_iterations << " iterations exceed the bound " << bound;
        c.detail = os.str();
      }
    }
    rep.checks.push_back(std::move(c));
  }
  return rep;
}

}  // namespace hippa
