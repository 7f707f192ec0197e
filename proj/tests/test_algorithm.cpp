#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hippa/algorithm.hpp"

#include <cmath>

using namespace hippa;

namespace {

Vector vec1(double a) {
  Vector v(1);
  v << a;
  return v;
}

}  // namespace

TEST_CASE("run reproduces the closed-form p = 2 sequence x_k = 3^-k") {
  const ObjectiveFunction f = norm_power(2, 1);
  const RunConfig cfg = make_run_config(2, 1.0, 1e-10);
  const Trajectory traj = run(f, ConvexSet::whole_space(1), cfg, vec1(1.0));
  CHECK(traj.stop_reason == StopReason::step_tol);
  REQUIRE(traj.iterates.size() >= 5);
  for (std::size_t k = 0; k < std::min<std::size_t>(traj.iterates.size(), 12); ++k)
    CHECK(traj.iterates[k][0] == doctest::Approx(std::pow(3.0, -double(k))).epsilon(1e-12));
}

TEST_CASE("run from the known minimizer stops immediately as a fixed point") {
  const ObjectiveFunction f = norm_power(2, 3);
  const RunConfig cfg = make_run_config(2, 1.0, 1e-8);
  const Trajectory traj = run(f, ConvexSet::whole_space(3), cfg, Vector::Zero(3));
  CHECK(traj.stop_reason == StopReason::fixed_point);
  CHECK(traj.effective_iterations == 0);
}

TEST_CASE("run reproduces the p = 3 quadratic-root recursion") {
  const ObjectiveFunction f = norm_power(2, 1);
  RunConfig cfg = make_run_config(3, 1.0, 1e-10);
  cfg.inner_tol = 1e-12;
  const Trajectory traj = run(f, ConvexSet::whole_space(1), cfg, vec1(1.0));
  // x_{k+1} = (x_k + 1) - sqrt(2 x_k + 1), the positive root of
  // y^2 - 2(x+1)y + x^2 = 0.
  double x = 1.0;
  CHECK(traj.iterates[1][0] == doctest::Approx(2.0 - std::sqrt(3.0)).epsilon(1e-10));
  for (std::size_t k = 1; k < traj.iterates.size(); ++k) {
    x = (x + 1.0) - std::sqrt(2.0 * x + 1.0);
    CHECK(std::abs(traj.iterates[k][0] - x) <= 1e-10);
  }
  CHECK(traj.iterates[2][0] == doctest::Approx(0.02863551750364679).epsilon(1e-8));
}

TEST_CASE("infeasible start is projected with a note") {
  const ObjectiveFunction f = norm_power(2, 2);
  const ConvexSet ball = ConvexSet::ball(Vector::Zero(2), 1.0);
  const RunConfig cfg = make_run_config(2, 1.0, 1e-9);
  Vector x0(2);
  x0 << 5.0, 0.0;
  const Trajectory traj = run(f, ball, cfg, x0);
  REQUIRE(!traj.notes.empty());
  CHECK((traj.iterates[0] - ball.project(x0)).norm() == 0.0);
  CHECK(traj.stop_reason == StopReason::step_tol);
}

TEST_CASE("gamma schedules stay in the open interval") {
  const ObjectiveFunction f = norm_power(2, 1);
  RunConfig cfg;
  cfg.p = 2;
  cfg.gamma_min = 0.5;
  cfg.gamma_max = 2.0;
  cfg.epsilon = 1e-8;

  cfg.schedule = GammaSchedule::uniform_random(123);
  Trajectory t1 = run(f, ConvexSet::whole_space(1), cfg, vec1(1.0));
  for (double g : t1.gammas) {
    CHECK(g > cfg.gamma_min);
    CHECK(g < cfg.gamma_max);
  }
  // Same seed, same gammas.
  Trajectory t2 = run(f, ConvexSet::whole_space(1), cfg, vec1(1.0));
  REQUIRE(t1.gammas.size() == t2.gammas.size());
  for (std::size_t k = 0; k < t1.gammas.size(); ++k) CHECK(t1.gammas[k] == t2.gammas[k]);

  cfg.schedule = GammaSchedule::geometric(0.1, 3.0);  // clamps at both ends
  Trajectory t3 = run(f, ConvexSet::whole_space(1), cfg, vec1(1.0));
  for (double g : t3.gammas) {
    CHECK(g > cfg.gamma_min);
    CHECK(g < cfg.gamma_max);
  }

  cfg.schedule = GammaSchedule::constant_gamma(0.0);  // midpoint default
  Trajectory t4 = run(f, ConvexSet::whole_space(1), cfg, vec1(1.0));
  CHECK(t4.gammas[0] == doctest::Approx(1.25));
}

TEST_CASE("iteration_bound formula") {
  RunConfig cfg = make_run_config(2, 1.0, 0.1);
  cfg.gamma_max = 1.0;
  CHECK(iteration_bound(cfg, 1.0, 0.0) == 200);  // 2*1*1/0.01

  RunConfig cfg2 = make_run_config(3, 2.0, 0.5);
  cfg2.gamma_max = 2.0;
  CHECK(iteration_bound(cfg2, 4.0, 0.0) == 192);  // ceil(3*2*4/0.125)

  CHECK(iteration_bound(cfg, 5.0, 5.0) == 0);  // zero gap
  CHECK_THROWS_AS(iteration_bound(cfg, 0.0, 1.0), std::invalid_argument);

  // Saturation instead of overflow for tiny epsilon.
  RunConfig cfg3 = make_run_config(4, 1.0, 1e-10);
  cfg3.gamma_max = 1.0;
  CHECK(iteration_bound(cfg3, 1.0, 0.0) == std::numeric_limits<std::uint64_t>::max());
}

TEST_CASE("audit passes on a clean run and fails on a corrupted one") {
  const ObjectiveFunction f = norm_power(2, 1);
  const RunConfig cfg = make_run_config(2, 1.0, 1e-10);
  Trajectory traj = run(f, ConvexSet::whole_space(1), cfg, vec1(1.0));

  const AuditReport good = audit_trajectory(traj, cfg, &f);
  CHECK(good.all_passed());
  CHECK(!good.any_skipped());

  // Corrupt one f value upward; the monotonicity check must name the index.
  Trajectory bad = traj;
  bad.f_values[3] = bad.f_values[2] + 1.0;
  const AuditReport rep = audit_trajectory(bad, cfg, &f);
  CHECK(!rep.all_passed());
  bool found = false;
  for (const auto& c : rep.checks)
    if (c.name == "f_decreasing" && c.status == AuditStatus::failed) {
      found = true;
      CHECK(c.detail.find("step 2") != std::string::npos);
    }
  CHECK(found);
}

TEST_CASE("audit on a single fixed-point step passes trivially") {
  const ObjectiveFunction f = norm_power(2, 2);
  const RunConfig cfg = make_run_config(2, 1.0, 1e-8);
  const Trajectory traj = run(f, ConvexSet::whole_space(2), cfg, Vector::Zero(2));
  CHECK(audit_trajectory(traj, cfg, &f).all_passed());
}

TEST_CASE("audit skips metadata checks without a known infimum") {
  ObjectiveFunction f = norm_power(2, 1);
  f.known_inf.reset();
  f.known_minimizer.reset();
  const RunConfig cfg = make_run_config(2, 1.0, 1e-9);
  const Trajectory traj = run(f, ConvexSet::whole_space(1), cfg, vec1(1.0));
  const AuditReport rep = audit_trajectory(traj, cfg, &f);
  CHECK(rep.all_passed());
  CHECK(rep.any_skipped());
}

TEST_CASE("summability bound holds along the run") {
  const ObjectiveFunction f = norm_power(2, 2);
  for (double p : {1.5, 2.0, 3.0}) {
    RunConfig cfg = make_run_config(p, 1.0, 1e-6);
    const Trajectory traj = run(f, ConvexSet::whole_space(2), cfg, Vector::Ones(2));
    double sum = 0.0;
    for (double s : traj.step_norms) sum += std::pow(s, p);
    CHECK(sum <= p * cfg.gamma_max * (traj.f_values.front() - 0.0) + 1e-6);
  }
}

TEST_CASE("config validation") {
  RunConfig cfg;
  cfg.p = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.p = 2.0;
  cfg.gamma_min = 2.0;
  cfg.gamma_max = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.gamma_min = 0.5;
  cfg.gamma_max = 2.0;
  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.epsilon = 1e-8;
  cfg.schedule = GammaSchedule::constant_gamma(5.0);  // outside the interval
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("solver runs on the non-quasiconvex sum counterexample") {
  // The 1-D grid dispatch resolves the discontinuous dips exactly; the run
  // still descends and the metadata-free audit checks pass.
  const auto suite = counterexample_suite(0.5);
  const ObjectiveFunction& f = suite[0];
  RunConfig cfg = make_run_config(2, 0.5, 1e-6);
  const Trajectory traj = run(f, ConvexSet::whole_space(1), cfg, vec1(2.0));
  CHECK(traj.f_values.back() <= 2.0 + 1e-9);  // reaches the global basin
  const AuditReport rep = audit_trajectory(traj, cfg, &f);
  CHECK(rep.all_passed());
}
