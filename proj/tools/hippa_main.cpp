// Command-line front end: solver runs, rate sweeps, property checks, and
// timing, all emitting deterministic CSV/JSON artifacts.

#include "hippa/catalogue.hpp"
#include "hippa/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <thread>

namespace {

using hippa::Vector;
using ordered_json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '=' || c == '-')
      out += c;
    else
      out += '_';
  }
  return out;
}

struct RunOptions {
  std::string problem;
  std::string set = "whole";
  double p = 2.0;
  double gamma = 1.0;
  double gamma_min = 0.0;  // 0 -> derived from gamma
  double gamma_max = 0.0;
  std::string schedule = "constant";
  double g0 = 1.0;
  double factor = 1.0;
  double eps = 1e-8;
  std::int64_t max_iter = 1000000;
  double inner_tol = 0.0;
  std::string x0 = "ones";
  std::uint64_t seed = 0;
  std::string out = "out";
  double radius_hint_scale = 10.0;
};

void add_run_options(CLI::App* cmd, RunOptions& o, bool needs_problem = true) {
  auto* p = cmd->add_option("--problem", o.problem, "problem id, e.g. norm_power:q=2,dim=5");
  if (needs_problem) p->required();
  cmd->add_option("--set", o.set, "feasible set spec (default: whole)");
  cmd->add_option("--p", o.p, "proximal order p > 1");
  cmd->add_option("--gamma", o.gamma, "constant gamma (used by schedule=constant)");
  cmd->add_option("--gamma-min", o.gamma_min, "lower end of the gamma interval");
  cmd->add_option("--gamma-max", o.gamma_max, "upper end of the gamma interval");
  cmd->add_option("--schedule", o.schedule, "constant | uniform | geometric");
  cmd->add_option("--g0", o.g0, "geometric schedule start value");
  cmd->add_option("--factor", o.factor, "geometric schedule factor");
  cmd->add_option("--eps", o.eps, "stopping tolerance on the step norm");
  cmd->add_option("--max-iter", o.max_iter, "outer iteration cap");
  cmd->add_option("--inner-tol", o.inner_tol, "inner solver tolerance (0 = auto)");
   cmd->add_option("--x0", o.x0, "ones | zeros | const:<v> | minimizer | rand:<radius> | <csv>");
  cmd->add_option("--seed", o.seed, "seed (default: HIPPA_SEED or 0)");
  cmd->add_option("--out", o.out, "output directory");
}

hippa::RunConfig build_config(const RunOptions& o) {
  hippa::RunConfig cfg;
  cfg.p = o.p;
  cfg.epsilon = o.eps;
  cfg.max_iter = o.max_iter;
  cfg.inner_tol = o.inner_tol;
  if (o.schedule == "constant") {
    if (o.gamma_min > 0.0 && o.gamma_max > 0.0) {
      cfg.gamma_min = o.gamma_min;
      cfg.gamma_max = o.gamma_max;
      cfg.schedule = hippa::GammaSchedule::constant_gamma(0.0);  // midpoint
    } else {
      cfg = hippa::make_run_config(o.p, o.gamma, o.eps, o.max_iter);
      cfg.inner_tol = o.inner_tol;
    }
  } else if (o.schedule == "uniform") {
    if (!(o.gamma_min > 0.0 && o.gamma_max > o.gamma_min))
      throw std::invalid_argument("schedule=uniform requires --gamma-min < --gamma-max");
    cfg.gamma_min = o.gamma_min;
    cfg.gamma_max = o.gamma_max;
    cfg.schedule = hippa::GammaSchedule::uniform_random(o.seed);
  } else if (o.schedule == "geometric") {
    if (!(o.gamma_min > 0.0 && o.gamma_max > o.gamma_min))
      throw std::invalid_argument("schedule=geometric requires --gamma-min < --gamma-max");
    cfg.gamma_min = o.gamma_min;
    cfg.gamma_max = o.gamma_max;
    cfg.schedule = hippa::GammaSchedule::geometric(o.g0, o.factor);
  } else {
    throw std::invalid_argument("unknown schedule '" + o.schedule + "'");
  }
  return cfg;
}

/// Problems that are only ball-locally uniformly quasiconvex get their
/// modulus ball sized from the start point so the whole run stays inside.
hippa::ObjectiveFunction assemble_problem(const RunOptions& o) {
  hippa::ObjectiveFunction f = hippa::parse_problem(o.problem);
  if (o.problem.rfind("norm_power", 0) == 0 && o.problem.find(",r=") == std::string::npos &&
      f.domain_hint) {
    const Vector x0 = hippa::parse_x0(o.x0, f, o.seed);
    const double r = o.radius_hint_scale * std::max(x0.norm(), 0.1);
    f = hippa::parse_problem(o.problem + ",r=" + hippa::format_double(r));
  }
  return f;
}

ordered_json vector_json(const Vector& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ordered_json config_json(const RunOptions& o, const hippa::RunConfig& cfg) {
  ordered_json j;
  j["problem"] = o.problem;
  j["set"] = o.set;
  j["p"] = cfg.p;
  j["gamma_min"] = cfg.gamma_min;
  j["gamma_max"] = cfg.gamma_max;
  j["schedule"] = o.schedule;
  if (o.schedule == "constant") j["gamma"] = o.gamma;
  if (o.schedule == "geometric") {
    j["g0"] = o.g0;
    j["factor"] = o.factor;
  }
  j["epsilon"] = cfg.epsilon;
  j["max_iter"] = cfg.max_iter;
  j["inner_tol"] = cfg.resolved_inner_tol();
  j["x0"] = o.x0;
  j["seed"] = o.seed;
  return j;
}

ordered_json audit_json(const hippa::AuditReport& audit) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : audit.checks) {
    ordered_json j;
    j["name"] = c.name;
    j["status"] = c.status == hippa::AuditStatus::passed   ? "passed"
                  : c.status == hippa::AuditStatus::failed ? "failed"
                                                           : "skipped";
    if (!c.detail.empty()) j["detail"] = c.detail;
    arr.push_back(std::move(j));
  }
  return arr;
}

ordered_json check_json(const hippa::CheckReport& rep) {
  ordered_json j;
  j["name"] = rep.name;
  j["passed"] = rep.passed;
  j["samples"] = rep.samples;
  j["slack_used"] = rep.slack_used;
  if (!rep.detail.empty()) j["detail"] = rep.detail;
  if (rep.witness) {
    ordered_json w;
    w["x"] = vector_json(rep.witness->x);
    w["y"] = vector_json(rep.witness->y);
    w["lambda"] = rep.witness->lambda;
    w["violation"] = rep.witness->violation;
    j["witness"] = std::move(w);
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

std::string run_id(const RunOptions& o) {
  return sanitize(o.problem) + "__" + sanitize(o.set) + "__p" + hippa::format_double(o.p) +
         "__" + sanitize(o.schedule) + hippa::format_double(o.gamma) + "__s" +
         std::to_string(o.seed);
}

int cmd_run(const RunOptions& o) {
  const hippa::ObjectiveFunction f = assemble_problem(o);
  const hippa::ConvexSet C = hippa::parse_set(o.set, f.dim);
  const hippa::RunConfig cfg = build_config(o);
  const Vector x0 = hippa::parse_x0(o.x0, f, o.seed);

  const hippa::Trajectory traj = hippa::run(f, C, cfg, x0);
  const hippa::AuditReport audit = hippa::audit_trajectory(traj, cfg, &f);

  const std::filesystem::path dir = std::filesystem::path(o.out) / run_id(o);
  hippa::write_file_atomic(dir / "traj.csv", hippa::trajectory_csv(traj, f.known_minimizer));
  if (f.known_minimizer)
    hippa::write_file_atomic(dir / "series.txt", hippa::series_text(traj, *f.known_minimizer));

  ordered_json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["command"] = "run";
  summary["config"] = config_json(o, cfg);
  summary["stop_reason"] = hippa::to_string(traj.stop_reason);
  summary["iterations"] = traj.effective_iterations;
  summary["final_f"] = traj.f_values.back();
  if (f.known_minimizer) {
    summary["final_error"] = (traj.iterates.back() - *f.known_minimizer).norm();
    const hippa::RateEstimate est = hippa::estimate_rate(traj, *f.known_minimizer);
    ordered_json rate;
    rate["regime"] = hippa::to_string(est.regime);
    if (est.linear_factor) rate["linear_factor"] = *est.linear_factor;
    if (est.superlinear_degree) rate["superlinear_degree"] = *est.superlinear_degree;
    if (!est.diagnostic.empty()) rate["diagnostic"] = est.diagnostic;
    summary["rate"] = std::move(rate);
  }
  summary["audit"] = audit_json(audit);
  ordered_json warnings = ordered_json::array();
  for (const auto& n : traj.notes) warnings.push_back(n);
  if (!traj.error_message.empty()) warnings.push_back(traj.error_message);
  if (!f.modulus)
    warnings.push_back("problem declares no modulus; rate guarantees are unverifiable");
  if (audit.any_skipped())
    warnings.push_back("some audit checks were skipped (missing minimizer/modulus metadata)");
  summary["warnings"] = std::move(warnings);
  hippa::write_file_atomic(dir / "summary.json", summary.dump(2) + "\n");

  std::cout << "run " << run_id(o) << ": " << hippa::to_string(traj.stop_reason) << " after "
            << traj.effective_iterations << " iterations, final f = "
            << hippa::format_double(traj.f_values.back()) << "\n";
  for (const auto& c : audit.checks) {
    if (c.status == hippa::AuditStatus::failed)
      std::cout << "  audit FAILED: " << c.name << " (" << c.detail << ")\n";
    else if (c.status == hippa::AuditStatus::skipped)
      std::cout << "  audit skipped: " << c.name << " (" << c.detail << ")\n";
  }
  if (!f.modulus)
    std::cout << "  warning: problem declares no modulus; rate guarantees are unverifiable\n";
  if (traj.stop_reason == hippa::StopReason::error) {
    std::cout << "  solver error: " << traj.error_message << "\n";
    return 1;
  }
  return audit.all_passed() ? 0 : 1;
}

struct RateRow {
  double p = 0.0;
  double gamma = 0.0;
  bool ran = false;
  std::string error;
  std::string regime = "na";
  std::string bound = "na";
  std::string empirical = "na";
  std::string pass = "na";
  double q = 0.0;
  double rho = 0.0;
  double gamma_min = 0.0;
  std::string series;
};

int cmd_rates(const RunOptions& base, const std::vector<double>& p_list,
              const std::vector<double>& gamma_list, bool allow_unguaranteed, int jobs) {
  if (p_list.empty()) throw std::invalid_argument("rates: --p-list must be nonempty");
  std::vector<std::pair<double, double>> configs;
  for (std::size_t i = 0; i < p_list.size(); ++i) {
    const double g = gamma_list.empty()
                         ? base.gamma
                         : gamma_list[gamma_list.size() == 1 ? 0 : i % gamma_list.size()];
    configs.emplace_back(p_list[i], g);
  }

  // Validate regimes up front so a bad sweep is a usage error, not a
  // half-written artifact.
  {
    const hippa::ObjectiveFunction probe = assemble_problem(base);
    for (const auto& [p, g] : configs) {
      (void)g;
      if ((!probe.modulus || !hippa::classify_rate_case(p, *probe.modulus)) &&
          !allow_unguaranteed)
        throw std::invalid_argument(
            "rates: configuration p=" + hippa::format_double(p) +
            " matches no guaranteed regime (use --allow-unguaranteed to run anyway)");
    }
  }

  std::vector<RateRow> rows(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) return;
      RateRow& row = rows[i];
      row.p = configs[i].first;
      row.gamma = configs[i].second;
      try {
        RunOptions o = base;
        o.p = row.p;
        o.gamma = row.gamma;
        const hippa::ObjectiveFunction f = assemble_problem(o);
        const hippa::ConvexSet C = hippa::parse_set(o.set, f.dim);
        const hippa::RunConfig cfg = build_config(o);
        const Vector x0 = hippa::parse_x0(o.x0, f, o.seed);
        const hippa::Trajectory traj = hippa::run(f, C, cfg, x0);
        row.gamma_min = cfg.gamma_min;
        if (f.modulus) {
          row.q = f.modulus->q;
          row.rho = f.modulus->rho;
        }
        if (f.known_minimizer) {
          row.series = hippa::series_text(traj, *f.known_minimizer);
          const hippa::RateEstimate est = hippa::estimate_rate(traj, *f.known_minimizer);
          row.regime = hippa::to_string(est.regime);
          if (est.linear_factor) row.empirical = hippa::format_double(*est.linear_factor);
          if (est.superlinear_degree)
            row.empirical = hippa::format_double(*est.superlinear_degree);

          if (f.modulus) {
            const auto rc = hippa::classify_rate_case(row.p, *f.modulus);
            if (rc) {
              std::optional<double> sigma_p;
              if (*rc == hippa::RateCase::local_linear_small_p)
                sigma_p = hippa::sigma_p_for_run(traj, row.p);
              const double bound = hippa::theoretical_rate(*rc, row.p, f.modulus->q,
                                                           f.modulus->rho, cfg.gamma_min, sigma_p);
              row.bound = hippa::format_double(bound);
              if (*rc == hippa::RateCase::superlinear) {
                row.pass = (est.superlinear_degree &&
                            std::abs(*est.superlinear_degree - bound) <= 0.3)
                               ? "1"
                               : "0";
              } else if (est.linear_factor) {
                row.pass = (*est.linear_factor <= bound + 0.02) ? "1" : "0";
              } else {
                row.pass = "0";
              }
            }
          }
        }
        row.ran = true;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(configs.size())));
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  const std::filesystem::path dir(base.out);
  std::string csv = "p,q,rho,gamma_min,theoretical_bound,empirical_factor_or_degree,regime,pass\n";
  bool all_ok = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const RateRow& r = rows[i];
    if (!r.ran) {
      all_ok = false;
      std::cout << "rates: config p=" << hippa::format_double(r.p) << " failed: " << r.error
                << "\n";
      continue;
    }
    csv += hippa::format_double(r.p) + "," + hippa::format_double(r.q) + "," +
           hippa::format_double(r.rho) + "," + hippa::format_double(r.gamma_min) + "," + r.bound +
           "," + r.empirical + "," + r.regime + "," + r.pass + "\n";
    if (!r.series.empty())
      hippa::write_file_atomic(
          dir / ("series_" + std::to_string(i) + "_p" + sanitize(hippa::format_double(r.p)) +
                 ".txt"),
          r.series);
    if (r.pass == "0") all_ok = false;
    std::cout << "rates: p=" << hippa::format_double(r.p) << " regime=" << r.regime
              << " empirical=" << r.empirical << " bound=" << r.bound << " pass=" << r.pass
              << "\n";
  }
  hippa::write_file_atomic(dir / "rates.csv", csv);
  return all_ok ? 0 : 1;
}

int cmd_check(const RunOptions& o, const std::string& check_name, std::int64_t samples,
              const std::string& at, const std::string& seg_from, const std::string& seg_to,
              int m_coercive, double rho_override) {
  hippa::ObjectiveFunction f = assemble_problem(o);
  const bool expected_pass = o.problem.rfind("counterexample:", 0) != 0;

  hippa::CheckReport rep;
  const hippa::Sampler sampler = hippa::default_sampler(f);
  if (check_name == "uqc") {
    rep = hippa::check_uniform_quasiconvexity(f, sampler, f.modulus, samples, o.seed);
  } else if (check_name == "line") {
    const Vector a = hippa::parse_x0(seg_from, f, o.seed);
    const Vector b = hippa::parse_x0(seg_to, f, o.seed + 1);
    rep = hippa::check_line_segment(f, a, b, f.modulus);
  } else if (check_name == "diff") {
    if (!f.modulus) throw std::invalid_argument("check diff: problem has no declared modulus");
    hippa::Modulus mod = *f.modulus;
    if (rho_override > 0.0) mod = hippa::Modulus(rho_override, mod.q, mod.interval);
    rep = hippa::check_differential(f, mod, samples, o.seed);
  } else if (check_name == "growth") {
    if (!f.modulus || !f.known_minimizer)
      throw std::invalid_argument("check growth: needs a declared modulus and known minimizer");
    rep = hippa::check_growth(f, *f.known_minimizer, *f.modulus, samples, o.seed);
  } else if (check_name == "coercive") {
    rep = hippa::check_supercoercivity(f, m_coercive, 8, o.seed);
  } else if (check_name == "lsc") {
    if (!f.known_minimizer) throw std::invalid_argument("check lsc: needs a known minimizer");
    const double rho = rho_override > 0.0 ? rho_override : f.modulus ? f.modulus->rho : 0.0;
    if (!(rho > 0.0)) throw std::invalid_argument("check lsc: provide --rho");
    rep = hippa::check_local_strong_convexity(f, *f.known_minimizer, rho);
  } else if (check_name == "stationary") {
    const hippa::ConvexSet C = hippa::parse_set(o.set, f.dim);
    const Vector x = hippa::parse_x0(at, f, o.seed);
    rep = hippa::check_stationarity(f, C, x, 16, o.seed);
  } else if (check_name == "modulus") {
    rep.name = "estimate_modulus";
    try {
      const hippa::Modulus m = hippa::estimate_modulus(f, sampler, samples, o.seed);
      rep.passed = true;
      rep.samples = samples;
      rep.detail =
          "fitted rho = " + hippa::format_double(m.rho) + ", q = " + hippa::format_double(m.q);
    } catch (const std::domain_error& e) {
      rep.passed = false;
      rep.detail = e.what();
    }
  } else {
    throw std::invalid_argument("unknown check '" + check_name + "'");
  }

  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "check";
  j["check"] = check_name;
  j["problem"] = o.problem;
  j["seed"] = o.seed;
  j["result"] = check_json(rep);
  j["expected_pass"] = expected_pass;
  j["matched_expectation"] = rep.passed == expected_pass;
  hippa::write_file_atomic(std::filesystem::path(o.out) / "checks.json", j.dump(2) + "\n");

  std::cout << "check " << check_name << " on " << o.problem << ": "
            << (rep.passed ? "pass" : "fail")
            << (rep.passed == expected_pass ? "" : " (unexpected)") << "\n";
  if (rep.witness)
    std::cout << "  witness: lambda=" << hippa::format_double(rep.witness->lambda)
              << " violation=" << hippa::format_double(rep.witness->violation) << "\n";
  return rep.passed == expected_pass ? 0 : 1;
}

int cmd_bench(const RunOptions& o, int repeat) {
  const hippa::ObjectiveFunction f = assemble_problem(o);
  const hippa::ConvexSet C = hippa::parse_set(o.set, f.dim);
  const hippa::RunConfig cfg = build_config(o);
  const Vector x0 = hippa::parse_x0(o.x0, f, o.seed);

  std::string csv = "repeat,iterations,final_f,wall_seconds\n";
  std::vector<double> times;
  for (int r = 0; r < repeat; ++r) {
    const hippa::Trajectory traj = hippa::run(f, C, cfg, x0);
    times.push_back(traj.wall_time);
    csv += std::to_string(r) + "," + std::to_string(traj.effective_iterations) + "," +
           hippa::format_double(traj.f_values.back()) + "," +
           hippa::format_double(traj.wall_time) + "\n";
  }
  hippa::write_file_atomic(std::filesystem::path(o.out) / "bench.csv", csv);
  std::sort(times.begin(), times.end());
  std::cout << "bench " << o.problem << ": median wall time "
            << hippa::format_double(times[times.size() / 2]) << " s over " << repeat
            << " repeats\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-order proximal-point solver and property checkers"};
  app.require_subcommand(1);
  app.set_config("--config", "", "declarative config file (TOML/INI; sections per subcommand, flags override)");

  std::uint64_t default_seed = 0;
  if (const char* env = std::getenv("HIPPA_SEED"))
    default_seed = std::strtoull(env, nullptr, 10);

  RunOptions run_opts;
  run_opts.seed = default_seed;
  auto* run_cmd = app.add_subcommand("run", "solve one problem and audit the trajectory");
  run_cmd->configurable();
  add_run_options(run_cmd, run_opts);

  RunOptions rates_opts;
  rates_opts.seed = default_seed;
  std::vector<double> p_list, gamma_list;
  bool allow_unguaranteed = false;
  int jobs = 1;
  auto* rates_cmd = app.add_subcommand("rates", "sweep configurations and tabulate rates");
  rates_cmd->configurable();
  add_run_options(rates_cmd, rates_opts);
  rates_cmd->add_option("--p-list", p_list, "proximal orders to sweep")
      ->required()
      ->delimiter(',');
  rates_cmd->add_option("--gamma-list", gamma_list, "gammas (1 value or one per p)")
      ->delimiter(',');
  rates_cmd->add_flag("--allow-unguaranteed", allow_unguaranteed,
                      "run configurations outside the guaranteed regimes");
  rates_cmd->add_option("--jobs", jobs, "concurrent runs");

  RunOptions check_opts;
  check_opts.seed = default_seed;
  std::string check_name;
  std::int64_t samples = 10000;
  std::string at = "minimizer";
  std::string seg_from = "ones";
  std::string seg_to = "zeros";
  int m_coercive = 2;
  double rho_override = 0.0;
  auto* check_cmd = app.add_subcommand("check", "run a property checker");
  check_cmd->configurable();
  check_cmd
      ->add_option("name", check_name,
                   "uqc | line | diff | growth | coercive | lsc | stationary | modulus")
      ->required();
  add_run_options(check_cmd, check_opts);
  check_cmd->add_option("--samples", samples, "sample count");
  check_cmd->add_option("--at", at, "evaluation point (stationary/lsc)");
  check_cmd->add_option("--from", seg_from, "segment endpoint (line)");
  check_cmd->add_option("--to", seg_to, "segment endpoint (line)");
  check_cmd->add_option("--m", m_coercive, "supercoercivity order");
  check_cmd->add_option("--rho", rho_override, "override modulus coefficient");

  RunOptions bench_opts;
  bench_opts.seed = default_seed;
  int repeat = 5;
  auto* bench_cmd = app.add_subcommand("bench", "repeat a run and report wall times");
  bench_cmd->configurable();
  add_run_options(bench_cmd, bench_opts);
  bench_cmd->add_option("--repeat", repeat, "number of repeats");

  try {
    app.parse(argc, argv);
    if (run_cmd->parsed()) return cmd_run(run_opts);
    if (rates_cmd->parsed())
      return cmd_rates(rates_opts, p_list, gamma_list, allow_unguaranteed, jobs);
    if (check_cmd->parsed())
      return cmd_check(check_opts, check_name, samples, at, seg_from, seg_to, m_coercive,
                       rho_override);
    if (bench_cmd->parsed()) return cmd_bench(bench_opts, repeat);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
