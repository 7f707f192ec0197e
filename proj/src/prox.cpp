#include "hippa/prox.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace hippa {

namespace {

constexpr std::int64_t kInnerCap = 100000;
constexpr std::int64_t kGridCap = 4000000;

double subproblem_value(const ObjectiveFunction& f, const ProxParams& params, const Vector& x,
                        const Vector& y) {
  return f.eval(y) + power_penalty(x, y, params);
}

Vector subproblem_grad(const std::function<Vector(const Vector&)>& grad_f,
                       const ProxParams& params, const Vector& x, const Vector& y) {
  return grad_f(y) + power_penalty_grad(x, y, params);
}

double golden_section(const std::function<double(double)>& psi, double a, double b, double tol) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = psi(c), fd = psi(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = psi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = psi(d);
    }
  }
  return 0.5 * (a + b);
}

ProxResult closed_form_quadratic(const ObjectiveFunction& f, const ProxParams& params,
                                 const Vector& x) {
  // minimize y'P y + r'y + s + (1/(2 gamma)) |x-y|^2
  //   => (2 gamma P + I) y = x - gamma r
  const QuadraticForm& qd = *f.quadratic;
  const Eigen::Index n = x.size();
  const Matrix M = 2.0 * params.gamma * qd.P + Matrix::Identity(n, n);
  const Vector y = M.ldlt().solve(x - params.gamma * qd.r);
  ProxResult res;
  res.minimizer = y;
  res.envelope_value = subproblem_value(f, params, x, y);
  res.subproblem_residual = (2.0 * qd.P * y + qd.r + (y - x) / params.gamma).norm();
  res.inner_iterations = 1;
  res.method = ProxMethod::closed_form;
  return res;
}

ProxResult radial_reduction(const ObjectiveFunction& f, const ConvexSet& C,
                            const ProxParams& params, const Vector& x, double inner_tol) {
  const RadialProfile& rp = *f.radial;
  const Vector d = x - rp.center;
  const double xr = d.norm();
  const double cap = C.kind() == ConvexSet::Kind::ball ? C.radius() : kInf;
  const double s_hi = std::min(xr, cap);

  ProxResult res;
  res.method = ProxMethod::radial_1d;
  if (s_hi == 0.0) {
    res.minimizer = rp.center;
    res.envelope_value = subproblem_value(f, params, x, res.minimizer);
    res.subproblem_residual = 0.0;
    res.inner_iterations = 1;
    return res;
  }

  const Vector u = d / xr;
  const auto psi = [&](double s) {
    return rp.profile(s) + std::pow(xr - s, params.p) / (params.p * params.gamma);
  };
  // Radial stationarity: profile'(s) - (1/gamma) (xr - s)^(p-1) = 0.
  const auto psi_prime = [&](double s) {
    return rp.derivative(s) - std::pow(xr - s, params.p - 1.0) / params.gamma;
  };

  // Coarse scan brackets the global 1-D minimum (the profile may be
  // nonconvex, e.g. |.|^q with q < 1), then golden section refines it.
  const int n_scan = 1024;
  int best_i = 0;
  double best_v = psi(0.0);
  for (int i = 1; i <= n_scan; ++i) {
    const double s = s_hi * static_cast<double>(i) / n_scan;
    const double v = psi(s);
    if (v < best_v) {
      best_v = v;
      best_i = i;
    }
  }
  const double cell = s_hi / n_scan;
  const double lo = std::max(0.0, (best_i - 1) * cell);
  const double hi = std::min(s_hi, (best_i + 1) * cell);
  double s_star = golden_section(psi, lo, hi, 1e-10 * std::max(1.0, s_hi));
  // Value comparisons saturate at sqrt(machine eps); polishing the
  // stationarity root recovers full precision when a derivative exists.
  if (rp.derivative) {
    double a = std::max(lo, 1e-300), b = hi;
    double fa = psi_prime(a), fb = psi_prime(b);
    if (std::isfinite(fa) && std::isfinite(fb) && fa <= 0.0 && fb >= 0.0) {
      for (int it = 0; it < 200 && b - a > 1e-16 * std::max(1.0, b); ++it) {
        const double m = 0.5 * (a + b);
        const double fm = psi_prime(m);
        if (fm <= 0.0) {
          a = m;
          fa = fm;
        } else {
          b = m;
          fb = fm;
        }
      }
      s_star = 0.5 * (a + b);
    }
  }
  if (psi(0.0) <= psi(s_star)) s_star = 0.0;          // corner beats interior
  if (psi(s_hi) < psi(s_star)) s_star = s_hi;

  res.minimizer = rp.center + s_star * u;
  res.envelope_value = subproblem_value(f, params, x, res.minimizer);
  res.inner_iterations = n_scan + 128;
  if (s_star > 0.0 && f.has_grad()) {
    const Vector g = subproblem_grad(f.grad, params, x, res.minimizer);
    res.subproblem_residual = (res.minimizer - C.project(res.minimizer - g)).norm();
  } else {
    // At the radial center the profile may be nonsmooth; the scan already
    // certified global optimality along the ray.
    res.subproblem_residual = 0.0;
  }
  (void)inner_tol;
  return res;
}

ProxResult projected_gradient(const ObjectiveFunction& f, const ConvexSet& C,
                              const ProxParams& params, const Vector& x, double inner_tol) {
  std::function<Vector(const Vector&)> grad_f = f.grad;
  if (!grad_f) {
    auto e = f.eval;
    grad_f = [e](const Vector& y) { return finite_difference_gradient(e, y); };
  }

  std::vector<Vector> starts;
  starts.push_back(C.project(x));
  if (f.known_minimizer) {
    const Vector pm = C.project(*f.known_minimizer);
    if ((pm - starts[0]).norm() > 1e-12) starts.push_back(pm);
    const Vector mid = C.project(0.5 * (starts[0] + pm));
    if ((mid - starts[0]).norm() > 1e-12 && (mid - pm).norm() > 1e-12) starts.push_back(mid);
  }

  ProxResult best;
  best.envelope_value = kInf;
  std::int64_t total_iters = 0;

  for (const Vector& y0 : starts) {
    Vector y = y0;
    double fy = subproblem_value(f, params, x, y);
    if (!std::isfinite(fy)) continue;
    bool converged = false;

    // Local Lipschitz estimate by secant probing sets the initial step.
    Vector g = subproblem_grad(grad_f, params, x, y);
    double step = 1.0;
    {
      const double gn = g.norm();
      if (gn > 0.0) {
        const double t0 = 1e-3 / std::max(1.0, gn);
        const Vector yp = C.project(y - t0 * g);
        if ((yp - y).norm() > 0.0) {
          const Vector gp = subproblem_grad(grad_f, params, x, yp);
          const double L = (gp - g).norm() / (yp - y).norm();
          if (L > 1e-12 && std::isfinite(L)) step = 1.0 / L;
        }
      }
    }

    for (std::int64_t it = 0; it < kInnerCap; ++it) {
      const double resid = (y - C.project(y - g)).norm();
      ++total_iters;
      if (resid <= inner_tol) {
        converged = true;
        break;
      }
      // Armijo backtracking on the projected step. Decreases below the
      // value rounding floor are indistinguishable from noise and must not
      // be accepted, or the step estimate collapses.
      const double noise_floor = 8.0 * std::numeric_limits<double>::epsilon() *
                                 (1.0 + std::abs(fy));
      double t = step;
      Vector z;
      double fz = kInf;
      bool accepted = false;
      for (int bt = 0; bt < 60; ++bt) {
        z = C.project(y - t * g);
        fz = subproblem_value(f, params, x, z);
        const double decrease = fy - fz;
        const double required = 1e-4 / std::max(t, 1e-300) * (z - y).squaredNorm();
        if (std::isfinite(fz) && decrease >= required && decrease > noise_floor) {
          accepted = true;
          break;
        }
        t *= 0.5;
        if (t < 1e-18 * step) break;
      }
      if (accepted) {
        y = z;
        fy = fz;
        g = subproblem_grad(grad_f, params, x, y);
        step = std::min(t * 1.5, 1e6);
        continue;
      }
      // Value-certified decrease saturates near the minimum; switch to
      // residual-monotone fixed-point steps y <- proj(y - t g). The step
      // estimate is kept for later iterations.
      bool moved = false;
      double tf = step;
      for (int bt = 0; bt < 60; ++bt) {
        z = C.project(y - tf * g);
        fz = subproblem_value(f, params, x, z);
        if (std::isfinite(fz)) {
          const Vector gz = subproblem_grad(grad_f, params, x, z);
          const double rz = (z - C.project(z - gz)).norm();
          if (rz < resid * (1.0 - 1e-3)) {
            y = z;
            fy = fz;
            g = gz;
            moved = true;
            break;
          }
        }
        tf *= 0.5;
        if (tf < 1e-14 * step) break;
      }
      if (!moved) break;  // genuine stall; residual check decides below
    }

    if (fy < best.envelope_value) {
      best.minimizer = y;
      best.envelope_value = fy;
      best.subproblem_residual = (y - C.project(y - g)).norm();
      best.method = ProxMethod::projected_gradient;
    }
    if (converged && best.subproblem_residual <= inner_tol) break;
  }
  best.inner_iterations = total_iters;

  if (!(best.envelope_value < kInf))
    throw std::domain_error("prox: objective not finite at any start point");
  if (best.subproblem_residual > inner_tol)
    throw ConvergenceError("prox: projected gradient hit the iteration cap (residual " +
                               std::to_string(best.subproblem_residual) + ")",
                           best);
  return best;
}

}  // namespace

const char* to_string(ProxMethod m) {
  switch (m) {
    case ProxMethod::closed_form: return "closed_form";
    case ProxMethod::radial_1d: return "radial_1d";
    case ProxMethod::projected_gradient: return "projected_gradient";
    case ProxMethod::grid_oracle: return "grid_oracle";
  }
  return "unknown";
}

ProxResult prox(const ObjectiveFunction& f, const ConvexSet& C, const ProxParams& params,
                const Vector& x, double inner_tol) {
  require_finite(x, "prox x");
  if (x.size() != f.dim || x.size() != C.dim())
    throw std::invalid_argument("prox: dimension mismatch");
  if (!(inner_tol > 0.0)) throw std::invalid_argument("prox: inner_tol must be > 0");
  if (!std::isfinite(f.eval(C.project(x))))
    throw std::domain_error("prox: objective non-finite at the start point");

  ProxResult res;
  if (params.p == 2.0 && f.quadratic && C.kind() == ConvexSet::Kind::whole_space) {
    res = closed_form_quadratic(f, params, x);
  } else if (f.radial &&
             (C.kind() == ConvexSet::Kind::whole_space ||
              (C.kind() == ConvexSet::Kind::ball &&
               (C.center() - f.radial->center).norm() <= 1e-14))) {
    res = radial_reduction(f, C, params, x, inner_tol);
    // Profiles without a derivative saturate at value-comparison accuracy;
    // the gradient path can polish further when one is available.
    if (res.subproblem_residual > inner_tol && f.has_grad())
      res = projected_gradient(f, C, params, x, inner_tol);
  } else if (!f.has_grad() && x.size() <= 2) {
    GridSpec spec;
    const Vector anchor = f.known_minimizer ? *f.known_minimizer : Vector(Vector::Zero(x.size()));
    const double span = 2.0 * (1.0 + (x - anchor).norm());
    spec.lo = anchor.cwiseMin(x).array() - span;
    spec.hi = anchor.cwiseMax(x).array() + span;
    spec.h = std::min(inner_tol, 1e-6);
    res = prox_grid_oracle(f, C, params, x, spec);
  } else {
    res = projected_gradient(f, C, params, x, inner_tol);
  }

  if (!C.contains(res.minimizer, 1e-9))
    throw std::logic_error("prox: returned point violates the feasible set");
  return res;
}

double moreau_env(const ObjectiveFunction& f, const ConvexSet& C, const ProxParams& params,
                  const Vector& x, double inner_tol) {
  return prox(f, C, params, x, inner_tol).envelope_value;
}

ProxResult prox_grid_oracle(const ObjectiveFunction& f, const ConvexSet& C,
                            const ProxParams& params, const Vector& x, const GridSpec& spec) {
  if (x.size() > 2) throw std::invalid_argument("prox_grid_oracle: only dim <= 2 supported");
  if (spec.lo.size() != x.size() || spec.hi.size() != x.size())
    throw std::invalid_argument("prox_grid_oracle: grid box dimension mismatch");
  if (!(spec.h > 0.0)) throw std::invalid_argument("prox_grid_oracle: h must be > 0");

  const Eigen::Index dim = x.size();
  Vector lo = spec.lo, hi = spec.hi;
  double best_v = kInf;
  Vector best_y = C.project(x);
  std::int64_t evals = 0;

  const auto consider = [&](const Vector& y) {
    if (!C.contains(y, 1e-12)) return;
    const double v = subproblem_value(f, params, x, y);
    ++evals;
    if (v < best_v) {
      best_v = v;
      best_y = y;
    }
  };
  consider(best_y);

  // Coarse-to-fine sweeps; the last pass runs at the requested resolution.
  while (true) {
    double cell = spec.h;
    std::int64_t count = 1;
    for (Eigen::Index k = 0; k < dim; ++k)
      count *= static_cast<std::int64_t>(std::floor((hi[k] - lo[k]) / spec.h)) + 1;
    const bool final_pass = count <= kGridCap;
    if (!final_pass) {
      const std::int64_t per_axis = dim == 1 ? 4001 : 801;
      cell = 0.0;
      for (Eigen::Index k = 0; k < dim; ++k)
        cell = std::max(cell, (hi[k] - lo[k]) / static_cast<double>(per_axis - 1));
    }

    Vector y(dim);
    if (dim == 1) {
      const std::int64_t n = static_cast<std::int64_t>(std::floor((hi[0] - lo[0]) / cell)) + 1;
      for (std::int64_t i = 0; i <= n; ++i) {
        y[0] = std::min(lo[0] + static_cast<double>(i) * cell, hi[0]);
        consider(y);
      }
    } else {
      const std::int64_t n0 = static_cast<std::int64_t>(std::floor((hi[0] - lo[0]) / cell)) + 1;
      const std::int64_t n1 = static_cast<std::int64_t>(std::floor((hi[1] - lo[1]) / cell)) + 1;
      for (std::int64_t i = 0; i <= n0; ++i) {
        y[0] = std::min(lo[0] + static_cast<double>(i) * cell, hi[0]);
        for (std::int64_t j = 0; j <= n1; ++j) {
          y[1] = std::min(lo[1] + static_cast<double>(j) * cell, hi[1]);
          consider(y);
        }
      }
    }
    if (final_pass) break;
    for (Eigen::Index k = 0; k < dim; ++k) {
      lo[k] = std::max(spec.lo[k], best_y[k] - 2.0 * cell);
      hi[k] = std::min(spec.hi[k], best_y[k] + 2.0 * cell);
    }
  }

  ProxResult res;
  res.minimizer = best_y;
  res.envelope_value = best_v;
  res.subproblem_residual = spec.h;  // one-cell localization, not a gradient norm
  res.inner_iterations = evals;
  res.method = ProxMethod::grid_oracle;
  return res;
}

}  // namespace hippa
