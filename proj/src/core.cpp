#include "hippa/core.hpp"

#include <cmath>

namespace hippa {

Vector Rng::in_ball(const Vector& center, double radius) {
  // Direction from normals, radius from u^(1/dim) for uniform volume density.
  const Eigen::Index n = center.size();
  Vector d(n);
  double nrm = 0.0;
  do {
    for (Eigen::Index i = 0; i < n; ++i) d[i] = normal();
    nrm = d.norm();
  } while (nrm == 0.0);
  const double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(n));
  return center + (r / nrm) * d;
}

void require_finite(const Vector& x, const char* what) {
  if (x.size() < 1) throw std::invalid_argument(std::string(what) + ": empty vector");
  if (!x.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite coordinates");
}

void require_same_dim(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size())
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
}

Modulus::Modulus(double rho_, double q_, ModulusInterval interval_,
                 std::function<double(double)> phi_)
    : rho(rho_), q(q_), interval(interval_), phi(std::move(phi_)) {
  if (!(rho > 0.0)) throw std::invalid_argument("Modulus: rho must be > 0");
  if (!(q > 0.0)) throw std::invalid_argument("Modulus: q must be > 0");
  if (phi) {
    if (std::abs(phi(0.0)) > 1e-15) throw std::invalid_argument("Modulus: phi(0) != 0");
    // Sampled sanity: nondecreasing and dominating the power bound.
    double prev = 0.0;
    const double t_max = interval == ModulusInterval::unit_interval ? 1.0 - 1e-9 : 8.0;
    for (int i = 1; i <= 64; ++i) {
      const double t = t_max * static_cast<double>(i) / 64.0;
      const double v = phi(t);
      if (v < prev - 1e-12) throw std::invalid_argument("Modulus: phi not nondecreasing");
      if (v < power_bound(t) - 1e-12)
        throw std::invalid_argument("Modulus: phi below its declared power bound");
      prev = v;
    }
  }
}

double Modulus::value(double t) const { return phi ? phi(t) : power_bound(t); }

double power_penalty(const Vector& x, const Vector& y, const ProxParams& params) {
  require_same_dim(x, y, "power_penalty");
  return std::pow((x - y).norm(), params.p) / (params.p * params.gamma);
}

Vector power_penalty_grad(const Vector& x, const Vector& y, const ProxParams& params) {
  require_same_dim(x, y, "power_penalty_grad");
  const Vector d = y - x;
  const double n = d.norm();
  if (n == 0.0) return Vector::Zero(y.size());
  return (std::pow(n, params.p - 2.0) / params.gamma) * d;
}

double solve_t_hat(double tol) {
  const auto g = [](double t) {
    return t * (t - 1.0) / 2.0 - 1.0 +
           std::pow(1.0 + (2.0 - std::sqrt(3.0)) * t / (t - 1.0), 1.0 - t);
  };
  double lo = 1.2, hi = 1.4;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (g(lo) * g(mid) <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

double kappa(double t) {
  if (!(t > 1.0 && t < 2.0)) throw std::invalid_argument("kappa: t must lie in (1, 2)");
  const double c = (2.0 + std::sqrt(3.0)) / 16.0;
  const double first = (2.0 + std::sqrt(3.0)) * (t - 1.0) / 16.0;
  const double second = c * (1.0 - std::pow(3.0 - std::sqrt(3.0), 1.0 - t));
  if (t < kTHat) return first;
  if (t > kTHat) return second;
  return std::min(first, second);
}

double sigma_hat(double p) {
  if (!(p >= 2.0)) throw std::invalid_argument("sigma_hat: p must be >= 2");
  return std::pow(0.5, (3.0 * p - 2.0) / 2.0);
}

}  // namespace hippa
