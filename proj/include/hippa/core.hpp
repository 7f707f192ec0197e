#ifndef HIPPA_CORE_HPP
#define HIPPA_CORE_HPP

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

namespace hippa {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Deterministic RNG used everywhere randomness is needed. The uniform
/// draws are implemented by hand (53-bit mantissa trick) so that outputs
/// are bit-identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in the open interval (0, 1).
  double uniform() {
    const std::uint64_t z = engine_();
    return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform in the open interval (lo, hi).
  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  /// Standard normal via Box-Muller.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n) { return engine_() % n; }

  /// Componentwise uniform vector in [lo, hi]^dim.
  Vector vector(Eigen::Index dim, double lo, double hi) {
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = uniform(lo, hi);
    return v;
  }

  /// Uniform point in the closed Euclidean ball of given radius.
  Vector in_ball(const Vector& center, double radius);

 private:
  std::mt19937_64 engine_;
};

void require_finite(const Vector& x, const char* what);
void require_same_dim(const Vector& a, const Vector& b, const char* what);

/// Validity interval of a power lower bound rho * t^q: either [0, 1)
/// (local bound, as used by the small-order rate regime) or [0, +inf).
enum class ModulusInterval { unit_interval, nonnegative };

/// Gauge phi quantifying uniform (quasi)convexity, together with the power
/// lower bound phi(t) >= rho * t^q valid on `interval`.
struct Modulus {
  double rho = 0.0;
  double q = 0.0;
  ModulusInterval interval = ModulusInterval::nonnegative;
  std::function<double(double)> phi;  // optional evaluator; empty -> rho*t^q

  Modulus() = default;
  Modulus(double rho_, double q_, ModulusInterval interval_ = ModulusInterval::nonnegative,
          std::function<double(double)> phi_ = {});

  /// phi(t) when an evaluator is present, otherwise the power bound.
  double value(double t) const;
  /// The power bound rho * t^q itself.
  double power_bound(double t) const { return rho * std::pow(t, q); }
  /// Whether the power bound is claimed at separation t.
  bool covers(double t) const {
    return interval == ModulusInterval::nonnegative || t < 1.0;
  }
};

struct ProxParams {
  double p;      // proximal order, > 1
  double gamma;  // regularization weight, > 0

  ProxParams(double p_, double gamma_) : p(p_), gamma(gamma_) {
    if (!(p > 1.0)) throw std::invalid_argument("ProxParams: p must be > 1");
    if (!(gamma > 0.0)) throw std::invalid_argument("ProxParams: gamma must be > 0");
  }
};

/// (1/(p*gamma)) * |x - y|^p, the p-th order regularization term.
double power_penalty(const Vector& x, const Vector& y, const ProxParams& params);

/// Gradient of the penalty with respect to y:
/// (1/gamma) * |y - x|^(p-2) * (y - x), with the 0/0 = 0 convention at
/// y == x (exact zero vector, also for p in (1,2)).
Vector power_penalty_grad(const Vector& x, const Vector& y, const ProxParams& params);

/// Breakpoint between the two branches of kappa, the numerical solution of
///   t(t-1)/2 = 1 - [1 + (2-sqrt(3)) t/(t-1)]^(1-t)   on (1, 2].
inline constexpr double kTHat = 1.3214;

/// Recompute the kappa breakpoint by bisection to the given tolerance.
double solve_t_hat(double tol = 1e-10);

/// Strong-monotonicity constant of t -> |t|^(q-2) t on balls, for q in (1,2):
///   (2+sqrt(3))(t-1)/16                      on (1, t_hat],
///   ((2+sqrt(3))/16) (1-(3-sqrt(3))^(1-t))   on [t_hat, 2).
/// The branches disagree at t_hat; the smaller value is returned there
/// (a smaller constant stays a valid lower bound).
double kappa(double t);

/// Uniform-convexity coefficient of |.|^p for p >= 2: (1/2)^((3p-2)/2).
double sigma_hat(double p);

}  // namespace hippa

#endif  // HIPPA_CORE_HPP
