#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hippa/functions.hpp"

#include <Eigen/Dense>

#include <cmath>

using namespace hippa;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

ObjectiveFunction const_fn(double c, Eigen::Index dim) {
  ObjectiveFunction g;
  g.dim = dim;
  g.label = "const";
  g.eval = [c](const Vector&) { return c; };
  g.grad = [dim](const Vector&) -> Vector { return Vector::Zero(dim); };
  return g;
}

void check_grad_fd(const ObjectiveFunction& f, Rng& rng, double lo, double hi, int n = 100) {
  for (int i = 0; i < n; ++i) {
    Vector x = rng.vector(f.dim, lo, hi);
    if (x.norm() < 0.05) x[0] += 0.2;  // stay off nonsmooth points
    const Vector g = f.grad(x);
    const Vector fd = finite_difference_gradient(f.eval, x, 1e-6);
    CHECK((g - fd).norm() / (1.0 + g.norm()) <= 1e-5);
  }
}

}  // namespace

TEST_CASE("norm_power values") {
  const ObjectiveFunction f2 = norm_power(2, 2);
  CHECK(f2.eval(vec2(3, 4)) == doctest::Approx(25.0));
  const ObjectiveFunction fh = norm_power(0.5, 2);
  CHECK(fh.eval(vec2(3, 4)) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK_THROWS_AS(norm_power(0.0, 2), std::invalid_argument);
}

TEST_CASE("norm_power moduli per exponent range") {
  const ObjectiveFunction f2 = norm_power(2, 3);
  REQUIRE(f2.modulus.has_value());
  CHECK(f2.modulus->rho == doctest::Approx(1.0));
  CHECK(f2.modulus->q == doctest::Approx(2.0));
  CHECK(f2.modulus->interval == ModulusInterval::nonnegative);

  const ObjectiveFunction f4 = norm_power(4, 2);
  REQUIRE(f4.modulus.has_value());
  CHECK(f4.modulus->rho == doctest::Approx(1.0 / 32.0));  // sigma_hat(4)
  CHECK(f4.modulus->q == doctest::Approx(4.0));

  const double r = 2.0;
  const ObjectiveFunction f15 = norm_power(1.5, 2, r);
  REQUIRE(f15.modulus.has_value());
  CHECK(f15.modulus->rho ==
        doctest::Approx(1.5 * kappa(1.5) * std::pow(r, -0.5) / 2.0).epsilon(1e-12));
  CHECK(f15.modulus->q == doctest::Approx(2.0));
  REQUIRE(f15.domain_hint.has_value());
  CHECK(f15.domain_hint->radius() == doctest::Approx(r));

  // q <= 1: strongly quasiconvex on balls but with no usable constant.
  const ObjectiveFunction fq = norm_power(0.5, 2);
  CHECK(!fq.modulus.has_value());
  CHECK(fq.domain_hint.has_value());
}

TEST_CASE("norm_power gradients match finite differences") {
  Rng rng(3);
  for (double q : {1.5, 2.0, 3.0, 4.0}) {
    ObjectiveFunction f = norm_power(q, 3);
    check_grad_fd(f, rng, -2.0, 2.0);
  }
}

TEST_CASE("affine_norm_power") {
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = 2.0;
  A(1, 1) = 1.0;
  const Vector b = Vector::Zero(2);

  const ObjectiveFunction f = affine_norm_power(A, b, 2);
  CHECK(f.eval(vec2(1, 1)) == doctest::Approx(5.0));  // |(2,1)|^2
  REQUIRE(f.modulus.has_value());
  CHECK(f.modulus->rho == doctest::Approx(1.0));  // sigma_min = 1 leaves the outer modulus
  REQUIRE(f.known_minimizer.has_value());
  CHECK(f.known_minimizer->norm() == doctest::Approx(0.0));
  CHECK(*f.known_inf == doctest::Approx(0.0));

  // Identity composition reproduces norm_power(2, 2) pointwise.
  const ObjectiveFunction id = affine_norm_power(Matrix::Identity(2, 2), b, 2);
  const ObjectiveFunction np = norm_power(2, 2);
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const Vector x = rng.vector(2, -3.0, 3.0);
    CHECK(id.eval(x) == doctest::Approx(np.eval(x)).epsilon(1e-12));
  }

  // Least-squares minimizer for an inconsistent tall system.
  Matrix T(3, 2);
  T << 1, 0, 0, 1, 1, 1;
  Vector c(3);
  c << 1, 1, 3;
  const ObjectiveFunction g = affine_norm_power(T, c, 2);
  const Vector xls = (T.transpose() * T).ldlt().solve(T.transpose() * c);
  CHECK((*g.known_minimizer - xls).norm() < 1e-10);
  CHECK(*g.known_inf == doctest::Approx((T * xls - c).squaredNorm()));

  Matrix R(2, 2);
  R << 1, 1, 1, 1;  // rank deficient
  CHECK_THROWS_AS(affine_norm_power(R, b, 2), std::invalid_argument);

  Rng rng2(5);
  ObjectiveFunction f4 = affine_norm_power(A, vec2(0.3, -0.2), 4);
  check_grad_fd(f4, rng2, -2.0, 2.0);
}

TEST_CASE("quotient") {
  const ObjectiveFunction h = norm_power(2, 2);

  // Unit denominator leaves everything unchanged.
  const ObjectiveFunction f1 = quotient(h, const_fn(1.0, 2), QuotientCase::affine, 1.0);
  CHECK(f1.eval(vec2(1, 1)) == doctest::Approx(2.0));
  CHECK(f1.modulus->rho == doctest::Approx(1.0));

  // Constant denominator 2: modulus rho / M.
  const ObjectiveFunction f2 = quotient(h, const_fn(2.0, 2), QuotientCase::affine, 2.0);
  CHECK(f2.eval(vec2(1, 1)) == doctest::Approx(1.0));
  CHECK(f2.modulus->rho == doctest::Approx(0.5));
  CHECK(f2.modulus->q == doctest::Approx(2.0));

  // Concave positive denominator on the unit ball, M = 1.5.
  ObjectiveFunction g;
  g.dim = 2;
  g.label = "1+min(|x|,1)/2";
  g.eval = [](const Vector& x) { return 1.0 + std::min(x.norm(), 1.0) / 2.0; };
  const ObjectiveFunction f3 = quotient(h, g, QuotientCase::nonneg_concave, 1.5);
  CHECK(f3.modulus->rho == doctest::Approx(1.0 / 1.5));

  // Nonpositive denominator is rejected at evaluation time.
  ObjectiveFunction bad;
  bad.dim = 2;
  bad.label = "signfail";
  bad.eval = [](const Vector& x) { return x[0]; };
  const ObjectiveFunction fb = quotient(h, bad, QuotientCase::affine, 1.0);
  CHECK_THROWS_AS(fb.eval(vec2(-1, 0)), std::domain_error);

  CHECK_THROWS_AS(quotient(norm_power(0.5, 2), const_fn(1.0, 2), QuotientCase::affine, 1.0),
                  std::invalid_argument);  // h lacks a modulus
}

TEST_CASE("shift_add and scale") {
  const ObjectiveFunction f = norm_power(2, 2);
  const ObjectiveFunction g = shift_add(f, 3.0);
  CHECK(g.eval(vec2(1, 0)) == doctest::Approx(4.0));
  CHECK(g.modulus->rho == doctest::Approx(f.modulus->rho));  // modulus unchanged
  CHECK(*g.known_inf == doctest::Approx(3.0));
  CHECK((shift_add(f, 0.0).eval(vec2(0.3, 0.4))) == doctest::Approx(f.eval(vec2(0.3, 0.4))));

  const ObjectiveFunction gm = shift_add(f, -5.0);
  CHECK(gm.modulus->rho == doctest::Approx(f.modulus->rho));

  const ObjectiveFunction s = scale(f, 2.0);
  CHECK(s.eval(vec2(1, 1)) == doctest::Approx(4.0));
  CHECK(s.modulus->rho == doctest::Approx(2.0));
  CHECK(scale(f, 1.0).eval(vec2(1, 1)) == doctest::Approx(f.eval(vec2(1, 1))));
  CHECK_THROWS_AS(scale(f, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(scale(f, -1.0), std::invalid_argument);
}

TEST_CASE("restrict") {
  const ObjectiveFunction f = norm_power(2, 2);
  const ConvexSet ball = ConvexSet::ball(Vector::Zero(2), 1.0);
  const ObjectiveFunction g = restrict(f, ball);
  CHECK(g.eval(vec2(2, 0)) == kInf);
  CHECK(g.eval(vec2(0.5, 0)) == doctest::Approx(0.25));
  CHECK(g.modulus->rho == doctest::Approx(1.0));

  // Whole space leaves values unchanged.
  const ObjectiveFunction w = restrict(f, ConvexSet::whole_space(2));
  CHECK(w.eval(vec2(3, 3)) == doctest::Approx(f.eval(vec2(3, 3))));
}

TEST_CASE("compose") {
  const ObjectiveFunction h = norm_power(2, 2);

  const UniformlyRegularMap id = make_scaling_map(1.0, 2);
  const ObjectiveFunction fid = compose(id, h);
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const Vector x = rng.vector(2, -2.0, 2.0);
    CHECK(fid.eval(x) == doctest::Approx(h.eval(x)).epsilon(1e-12));
  }

  // T(x) = 2x with h = |.|^2: composite modulus phi(2t) = 4 t^2.
  const ObjectiveFunction f2 = compose(make_scaling_map(2.0, 2), h);
  CHECK(f2.modulus->rho == doctest::Approx(4.0));
  CHECK(f2.modulus->q == doctest::Approx(2.0));
  CHECK(f2.eval(vec2(1, 0)) == doctest::Approx(4.0));

  // Affine map with sigma_min = 1 leaves the outer modulus.
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = 2.0;
  A(1, 1) = 1.0;
  const ObjectiveFunction fa = compose(make_affine_map(A, Vector::Zero(2)), h);
  CHECK(fa.modulus->rho == doctest::Approx(1.0));
  CHECK(fa.modulus->q == doctest::Approx(2.0));

  // Power-bound composition: (rho_h rho_T^{q_h}, q_h q_T).
  UniformlyRegularMap half = make_scaling_map(0.5, 2);
  const ObjectiveFunction f4 = compose(half, norm_power(4, 2));
  CHECK(f4.modulus->rho == doctest::Approx(sigma_hat(4) * std::pow(0.5, 4.0)));
  CHECK(f4.modulus->q == doctest::Approx(4.0));

  // Missing modulus or unasserted convex-pair are rejected.
  CHECK_THROWS_AS(compose(id, norm_power(0.5, 2)), std::invalid_argument);
  UniformlyRegularMap nonlinear;
  nonlinear.apply = [](const Vector& x) -> Vector { return x.cwiseProduct(x); };
  nonlinear.regularity_modulus = Modulus(1.0, 1.0);
  nonlinear.is_homogeneous_additive = false;
  nonlinear.dim_in = nonlinear.dim_out = 2;
  CHECK_THROWS_AS(compose(nonlinear, h), std::invalid_argument);
  CHECK_NOTHROW(compose(nonlinear, h, /*caller_asserts_convex_pair=*/true));

  // A map falsely declared homogeneous additive fails the sampled check.
  UniformlyRegularMap liar = nonlinear;
  liar.is_homogeneous_additive = true;
  CHECK_THROWS_AS(compose(liar, h), std::invalid_argument);
}

TEST_CASE("counterexample_suite") {
  const auto suite = counterexample_suite(0.5);
  REQUIRE(suite.size() == 3);
  for (const auto& f : suite) REQUIRE(f.not_quasiconvex_witness.has_value());

  const ObjectiveFunction& sum = suite[0];
  Vector x1(1);
  x1 << 0.0;
  CHECK(sum.eval(x1) == doctest::Approx(2.0));
  x1 << 1.0;
  CHECK(sum.eval(x1) == doctest::Approx(3.0));  // psi(0) + psi(2) = -1 + 4
  x1 << -1.0;
  CHECK(sum.eval(x1) == doctest::Approx(3.0));
  // Stored witness exhibits the quasiconvexity violation.
  {
    const WitnessTriple& w = *sum.not_quasiconvex_witness;
    const double mid = sum.eval(w.lambda * w.x + (1 - w.lambda) * w.y);
    CHECK(mid > std::max(sum.eval(w.x), sum.eval(w.y)) + 1e-6);
  }

  const ObjectiveFunction& lq_sum = suite[1];
  CHECK(lq_sum.eval(vec2(0.5, 0.5)) == doctest::Approx(std::sqrt(2.0)));  // 2^{1-q}
  {
    const WitnessTriple& w = *lq_sum.not_quasiconvex_witness;
    CHECK(lq_sum.eval(0.5 * (w.x + w.y)) > std::max(lq_sum.eval(w.x), lq_sum.eval(w.y)));
  }

  const ObjectiveFunction& lq_norm = suite[2];
  CHECK(lq_norm.eval(vec2(0.5, 0.5)) == doctest::Approx(2.0));  // 2^{1/q - 1}
  CHECK(lq_norm.eval(vec2(1, 0)) == doctest::Approx(1.0));

  CHECK_THROWS_AS(counterexample_suite(1.5), std::invalid_argument);
}
