#include "hippa/functions.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

namespace hippa {

namespace {

void validate_known(const ObjectiveFunction& f) {
  if (f.known_minimizer && f.known_inf) {
    const double v = f.eval(*f.known_minimizer);
    if (std::abs(v - *f.known_inf) > 1e-12 * (1.0 + std::abs(*f.known_inf)))
      throw std::logic_error(f.label + ": eval(known_minimizer) != known_inf");
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

ObjectiveFunction norm_power(double q, Eigen::Index dim, std::optional<double> radius_hint) {
  if (!(q > 0.0)) throw std::invalid_argument("norm_power: q must be > 0");
  if (dim < 1) throw std::invalid_argument("norm_power: dim must be >= 1");

  ObjectiveFunction f;
  f.dim = dim;
  f.label = "norm_power(q=" + fmt(q) + ",dim=" + std::to_string(dim) + ")";
  f.eval = [q](const Vector& x) { return std::pow(x.norm(), q); };
  f.grad = [q](const Vector& x) -> Vector {
    const double n = x.norm();
    if (n == 0.0) return Vector::Zero(x.size());
    return (q * std::pow(n, q - 2.0)) * x;
  };
  f.known_minimizer = Vector::Zero(dim);
  f.known_inf = 0.0;
  f.radial = RadialProfile{[q](double s) { return std::pow(s, q); }, Vector::Zero(dim),
                           [q](double s) { return q * std::pow(s, q - 1.0); }};

  const double r = radius_hint.value_or(1.0);
  if (!(r > 0.0)) throw std::invalid_argument("norm_power: radius_hint must be > 0");
  if (q > 1.0 && q < 2.0) {
    f.modulus = Modulus(q * kappa(q) * std::pow(r, q - 2.0) / 2.0, 2.0,
                        ModulusInterval::unit_interval);
    f.domain_hint = ConvexSet::ball(Vector::Zero(dim), r);
  } else if (q == 2.0) {
    f.modulus = Modulus(1.0, 2.0, ModulusInterval::nonnegative);
    f.quadratic = QuadraticForm{Matrix::Identity(dim, dim), Vector::Zero(dim), 0.0};
  } else if (q > 2.0) {
    f.modulus = Modulus(sigma_hat(q), q, ModulusInterval::nonnegative);
  } else {
    // q in (0, 1]: strongly quasiconvex on balls, but no explicit constant
    // is available; left for empirical estimation.
    f.domain_hint = ConvexSet::ball(Vector::Zero(dim), r);
  }
  validate_known(f);
  return f;
}

ObjectiveFunction affine_norm_power(const Matrix& A, const Vector& b, double q,
                                    std::optional<double> radius_hint) {
  if (!(q > 0.0)) throw std::invalid_argument("affine_norm_power: q must be > 0");
  if (A.rows() != b.size())
    throw std::invalid_argument("affine_norm_power: A and b dimensions disagree");

  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double sigma_max = sv(0);
  const double sigma_min = sv(sv.size() - 1);
  if (A.cols() > A.rows() || !(sigma_min > 1e-10 * sigma_max))
    throw std::invalid_argument(
        "affine_norm_power: A must have full column rank (sigma_min = " + fmt(sigma_min) + ")");

  ObjectiveFunction f;
  f.dim = A.cols();
  f.label = "affine_norm_power(q=" + fmt(q) + ",m=" + std::to_string(A.rows()) +
            ",n=" + std::to_string(A.cols()) + ")";
  Matrix Ac = A;
  Vector bc = b;
  f.eval = [Ac, bc, q](const Vector& x) { return std::pow((Ac * x - bc).norm(), q); };
  f.grad = [Ac, bc, q](const Vector& x) -> Vector {
    const Vector res = Ac * x - bc;
    const double n = res.norm();
    if (n == 0.0) return Vector::Zero(x.size());
    return (q * std::pow(n, q - 2.0)) * (Ac.transpose() * res);
  };
  const Vector xls = svd.solve(b);
  f.known_minimizer = xls;
  f.known_inf = std::pow((A * xls - b).norm(), q);

  const double r = radius_hint.value_or(1.0);
  // Modulus of the outer |.|^q composed with theta(t) = sigma_min * t.
  if (q > 1.0 && q < 2.0) {
    const double r_img = sigma_max * r + b.norm();
    const double rho_out = q * kappa(q) * std::pow(r_img, q - 2.0) / 2.0;
    f.modulus = Modulus(rho_out * sigma_min * sigma_min, 2.0, ModulusInterval::unit_interval);
    f.domain_hint = ConvexSet::ball(Vector::Zero(f.dim), r);
  } else if (q == 2.0) {
    f.modulus = Modulus(sigma_min * sigma_min, 2.0, ModulusInterval::nonnegative);
    f.quadratic = QuadraticForm{A.transpose() * A, -2.0 * A.transpose() * b, b.squaredNorm()};
  } else if (q > 2.0) {
    f.modulus = Modulus(sigma_hat(q) * std::pow(sigma_min, q), q, ModulusInterval::nonnegative);
  } else {
    f.domain_hint = ConvexSet::ball(Vector::Zero(f.dim), r);
  }
  validate_known(f);
  return f;
}

ObjectiveFunction quotient(const ObjectiveFunction& h, const ObjectiveFunction& g,
                           QuotientCase which, double M) {
  if (!h.modulus) throw std::invalid_argument("quotient: h must carry a modulus");
  if (!(M > 0.0)) throw std::invalid_argument("quotient: M must be > 0");

  ObjectiveFunction f;
  f.dim = h.dim;
  const char* case_name = which == QuotientCase::affine          ? "affine"
                          : which == QuotientCase::nonneg_concave ? "nonneg_concave"
                                                                  : "nonpos_convex";
  f.label = "quotient(" + h.label + "/" + g.label + ",case=" + case_name + ",M=" + fmt(M) + ")";
  auto he = h.eval;
  auto ge = g.eval;
  auto label = f.label;
  f.eval = [he, ge, label](const Vector& x) {
    const double gv = ge(x);
    if (!(gv > 0.0)) throw std::domain_error(label + ": denominator <= 0 at a queried point");
    return he(x) / gv;
  };
  if (h.has_grad() && g.has_grad()) {
    auto hg = h.grad;
    auto gg = g.grad;
    f.grad = [he, ge, hg, gg](const Vector& x) -> Vector {
      const double gv = ge(x);
      return (hg(x) * gv - he(x) * gg(x)) / (gv * gv);
    };
  }
  const Modulus& m = *h.modulus;
  f.modulus = Modulus(m.rho / M, m.q, m.interval, m.phi ? [phi = m.phi, M](double t) {
    return phi(t) / M;
  } : std::function<double(double)>{});
  f.domain_hint = h.domain_hint;
  return f;
}

ObjectiveFunction shift_add(const ObjectiveFunction& f, double a) {
  ObjectiveFunction out = f;
  out.label = "(" + f.label + ")+" + fmt(a);
  auto e = f.eval;
  out.eval = [e, a](const Vector& x) { return e(x) + a; };
  if (out.known_inf) *out.known_inf += a;
  if (out.quadratic) out.quadratic->s += a;
  if (out.radial) {
    auto prof = out.radial->profile;
    out.radial->profile = [prof, a](double s) { return prof(s) + a; };
  }
  validate_known(out);
  return out;
}

ObjectiveFunction scale(const ObjectiveFunction& f, double b) {
  if (!(b > 0.0)) throw std::invalid_argument("scale: b must be > 0");
  ObjectiveFunction out = f;
  out.label = fmt(b) + "*(" + f.label + ")";
  auto e = f.eval;
  out.eval = [e, b](const Vector& x) { return b * e(x); };
  if (f.has_grad()) {
    auto gr = f.grad;
    out.grad = [gr, b](const Vector& x) -> Vector { return b * gr(x); };
  }
  if (out.modulus)
    out.modulus = Modulus(f.modulus->rho * b, f.modulus->q, f.modulus->interval,
                          f.modulus->phi ? [phi = f.modulus->phi, b](double t) {
                            return b * phi(t);
                          } : std::function<double(double)>{});
  if (out.known_inf) *out.known_inf *= b;
  if (out.quadratic) {
    out.quadratic->P *= b;
    out.quadratic->r *= b;
    out.quadratic->s *= b;
  }
  if (out.radial) {
    auto prof = out.radial->profile;
    out.radial->profile = [prof, b](double s) { return b * prof(s); };
    if (out.radial->derivative) {
      auto der = out.radial->derivative;
      out.radial->derivative = [der, b](double s) { return b * der(s); };
    }
  }
  validate_known(out);
  return out;
}

ObjectiveFunction restrict(const ObjectiveFunction& f, const ConvexSet& C) {
  if (C.dim() != f.dim) throw std::invalid_argument("restrict: dimension mismatch");
  ObjectiveFunction out = f;
  out.label = "(" + f.label + ")+indicator(" + C.describe() + ")";
  auto e = f.eval;
  ConvexSet set = C;
  out.eval = [e, set](const Vector& x) { return set.contains(x, 1e-12) ? e(x) : kInf; };
  out.domain_hint = C;
  out.quadratic.reset();
  out.radial.reset();
  if (out.known_minimizer && !C.contains(*out.known_minimizer, 1e-12)) {
    out.known_minimizer.reset();
    out.known_inf.reset();
  }
  return out;
}

UniformlyRegularMap make_scaling_map(double c, Eigen::Index dim) {
  if (!(c > 0.0)) throw std::invalid_argument("make_scaling_map: c must be > 0");
  UniformlyRegularMap T;
  T.apply = [c](const Vector& x) -> Vector { return c * x; };
  T.regularity_modulus = Modulus(c, 1.0, ModulusInterval::nonnegative);
  T.is_homogeneous_additive = true;
  T.dim_in = T.dim_out = dim;
  T.linear = c * Matrix::Identity(dim, dim);
  T.offset = Vector::Zero(dim);
  return T;
}

UniformlyRegularMap make_affine_map(const Matrix& A, const Vector& b) {
  if (A.rows() != b.size()) throw std::invalid_argument("make_affine_map: A, b mismatch");
  Eigen::JacobiSVD<Matrix> svd(A);
  const auto& sv = svd.singularValues();
  const double sigma_min = sv(sv.size() - 1);
  if (A.cols() > A.rows() || !(sigma_min > 1e-10 * sv(0)))
    throw std::invalid_argument("make_affine_map: A must have full column rank");
  UniformlyRegularMap T;
  Matrix Ac = A;
  Vector bc = b;
  T.apply = [Ac, bc](const Vector& x) -> Vector { return Ac * x - bc; };
  T.regularity_modulus = Modulus(sigma_min, 1.0, ModulusInterval::nonnegative);
  T.is_homogeneous_additive = true;
  T.dim_in = A.cols();
  T.dim_out = A.rows();
  T.linear = A;
  T.offset = b;
  return T;
}

ObjectiveFunction compose(const UniformlyRegularMap& T, const ObjectiveFunction& h,
                          bool caller_asserts_convex_pair) {
  if (!h.modulus) throw std::invalid_argument("compose: h must carry a modulus");
  if (!(T.regularity_modulus.rho > 0.0))
    throw std::invalid_argument("compose: T must carry a regularity modulus");
  if (T.dim_out != h.dim) throw std::invalid_argument("compose: dimension mismatch");

  if (T.is_homogeneous_additive) {
    // The convex-pair hypothesis is implied; spot-check the declared affinity.
    Rng rng(12345);
    for (int i = 0; i < 20; ++i) {
      const Vector x = rng.vector(T.dim_in, -2.0, 2.0);
      const Vector y = rng.vector(T.dim_in, -2.0, 2.0);
      const double lam = rng.uniform();
      const Vector lhs = T.apply(lam * x + (1.0 - lam) * y);
      const Vector rhs = lam * T.apply(x) + (1.0 - lam) * T.apply(y);
      if ((lhs - rhs).norm() > 1e-10 * (1.0 + rhs.norm()))
        throw std::invalid_argument("compose: map declared homogeneous additive but is not");
    }
  } else if (!caller_asserts_convex_pair) {
    throw std::invalid_argument(
        "compose: convex-pair hypothesis must be asserted for non homogeneous-additive maps");
  }

  ObjectiveFunction f;
  f.dim = T.dim_in;
  f.label = "compose(" + h.label + ")";
  auto he = h.eval;
  auto ta = T.apply;
  f.eval = [he, ta](const Vector& x) { return he(ta(x)); };

  const Modulus& mh = *h.modulus;
  const Modulus& mt = T.regularity_modulus;
  const double rho_c = mh.rho * std::pow(mt.rho, mh.q);
  const double q_c = mh.q * mt.q;
  const ModulusInterval iv = (mh.interval == ModulusInterval::nonnegative &&
                              mt.interval == ModulusInterval::nonnegative)
                                 ? ModulusInterval::nonnegative
                                 : ModulusInterval::unit_interval;
  std::function<double(double)> phi_c;
  if (mh.phi || mt.phi) {
    phi_c = [mh, mt](double t) { return mh.value(mt.value(t)); };
  }
  f.modulus = Modulus(rho_c, q_c, iv, phi_c);
  f.domain_hint = h.domain_hint;

  if (T.linear) {
    if (h.has_grad()) {
      Matrix A = *T.linear;
      auto hg = h.grad;
      f.grad = [A, ta, hg](const Vector& x) -> Vector { return A.transpose() * hg(ta(x)); };
    }
    // A centered scaling keeps radial structure: profile(c s).
    const Matrix& A = *T.linear;
    const bool scaling = T.dim_in == T.dim_out &&
                         (A - A(0, 0) * Matrix::Identity(A.rows(), A.cols())).norm() == 0.0 &&
                         A(0, 0) > 0.0 && T.offset.norm() == 0.0;
    if (scaling && h.radial && h.radial->center.norm() == 0.0) {
      const double c = A(0, 0);
      auto prof = h.radial->profile;
      f.radial = RadialProfile{[prof, c](double s) { return prof(c * s); }, Vector::Zero(f.dim)};
      if (h.radial->derivative) {
        auto der = h.radial->derivative;
        f.radial->derivative = [der, c](double s) { return c * der(c * s); };
      }
    }
    if (h.known_minimizer && h.known_inf) {
      // T x - b = argmin_h has a solution for full-column-rank T.
      Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Vector xm = svd.solve(*h.known_minimizer + T.offset);
      if ((A * xm - T.offset - *h.known_minimizer).norm() < 1e-10) {
        f.known_minimizer = xm;
        f.known_inf = *h.known_inf;
      }
    }
  }
  validate_known(f);
  return f;
}

std::vector<ObjectiveFunction> counterexample_suite(double q) {
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("counterexample_suite: q must lie in (0, 1)");
  std::vector<ObjectiveFunction> out;

  // psi(t) = t^2 except psi(0) = -1: each shifted copy is uniformly
  // quasiconvex, their sum is not even quasiconvex.
  const auto psi = [](double t) { return t == 0.0 ? -1.0 : t * t; };
  {
    ObjectiveFunction f;
    f.dim = 1;
    f.label = "counterexample:sum_shifted";
    f.eval = [psi](const Vector& x) { return psi(x[0] - 1.0) + psi(x[0] + 1.0); };
    f.known_minimizer = Vector::Constant(1, 0.0);
    f.known_inf = 2.0;
    Vector wx(1), wy(1);
    wx << 0.9;
    wy << 1.0;
    f.not_quasiconvex_witness = WitnessTriple{wx, wy, 0.5};
    out.push_back(std::move(f));
  }

  Vector e1(2), e2(2);
  e1 << 1.0, 0.0;
  e2 << 0.0, 1.0;
  {
    ObjectiveFunction f;
    f.dim = 2;
    f.label = "counterexample:lq_sum(q=" + fmt(q) + ")";
    f.eval = [q](const Vector& x) {
      return std::pow(std::abs(x[0]), q) + std::pow(std::abs(x[1]), q);
    };
    f.known_minimizer = Vector::Zero(2);
    f.known_inf = 0.0;
    f.not_quasiconvex_witness = WitnessTriple{e1, e2, 0.5};
    out.push_back(std::move(f));
  }
  {
    ObjectiveFunction f;
    f.dim = 2;
    f.label = "counterexample:lq_norm(q=" + fmt(q) + ")";
    f.eval = [q](const Vector& x) {
      return std::pow(std::pow(std::abs(x[0]), q) + std::pow(std::abs(x[1]), q), 1.0 / q);
    };
    f.known_minimizer = Vector::Zero(2);
    f.known_inf = 0.0;
    f.not_quasiconvex_witness = WitnessTriple{e1, e2, 0.5};
    out.push_back(std::move(f));
  }
  return out;
}

Vector finite_difference_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                                  double h) {
  Vector g(x.size());
  Vector xp = x, xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

}  // namespace hippa
