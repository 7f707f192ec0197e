#include "hippa/catalogue.hpp"

#include "hippa/io.hpp"

#include <charconv>
#include <map>

namespace hippa {

namespace {

struct Spec {
  std::string kind;
  std::map<std::string, std::string> params;
};

Spec parse_spec(const std::string& id) {
  Spec s;
  const auto colon = id.find(':');
  s.kind = id.substr(0, colon);
  if (colon == std::string::npos) return s;
  std::string rest = id.substr(colon + 1);
  std::size_t pos = 0;
  while (pos < rest.size()) {
    auto comma = rest.find(',', pos);
    if (comma == std::string::npos) comma = rest.size();
    const std::string item = rest.substr(pos, comma - pos);
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      s.params[""] = item;  // bare token, e.g. counterexample name
    else
      s.params[item.substr(0, eq)] = item.substr(eq + 1);
    pos = comma + 1;
  }
  return s;
}

double to_real(const std::string& v, const std::string& what) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw std::invalid_argument(what + ": bad number '" + v + "'");
  return out;
}

Eigen::Index to_index(const std::string& v, const std::string& what) {
  const double d = to_real(v, what);
  const auto n = static_cast<Eigen::Index>(d);
  if (n < 1 || static_cast<double>(n) != d)
    throw std::invalid_argument(what + ": expected a positive integer, got '" + v + "'");
  return n;
}

std::string need(const Spec& s, const std::string& key, const std::string& what) {
  const auto it = s.params.find(key);
  if (it == s.params.end())
    throw std::invalid_argument(what + ": missing parameter '" + key + "'");
  return it->second;
}

ObjectiveFunction constant_function(double c, Eigen::Index dim, const std::string& label) {
  ObjectiveFunction g;
  g.dim = dim;
  g.label = label;
  g.eval = [c](const Vector&) { return c; };
  g.grad = [dim](const Vector&) -> Vector { return Vector::Zero(dim); };
  return g;
}

}  // namespace

ObjectiveFunction parse_problem(const std::string& id) {
  const Spec s = parse_spec(id);

  if (s.kind == "norm_power") {
    const double q = to_real(need(s, "q", id), id);
    const Eigen::Index dim = to_index(need(s, "dim", id), id);
    std::optional<double> radius;
    if (s.params.count("r")) radius = to_real(s.params.at("r"), id);
    return norm_power(q, dim, radius);
  }

  if (s.kind == "affine") {
    const double q = to_real(need(s, "q", id), id);
    const Matrix A = read_matrix_csv(need(s, "A", id));
    const Vector b = read_vector_csv(need(s, "b", id));
    std::optional<double> radius;
    if (s.params.count("r")) radius = to_real(s.params.at("r"), id);
    return affine_norm_power(A, b, q, radius);
  }

  if (s.kind == "quotient") {
    const double q = to_real(need(s, "q", id), id);
    const Eigen::Index dim = to_index(need(s, "dim", id), id);
    const double den = to_real(need(s, "den", id), id);
    if (!(den > 0.0)) throw std::invalid_argument(id + ": constant denominator must be > 0");
    const double M = s.params.count("M") ? to_real(s.params.at("M"), id) : den;
    QuotientCase which = QuotientCase::affine;
    if (s.params.count("case")) {
      const std::string& c = s.params.at("case");
      if (c == "affine") which = QuotientCase::affine;
      else if (c == "nonneg_concave") which = QuotientCase::nonneg_concave;
      else if (c == "nonpos_convex") which = QuotientCase::nonpos_convex;
      else throw std::invalid_argument(id + ": unknown quotient case '" + c + "'");
    }
    const ObjectiveFunction h = norm_power(q, dim);
    ObjectiveFunction f =
        quotient(h, constant_function(den, dim, "const(" + format_double(den) + ")"), which, M);
    // A constant denominator keeps the minimizer and all structure.
    f.known_minimizer = h.known_minimizer;
    if (h.known_inf) f.known_inf = *h.known_inf / den;
    f.grad = [hg = h.grad, den](const Vector& x) -> Vector { return hg(x) / den; };
    if (h.quadratic)
      f.quadratic = QuadraticForm{h.quadratic->P / den, h.quadratic->r / den, h.quadratic->s / den};
    if (h.radial) {
      f.radial = RadialProfile{[prof = h.radial->profile, den](double t) { return prof(t) / den; },
                               h.radial->center};
      if (h.radial->derivative)
        f.radial->derivative = [der = h.radial->derivative, den](double t) { return der(t) / den; };
    }
    return f;
  }

  if (s.kind == "counterexample") {
    const std::string name = s.params.count("") ? s.params.at("") : need(s, "name", id);
    const double q = s.params.count("q") ? to_real(s.params.at("q"), id) : 0.5;
    for (auto& f : counterexample_suite(q)) {
      if (f.label.find("counterexample:" + name) == 0) return f;
    }
    throw std::invalid_argument(id + ": unknown counterexample '" + name + "'");
  }

  if (s.kind == "cubic") {
    ObjectiveFunction f;
    f.dim = 1;
    f.label = "cubic";
    f.eval = [](const Vector& x) { return x[0] * x[0] * x[0]; };
    f.grad = [](const Vector& x) -> Vector {
      Vector g(1);
      g << 3.0 * x[0] * x[0];
      return g;
    };
    return f;
  }

  throw std::invalid_argument("unknown problem id '" + id + "'");
}

ConvexSet parse_set(const std::string& spec, Eigen::Index dim) {
  const Spec s = parse_spec(spec);
  if (s.kind == "whole") return ConvexSet::whole_space(dim);
  if (s.kind == "ball") {
    const std::string c = need(s, "c", spec);
    const Vector center = c == "0" ? Vector(Vector::Zero(dim)) : read_vector_csv(c);
    return ConvexSet::ball(center, to_real(need(s, "r", spec), spec));
  }
  if (s.kind == "box")
    return ConvexSet::box(read_vector_csv(need(s, "l", spec)), read_vector_csv(need(s, "u", spec)));
  if (s.kind == "halfspace")
    return ConvexSet::halfspace(read_vector_csv(need(s, "a", spec)),
                                to_real(need(s, "beta", spec), spec));
  throw std::invalid_argument("unknown set spec '" + spec + "'");
}

Vector parse_x0(const std::string& spec, const ObjectiveFunction& f, std::uint64_t seed) {
  if (spec == "ones") return Vector::Ones(f.dim);
  if (spec == "zeros") return Vector::Zero(f.dim);
  if (spec.rfind("const:", 0) == 0)
    return to_real(spec.substr(6), spec) * Vector::Ones(f.dim);
  if (spec == "minimizer") {
    if (!f.known_minimizer)
      throw std::invalid_argument("x0=minimizer: problem has no known minimizer");
    return *f.known_minimizer;
  }
  if (spec.rfind("rand", 0) == 0) {
    double radius = 1.0;
    const auto colon = spec.find(':');
    if (colon != std::string::npos) radius = to_real(spec.substr(colon + 1), spec);
    Rng rng(seed);
    return rng.in_ball(Vector::Zero(f.dim), radius);
  }
  return read_vector_csv(spec);
}

}  // namespace hippa
