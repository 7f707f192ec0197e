#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hippa/catalogue.hpp"
#include "hippa/io.hpp"

#include <fstream>

using namespace hippa;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("hippa_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

void write(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p);
  out << s;
}

}  // namespace

TEST_CASE("format_double round-trips") {
  for (double v : {0.0, 1.0 / 3.0, -2.5e-11, 0.7926697449204426, 1e300}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("vector and matrix csv round-trip") {
  TempDir tmp;
  write(tmp.path / "v.csv", "1.5,-2\n3\n");
  const Vector v = read_vector_csv(tmp.path / "v.csv");
  REQUIRE(v.size() == 3);
  CHECK(v[0] == 1.5);
  CHECK(v[1] == -2.0);
  CHECK(v[2] == 3.0);

  write(tmp.path / "m.csv", "2,0\n0,1\n");
  const Matrix m = read_matrix_csv(tmp.path / "m.csv");
  REQUIRE(m.rows() == 2);
  CHECK(m(0, 0) == 2.0);
  CHECK(m(1, 1) == 1.0);

  write(tmp.path / "bad.csv", "1,2\n3\n");
  CHECK_THROWS(read_matrix_csv(tmp.path / "bad.csv"));
  CHECK_THROWS(read_vector_csv(tmp.path / "missing.csv"));
}

TEST_CASE("trajectory csv layout") {
  const ObjectiveFunction f = norm_power(2, 1);
  const RunConfig cfg = make_run_config(2, 1.0, 1e-4);
  Vector x0(1);
  x0 << 1.0;
  const Trajectory traj = run(f, ConvexSet::whole_space(1), cfg, x0);
  const std::string csv = trajectory_csv(traj, f.known_minimizer);
  CHECK(csv.rfind("k,gamma,f,env,step_norm,err_to_min\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + static_cast<long>(traj.steps()));
  // Without a minimizer the error column disappears.
  const std::string csv2 = trajectory_csv(traj, std::nullopt);
  CHECK(csv2.rfind("k,gamma,f,env,step_norm\n", 0) == 0);

  const std::string series = series_text(traj, *f.known_minimizer);
  CHECK(series.rfind("0 1\n", 0) == 0);
}

TEST_CASE("atomic write replaces content") {
  TempDir tmp;
  const auto p = tmp.path / "a" / "file.txt";
  write_file_atomic(p, "one\n");
  write_file_atomic(p, "two\n");
  std::ifstream in(p);
  std::string s;
  std::getline(in, s);
  CHECK(s == "two");
  CHECK(!std::filesystem::exists(p.string() + ".tmp"));
}

TEST_CASE("problem catalogue parsing") {
  const ObjectiveFunction np = parse_problem("norm_power:q=2,dim=5");
  CHECK(np.dim == 5);
  CHECK(np.eval(Vector::Ones(5)) == doctest::Approx(5.0));

  const ObjectiveFunction npr = parse_problem("norm_power:q=1.5,dim=2,r=3");
  REQUIRE(npr.domain_hint.has_value());
  CHECK(npr.domain_hint->radius() == doctest::Approx(3.0));

  const ObjectiveFunction qt = parse_problem("quotient:q=2,dim=2,den=2");
  CHECK(qt.eval(Vector::Ones(2)) == doctest::Approx(1.0));
  CHECK(qt.modulus->rho == doctest::Approx(0.5));
  REQUIRE(qt.known_minimizer.has_value());
  CHECK(qt.radial.has_value());

  const ObjectiveFunction ce = parse_problem("counterexample:lq_sum,q=0.5");
  CHECK(ce.not_quasiconvex_witness.has_value());
  const ObjectiveFunction cn = parse_problem("counterexample:lq_norm");
  CHECK(cn.label.find("lq_norm") != std::string::npos);

  const ObjectiveFunction cu = parse_problem("cubic");
  Vector t(1);
  t << 2.0;
  CHECK(cu.eval(t) == doctest::Approx(8.0));

  CHECK_THROWS_AS(parse_problem("norm_power:q=2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_problem("nosuch:thing"), std::invalid_argument);
  CHECK_THROWS_AS(parse_problem("counterexample:nope"), std::invalid_argument);
}

TEST_CASE("affine problem parsing from csv files") {
  TempDir tmp;
  write(tmp.path / "A.csv", "2,0\n0,1\n");
  write(tmp.path / "b.csv", "0,0\n");
  const ObjectiveFunction f =
      parse_problem("affine:q=2,A=" + (tmp.path / "A.csv").string() +
                    ",b=" + (tmp.path / "b.csv").string());
  Vector x(2);
  x << 1, 1;
  CHECK(f.eval(x) == doctest::Approx(5.0));
}

TEST_CASE("set parsing") {
  TempDir tmp;
  CHECK(parse_set("whole", 3).kind() == ConvexSet::Kind::whole_space);

  const ConvexSet b = parse_set("ball:c=0,r=2.5", 2);
  CHECK(b.kind() == ConvexSet::Kind::ball);
  CHECK(b.radius() == doctest::Approx(2.5));

  write(tmp.path / "l.csv", "0,0\n");
  write(tmp.path / "u.csv", "1,1\n");
  const ConvexSet box =
      parse_set("box:l=" + (tmp.path / "l.csv").string() + ",u=" + (tmp.path / "u.csv").string(),
                2);
  CHECK(box.kind() == ConvexSet::Kind::box);

  write(tmp.path / "a.csv", "1,0\n");
  const ConvexSet hs = parse_set("halfspace:a=" + (tmp.path / "a.csv").string() + ",beta=0", 2);
  CHECK(hs.kind() == ConvexSet::Kind::halfspace);

  CHECK_THROWS_AS(parse_set("simplex", 2), std::invalid_argument);
}

TEST_CASE("x0 parsing") {
  const ObjectiveFunction f = parse_problem("norm_power:q=2,dim=3");
  CHECK(parse_x0("ones", f, 0).sum() == doctest::Approx(3.0));
  CHECK(parse_x0("zeros", f, 0).norm() == 0.0);
  CHECK(parse_x0("const:2.5", f, 0)[1] == doctest::Approx(2.5));
  CHECK(parse_x0("minimizer", f, 0).norm() == 0.0);
  const Vector r1 = parse_x0("rand:2", f, 7);
  const Vector r2 = parse_x0("rand:2", f, 7);
  CHECK((r1 - r2).norm() == 0.0);  // seeded
  CHECK(r1.norm() <= 2.0);

  const ObjectiveFunction ce = parse_problem("counterexample:sum_shifted");
  CHECK_NOTHROW(parse_x0("minimizer", ce, 0));
}
