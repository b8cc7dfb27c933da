#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "supersat/bench.hpp"
#include "supersat/commands.hpp"
#include "supersat/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace supersat;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "supersat");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scratch(const std::string& name) {
  const fs::path dir = fs::current_path() / "cli_scratch";
  fs::create_directories(dir);
  return (dir / name).string();
}

std::string write(const std::string& name, const std::string& text) {
  const auto p = scratch(name);
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sinc_obs() {
  std::ostringstream os;
  os.precision(17);
  os << "x1,y\n";
  for (int i = 0; i < 6; ++i) os << i / 5.0 << ',' << sinc_response(i / 5.0) << '\n';
  return write("sinc.csv", os.str());
}

} // namespace

TEST_CASE("csv parsing") {
  std::istringstream good("x1,x2\n0.5, 1e-3\n\n-2,+3\n");
  const auto t = io::read_csv(good, "g");
  CHECK(t.rows.rows() == 2);
  CHECK(t.rows(1, 1) == 3.0);
  std::istringstream bad("x1,y\n0,1\n0.5,abc\n");
  try {
    io::read_csv(bad, "obs.csv");
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("obs.csv line 3") != std::string::npos);
  }
  std::istringstream ragged("x1,y\n0\n");
  CHECK_THROWS_AS(io::read_csv(ragged, "r"), InputError);
  std::istringstream empty("");
  CHECK_THROWS_AS(io::read_csv(empty, "e"), InputError);
  std::istringstream hdr("a,b\n1,2\n");
  CHECK_THROWS_AS(io::design_points(io::read_csv(hdr, "h"), "h"), InputError);
  std::istringstream inf("x1\ninf\n");
  CHECK_THROWS_AS(io::read_csv(inf, "i"), InputError);
}

TEST_CASE("box parsing") {
  CHECK(io::parse_box("0:1", 2) == Box::unit(2));
  CHECK(io::parse_box("-1:1,0:2", 2)[1].hi == 2.0);
  CHECK_THROWS_AS(io::parse_box("0:1,0:1,0:1", 2), InputError);
  CHECK_THROWS_AS(io::parse_box("1:0", 1), InputError);
  CHECK_THROWS_AS(io::parse_box("0-1", 1), InputError);
  const auto p = write("box.json", R"({"box": [[-1, 1], [0, 3]]})");
  CHECK(io::resolve_box(p, 2)[1].hi == 3.0);
  CHECK_THROWS_AS(io::resolve_box(p, 1), DimensionMismatch);
}

TEST_CASE("basis and form JSON round trips") {
  const Design d = sobol_2d(10);
  const Basis b = extend_basis(good_saturated_basis(d, TermOrder::make(OrderKind::DegRevLex, {1, 0})), 13);
  const auto j = io::to_json(b);
  const Basis back = io::basis_from_json(j);
  CHECK(back.terms == b.terms);
  CHECK(back.saturated_len == 10);
  CHECK(back.order.kind == OrderKind::DegRevLex);
  CHECK(back.order.priority == std::vector<int>{1, 0});
  auto broken = j;
  std::swap(broken["terms"][1], broken["terms"][2]);
  CHECK_THROWS_AS(io::basis_from_json(broken), InputError);
  CHECK_THROWS_AS(io::basis_from_json(io::json::parse(R"({"d": 2})")), InputError);

  const auto c = QuadraticCriterion::hessian();
  const auto f = build_form<HighPrecision>(b, d.box(), c);
  const auto fj = io::form_to_json(f, b, d.box(), c);
  const auto g = io::form_from_json<HighPrecision>(io::json::parse(fj.dump()), b, d.box(), c);
  REQUIRE(g.has_value());
  CHECK(g->K == f.K);
  CHECK(g->zero_idx == f.zero_idx);
  CHECK_FALSE(io::form_from_json<HighPrecision>(fj, b, d.box(), QuadraticCriterion::gradient()).has_value());
}

TEST_CASE("fit reproduces the sinc q=0 benchmark value and round-trips through predict") {
  const auto obs = sinc_obs();
  const auto model = scratch("m0.json");
  auto r = run({"fit", "--obs", obs, "-o", model});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("psi_star_root 76.54") != std::string::npos);
  const auto j = io::read_json_file(model);
  CHECK(j["psi_star_root"].get<double>() == doctest::Approx(76.543).epsilon(1e-2));
  CHECK(j["method"] == "BlockKKT");

  const auto q = write("q.csv", "x1\n0\n0.2\n0.4\n0.6\n0.8\n1\n1.5\n");
  r = run({"predict", "--model", model, "--query", q});
  REQUIRE(r.code == 0);
  std::istringstream is(r.out);
  const auto t = io::read_csv(is, "pred");
  CHECK(t.header == std::vector<std::string>{"x1", "y_hat", "extrapolated"});
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(t.rows(i, 1) - sinc_response(i / 5.0)) <= 1e-8);
    CHECK(t.rows(i, 2) == 0.0);
  }
  CHECK(t.rows(6, 2) == 1.0);
}

TEST_CASE("fit options") {
  const auto obs = sinc_obs();
  auto r = run({"fit", "--obs", obs, "--extra-terms", "3", "--method", "dummy", "--precision", "double"});
  REQUIRE(r.code == 0);
  CHECK(io::json::parse(r.out)["psi_star_root"].get<double>() == doctest::Approx(33.020).epsilon(1e-2));
  const auto w = write("w.json", R"([{"exponents": [0], "coefficient": 1.0}, {"exponents": [1], "coefficient": 1.0}])");
  CHECK(run({"fit", "--obs", obs, "--extra-terms", "2", "--criterion", "weighted", "--weight", w}).code == 0);
  CHECK(run({"fit", "--obs", obs, "--criterion", "weighted"}).code == 2);
  CHECK(run({"fit", "--obs", obs, "--extra-terms", "2", "--criterion", "gradient", "--mixed-partials", "unordered"}).code == 0);
  const auto t = write("t.json", R"([{"exponents": [2], "coefficient": 1.0}])");
  CHECK(run({"fit", "--obs", obs, "--extra-terms", "2", "--criterion", "value", "--target", t}).code == 0);
  CHECK(run({"fit", "--obs", obs, "--extra-terms", "2", "--criterion", "value", "--target", t, "--method", "closed"}).code == 2);
}

TEST_CASE("constant data has zero smoothness") {
  const auto obs = write("const.csv", "x1,x2,y\n0.1,0.2,4\n0.7,0.3,4\n0.4,0.9,4\n0.8,0.8,4\n");
  const auto r = run({"fit", "--obs", obs, "--extra-terms", "4", "--box", "0:1"});
  REQUIRE(r.code == 0);
  CHECK(std::abs(io::json::parse(r.out)["psi_star"].get<double>()) <= 1e-12);
}

TEST_CASE("form cache") {
  const auto obs = sinc_obs();
  const auto cache = scratch("form.json");
  fs::remove(cache);
  auto a = run({"fit", "--obs", obs, "--extra-terms", "2", "--form-cache", cache, "-o", scratch("a.json")});
  REQUIRE(a.code == 0);
  CHECK(fs::exists(cache));
  auto b = run({"fit", "--obs", obs, "--extra-terms", "2", "--form-cache", cache, "-o", scratch("b.json")});
  CHECK(b.out.find("loaded") != std::string::npos);
  CHECK(slurp(scratch("a.json")) == slurp(scratch("b.json")));
  auto c = run({"fit", "--obs", obs, "--extra-terms", "3", "--form-cache", cache, "-o", scratch("c.json")});
  CHECK(c.out.find("does not match") != std::string::npos);
}

TEST_CASE("errors map to exit codes") {
  const auto obs = sinc_obs();
  const auto bad = write("bad.csv", "x1,y\n0,1\n0.5,abc\n");
  auto r = run({"fit", "--obs", bad});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 3") != std::string::npos);
  CHECK(run({"fit", "--obs", scratch("missing.csv")}).code == 2);
  CHECK(run({"fit", "--obs", obs, "--bogus"}).code == 2);
  CHECK(run({"fit"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"fit", "--obs", obs, "--method", "nonsingular"}).code == 3);
  CHECK(run({"fit", "--obs", obs, "--order", "grevlex"}).code == 2);
  CHECK(run({"fit", "--obs", obs, "--priority", "1,2"}).code == 2);
  const auto design = write("design.csv", "x1\n0\n0.2\n0.4\n0.6\n0.8\n0.9\n");
  CHECK(run({"fit", "--obs", obs, "--design", design}).code == 2);
  const auto dup = write("dup.csv", "x1,y\n0,1\n0,2\n");
  CHECK(run({"fit", "--obs", dup}).code == 2);
  const auto few = write("few.csv", "x1,y\n0,1\n1,2\n3,3\n");
  CHECK(run({"fit", "--obs", few, "--rank-tol", "0.9"}).code == 3);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"fit", "--help"}).code == 0);
}

TEST_CASE("predict edge cases") {
  const auto obs = sinc_obs();
  const auto model = scratch("m1.json");
  REQUIRE(run({"fit", "--obs", obs, "-o", model}).code == 0);
  const auto empty = write("empty.csv", "x1\n");
  auto r = run({"predict", "--model", model, "--query", empty});
  CHECK(r.code == 0);
  CHECK(r.out == "x1,y_hat,extrapolated\n");
  const auto wide = write("wide.csv", "x1,x2\n0,0\n");
  CHECK(run({"predict", "--model", model, "--query", wide}).code == 2);
  const auto junk = write("junk.json", "{\"basis\": 3");
  CHECK(run({"predict", "--model", junk, "--query", empty}).code == 2);
}

TEST_CASE("outputs are deterministic") {
  const auto obs = sinc_obs();
  REQUIRE(run({"fit", "--obs", obs, "--extra-terms", "4", "-o", scratch("d1.json")}).code == 0);
  REQUIRE(run({"fit", "--obs", obs, "--extra-terms", "4", "-o", scratch("d2.json")}).code == 0);
  CHECK(slurp(scratch("d1.json")) == slurp(scratch("d2.json")));
  const auto a = run({"bench-sinc", "--n", "6", "--q-max", "3", "--json", scratch("s1.json"), "--csv", scratch("s1.csv")});
  const auto b = run({"bench-sinc", "--n", "6", "--q-max", "3", "--json", scratch("s2.json"), "--csv", scratch("s2.csv")});
  CHECK(a.out == b.out);
  CHECK(slurp(scratch("s1.json")) == slurp(scratch("s2.json")));
  CHECK(slurp(scratch("s1.csv")) == slurp(scratch("s2.csv")));
}

TEST_CASE("bench-sinc matches direct library calls") {
  const auto r = run({"bench-sinc", "--n", "6", "--q-max", "5", "--json", scratch("s.json")});
  REQUIRE(r.code == 0);
  const auto j = io::read_json_file(scratch("s.json"));
  const auto direct = bench_sinc(6, 5);
  for (int q = 0; q <= 5; ++q)
    CHECK(j["psi_star_by_q"][static_cast<size_t>(q)]["psi_star"].get<double>() == direct.psi_star_by_q[static_cast<size_t>(q)].second);
  CHECK(j["spline_psi"].get<double>() == direct.spline_psi);
  CHECK(r.out.find("spline 715.223 26.7437") != std::string::npos);
  const auto sw = run({"bench-sinc", "--sweep", "--q-max", "1"});
  CHECK(sw.code == 0);
  CHECK(sw.out.find("sinc n=20") != std::string::npos);
  CHECK(run({"bench-sinc", "--n", "2"}).code == 2);
}

TEST_CASE("bench-peaks options") {
  auto r = run({"bench-peaks", "--n-fit", "10", "--degree", "5", "--n-test", "0"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("rmse") == std::string::npos);
  std::string preds = "kriging\n";
  for (int i = 0; i < 20; ++i) preds += "0\n";
  const auto p = write("preds.csv", preds);
  r = run({"bench-peaks", "--n-fit", "10", "--degree", "5", "--n-test", "20", "--external-preds", p, "--json", scratch("pk.json")});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("kriging") != std::string::npos);
  CHECK(io::read_json_file(scratch("pk.json"))["rmse_table"].size() == 3);
  CHECK(run({"bench-peaks", "--n-fit", "10", "--degree", "5", "--n-test", "19", "--external-preds", p}).code == 2);
  CHECK(run({"bench-peaks", "--n-fit", "10", "--degree", "2"}).code == 2);
}

TEST_CASE("design-opt and basis subcommands") {
  auto r = run({"design-opt", "--criterion", "largest-eig", "--csv", scratch("scan.csv")});
  REQUIRE(r.code == 0);
  CHECK(io::json::parse(r.out)["parameter"].get<double>() == doctest::Approx(0.52988).epsilon(1e-4));
  CHECK(slurp(scratch("scan.csv")).rfind("parameter,objective\n", 0) == 0);
  r = run({"design-opt", "--criterion", "d-opt"});
  REQUIRE(r.code == 0);
  CHECK(io::json::parse(r.out)["parameter"].get<double>() == doctest::Approx(0.43402).epsilon(1e-4));
  CHECK(run({"design-opt", "--criterion", "d-opt", "--knots", "1.5"}).code == 2);

  const auto d4 = write("d4.csv", "x1,x2\n0,0\n1,1\n2,2\n3,3\n");
  r = run({"basis", "--design", d4, "--priority", "2,1"});
  REQUIRE(r.code == 0);
  const auto b = io::basis_from_json(io::json::parse(r.out));
  CHECK(b.terms.back() == Monomial({3, 0}));
  r = run({"basis", "--design", d4, "--extra-terms", "2", "--precision", "double"});
  CHECK(io::basis_from_json(io::json::parse(r.out)).size() == 6);
}
