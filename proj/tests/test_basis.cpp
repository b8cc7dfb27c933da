#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include <numeric>

using namespace supersat;

namespace {

std::vector<std::string> names(const std::vector<Monomial>& ms) {
  std::vector<std::string> out;
  for (const auto& m : ms) out.push_back(m.to_string());
  return out;
}

Design d4() {
  Eigen::MatrixXd p(4, 2);
  p << 0, 0, 1, 1, 2, 2, 3, 3;
  return Design(p, Box::bounding(p));
}

Monomial mono(std::vector<int> e) { return Monomial(std::move(e)); }

} // namespace

TEST_CASE("monomial basics") {
  const Monomial m({2, 1});
  CHECK(m.degree() == 3);
  CHECK(m.to_string() == "x1^2*x2");
  CHECK(Monomial::constant(2).to_string() == "1");
  const auto [c, dm] = derivative(m, 0);
  CHECK(c == 2);
  CHECK(dm == Monomial({1, 1}));
  CHECK(derivative(Monomial({0, 3}), 0).first == 0);
  CHECK(m * Monomial({1, 4}) == Monomial({3, 5}));
  CHECK(evaluate<double>(m, Eigen::Vector2d(3.0, 2.0)) == doctest::Approx(18.0));
  CHECK(evaluate<double>(Monomial({0, 0}), Eigen::Vector2d(0.0, 0.0)) == 1.0);
}

TEST_CASE("deglex ranks x1 above x2 and degree first") {
  const auto order = TermOrder::deglex(2);
  CHECK(compare(mono({1, 0}), mono({0, 1}), order) > 0);
  CHECK(compare(mono({0, 2}), mono({1, 1}), order) < 0);
  CHECK(compare(mono({1, 1}), mono({2, 0}), order) < 0);
  CHECK(compare(mono({5, 0}), mono({0, 6}), order) < 0);
  CHECK(compare(mono({1, 1}), mono({1, 1}), order) == 0);
  CHECK_THROWS_AS((void)compare(mono({1}), mono({1, 0}), order), DimensionMismatch);
}

TEST_CASE("enumeration with x2 as the greatest variable") {
  const auto order = TermOrder::make(OrderKind::DegLex, {1, 0});
  CHECK(names(enumerate_monomials(2, order, 6)) == std::vector<std::string>{"1", "x1", "x2", "x1^2", "x1*x2", "x2^2"});
  CHECK(names(enumerate_monomials(1, TermOrder::deglex(1), 4)) == std::vector<std::string>{"1", "x1", "x1^2", "x1^3"});
}

TEST_CASE("91 monomials are exactly those of degree <= 12") {
  const auto ms = enumerate_monomials(2, TermOrder::deglex(2), 91);
  REQUIRE(ms.size() == 91);
  for (const auto& m : ms) CHECK(m.degree() <= 12);
  CHECK(ms.back().degree() == 12);
}

TEST_CASE("degrevlex and deglex differ on the classical degree-3 pair") {
  const Monomial a({1, 0, 2}), b({0, 3, 0});
  CHECK(compare(a, b, TermOrder::make(OrderKind::DegLex, {0, 1, 2})) > 0);
  CHECK(compare(a, b, TermOrder::make(OrderKind::DegRevLex, {0, 1, 2})) < 0);
}

TEST_CASE("lex puts any power of x2 below x1") {
  const auto order = TermOrder::make(OrderKind::Lex, {0, 1});
  CHECK(compare(mono({0, 9}), mono({1, 0}), order) < 0);
  CHECK(compare(mono({1, 0}), mono({1, 1}), order) < 0);
  CHECK(names(enumerate_monomials(2, order, 3)) == std::vector<std::string>{"1", "x2", "x2^2"});
}

TEST_CASE("term order is a strict total order (property)") {
  for (auto kind : {OrderKind::DegLex, OrderKind::DegRevLex, OrderKind::Lex}) {
    const auto order = TermOrder::make(kind, {1, 0, 2});
    std::vector<Monomial> ms;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) ms.push_back(mono({a, b, c}));
    for (const auto& x : ms)
      for (const auto& y : ms) {
        CHECK((compare(x, y, order) == 0) == (x == y));
        CHECK((compare(x, y, order) < 0) == (compare(y, x, order) > 0));
        if (kind != OrderKind::Lex && x.degree() < y.degree()) CHECK(compare(x, y, order) < 0);
        for (const auto& z : {mono({1, 0, 0}), mono({0, 0, 1})})
          if (compare(x, y, order) < 0) CHECK(compare(x * z, y * z, order) < 0);
      }
  }
}

TEST_CASE("enumeration prefixes are stable (property)") {
  for (auto kind : {OrderKind::DegLex, OrderKind::DegRevLex})
    for (int d = 1; d <= 3; ++d) {
      std::vector<int> pr(static_cast<size_t>(d));
      std::iota(pr.begin(), pr.end(), 0);
      const auto order = TermOrder::make(kind, pr);
      const auto big = enumerate_monomials(d, order, 40);
      for (int m = 1; m < 40; m += 7) {
        const auto small = enumerate_monomials(d, order, m);
        CHECK(std::equal(small.begin(), small.end(), big.begin()));
      }
      for (size_t i = 1; i < big.size(); ++i) CHECK(compare(big[i - 1], big[i], order) < 0);
    }
}

TEST_CASE("term order validation") {
  CHECK_THROWS_AS(TermOrder::make(OrderKind::DegLex, {0, 0}), InputError);
  CHECK(order_kind_from_string("degrevlex") == OrderKind::DegRevLex);
  CHECK_THROWS_AS(order_kind_from_string("grevlex"), InputError);
}

TEST_CASE("designs reject duplicates and bad boxes") {
  Eigen::MatrixXd p(2, 1);
  p << 0.5, 0.5;
  CHECK_THROWS_AS(Design(p, Box::unit(1)), InputError);
  CHECK_THROWS_AS(Box({Interval{1.0, 1.0}}), InputError);
  Eigen::MatrixXd q(1, 2);
  q << 0.0, 0.0;
  CHECK_THROWS_AS(Design(q, Box::unit(1)), DimensionMismatch);
}

TEST_CASE("design matrix entries") {
  Eigen::MatrixXd p(2, 1);
  p << 0.0, 1.0;
  const Design d(p, Box::unit(1));
  const Basis b{enumerate_monomials(1, TermOrder::deglex(1), 2), 2, TermOrder::deglex(1)};
  Eigen::MatrixXd want(2, 2);
  want << 1, 0, 1, 1;
  CHECK(design_matrix<double>(d, b) == want);
}

TEST_CASE("collinear D4") {
  const Design d = d4();
  const auto t = TermOrder::deglex(2);
  const Basis cubic{{mono({0, 0}), mono({1, 0}), mono({2, 0}), mono({3, 0})}, 4, t};
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design_matrix<double>(d, cubic));
  CHECK(svd.singularValues().minCoeff() > 1e-3);
  const Basis lin{{mono({0, 0}), mono({0, 1}), mono({1, 0})}, 3, t};
  CHECK(detail::numerical_rank<double>(design_matrix<double>(d, lin), 1e-9) == 2);

  // Preferring x1 scans x1 before x2 in every degree.
  const auto prefer_x1 = TermOrder::make(OrderKind::DegLex, {1, 0});
  CHECK(names(good_saturated_basis(d, prefer_x1).terms) == std::vector<std::string>{"1", "x1", "x1^2", "x1^3"});
  CHECK(names(good_saturated_basis(d, t).terms) == std::vector<std::string>{"1", "x2", "x2^2", "x2^3"});

  const Basis bad{{mono({0, 0}), mono({0, 1}), mono({1, 0}), mono({0, 2}), mono({2, 0})}, 4, t};
  CHECK_FALSE(is_good_supersaturated(d, bad));
}

TEST_CASE("Sobol prefix") {
  const Eigen::MatrixXd p = sobol_points_2d(5, 1);
  Eigen::MatrixXd want(5, 2);
  want << 0.5, 0.5, 0.75, 0.25, 0.25, 0.75, 0.375, 0.375, 0.875, 0.875;
  CHECK(p == want);
  const Eigen::MatrixXd p0 = sobol_points_2d(2, 0);
  CHECK(p0(0, 0) == 0.0);
  CHECK(p0(1, 0) == 0.5);
  const Eigen::MatrixXd big = sobol_points_2d(600, 1);
  CHECK(big.minCoeff() >= 0.0);
  CHECK(big.maxCoeff() < 1.0);
  CHECK_NOTHROW(Design(big, Box::unit(2)));
}

TEST_CASE("Sobol 24-point good saturated basis (both offsets)") {
  for (int skip : {0, 1}) {
    const Basis b = good_saturated_basis(sobol_2d(24, skip), TermOrder::deglex(2));
    REQUIRE(b.size() == 24);
    int low = 0;
    std::vector<std::string> six;
    for (const auto& m : b.terms) {
      if (m.degree() <= 5) ++low;
      if (m.degree() == 6) six.push_back(m.to_string());
      CHECK(m.degree() <= 6);
    }
    CHECK(low == 21);
    CHECK(six == std::vector<std::string>{"x2^6", "x1*x2^5", "x1^2*x2^4"});
    CHECK(is_good_supersaturated(sobol_2d(24, skip), b));
  }
}

TEST_CASE("1-D designs give the Vandermonde basis") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 5.0);
  for (int n = 1; n <= 12; ++n) {
    Eigen::MatrixXd p(n, 1);
    for (int i = 0; i < n; ++i) p(i, 0) = u(rng);
    const Design d(p, Box({Interval{-3.0, 5.0}}));
    const Basis b = good_saturated_basis(d, TermOrder::deglex(1));
    for (int k = 0; k < n; ++k) CHECK(b.terms[static_cast<size_t>(k)] == Monomial({k}));
  }
  for (auto kind : {OrderKind::Lex, OrderKind::DegRevLex}) {
    const Basis b = good_saturated_basis(uniform_design_1d(7), TermOrder::make(kind, {0}));
    CHECK(b.terms.back() == Monomial({6}));
  }
}

TEST_CASE("extension") {
  const Design d = uniform_design_1d(6);
  const Basis h = good_saturated_basis(d, TermOrder::deglex(1));
  const Basis e1 = extend_basis(h, 7);
  CHECK(names(std::vector<Monomial>(e1.terms.begin() + 6, e1.terms.end())) == std::vector<std::string>{"x1^6"});
  const Basis e5 = extend_basis(h, 11);
  CHECK(e5.terms.back() == Monomial({10}));
  CHECK(e5.saturated_len == 6);
  CHECK(extend_basis(h, 6).terms == h.terms);
  CHECK_THROWS_AS(extend_basis(h, 5), InputError);
  CHECK_NOTHROW(e5.validate());
}

TEST_CASE("extending a good saturated basis stays good (property)") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 2;
    const auto inst = testing::random_instance(rng, d, 3 + trial % 6, trial % 5);
    CHECK(is_good_supersaturated(inst.design, inst.basis));
    const Basis again = good_saturated_basis(inst.design, TermOrder::deglex(d));
    CHECK(std::equal(again.terms.begin(), again.terms.end(), inst.basis.terms.begin()));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(evaluation_matrix<double>(detail::rank_coordinates(inst.design),
                                                                    std::vector<Monomial>(inst.basis.terms.begin(), inst.basis.terms.begin() + inst.basis.saturated_len)));
    CHECK(svd.singularValues().minCoeff() > 1e-9 * svd.singularValues().maxCoeff());
  }
}

TEST_CASE("complete to degree") {
  const Design d = sobol_2d(24);
  const Basis full = complete_to_degree(good_saturated_basis(d, TermOrder::deglex(2)), 12);
  CHECK(full.size() == 91);
  CHECK(full.saturated_len == 24);
  CHECK_NOTHROW(full.validate());
  CHECK(is_good_supersaturated(d, full));
}

TEST_CASE("basis validation") {
  const auto t = TermOrder::deglex(1);
  CHECK_THROWS_AS((Basis{{mono({0}), mono({0})}, 2, t}.validate()), InputError);
  CHECK_THROWS_AS((Basis{{mono({1}), mono({0})}, 2, t}.validate()), InputError);
  CHECK_THROWS_AS((Basis{{mono({0})}, 2, t}.validate()), InputError);
  CHECK_NOTHROW((Basis{{mono({0}), mono({3}), mono({1})}, 2, t}.validate()));
}
