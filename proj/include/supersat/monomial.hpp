#pragma once

#include "supersat/errors.hpp"
#include "supersat/scalar.hpp"

#include <compare>
#include <string>
#include <utility>
#include <vector>

namespace supersat {

/// x^alpha = x_1^alpha_1 ... x_d^alpha_d.
struct Monomial {
  std::vector<int> exponents;

  Monomial() = default;
  explicit Monomial(std::vector<int> e);

  static Monomial constant(int d) { return Monomial(std::vector<int>(static_cast<size_t>(d), 0)); }

  int dimension() const { return static_cast<int>(exponents.size()); }
  int degree() const;
  int operator[](int i) const { return exponents[static_cast<size_t>(i)]; }

  bool operator==(const Monomial&) const = default;

  /// e.g. "x1^2*x2", "1" for the constant.
  std::string to_string() const;
};

/// d/dx_i of x^alpha as (coefficient, monomial). Coefficient 0 means the
/// derivative vanishes identically.
std::pair<long long, Monomial> derivative(const Monomial& m, int i);

/// Product of monomials (exponent addition).
Monomial operator*(const Monomial& a, const Monomial& b);

template <typename Scalar, typename Point> Scalar evaluate(const Monomial& m, const Point& x) {
  Scalar v(1);
  for (int k = 0; k < m.dimension(); ++k) {
    const Scalar xk(x[k]);
    for (int p = 0; p < m[k]; ++p) v *= xk;
  }
  return v;
}

enum class OrderKind { DegLex, DegRevLex, Lex };

/// A monomial term order. `priority[0]` is the most significant (greatest)
/// variable: with priority {0, 1}, x1 > x2, so x2 < x1 and x2^2 < x1*x2 < x1^2.
struct TermOrder {
  OrderKind kind = OrderKind::DegLex;
  std::vector<int> priority;

  static TermOrder deglex(int d);
  static TermOrder make(OrderKind kind, std::vector<int> priority);

  int dimension() const { return static_cast<int>(priority.size()); }
  bool degree_compatible() const { return kind != OrderKind::Lex; }
};

std::string to_string(OrderKind kind);
OrderKind order_kind_from_string(const std::string& s);

std::strong_ordering compare(const Monomial& a, const Monomial& b, const TermOrder& order);

/// All monomials in d variables of total degree exactly k, ascending.
std::vector<Monomial> monomials_of_degree(int d, int k, const TermOrder& order);

/// The first `limit` monomials in ascending order, starting from 1.
std::vector<Monomial> enumerate_monomials(int d, const TermOrder& order, int limit);

} // namespace supersat
