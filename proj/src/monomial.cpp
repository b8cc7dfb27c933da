#include "supersat/monomial.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace supersat {

Monomial::Monomial(std::vector<int> e) : exponents(std::move(e)) {
  for (int v : exponents)
    if (v < 0) throw InputError("monomial exponents must be nonnegative");
}

int Monomial::degree() const { return std::accumulate(exponents.begin(), exponents.end(), 0); }

std::string Monomial::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (int k = 0; k < dimension(); ++k) {
    if (exponents[k] == 0) continue;
    if (!first) os << '*';
    os << 'x' << (k + 1);
    if (exponents[k] > 1) os << '^' << exponents[k];
    first = false;
  }
  if (first) os << '1';
  return os.str();
}

std::pair<long long, Monomial> derivative(const Monomial& m, int i) {
  Monomial out = m;
  const int e = m[i];
  if (e == 0) return {0, Monomial::constant(m.dimension())};
  out.exponents[static_cast<size_t>(i)] = e - 1;
  return {e, out};
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  if (a.dimension() != b.dimension()) throw DimensionMismatch("monomial product: dimension mismatch");
  Monomial out = a;
  for (int k = 0; k < a.dimension(); ++k) out.exponents[static_cast<size_t>(k)] += b[k];
  return out;
}

TermOrder TermOrder::deglex(int d) {
  std::vector<int> p(static_cast<size_t>(d));
  std::iota(p.begin(), p.end(), 0);
  return {OrderKind::DegLex, std::move(p)};
}

TermOrder TermOrder::make(OrderKind kind, std::vector<int> priority) {
  std::vector<int> sorted = priority;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] != static_cast<int>(i)) throw InputError("variable priority must be a permutation of 0..d-1");
  return {kind, std::move(priority)};
}

std::string to_string(OrderKind kind) {
  switch (kind) {
  case OrderKind::DegLex: return "deglex";
  case OrderKind::DegRevLex: return "degrevlex";
  case OrderKind::Lex: return "lex";
  }
  return "deglex";
}

OrderKind order_kind_from_string(const std::string& s) {
  if (s == "deglex") return OrderKind::DegLex;
  if (s == "degrevlex") return OrderKind::DegRevLex;
  if (s == "lex") return OrderKind::Lex;
  throw InputError("unknown term order '" + s + "' (expected deglex|degrevlex|lex)");
}

namespace {

std::strong_ordering lex_by_priority(const Monomial& a, const Monomial& b, const std::vector<int>& priority) {
  for (int v : priority)
    if (a[v] != b[v]) return a[v] <=> b[v];
  return std::strong_ordering::equal;
}

std::strong_ordering revlex_by_priority(const Monomial& a, const Monomial& b, const std::vector<int>& priority) {
  for (auto it = priority.rbegin(); it != priority.rend(); ++it)
    if (a[*it] != b[*it]) return b[*it] <=> a[*it];
  return std::strong_ordering::equal;
}

} // namespace

std::strong_ordering compare(const Monomial& a, const Monomial& b, const TermOrder& order) {
  if (a.dimension() != b.dimension() || a.dimension() != order.dimension())
    throw DimensionMismatch("compare: monomials and order must share the same dimension");
  switch (order.kind) {
  case OrderKind::Lex: return lex_by_priority(a, b, order.priority);
  case OrderKind::DegLex:
    if (auto c = a.degree() <=> b.degree(); c != 0) return c;
    return lex_by_priority(a, b, order.priority);
  case OrderKind::DegRevLex:
    if (auto c = a.degree() <=> b.degree(); c != 0) return c;
    return revlex_by_priority(a, b, order.priority);
  }
  return std::strong_ordering::equal;
}

namespace {

void compositions(int d, int k, int pos, std::vector<int>& cur, std::vector<Monomial>& out) {
  if (pos == d - 1) {
    cur[static_cast<size_t>(pos)] = k;
    out.emplace_back(cur);
    return;
  }
  for (int e = 0; e <= k; ++e) {
    cur[static_cast<size_t>(pos)] = e;
    compositions(d, k - e, pos + 1, cur, out);
  }
}

} // namespace

std::vector<Monomial> monomials_of_degree(int d, int k, const TermOrder& order) {
  if (d < 1) throw InputError("dimension must be >= 1");
  std::vector<Monomial> out;
  std::vector<int> cur(static_cast<size_t>(d), 0);
  compositions(d, k, 0, cur, out);
  std::sort(out.begin(), out.end(), [&](const Monomial& a, const Monomial& b) { return compare(a, b, order) < 0; });
  return out;
}

std::vector<Monomial> enumerate_monomials(int d, const TermOrder& order, int limit) {
  if (d < 1 || limit < 1) throw InputError("enumerate_monomials: need d >= 1 and limit >= 1");
  if (order.dimension() != d) throw DimensionMismatch("enumerate_monomials: order dimension differs from d");
  std::vector<Monomial> out;
  if (!order.degree_compatible()) {
    // Under lex every power of the least significant variable precedes any
    // monomial involving another variable.
    const int least = order.priority.back();
    for (int k = 0; k < limit; ++k) {
      Monomial m = Monomial::constant(d);
      m.exponents[static_cast<size_t>(least)] = k;
      out.push_back(std::move(m));
    }
    return out;
  }
  for (int k = 0; static_cast<int>(out.size()) < limit; ++k) {
    for (auto& m : monomials_of_degree(d, k, order)) {
      if (static_cast<int>(out.size()) == limit) break;
      out.push_back(std::move(m));
    }
  }
  return out;
}

} // namespace supersat
