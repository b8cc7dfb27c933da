#include "supersat/basis.hpp"

#include <set>

namespace supersat {

void Basis::validate() const {
  const int d = dimension();
  if (saturated_len < 0 || saturated_len > size()) throw InputError("basis: saturated_len out of range");
  for (const auto& m : terms)
    if (m.dimension() != d) throw DimensionMismatch("basis: term " + m.to_string() + " has the wrong dimension");
  std::set<std::vector<int>> seen;
  for (const auto& m : terms)
    if (!seen.insert(m.exponents).second) throw InputError("basis: duplicate term " + m.to_string());
  auto sorted_range = [&](int lo, int hi) {
    for (int i = lo + 1; i < hi; ++i)
      if (compare(terms[static_cast<size_t>(i - 1)], terms[static_cast<size_t>(i)], order) >= 0) return false;
    return true;
  };
  if (!sorted_range(0, saturated_len) || !sorted_range(saturated_len, size()))
    throw InputError("basis: terms must be ascending within the saturated part and the extension");
}

namespace detail {

Eigen::MatrixXd rank_coordinates(const Design& design) {
  Eigen::MatrixXd out(design.size(), design.dimension());
  for (int i = 0; i < design.size(); ++i) out.row(i) = design.box().to_symmetric(design.point(i)).transpose();
  return out;
}

std::vector<Monomial> scan_candidates(int d, const TermOrder& order, int n, int max_degree) {
  std::vector<Monomial> out;
  if (order.degree_compatible()) {
    for (int k = 0; k <= max_degree; ++k) {
      auto layer = monomials_of_degree(d, k, order);
      out.insert(out.end(), layer.begin(), layer.end());
    }
    return out;
  }
  // Lex: exponents beyond n-1 in any variable reduce to lower powers on n
  // points, so the box {0..n-1}^d holds every standard monomial.
  std::vector<int> e(static_cast<size_t>(d), 0);
  while (true) {
    out.emplace_back(e);
    int k = 0;
    while (k < d && ++e[static_cast<size_t>(k)] == n) e[static_cast<size_t>(k++)] = 0;
    if (k == d) break;
  }
  std::sort(out.begin(), out.end(), [&](const Monomial& a, const Monomial& b) { return compare(a, b, order) < 0; });
  return out;
}

} // namespace detail

Basis extend_basis(const Basis& basis, int total) {
  if (total < basis.size())
    throw InputError("extend_basis: total " + std::to_string(total) + " is below the current size " +
                     std::to_string(basis.size()));
  Basis out = basis;
  const int d = basis.dimension();
  std::vector<Monomial> extension(basis.terms.begin() + basis.saturated_len, basis.terms.end());
  const int need = total - basis.size();
  int added = 0;
  if (need > 0) {
    // The scan is over the whole monomial stream, so skipped terms are exactly
    // those already present.
    for (int limit = total + 1;; limit *= 2) {
      added = 0;
      std::vector<Monomial> fresh;
      for (auto& m : enumerate_monomials(d, basis.order, limit)) {
        if (basis.contains(m)) continue;
        fresh.push_back(std::move(m));
        if (++added == need) break;
      }
      if (added == need) {
        extension.insert(extension.end(), fresh.begin(), fresh.end());
        break;
      }
    }
  }
  std::sort(extension.begin(), extension.end(),
            [&](const Monomial& a, const Monomial& b) { return compare(a, b, basis.order) < 0; });
  out.terms.resize(static_cast<size_t>(basis.saturated_len));
  out.terms.insert(out.terms.end(), extension.begin(), extension.end());
  return out;
}

Basis complete_to_degree(const Basis& saturated, int degree) {
  const int d = saturated.dimension();
  Basis out = saturated;
  out.terms.resize(static_cast<size_t>(saturated.saturated_len));
  for (const auto& m : saturated.terms)
    if (m.degree() > degree) throw InputError("complete_to_degree: saturated term " + m.to_string() + " exceeds degree");
  std::vector<Monomial> extension;
  for (int k = 0; k <= degree; ++k)
    for (auto& m : monomials_of_degree(d, k, saturated.order))
      if (!out.contains(m)) extension.push_back(std::move(m));
  out.terms.insert(out.terms.end(), extension.begin(), extension.end());
  return out;
}

} // namespace supersat
