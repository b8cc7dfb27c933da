#pragma once

#include "supersat/design.hpp"
#include "supersat/monomial.hpp"
#include "supersat/scalar.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace supersat {

/// Ordered monomial list. The first `saturated_len` terms form the good
/// saturated basis for the design the basis was built for; the rest is the
/// extension. Both parts are ascending under `order`.
struct Basis {
  std::vector<Monomial> terms;
  int saturated_len = 0;
  TermOrder order;

  int size() const { return static_cast<int>(terms.size()); }
  int dimension() const { return order.dimension(); }
  bool contains(const Monomial& m) const { return std::find(terms.begin(), terms.end(), m) != terms.end(); }

  /// Checks duplicates, dimensions, per-part sortedness and saturated_len.
  void validate() const;
};

inline constexpr double default_rank_tol = 1e-9;

/// Rows: points, columns: terms; entry x_i^alpha_j with 0^0 = 1.
template <typename Scalar>
Matrix<Scalar> evaluation_matrix(const Eigen::MatrixXd& points, const std::vector<Monomial>& terms) {
  Matrix<Scalar> X(points.rows(), static_cast<Eigen::Index>(terms.size()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const Eigen::VectorXd x = points.row(i).transpose();
    for (size_t j = 0; j < terms.size(); ++j) X(i, static_cast<Eigen::Index>(j)) = evaluate<Scalar>(terms[j], x);
  }
  return X;
}

/// The design (X) matrix in the design's own coordinates.
template <typename Scalar> Matrix<Scalar> design_matrix(const Design& design, const Basis& basis) {
  if (design.dimension() != basis.dimension()) throw DimensionMismatch("design_matrix: design and basis dimensions differ");
  return evaluation_matrix<Scalar>(design.points(), basis.terms);
}

/// Basis-vector f(x) at a single point.
template <typename Scalar>
Vector<Scalar> basis_vector(const std::vector<Monomial>& terms, const Eigen::Ref<const Eigen::VectorXd>& x) {
  Vector<Scalar> f(static_cast<Eigen::Index>(terms.size()));
  for (size_t j = 0; j < terms.size(); ++j) f[static_cast<Eigen::Index>(j)] = evaluate<Scalar>(terms[j], x);
  return f;
}

namespace detail {

/// Design points mapped onto [-1,1]^d; rank decisions are made there.
Eigen::MatrixXd rank_coordinates(const Design& design);

/// Candidate monomials for order-scanned selection, ascending; for
/// degree-compatible orders, all monomials up to `max_degree`.
std::vector<Monomial> scan_candidates(int d, const TermOrder& order, int n, int max_degree);

template <typename Scalar> Eigen::Index numerical_rank(const Matrix<Scalar>& A, double rank_tol) {
  if (A.cols() == 0 || A.rows() == 0) return 0;
  Eigen::ColPivHouseholderQR<Matrix<Scalar>> qr(A);
  qr.setThreshold(Scalar(rank_tol));
  return qr.rank();
}

/// Greedy rank inclusion over `candidates` in the given order; stops once
/// `target` terms are accepted.
template <typename Scalar>
std::vector<Monomial> rank_inclusion(const Eigen::MatrixXd& points, const std::vector<Monomial>& candidates, int target,
                                     double rank_tol) {
  std::vector<Monomial> accepted;
  Matrix<Scalar> cols(points.rows(), 0);
  for (const auto& m : candidates) {
    if (static_cast<int>(accepted.size()) == target) break;
    Matrix<Scalar> trial(points.rows(), cols.cols() + 1);
    trial.leftCols(cols.cols()) = cols;
    trial.col(cols.cols()) = evaluation_matrix<Scalar>(points, {m});
    if (numerical_rank<Scalar>(trial, rank_tol) > cols.cols()) {
      cols = std::move(trial);
      accepted.push_back(m);
    }
  }
  return accepted;
}

} // namespace detail

/// Good saturated basis: scan monomials in ascending term order, accepting a
/// term iff its column raises the numerical rank of the design matrix.
template <typename Scalar = double>
Basis good_saturated_basis(const Design& design, const TermOrder& order, double rank_tol = default_rank_tol) {
  const int n = design.size();
  const int d = design.dimension();
  if (order.dimension() != d) throw DimensionMismatch("good_saturated_basis: order dimension differs from design");
  const Eigen::MatrixXd pts = detail::rank_coordinates(design);
  std::vector<Monomial> accepted;
  // Distinct points always admit a saturated basis within degree n-1; grow the
  // candidate pool degree by degree so small designs stay cheap.
  for (int max_degree = 0; max_degree <= n; ++max_degree) {
    if (!order.degree_compatible()) max_degree = n;
    const auto candidates = detail::scan_candidates(d, order, n, max_degree);
    accepted = detail::rank_inclusion<Scalar>(pts, candidates, n, rank_tol);
    if (static_cast<int>(accepted.size()) == n) break;
  }
  if (static_cast<int>(accepted.size()) != n)
    throw NumericalError("rank inclusion found only " + std::to_string(accepted.size()) + " of " + std::to_string(n) +
                         " terms; rank_tol too large for this design");
  Basis basis{std::move(accepted), n, order};
  return basis;
}

/// Append the next monomials in ascending order (skipping present ones) until
/// the basis has `total` terms.
Basis extend_basis(const Basis& basis, int total);

/// Basis with all monomials of total degree <= `degree`, saturated part taken
/// from `saturated`.
Basis complete_to_degree(const Basis& saturated, int degree);

/// True iff X over the whole basis has rank n and order-scanned rank inclusion
/// restricted to the basis terms selects n of them.
template <typename Scalar = double>
bool is_good_supersaturated(const Design& design, const Basis& basis, double rank_tol = default_rank_tol) {
  const int n = design.size();
  if (basis.size() < n) return false;
  if (basis.dimension() != design.dimension()) throw DimensionMismatch("is_good_supersaturated: dimension mismatch");
  const Eigen::MatrixXd pts = detail::rank_coordinates(design);
  const Matrix<Scalar> X = evaluation_matrix<Scalar>(pts, basis.terms);
  if (detail::numerical_rank<Scalar>(X.transpose(), rank_tol) != n) return false;
  std::vector<Monomial> scan = basis.terms;
  std::sort(scan.begin(), scan.end(),
            [&](const Monomial& a, const Monomial& b) { return compare(a, b, basis.order) < 0; });
  return static_cast<int>(detail::rank_inclusion<Scalar>(pts, scan, n, rank_tol).size()) == n;
}

} // namespace supersat
