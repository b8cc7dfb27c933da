#pragma once

#include "supersat/basis.hpp"
#include "supersat/design.hpp"
#include "supersat/monomial.hpp"
#include "supersat/scalar.hpp"

#include <string>
#include <vector>

namespace supersat {

struct PolynomialTerm {
  Monomial monomial;
  double coefficient = 0.0;
};
using Polynomial = std::vector<PolynomialTerm>;

double evaluate(const Polynomial& p, const Eigen::Ref<const Eigen::VectorXd>& x);

enum class CriterionKind {
  Hessian,         // integral of ||H(y)||^2
  Gradient,        // integral of ||grad y||^2
  Value,           // integral of (y - t)^2, t = 0 unless a target is given
  WeightedHessian, // integral of w ||H(y)||^2
};

/// How mixed partials enter the Hessian norm: over ordered pairs (i,j), which
/// is trace(H^2) and counts each mixed partial twice, or over i <= j.
enum class MixedPartials { Ordered, Unordered };

struct QuadraticCriterion {
  CriterionKind kind = CriterionKind::Hessian;
  /// Weight w for WeightedHessian, target t for Value; ignored otherwise.
  Polynomial weight_or_target;
  MixedPartials mixed = MixedPartials::Ordered;

  static QuadraticCriterion hessian() { return {}; }
  static QuadraticCriterion gradient() { return {CriterionKind::Gradient, {}, MixedPartials::Ordered}; }
  static QuadraticCriterion value(Polynomial target = {}) { return {CriterionKind::Value, std::move(target), MixedPartials::Ordered}; }
  static QuadraticCriterion weighted_hessian(Polynomial w) { return {CriterionKind::WeightedHessian, std::move(w), MixedPartials::Ordered}; }

  bool has_target() const { return kind == CriterionKind::Value && !weight_or_target.empty(); }
};

std::string to_string(CriterionKind kind);
CriterionKind criterion_kind_from_string(const std::string& s);

/// Closed form of the integral of x^alpha over the box.
double monomial_integral(const Monomial& m, const Box& box);
Rational monomial_integral_exact(const Monomial& m, const Box& box);

/// K, linear term and constant of a quadratic functional, in exact rationals.
/// The functional is theta^T K theta - 2 b^T theta + c.
struct ExactForm {
  int size = 0;
  std::vector<Rational> K; // row-major size x size
  std::vector<Rational> linear;
  Rational offset;
  std::vector<int> zero_idx;
};

ExactForm build_exact_form(const std::vector<Monomial>& terms, const Box& box, const QuadraticCriterion& criterion);

/// Quadratic smoothness form over a basis. Rows/columns in `zero_idx` vanish
/// identically (terms the criterion cannot see); `K_tilde` is the principal
/// block on `active_idx`.
template <typename Scalar> struct SmoothnessForm {
  Matrix<Scalar> K;
  std::vector<int> zero_idx;
  std::vector<int> active_idx;
  Matrix<Scalar> K_tilde;
  /// Target-deviation terms; zero unless the criterion has a target.
  Vector<Scalar> linear;
  Scalar offset = Scalar(0);
  CriterionKind kind = CriterionKind::Hessian;

  int size() const { return static_cast<int>(K.rows()); }
  bool has_linear_part() const { return linear.size() > 0 && (linear.array() != Scalar(0)).any(); }
};

template <typename Scalar> Matrix<Scalar> principal_submatrix(const Matrix<Scalar>& M, const std::vector<int>& idx) {
  const auto m = static_cast<Eigen::Index>(idx.size());
  Matrix<Scalar> out(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) out(i, j) = M(idx[i], idx[j]);
  return out;
}

template <typename Scalar>
SmoothnessForm<Scalar> form_from_matrix(Matrix<Scalar> K, std::vector<int> zero_idx, CriterionKind kind) {
  SmoothnessForm<Scalar> form;
  const int N = static_cast<int>(K.rows());
  form.K = std::move(K);
  form.zero_idx = std::move(zero_idx);
  for (int i = 0; i < N; ++i)
    if (std::find(form.zero_idx.begin(), form.zero_idx.end(), i) == form.zero_idx.end()) form.active_idx.push_back(i);
  form.K_tilde = principal_submatrix(form.K, form.active_idx);
  form.linear = Vector<Scalar>::Zero(N);
  form.kind = kind;
  return form;
}

template <typename Scalar>
SmoothnessForm<Scalar> build_form(const Basis& basis, const Box& box, const QuadraticCriterion& criterion) {
  if (basis.dimension() != box.dimension()) throw DimensionMismatch("build_form: basis and box dimensions differ");
  const ExactForm exact = build_exact_form(basis.terms, box, criterion);
  const int N = exact.size;
  Matrix<Scalar> K(N, N);
  for (int p = 0; p < N; ++p)
    for (int q = 0; q < N; ++q) K(p, q) = from_rational<Scalar>(exact.K[static_cast<size_t>(p * N + q)]);
  auto form = form_from_matrix<Scalar>(std::move(K), exact.zero_idx, criterion.kind);
  for (int p = 0; p < N; ++p) form.linear[p] = from_rational<Scalar>(exact.linear[static_cast<size_t>(p)]);
  form.offset = from_rational<Scalar>(exact.offset);
  return form;
}

/// theta^T K theta (minus the target cross term and plus its constant when present).
template <typename Scalar> Scalar psi_value(const Vector<Scalar>& theta, const SmoothnessForm<Scalar>& form) {
  if (theta.size() != form.size()) throw DimensionMismatch("psi_value: coefficient length differs from the form");
  Scalar v = theta.dot(form.K * theta);
  if (form.has_linear_part() || form.offset != Scalar(0)) v += form.offset - Scalar(2) * form.linear.dot(theta);
  return v;
}

/// Analytic d^2 x^alpha / dx_i dx_j at x.
double second_partial(const Monomial& m, int i, int j, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Worst deviation between analytic second partials of every basis term and
/// central finite differences with step h.
double finite_difference_check(const std::vector<Monomial>& terms, const Eigen::Ref<const Eigen::VectorXd>& x, double h);

/// Samples the polynomial on a grid of `per_side`^d points of the box and
/// reports whether every sample is nonnegative. Not a certificate.
bool sampled_nonnegative(const Polynomial& p, const Box& box, int per_side = 21);

} // namespace supersat
