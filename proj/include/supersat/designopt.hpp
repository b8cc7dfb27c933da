#pragma once

#include "supersat/basis.hpp"
#include "supersat/errors.hpp"
#include "supersat/scalar.hpp"
#include "supersat/smoothness.hpp"
#include "supersat/solver.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace supersat {

enum class DesignCriterion { LargestEigQ, ProductNonzeroEigQ, DOptKernels };

std::string to_string(DesignCriterion c);
DesignCriterion design_criterion_from_string(const std::string& s);

/// One-parameter family of four-point designs {-1, -a, a, 1} on [-1, 1].
struct DesignFamily1D {
  Interval interval{-1.0, 1.0};

  bool admissible(double a) const { return a > 0.0 && a < 1.0; }

  Eigen::MatrixXd points(double a) const {
    const double c = 0.5 * (interval.lo + interval.hi);
    const double r = 0.5 * (interval.hi - interval.lo);
    Eigen::MatrixXd p(4, 1);
    p << c - r, c - r * a, c + r * a, c + r;
    return p;
  }

  Design design(double a) const { return Design(points(a), Box({interval})); }
};

struct CriterionReport {
  double parameter = 0.0;
  double objective = 0.0;
  DesignCriterion criterion = DesignCriterion::LargestEigQ;
  std::vector<double> eigenvalues;
  /// (parameter, objective) pairs from the coarse bracketing scan.
  std::vector<std::pair<double, double>> scan;
  /// D-optimal only: max over [-1,1] of the standardized variance and its
  /// values at the support points.
  double kw_max_variance = 0.0;
  std::vector<double> kw_support_variance;
};

/// Basis {1, x, x^2, x^3, x^4} with the Hessian form on [-1, 1].
template <typename Scalar> struct QuarticInstance {
  Basis basis;
  SmoothnessForm<Scalar> form;
};

template <typename Scalar> QuarticInstance<Scalar> quartic_instance(const DesignFamily1D& family = {}) {
  Basis basis{enumerate_monomials(1, TermOrder::deglex(1), 5), 4, TermOrder::deglex(1)};
  auto form = build_form<Scalar>(basis, Box({family.interval}), QuadraticCriterion::hessian());
  return {std::move(basis), std::move(form)};
}

/// Q with Psi2* = y^T Q y for the family design at parameter a.
template <typename Scalar>
Matrix<Scalar> q_for_design(double a, const Basis& basis, const SmoothnessForm<Scalar>& form, const DesignFamily1D& family = {}) {
  if (!family.admissible(a)) throw InputError("family parameter must lie in (0, 1)");
  return smoother_matrix<Scalar>(family.design(a), basis, form).Q;
}

template <typename Scalar> std::vector<double> sorted_eigenvalues(const Matrix<Scalar>& Q) {
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(Q, Eigen::EigenvaluesOnly);
  std::vector<double> ev;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) ev.push_back(to_double(Scalar(es.eigenvalues()[i])));
  return ev;
}

/// Product of the eigenvalues above 1e-9 times the largest (pseudo-determinant).
double product_nonzero(const std::vector<double>& ev);

namespace detail {

inline constexpr int scan_points = 99;

/// Coarse scan of f over (0,1), then golden-section refinement of the single
/// interior minimum to an interval no wider than tol.
std::pair<double, std::vector<std::pair<double, double>>> minimize_unimodal(const std::function<double(double)>& f, double tol);

} // namespace detail

/// Evaluates a Q-based criterion at one parameter value; +inf where the
/// design degenerates or Q cannot be formed.
template <typename Scalar>
CriterionReport evaluate_q_criterion(DesignCriterion criterion, double a, const Basis& basis, const SmoothnessForm<Scalar>& form,
                                     const DesignFamily1D& family = {}) {
  CriterionReport r;
  r.criterion = criterion;
  r.parameter = a;
  r.objective = std::numeric_limits<double>::infinity();
  if (!family.admissible(a)) return r;
  try {
    r.eigenvalues = sorted_eigenvalues<Scalar>(q_for_design<Scalar>(a, basis, form, family));
  } catch (const NumericalError&) {
    return r;
  }
  switch (criterion) {
  case DesignCriterion::LargestEigQ: r.objective = r.eigenvalues.back(); break;
  case DesignCriterion::ProductNonzeroEigQ: r.objective = product_nonzero(r.eigenvalues); break;
  case DesignCriterion::DOptKernels: throw InputError("DOptKernels is not a Q-based criterion");
  }
  return r;
}

/// Minimizes a Q-based criterion over the family parameter.
template <typename Scalar>
CriterionReport optimize_family(DesignCriterion criterion, const DesignFamily1D& family, const Basis& basis,
                                const SmoothnessForm<Scalar>& form, double tol = 1e-6) {
  auto f = [&](double a) { return evaluate_q_criterion<Scalar>(criterion, a, basis, form, family).objective; };
  auto [best, scan] = detail::minimize_unimodal(f, tol);
  CriterionReport r = evaluate_q_criterion<Scalar>(criterion, best, basis, form, family);
  r.scan = std::move(scan);
  return r;
}

/// Information matrix (1/m) sum_x k(x) k(x)^T over the design points.
template <typename Scalar> Matrix<Scalar> kernel_information(const KernelSet<Scalar>& ks, const Eigen::MatrixXd& points) {
  Matrix<Scalar> M = Matrix<Scalar>::Zero(ks.size(), ks.size());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const Vector<Scalar> k = ks(points.row(i).transpose());
    M += k * k.transpose();
  }
  return M / Scalar(static_cast<double>(points.rows()));
}

template <typename Scalar> double log_det_information(const KernelSet<Scalar>& ks, const Eigen::MatrixXd& points) {
  using std::log;
  const Matrix<Scalar> M = kernel_information(ks, points);
  Eigen::LLT<Matrix<Scalar>> llt(M);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  Scalar acc(0);
  for (Eigen::Index i = 0; i < M.rows(); ++i) acc += Scalar(2) * log(Scalar(llt.matrixL()(i, i)));
  return to_double(acc);
}

/// Standardized variance d(x) = k(x)^T M^-1 k(x) for the design's information matrix M.
template <typename Scalar>
double standardized_variance(const KernelSet<Scalar>& ks, const Eigen::LDLT<Matrix<Scalar>>& info, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Vector<Scalar> k = ks(x);
  return to_double(Scalar(k.dot(info.solve(k))));
}

/// D-optimal four-point design {-b, ...} for the kernel model, with a
/// Kiefer-Wolfowitz equivalence check on a grid of `kw_grid` points.
template <typename Scalar>
CriterionReport d_optimal_kernel_design(const KernelSet<Scalar>& ks, const DesignFamily1D& family, double tol = 1e-6,
                                        int kw_grid = 10001) {
  auto neg_logdet = [&](double b) {
    if (!family.admissible(b)) return std::numeric_limits<double>::infinity();
    return -log_det_information(ks, family.points(b));
  };
  auto [best, scan] = detail::minimize_unimodal(neg_logdet, tol);
  CriterionReport r;
  r.criterion = DesignCriterion::DOptKernels;
  r.parameter = best;
  r.objective = log_det_information(ks, family.points(best));
  r.scan = std::move(scan);
  for (auto& s : r.scan) s.second = -s.second;

  const Eigen::MatrixXd support = family.points(best);
  const Matrix<Scalar> M = kernel_information(ks, support);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(M, Eigen::EigenvaluesOnly);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) r.eigenvalues.push_back(to_double(Scalar(es.eigenvalues()[i])));
  const Eigen::LDLT<Matrix<Scalar>> info(M);
  for (int g = 0; g < kw_grid; ++g) {
    Eigen::VectorXd x(1);
    x[0] = family.interval.lo + (family.interval.hi - family.interval.lo) * g / static_cast<double>(kw_grid - 1);
    r.kw_max_variance = std::max(r.kw_max_variance, standardized_variance(ks, info, x));
  }
  for (Eigen::Index i = 0; i < support.rows(); ++i)
    r.kw_support_variance.push_back(standardized_variance(ks, info, support.row(i).transpose()));
  return r;
}

/// Coordinate search over all four points of a design: true when no single
/// move of size `step` increases log det of the information matrix by more
/// than `slack`.
template <typename Scalar>
bool locally_d_optimal(const KernelSet<Scalar>& ks, const Eigen::MatrixXd& points, const Interval& interval, double step = 1e-4,
                       double slack = 1e-10) {
  const double base = log_det_information(ks, points);
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    for (double s : {-step, step}) {
      Eigen::MatrixXd moved = points;
      moved(i, 0) = std::clamp(moved(i, 0) + s, interval.lo, interval.hi);
      if (log_det_information(ks, moved) > base + slack) return false;
    }
  return true;
}

/// (1 - lambda) * psi0 + lambda * psi2 for two reports at the same parameter.
/// Objectives are divided by the given scales before combining.
double combined_criterion(double lambda, const CriterionReport& psi0, const CriterionReport& psi2, double scale0 = 1.0,
                          double scale2 = 1.0);

} // namespace supersat
