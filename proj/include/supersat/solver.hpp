#pragma once

#include "supersat/basis.hpp"
#include "supersat/design.hpp"
#include "supersat/errors.hpp"
#include "supersat/scalar.hpp"
#include "supersat/smoothness.hpp"

#include <optional>
#include <type_traits>
#include <string>
#include <vector>

namespace supersat {

enum class FitMethod { BlockKKT, ClosedForm, NonsingularK, DummyDesign };

std::string to_string(FitMethod m);
FitMethod fit_method_from_string(const std::string& s);

/// Condition numbers of the factorizations behind a fit. Zero means "not
/// computed on this path".
struct FitDiagnostics {
  double x_condition = 0.0;      // column-normalized X
  double x0_condition = 0.0;     // column-normalized X0
  double ktilde_condition = 0.0; // Jacobi-scaled K~
  double system_condition = 0.0; // equilibrated system actually factorized
  std::vector<std::string> warnings;
};

template <typename Scalar> struct FittedModel {
  Basis basis;
  Vector<Scalar> theta;
  Vector<Scalar> lambda;
  Scalar psi_star = Scalar(0);
  FitMethod method = FitMethod::BlockKKT;
  Design design;
  Vector<Scalar> y;
  FitDiagnostics diagnostics;

  /// Part of theta on the terms the criterion sees (f1 block).
  Vector<Scalar> active_theta(const SmoothnessForm<Scalar>& form) const {
    Vector<Scalar> t(static_cast<Eigen::Index>(form.active_idx.size()));
    for (size_t i = 0; i < form.active_idx.size(); ++i) t[static_cast<Eigen::Index>(i)] = theta[form.active_idx[i]];
    return t;
  }
};

struct FitOptions {
  /// Relative singular value at or below which X, X0 or K~ count as
  /// singular. Zero selects 100 * eps(Scalar) * dimension.
  double singular_tol = 0.0;
  /// Condition number above which a warning is attached to the fit.
  double warn_condition = 1e12;
};

namespace detail {

template <typename Scalar> double default_singular_tol(Eigen::Index dim) {
  return 100.0 * to_double(machine_epsilon<Scalar>()) * static_cast<double>(std::max<Eigen::Index>(dim, 1));
}

template <typename Scalar> Matrix<Scalar> select_columns(const Matrix<Scalar>& M, const std::vector<int>& idx) {
  Matrix<Scalar> out(M.rows(), static_cast<Eigen::Index>(idx.size()));
  for (size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = M.col(idx[j]);
  return out;
}

/// Singular values of A after scaling every column to unit norm, as
/// (smallest / largest, largest / smallest).
template <typename Scalar> std::pair<double, double> scaled_singular_ratio(const Matrix<Scalar>& A) {
  if (A.size() == 0) return {1.0, 1.0};
  Matrix<Scalar> S = A;
  for (Eigen::Index j = 0; j < S.cols(); ++j) {
    const Scalar nrm = S.col(j).norm();
    if (nrm > Scalar(0)) S.col(j) /= nrm;
  }
  // Singular values of a tall matrix are cheaper; they coincide with A's.
  Vector<Scalar> sv;
  if (S.rows() >= S.cols())
    sv = Eigen::JacobiSVD<Matrix<Scalar>>(S).singularValues();
  else
    sv = Eigen::JacobiSVD<Matrix<Scalar>>(Matrix<Scalar>(S.transpose())).singularValues();
  const Scalar smax = sv.maxCoeff();
  const Scalar smin = sv.minCoeff();
  if (smax == Scalar(0)) return {0.0, std::numeric_limits<double>::infinity()};
  const double rel = to_double(Scalar(smin / smax));
  return {rel, rel > 0 ? 1.0 / rel : std::numeric_limits<double>::infinity()};
}

/// Eigenvalue ratio of a symmetric PSD matrix after symmetric Jacobi scaling.
template <typename Scalar> std::pair<double, double> scaled_eigen_ratio(const Matrix<Scalar>& K) {
  using std::sqrt;
  if (K.size() == 0) return {1.0, 1.0};
  Matrix<Scalar> S = K;
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    const Scalar di = K(i, i) > Scalar(0) ? Scalar(1) / sqrt(K(i, i)) : Scalar(1);
    S.row(i) *= di;
    S.col(i) *= di;
  }
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(S, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const Scalar emax = ev.cwiseAbs().maxCoeff();
  if (emax == Scalar(0)) return {0.0, std::numeric_limits<double>::infinity()};
  const double rel = to_double(Scalar(ev.minCoeff() / emax));
  return {rel, rel > 0 ? 1.0 / rel : std::numeric_limits<double>::infinity()};
}

inline void warn_if_ill_conditioned(FitDiagnostics& diag, const char* what, double cond, double limit) {
  if (cond > limit) diag.warnings.push_back(std::string(what) + " condition number " + std::to_string(cond) + " exceeds " + std::to_string(limit));
}

/// Checks the three conditions under which the block system is nonsingular
/// and records condition numbers.
template <typename Scalar>
void check_block_conditions(const Matrix<Scalar>& X, const SmoothnessForm<Scalar>& form, const FitOptions& opt,
                            FitDiagnostics& diag) {
  const auto n = X.rows();
  const Matrix<Scalar> X0 = select_columns(X, form.zero_idx);
  auto tol = [&](Eigen::Index dim) { return opt.singular_tol > 0 ? opt.singular_tol : default_singular_tol<Scalar>(dim); };

  if (X.cols() < n) throw SingularSystem(1, 0.0, "condition (i): basis has fewer terms than design points");
  const auto [x_rel, x_cond] = scaled_singular_ratio(X);
  diag.x_condition = x_cond;
  if (x_rel <= tol(X.cols()))
    throw SingularSystem(1, x_rel, "condition (i) fails: X is not of full row rank (relative singular value " + std::to_string(x_rel) + ")");

  if (X0.cols() > 0) {
    if (X0.cols() > n) throw SingularSystem(2, 0.0, "condition (ii) fails: more structurally-zero terms than design points");
    const auto [x0_rel, x0_cond] = scaled_singular_ratio(X0);
    diag.x0_condition = x0_cond;
    if (x0_rel <= tol(X0.cols()))
      throw SingularSystem(2, x0_rel, "condition (ii) fails: X0 is not of full column rank (relative singular value " + std::to_string(x0_rel) + ")");
  }

  if (form.K_tilde.size() > 0) {
    const auto [k_rel, k_cond] = scaled_eigen_ratio(form.K_tilde);
    diag.ktilde_condition = k_cond;
    if (k_rel <= tol(form.K_tilde.rows()))
      throw SingularSystem(3, k_rel, "condition (iii) fails: K~ is singular (relative eigenvalue " + std::to_string(k_rel) + ")");
  }
  warn_if_ill_conditioned(diag, "X", diag.x_condition, opt.warn_condition);
  warn_if_ill_conditioned(diag, "X0", diag.x0_condition, opt.warn_condition);
  warn_if_ill_conditioned(diag, "K~", diag.ktilde_condition, opt.warn_condition);
}

/// The square block system
///
///   [ X0  X1    0   ] [theta0]   [ y  ]
///   [ 0   K~  -X1^T ] [theta1] = [ b1 ]
///   [ 0   0    X0^T ] [lambda]   [-b0 ]
///
/// equilibrated to unit max-abs rows and columns and factorized once by LU
/// with partial pivoting.
template <typename Scalar> class BlockSystem {
public:
  BlockSystem(const Matrix<Scalar>& X, const SmoothnessForm<Scalar>& form)
      : zero_(form.zero_idx), active_(form.active_idx), n_(X.rows()), N_(X.cols()) {
    const auto n0 = static_cast<Eigen::Index>(zero_.size());
    const auto n1 = static_cast<Eigen::Index>(active_.size());
    const Matrix<Scalar> X0 = select_columns(X, zero_);
    const Matrix<Scalar> X1 = select_columns(X, active_);
    const Eigen::Index m = N_ + n_;
    Matrix<Scalar> A = Matrix<Scalar>::Zero(m, m);
    A.block(0, 0, n_, n0) = X0;
    A.block(0, n0, n_, n1) = X1;
    A.block(n_, n0, n1, n1) = form.K_tilde;
    A.block(n_, N_, n1, n_) = -X1.transpose();
    A.block(n_ + n1, N_, n0, n_) = X0.transpose();

    row_scale_ = Vector<Scalar>::Ones(m);
    col_scale_ = Vector<Scalar>::Ones(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const Scalar r = A.row(i).cwiseAbs().maxCoeff();
      if (r > Scalar(0)) row_scale_[i] = Scalar(1) / r;
    }
    A = row_scale_.asDiagonal() * A;
    for (Eigen::Index j = 0; j < m; ++j) {
      const Scalar c = A.col(j).cwiseAbs().maxCoeff();
      if (c > Scalar(0)) col_scale_[j] = Scalar(1) / c;
    }
    A = A * col_scale_.asDiagonal();
    lu_.compute(A);
    const double rc = to_double(lu_.rcond());
    condition_ = rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    if (!(rc > default_singular_tol<Scalar>(m)))
      throw SingularSystem(0, rc, "block system is numerically singular (reciprocal condition " + std::to_string(rc) + ")");
  }

  /// Solves for each column of `y` (n x k); returns theta (N x k, basis order)
  /// and lambda (n x k).
  std::pair<Matrix<Scalar>, Matrix<Scalar>> solve(const Matrix<Scalar>& y, const Vector<Scalar>& linear) const {
    const Eigen::Index m = N_ + n_;
    const auto n0 = static_cast<Eigen::Index>(zero_.size());
    const auto n1 = static_cast<Eigen::Index>(active_.size());
    Matrix<Scalar> rhs = Matrix<Scalar>::Zero(m, y.cols());
    rhs.topRows(n_) = y;
    if (linear.size() == N_) {
      for (Eigen::Index c = 0; c < y.cols(); ++c) {
        for (Eigen::Index i = 0; i < n1; ++i) rhs(n_ + i, c) = linear[active_[i]];
        for (Eigen::Index i = 0; i < n0; ++i) rhs(n_ + n1 + i, c) = -linear[zero_[i]];
      }
    }
    const Matrix<Scalar> u = col_scale_.asDiagonal() * lu_.solve(row_scale_.asDiagonal() * rhs);
    Matrix<Scalar> theta(N_, y.cols());
    for (Eigen::Index i = 0; i < n0; ++i) theta.row(zero_[i]) = u.row(i);
    for (Eigen::Index i = 0; i < n1; ++i) theta.row(active_[i]) = u.row(n0 + i);
    return {theta, u.bottomRows(n_)};
  }

  double condition() const { return condition_; }

private:
  std::vector<int> zero_, active_;
  Eigen::Index n_, N_;
  Vector<Scalar> row_scale_, col_scale_;
  Eigen::PartialPivLU<Matrix<Scalar>> lu_;
  double condition_ = 0.0;
};

template <typename Scalar>
void check_inputs(const Design& design, const Basis& basis, const SmoothnessForm<Scalar>& form, const Vector<Scalar>& y) {
  if (design.dimension() != basis.dimension()) throw DimensionMismatch("design and basis dimensions differ");
  if (form.size() != basis.size()) throw DimensionMismatch("smoothness form size differs from the basis size");
  if (y.size() != design.size()) throw DimensionMismatch("expected " + std::to_string(design.size()) + " observations, got " + std::to_string(y.size()));
}

template <typename Scalar>
FittedModel<Scalar> make_model(const Design& design, const Basis& basis, const Vector<Scalar>& y, FitMethod method) {
  FittedModel<Scalar> model;
  model.basis = basis;
  model.design = design;
  model.y = y;
  model.method = method;
  return model;
}

template <typename Scalar> Scalar symmetric_psi(const Vector<Scalar>& theta, const SmoothnessForm<Scalar>& form) {
  const Scalar v = psi_value(theta, form);
  return v < Scalar(0) && !form.has_linear_part() ? Scalar(0) : v;
}

} // namespace detail

/// Minimum-smoothness interpolant via the square block system. Default path.
template <typename Scalar>
FittedModel<Scalar> fit_block_kkt(const Design& design, const Basis& basis, const SmoothnessForm<Scalar>& form,
                                  const std::type_identity_t<Vector<Scalar>>& y, const FitOptions& opt = {}) {
  detail::check_inputs(design, basis, form, y);
  auto model = detail::make_model(design, basis, y, FitMethod::BlockKKT);
  const Matrix<Scalar> X = design_matrix<Scalar>(design, basis);

  // One point: the constant interpolant has zero smoothness and no
  // competitor can do better.
  if (design.size() == 1 && !form.has_linear_part()) {
    const auto it = std::find(basis.terms.begin(), basis.terms.end(), Monomial::constant(basis.dimension()));
    if (it != basis.terms.end() && basis.size() > 1) {
      model.theta = Vector<Scalar>::Zero(basis.size());
      model.theta[it - basis.terms.begin()] = y[0];
      model.lambda = Vector<Scalar>::Zero(1);
      model.psi_star = detail::symmetric_psi(model.theta, form);
      return model;
    }
  }

  detail::check_block_conditions(X, form, opt, model.diagnostics);
  const detail::BlockSystem<Scalar> sys(X, form);
  model.diagnostics.system_condition = sys.condition();
  detail::warn_if_ill_conditioned(model.diagnostics, "block system", sys.condition(), opt.warn_condition);
  auto [theta, lambda] = sys.solve(y, form.linear);
  model.theta = theta.col(0);
  model.lambda = lambda.col(0);
  model.psi_star = detail::symmetric_psi(model.theta, form);
  return model;
}

/// Closed forms for theta0 then theta1 from the reduced equations. Used as a
/// cross-check on fit_block_kkt.
template <typename Scalar>
FittedModel<Scalar> fit_closed_form(const Design& design, const Basis& basis, const SmoothnessForm<Scalar>& form,
                                    const std::type_identity_t<Vector<Scalar>>& y, const FitOptions& opt = {}) {
  detail::check_inputs(design, basis, form, y);
  if (form.has_linear_part()) throw InputError("fit_closed_form does not support target-deviation criteria");
  auto model = detail::make_model(design, basis, y, FitMethod::ClosedForm);
  const Matrix<Scalar> X = design_matrix<Scalar>(design, basis);
  detail::check_block_conditions(X, form, opt, model.diagnostics);

  const Matrix<Scalar> X0 = detail::select_columns(X, form.zero_idx);
  const Matrix<Scalar> X1 = detail::select_columns(X, form.active_idx);
  const Eigen::PartialPivLU<Matrix<Scalar>> kt(form.K_tilde);

  // M = X1 K~^-1 X1^T + X0 X0^T
  const Matrix<Scalar> M = X1 * kt.solve(Matrix<Scalar>(X1.transpose())) + X0 * X0.transpose();
  const Eigen::PartialPivLU<Matrix<Scalar>> mlu(M);
  Vector<Scalar> theta0(X0.cols());
  Vector<Scalar> ystar = y;
  if (X0.cols() > 0) {
    const Matrix<Scalar> MinvX0 = mlu.solve(X0);
    const Matrix<Scalar> G = X0.transpose() * MinvX0;
    theta0 = G.partialPivLu().solve(Vector<Scalar>(MinvX0.transpose() * y));
    ystar = y - X0 * theta0;
  }

  // theta1 = (X1^T X1 + K~ (I - X1^T (X X^T)^-1 X1) K~)^-1 X1^T y*
  const Matrix<Scalar> XXt = X * X.transpose();
  const auto n1 = X1.cols();
  const Matrix<Scalar> P1 = X1.transpose() * XXt.partialPivLu().solve(X1);
  const Matrix<Scalar> lhs = X1.transpose() * X1 + form.K_tilde * (Matrix<Scalar>::Identity(n1, n1) - P1) * form.K_tilde;
  const Vector<Scalar> theta1 = lhs.partialPivLu().solve(Vector<Scalar>(X1.transpose() * ystar));

  model.theta = Vector<Scalar>::Zero(basis.size());
  for (size_t i = 0; i < form.zero_idx.size(); ++i) model.theta[form.zero_idx[i]] = theta0[static_cast<Eigen::Index>(i)];
  for (size_t i = 0; i < form.active_idx.size(); ++i) model.theta[form.active_idx[i]] = theta1[static_cast<Eigen::Index>(i)];
  // lambda = (X1 K~^-1 X1^T + X0 X0^T)^-1 X1 theta1
  model.lambda = mlu.solve(Vector<Scalar>(X1 * theta1));
  model.psi_star = detail::symmetric_psi(model.theta, form);
  return model;
}

/// theta = (X^T X + K (I - P) K)^-1 X^T y with P the projector onto the row
/// space of X. Requires nonsingular K.
template <typename Scalar>
FittedModel<Scalar> fit_nonsingular_k(const Design& design, const Basis& basis, const SmoothnessForm<Scalar>& form,
                                      const std::type_identity_t<Vector<Scalar>>& y, const FitOptions& opt = {}) {
  detail::check_inputs(design, basis, form, y);
  if (form.has_linear_part()) throw InputError("fit_nonsingular_k does not support target-deviation criteria");
  auto model = detail::make_model(design, basis, y, FitMethod::NonsingularK);
  const auto [k_rel, k_cond] = detail::scaled_eigen_ratio(form.K);
  model.diagnostics.ktilde_condition = k_cond;
  if (!form.zero_idx.empty() || !(k_cond <= condition_limit<Scalar>()))
    throw KSingular("K is singular or too ill-conditioned (condition " + std::to_string(k_cond) + ")");

  const Matrix<Scalar> X = design_matrix<Scalar>(design, basis);
  const auto [x_rel, x_cond] = detail::scaled_singular_ratio(X);
  model.diagnostics.x_condition = x_cond;
  const double tol = opt.singular_tol > 0 ? opt.singular_tol : detail::default_singular_tol<Scalar>(X.cols());
  if (X.cols() < X.rows() || x_rel <= tol) throw SingularSystem(1, x_rel, "condition (i) fails: X is not of full row rank");
  detail::warn_if_ill_conditioned(model.diagnostics, "X", x_cond, opt.warn_condition);
  detail::warn_if_ill_conditioned(model.diagnostics, "K", k_cond, opt.warn_condition);

  const auto N = X.cols();
  const Eigen::PartialPivLU<Matrix<Scalar>> xxt(Matrix<Scalar>(X * X.transpose()));
  const Matrix<Scalar> P = X.transpose() * xxt.solve(X);
  const Matrix<Scalar> lhs = X.transpose() * X + form.K * (Matrix<Scalar>::Identity(N, N) - P) * form.K;
  const Eigen::PartialPivLU<Matrix<Scalar>> lu(lhs);
  const double rc = to_double(lu.rcond());
  model.diagnostics.system_condition = rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  detail::warn_if_ill_conditioned(model.diagnostics, "regularized normal matrix", model.diagnostics.system_condition,
                                  opt.warn_condition);
  model.theta = lu.solve(Vector<Scalar>(X.transpose() * y));
  // K theta = X^T lambda
  model.lambda = xxt.solve(Vector<Scalar>(X * (form.K * model.theta)));
  model.psi_star = detail::symmetric_psi(model.theta, form);
  return model;
}

template <typename Scalar> struct DummyDesignFit {
  FittedModel<Scalar> model;
  Vector<Scalar> z_hat;
  Matrix<Scalar> Q;
  Matrix<Scalar> A;
};

/// Dummy-design method: extend the design by dummy points so the basis is
/// saturated for the union, then minimize the smoothness over the dummy
/// observations z. A = X_N^-T K X_N^-1 is partitioned by observation blocks
/// (design rows first).
template <typename Scalar>
DummyDesignFit<Scalar> fit_dummy_design(const Design& design, const Eigen::MatrixXd& dummy_points, const Basis& basis,
                                        const SmoothnessForm<Scalar>& form, const std::type_identity_t<Vector<Scalar>>& y,
                                        const FitOptions& opt = {}) {
  detail::check_inputs(design, basis, form, y);
  if (form.has_linear_part()) throw InputError("fit_dummy_design does not support target-deviation criteria");
  const auto n = static_cast<Eigen::Index>(design.size());
  const auto q = dummy_points.rows();
  if (dummy_points.rows() > 0 && dummy_points.cols() != design.dimension())
    throw DimensionMismatch("dummy points have the wrong dimension");
  if (n + q != basis.size())
    throw DimensionMismatch("design plus dummy points must have exactly |basis| = " + std::to_string(basis.size()) +
                            " points, got " + std::to_string(n + q));
  Design full;
  try {
    full = design.extended(dummy_points);
  } catch (const InputError& e) {
    throw BadDummyDesign(std::string("dummy design is not a set of distinct points: ") + e.what());
  }

  DummyDesignFit<Scalar> out;
  out.model = detail::make_model(design, basis, y, FitMethod::DummyDesign);
  const Matrix<Scalar> XN = design_matrix<Scalar>(full, basis);
  const auto [rel, cond] = detail::scaled_singular_ratio(XN);
  out.model.diagnostics.x_condition = cond;
  const double tol = opt.singular_tol > 0 ? opt.singular_tol : detail::default_singular_tol<Scalar>(XN.cols());
  if (rel <= tol) throw BadDummyDesign("X_N is singular: the basis is not saturated-good for the extended design");
  detail::warn_if_ill_conditioned(out.model.diagnostics, "X_N", cond, opt.warn_condition);

  const Eigen::PartialPivLU<Matrix<Scalar>> xlu(XN);
  const Matrix<Scalar> XNinv = xlu.inverse();
  Matrix<Scalar> A = XNinv.transpose() * form.K * XNinv;
  A = (A + A.transpose()) / Scalar(2);

  const Matrix<Scalar> A11 = A.topLeftCorner(n, n);
  const Matrix<Scalar> A12 = A.topRightCorner(n, q);
  const Matrix<Scalar> A21 = A.bottomLeftCorner(q, n);
  const Matrix<Scalar> A22 = A.bottomRightCorner(q, q);
  Matrix<Scalar> S(q, n); // A22^-1 A21
  if (q > 0) {
    const auto [a_rel, a_cond] = detail::scaled_eigen_ratio(A22);
    out.model.diagnostics.system_condition = a_cond;
    if (a_rel <= detail::default_singular_tol<Scalar>(q))
      throw SingularSystem(3, a_rel, "A22 is singular: the smoothness form does not determine the dummy observations");
    detail::warn_if_ill_conditioned(out.model.diagnostics, "A22", a_cond, opt.warn_condition);
    S = A22.partialPivLu().solve(A21);
  }
  out.z_hat = -S * y;
  out.Q = A11 - A12 * S;
  out.Q = (out.Q + out.Q.transpose()) / Scalar(2);
  out.A = A;

  Vector<Scalar> obs(n + q);
  obs << y, out.z_hat;
  out.model.theta = xlu.solve(obs);
  out.model.lambda = out.Q * y;
  out.model.psi_star = y.dot(out.Q * y);
  return out;
}

/// Greedily picks dummy points from `candidates` (in order) until the design
/// matrix over `basis` becomes square and nonsingular.
template <typename Scalar>
Eigen::MatrixXd complete_dummy_design(const Design& design, const Basis& basis, const Eigen::MatrixXd& candidates,
                                      double rank_tol = 0.0) {
  const auto N = static_cast<Eigen::Index>(basis.size());
  const auto n = static_cast<Eigen::Index>(design.size());
  if (rank_tol <= 0) rank_tol = std::is_same_v<Scalar, double> ? 1e-10 : 1e-40;
  auto normalized = [&](const Eigen::MatrixXd& pts) {
    Matrix<Scalar> R = evaluation_matrix<Scalar>(pts, basis.terms);
    for (Eigen::Index i = 0; i < R.rows(); ++i) R.row(i) /= R.row(i).norm();
    return R;
  };
  Matrix<Scalar> rows = normalized(design.points());
  Eigen::MatrixXd chosen(0, design.dimension());
  for (Eigen::Index c = 0; c < candidates.rows() && rows.rows() < N; ++c) {
    const Eigen::RowVectorXd p = candidates.row(c);
    bool duplicate = false;
    for (Eigen::Index i = 0; i < design.size() && !duplicate; ++i) duplicate = design.points().row(i) == p;
    for (Eigen::Index i = 0; i < chosen.rows() && !duplicate; ++i) duplicate = chosen.row(i) == p;
    if (duplicate) continue;
    Matrix<Scalar> trial(rows.rows() + 1, N);
    trial.topRows(rows.rows()) = rows;
    trial.bottomRows(1) = normalized(Eigen::MatrixXd(p));
    if (detail::numerical_rank<Scalar>(Matrix<Scalar>(trial.transpose()), rank_tol) == trial.rows()) {
      rows = std::move(trial);
      chosen.conservativeResize(chosen.rows() + 1, Eigen::NoChange);
      chosen.row(chosen.rows() - 1) = p;
    }
  }
  if (rows.rows() != N)
    throw BadDummyDesign("could not complete the design to " + std::to_string(N) + " points from " +
                         std::to_string(candidates.rows()) + " candidates (have " + std::to_string(n + chosen.rows()) + ")");
  return chosen;
}

/// Deterministic candidate points in the box: a Halton sequence with prime
/// bases 2, 3, 5, ...
Eigen::MatrixXd halton_candidates(const Box& box, int count);

template <typename Scalar>
Eigen::MatrixXd default_dummy_points(const Design& design, const Basis& basis) {
  const int need = basis.size() - design.size();
  if (need <= 0) return Eigen::MatrixXd(0, design.dimension());
  return complete_dummy_design<Scalar>(design, basis, halton_candidates(design.box(), 64 * basis.size() + 64));
}

/// The three algebraically equivalent smoother matrices when K is nonsingular.
template <typename Scalar> struct SmootherForms {
  Matrix<Scalar> B1; // (X^T X + K (I - P) K)^-1 X^T
  Matrix<Scalar> B2; // K^-1 X^T Q,  Q = (X K^-1 X^T)^-1
  Matrix<Scalar> B3; // X_N^-1 [I; -A22^-1 A21]
  Matrix<Scalar> Q_direct;
  double diff_12 = 0.0;
  double diff_23 = 0.0;
  double diff_13 = 0.0;
};

template <typename Scalar> struct SmootherMatrix {
  Matrix<Scalar> B; // |basis| x n, theta = B y
  Matrix<Scalar> Q; // n x n, Psi2* = y^T Q y
  std::optional<SmootherForms<Scalar>> forms;
  FitDiagnostics diagnostics;
};

/// B from the block system solved against every unit observation vector; Q
/// is the multiplier block (Psi2* = y^T lambda). When K is nonsingular the
/// three closed forms of B are also computed and compared.
template <typename Scalar>
SmootherMatrix<Scalar> smoother_matrix(const Design& design, const Basis& basis, const SmoothnessForm<Scalar>& form,
                                       const FitOptions& opt = {},
                                       const std::optional<Eigen::MatrixXd>& dummy_points = std::nullopt) {
  if (form.size() != basis.size()) throw DimensionMismatch("smoothness form size differs from the basis size");
  SmootherMatrix<Scalar> sm;
  const Matrix<Scalar> X = design_matrix<Scalar>(design, basis);
  const auto n = X.rows();
  detail::check_block_conditions(X, form, opt, sm.diagnostics);
  const detail::BlockSystem<Scalar> sys(X, form);
  sm.diagnostics.system_condition = sys.condition();
  auto [B, L] = sys.solve(Matrix<Scalar>::Identity(n, n), Vector<Scalar>());
  sm.B = std::move(B);
  sm.Q = (L + L.transpose()) / Scalar(2);

  const auto [k_rel, k_cond] = detail::scaled_eigen_ratio(form.K);
  if (form.zero_idx.empty() && k_cond <= condition_limit<Scalar>()) {
    SmootherForms<Scalar> f;
    const auto N = X.cols();
    const Eigen::PartialPivLU<Matrix<Scalar>> klu(form.K);
    const Matrix<Scalar> P = X.transpose() * Matrix<Scalar>(X * X.transpose()).partialPivLu().solve(X);
    f.B1 = (X.transpose() * X + form.K * (Matrix<Scalar>::Identity(N, N) - P) * form.K).partialPivLu().solve(Matrix<Scalar>(X.transpose()));
    const Matrix<Scalar> KinvXt = klu.solve(Matrix<Scalar>(X.transpose()));
    f.Q_direct = Matrix<Scalar>(X * KinvXt).partialPivLu().inverse();
    f.B2 = KinvXt * f.Q_direct;
    const Eigen::MatrixXd dummy = dummy_points ? *dummy_points : default_dummy_points<Scalar>(design, basis);
    const auto dd = fit_dummy_design<Scalar>(design, dummy, basis, form, Vector<Scalar>::Zero(n), opt);
    const Matrix<Scalar> XN = design_matrix<Scalar>(design.extended(dummy), basis);
    const auto q = dummy.rows();
    Matrix<Scalar> sel(n + q, n);
    sel.topRows(n) = Matrix<Scalar>::Identity(n, n);
    if (q > 0) sel.bottomRows(q) = -dd.A.bottomRightCorner(q, q).partialPivLu().solve(Matrix<Scalar>(dd.A.bottomLeftCorner(q, n)));
    f.B3 = XN.partialPivLu().solve(sel);
    auto maxabs = [](const Matrix<Scalar>& M) { return to_double(Scalar(M.cwiseAbs().maxCoeff())); };
    f.diff_12 = maxabs(f.B1 - f.B2);
    f.diff_23 = maxabs(f.B2 - f.B3);
    f.diff_13 = maxabs(f.B1 - f.B3);
    sm.forms = std::move(f);
  }
  return sm;
}

/// Cardinal kernels k(x) = B^T f(x): kernel i is 1 at knot i and 0 at the
/// other knots.
template <typename Scalar> struct KernelSet {
  std::vector<Monomial> terms;
  Matrix<Scalar> coefficients; // column i = kernel i over the basis
  Eigen::MatrixXd knots;
  Matrix<Scalar> Q;

  int size() const { return static_cast<int>(coefficients.cols()); }

  Vector<Scalar> operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return coefficients.transpose() * basis_vector<Scalar>(terms, x);
  }
};

template <typename Scalar>
KernelSet<Scalar> kernels(const SmootherMatrix<Scalar>& sm, const Basis& basis, const Design& design) {
  if (sm.B.rows() != basis.size() || sm.B.cols() != design.size())
    throw DimensionMismatch("smoother matrix does not match the basis and design");
  return {basis.terms, sm.B, design.points(), sm.Q};
}

/// theta^T f(x). Points outside the design box are extrapolated silently;
/// callers flag them with Box::contains.
template <typename Scalar> Scalar predict(const FittedModel<Scalar>& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.basis.dimension()) throw DimensionMismatch("predict: query point has the wrong dimension");
  return model.theta.dot(basis_vector<Scalar>(model.basis.terms, x));
}

template <typename Scalar> struct KnotFit {
  Vector<Scalar> phi;
  Scalar psi = Scalar(0); // phi^T Q phi
};

/// Least-squares knot values phi from observations at arbitrary points
/// (rows of `obs_points`, repeats allowed).
template <typename Scalar>
KnotFit<Scalar> fit_knot_model(const KernelSet<Scalar>& ks, const Eigen::MatrixXd& obs_points, const std::type_identity_t<Vector<Scalar>>& y_obs) {
  const auto m = obs_points.rows();
  if (y_obs.size() != m) throw DimensionMismatch("fit_knot_model: one observation per point expected");
  if (m < ks.size()) throw RankDeficientObservations("fewer observations than knots");
  Matrix<Scalar> E(m, ks.size());
  for (Eigen::Index i = 0; i < m; ++i) E.row(i) = ks(obs_points.row(i).transpose()).transpose();
  Eigen::ColPivHouseholderQR<Matrix<Scalar>> qr(E);
  qr.setThreshold(Scalar(detail::default_singular_tol<Scalar>(E.cols())));
  if (qr.rank() < ks.size())
    throw RankDeficientObservations("kernel evaluations at the observation points are rank deficient (rank " +
                                    std::to_string(qr.rank()) + " < " + std::to_string(ks.size()) + ")");
  KnotFit<Scalar> out;
  out.phi = qr.solve(y_obs);
  out.psi = out.phi.dot(ks.Q * out.phi);
  return out;
}

} // namespace supersat
