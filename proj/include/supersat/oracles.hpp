#pragma once

#include "supersat/errors.hpp"
#include "supersat/scalar.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace supersat {

/// Natural cubic spline in second-derivative form; s'' is piecewise linear
/// and vanishes at both end knots.
template <typename Scalar> struct CubicSpline {
  std::vector<Scalar> knots;
  std::vector<Scalar> values;
  std::vector<Scalar> second_derivs;

  size_t interval(const Scalar& x) const {
    size_t i = 0;
    while (i + 2 < knots.size() && x > knots[i + 1]) ++i;
    return i;
  }

  Scalar operator()(const Scalar& x) const {
    const size_t i = interval(x);
    const Scalar h = knots[i + 1] - knots[i];
    const Scalar a = (knots[i + 1] - x) / h;
    const Scalar b = (x - knots[i]) / h;
    return a * values[i] + b * values[i + 1] +
           ((a * a * a - a) * second_derivs[i] + (b * b * b - b) * second_derivs[i + 1]) * h * h / Scalar(6);
  }

  Scalar second_derivative(const Scalar& x) const {
    const size_t i = interval(x);
    const Scalar h = knots[i + 1] - knots[i];
    const Scalar b = (x - knots[i]) / h;
    return (Scalar(1) - b) * second_derivs[i] + b * second_derivs[i + 1];
  }
};

template <typename Scalar>
CubicSpline<Scalar> fit_cubic_spline(const std::vector<Scalar>& points, const std::vector<Scalar>& values) {
  const size_t n = points.size();
  if (values.size() != n) throw DimensionMismatch("fit_cubic_spline: one value per knot expected");
  if (n < 3) throw InputError("fit_cubic_spline: at least three knots are required");
  for (size_t i = 1; i < n; ++i)
    if (!(points[i] > points[i - 1]))
      throw UnsortedOrDuplicateKnots("knots must be strictly ascending (knot " + std::to_string(i + 1) + ")");

  // Tridiagonal system for the interior second derivatives:
  // h_{i-1} m_{i-1} + 2 (h_{i-1} + h_i) m_i + h_i m_{i+1} = 6 (d_i - d_{i-1}).
  const size_t m = n - 2;
  std::vector<Scalar> sub(m), diag(m), sup(m), rhs(m);
  for (size_t k = 0; k < m; ++k) {
    const size_t i = k + 1;
    const Scalar hl = points[i] - points[i - 1];
    const Scalar hr = points[i + 1] - points[i];
    sub[k] = hl;
    diag[k] = Scalar(2) * (hl + hr);
    sup[k] = hr;
    rhs[k] = Scalar(6) * ((values[i + 1] - values[i]) / hr - (values[i] - values[i - 1]) / hl);
  }
  // Thomas algorithm; the matrix is strictly diagonally dominant.
  for (size_t k = 1; k < m; ++k) {
    const Scalar w = sub[k] / diag[k - 1];
    diag[k] -= w * sup[k - 1];
    rhs[k] -= w * rhs[k - 1];
  }
  std::vector<Scalar> interior(m);
  for (size_t k = m; k-- > 0;) interior[k] = (rhs[k] - (k + 1 < m ? sup[k] * interior[k + 1] : Scalar(0))) / diag[k];

  CubicSpline<Scalar> s{points, values, std::vector<Scalar>(n, Scalar(0))};
  for (size_t k = 0; k < m; ++k) s.second_derivs[k + 1] = interior[k];
  return s;
}

/// Integral of s''^2 over the knot span (s'' is zero beyond it).
template <typename Scalar> Scalar spline_psi2(const CubicSpline<Scalar>& s) {
  Scalar acc(0);
  for (size_t i = 0; i + 1 < s.knots.size(); ++i) {
    const Scalar h = s.knots[i + 1] - s.knots[i];
    const Scalar& a = s.second_derivs[i];
    const Scalar& b = s.second_derivs[i + 1];
    acc += h / Scalar(3) * (a * a + a * b + b * b);
  }
  return acc;
}

/// Thin-plate spline in the plane: sum_i c_i phi(|x - x_i|) + a0 + a1 x1 + a2 x2
/// with phi(r) = r^2 log r, phi(0) = 0.
template <typename Scalar> struct ThinPlateSpline {
  Eigen::MatrixXd centers; // n x 2
  Vector<Scalar> rbf_coeffs;
  Vector<Scalar> affine_coeffs; // constant, x1, x2
};

template <typename Scalar> Scalar tps_kernel_sq(const Scalar& r2) {
  using std::log;
  return r2 > Scalar(0) ? Scalar(0.5) * r2 * log(r2) : Scalar(0);
}

template <typename Scalar>
Scalar tps_predict(const ThinPlateSpline<Scalar>& tps, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != 2) throw DimensionMismatch("tps_predict: expected a 2-D point");
  Scalar v = tps.affine_coeffs[0] + tps.affine_coeffs[1] * Scalar(x[0]) + tps.affine_coeffs[2] * Scalar(x[1]);
  for (Eigen::Index i = 0; i < tps.centers.rows(); ++i) {
    const Scalar d0 = Scalar(x[0]) - Scalar(tps.centers(i, 0));
    const Scalar d1 = Scalar(x[1]) - Scalar(tps.centers(i, 1));
    v += tps.rbf_coeffs[i] * tps_kernel_sq<Scalar>(d0 * d0 + d1 * d1);
  }
  return v;
}

template <typename Scalar>
ThinPlateSpline<Scalar> fit_thin_plate(const Eigen::MatrixXd& points, const Vector<Scalar>& values, double ridge = 0.0) {
  const auto n = points.rows();
  if (points.cols() != 2) throw DimensionMismatch("fit_thin_plate: centers must be 2-D");
  if (values.size() != n) throw DimensionMismatch("fit_thin_plate: one value per center expected");
  if (n < 3) throw InputError("fit_thin_plate: at least three centers are required");

  Matrix<Scalar> P(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) P.row(i) << Scalar(1), Scalar(points(i, 0)), Scalar(points(i, 1));
  Eigen::ColPivHouseholderQR<Matrix<Scalar>> pqr(P);
  pqr.setThreshold(Scalar(1e-12));
  if (pqr.rank() < 3) throw CollinearCenters("thin-plate centers are collinear");

  Matrix<Scalar> A = Matrix<Scalar>::Zero(n + 3, n + 3);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const Scalar d0 = Scalar(points(i, 0)) - Scalar(points(j, 0));
      const Scalar d1 = Scalar(points(i, 1)) - Scalar(points(j, 1));
      A(i, j) = tps_kernel_sq<Scalar>(d0 * d0 + d1 * d1);
    }
  A.topLeftCorner(n, n).diagonal().array() += Scalar(ridge);
  A.topRightCorner(n, 3) = P;
  A.bottomLeftCorner(3, n) = P.transpose();
  Vector<Scalar> rhs = Vector<Scalar>::Zero(n + 3);
  rhs.head(n) = values;

  Eigen::FullPivLU<Matrix<Scalar>> lu(A);
  if (!lu.isInvertible()) throw SingularSystem(0, 0.0, "thin-plate system is singular");
  const Vector<Scalar> sol = lu.solve(rhs);
  return {points, sol.head(n), sol.tail(3)};
}

} // namespace supersat
