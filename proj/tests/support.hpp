#pragma once

#include "supersat/basis.hpp"
#include "supersat/smoothness.hpp"

#include <Eigen/Eigenvalues>

#include <random>
#include <set>

namespace testing {

using namespace supersat;

/// Gauss-Legendre nodes and weights on [lo, hi] by Golub-Welsch; exact for
/// polynomials of degree < 2m.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int m, double lo, double hi) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) J(k, k - 1) = J(k - 1, k) = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Eigen::VectorXd x = es.eigenvalues();
  Eigen::VectorXd w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
  x = lo + (hi - lo) * (x.array() + 1.0) / 2.0;
  w *= (hi - lo) / 2.0;
  return {x, w};
}

/// Tensor Gauss-Legendre integral of f over a box (d = 1 or 2).
template <typename F> double box_quadrature(const Box& box, int m, F&& f) {
  const auto [x0, w0] = gauss_legendre(m, box[0].lo, box[0].hi);
  double acc = 0.0;
  if (box.dimension() == 1) {
    for (int i = 0; i < m; ++i) acc += w0[i] * f(Eigen::VectorXd::Constant(1, x0[i]));
    return acc;
  }
  const auto [x1, w1] = gauss_legendre(m, box[1].lo, box[1].hi);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) acc += w0[i] * w1[j] * f(Eigen::Vector2d(x0[i], x1[j]));
  return acc;
}

/// Second partial d^2/dxi dxj of x^alpha, by repeated exponent lowering.
inline double monomial_second(const Monomial& m, int i, int j, const Eigen::VectorXd& x) {
  std::vector<int> e = m.exponents;
  double c = e[static_cast<size_t>(i)];
  if (e[static_cast<size_t>(i)] == 0) return 0.0;
  --e[static_cast<size_t>(i)];
  c *= e[static_cast<size_t>(j)];
  if (e[static_cast<size_t>(j)] == 0) return 0.0;
  --e[static_cast<size_t>(j)];
  double v = c;
  for (size_t k = 0; k < e.size(); ++k) v *= std::pow(x[static_cast<Eigen::Index>(k)], e[k]);
  return v;
}

inline double monomial_value(const Monomial& m, const Eigen::VectorXd& x) {
  double v = 1.0;
  for (size_t k = 0; k < m.exponents.size(); ++k) v *= std::pow(x[static_cast<Eigen::Index>(k)], m.exponents[k]);
  return v;
}

struct Instance {
  Design design;
  Basis basis;
  Eigen::VectorXd y;
};

/// Random design in the unit box with a good saturated deglex basis extended
/// by q terms and random observations. Designs that rank inclusion rejects at
/// the default tolerance are redrawn.
inline Instance random_instance(std::mt19937_64& rng, int d, int n, int q) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    Eigen::MatrixXd pts(n, d);
    std::set<std::vector<double>> seen;
    for (int i = 0; i < n;) {
      std::vector<double> p;
      for (int k = 0; k < d; ++k) p.push_back(0.05 + 0.9 * u(rng));
      if (!seen.insert(p).second) continue;
      for (int k = 0; k < d; ++k) pts(i, k) = p[static_cast<size_t>(k)];
      ++i;
    }
    Design design(pts, Box::unit(d));
    Basis saturated;
    try {
      saturated = good_saturated_basis<double>(design, TermOrder::deglex(d));
    } catch (const NumericalError&) {
      continue;
    }
    Basis b = extend_basis(saturated, n + q);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = g(rng);
    return {design, b, y};
  }
}

inline double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  // Vectors that vanish up to rounding compare on an absolute 1e-12 floor.
  const double scale = std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), 1e-12});
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

template <typename S> Eigen::MatrixXd to_dmat(const Matrix<S>& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = to_double(S(m(i, j)));
  return out;
}

} // namespace testing
