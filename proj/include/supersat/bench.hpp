#pragma once

#include "supersat/design.hpp"
#include "supersat/scalar.hpp"

#include <boost/math/constants/constants.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace supersat {

/// sin(u)/u with u = 15 pi x / 2 - 5 pi.
template <typename Scalar> Scalar sinc_response(const Scalar& x) {
  using std::sin;
  const Scalar pi = boost::math::constants::pi<Scalar>();
  const Scalar u = Scalar(15) * pi / Scalar(2) * x - Scalar(5) * pi;
  return u == Scalar(0) ? Scalar(1) : Scalar(sin(u) / u);
}

/// The standard peaks surface.
double peaks(double x, double y);

/// Peaks on [0,1]^2: p(4 x1 - 2, 4 x2 - 2).
double peaks_response(double x1, double x2);

struct RmseRow {
  std::string model;
  double rmse = 0.0;
  double percent_of_range = 0.0;
};

struct BenchReport {
  std::string name;
  int n = 0;
  std::vector<std::pair<int, double>> psi_star_by_q;
  double spline_psi = 0.0;
  std::vector<std::pair<int, double>> ratio_curve; // sqrt(psi*(q) / psi_spline)
  std::vector<RmseRow> rmse_table;
  double response_range = 0.0;
  int basis_size = 0;
  std::vector<std::string> warnings;
};

/// n equispaced points on [0,1]; extensions q = 0..q_max of the saturated
/// basis, minimized Hessian smoothness, natural cubic spline reference.
BenchReport bench_sinc(int n, int q_max);

std::vector<BenchReport> bench_sinc_sweep(int q_max, const std::vector<int>& ns = {5, 10, 15, 20});

struct PeaksOptions {
  int n_fit = 24;
  int n_test = 500;
  int degree = 12;
  int sobol_skip = 1;
  double rank_tol = 1e-9;
  /// Predictions at the test points from another model, scored alongside.
  std::optional<std::vector<double>> external_predictions;
  std::string external_name = "external";
};

/// Fits the complete degree-`degree` model and a thin-plate spline to the
/// first n_fit Sobol points and scores both on the next n_test.
BenchReport bench_peaks(const PeaksOptions& opt = {});

} // namespace supersat
