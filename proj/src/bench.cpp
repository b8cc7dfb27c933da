#include "supersat/bench.hpp"

#include "supersat/basis.hpp"
#include "supersat/oracles.hpp"
#include "supersat/smoothness.hpp"
#include "supersat/solver.hpp"

#include <cmath>

namespace supersat {

double peaks(double x, double y) {
  return 3.0 * (1.0 - x) * (1.0 - x) * std::exp(-x * x - (y + 1.0) * (y + 1.0)) -
         10.0 * (x / 5.0 - x * x * x - std::pow(y, 5)) * std::exp(-x * x - y * y) -
         std::exp(-(x + 1.0) * (x + 1.0) - y * y) / 3.0;
}

double peaks_response(double x1, double x2) { return peaks(4.0 * x1 - 2.0, 4.0 * x2 - 2.0); }

BenchReport bench_sinc(int n, int q_max) {
  using S = HighPrecision;
  if (n < 3) throw InputError("bench-sinc: n must be at least 3");
  if (q_max < 0) throw InputError("bench-sinc: q_max must be nonnegative");
  BenchReport r;
  r.name = "sinc";
  r.n = n;
  const Design design = uniform_design_1d(n, 0.0, 1.0);
  Vector<S> y(n);
  std::vector<S> knots, values;
  for (int i = 0; i < n; ++i) {
    y[i] = sinc_response(S(design.points()(i, 0)));
    knots.push_back(S(design.points()(i, 0)));
    values.push_back(y[i]);
  }
  const S spline = spline_psi2(fit_cubic_spline(knots, values));
  r.spline_psi = to_double(spline);

  const Basis saturated = good_saturated_basis<S>(design, TermOrder::deglex(1));
  for (int q = 0; q <= q_max; ++q) {
    const Basis basis = extend_basis(saturated, n + q);
    const auto form = build_form<S>(basis, design.box(), QuadraticCriterion::hessian());
    const auto model = fit_block_kkt(design, basis, form, y);
    for (const auto& w : model.diagnostics.warnings) r.warnings.push_back("q=" + std::to_string(q) + ": " + w);
    r.psi_star_by_q.emplace_back(q, to_double(model.psi_star));
    r.ratio_curve.emplace_back(q, to_double(S(sqrt(model.psi_star / spline))));
    r.basis_size = basis.size();
  }
  return r;
}

std::vector<BenchReport> bench_sinc_sweep(int q_max, const std::vector<int>& ns) {
  std::vector<BenchReport> out;
  for (int n : ns) out.push_back(bench_sinc(n, q_max));
  return out;
}

namespace {

RmseRow score(const std::string& name, const std::vector<double>& pred, const std::vector<double>& truth, double range) {
  double ss = 0.0;
  for (size_t i = 0; i < truth.size(); ++i) ss += (pred[i] - truth[i]) * (pred[i] - truth[i]);
  const double rmse = std::sqrt(ss / static_cast<double>(truth.size()));
  return {name, rmse, 100.0 * rmse / range};
}

} // namespace

BenchReport bench_peaks(const PeaksOptions& opt) {
  using S = HighPrecision;
  if (opt.n_fit < 3 || opt.n_test < 0 || opt.degree < 0 || opt.sobol_skip < 0)
    throw InputError("bench-peaks: need n_fit >= 3 and nonnegative n_test, degree, skip");
  BenchReport r;
  r.name = "peaks";
  r.n = opt.n_fit;
  const Eigen::MatrixXd all = sobol_points_2d(opt.n_fit + opt.n_test, opt.sobol_skip);
  const Design design(all.topRows(opt.n_fit), Box::unit(2));
  const Eigen::MatrixXd test = all.bottomRows(opt.n_test);

  Vector<S> y(opt.n_fit);
  Vector<double> yd(opt.n_fit);
  for (int i = 0; i < opt.n_fit; ++i) {
    yd[i] = peaks_response(all(i, 0), all(i, 1));
    y[i] = S(yd[i]);
  }

  const Basis basis = complete_to_degree(good_saturated_basis<S>(design, TermOrder::deglex(2), opt.rank_tol), opt.degree);
  if (basis.size() < opt.n_fit) throw InputError("bench-peaks: degree too low for a supersaturated basis");
  r.basis_size = basis.size();
  const auto form = build_form<S>(basis, design.box(), QuadraticCriterion::hessian());
  const auto model = fit_block_kkt(design, basis, form, y);
  r.warnings = model.diagnostics.warnings;
  r.psi_star_by_q.emplace_back(basis.size() - opt.n_fit, to_double(model.psi_star));
  const auto tps = fit_thin_plate<double>(design.points(), yd);

  if (opt.n_test == 0) return r;
  std::vector<double> truth, poly, spline;
  for (int i = 0; i < opt.n_test; ++i) {
    const Eigen::VectorXd x = test.row(i).transpose();
    truth.push_back(peaks_response(x[0], x[1]));
    poly.push_back(to_double(predict(model, x)));
    spline.push_back(tps_predict(tps, x));
  }
  const auto [lo, hi] = std::minmax_element(truth.begin(), truth.end());
  r.response_range = *hi - *lo;
  r.rmse_table.push_back(score("supersaturated", poly, truth, r.response_range));
  r.rmse_table.push_back(score("thin-plate", spline, truth, r.response_range));
  if (opt.external_predictions) {
    if (static_cast<int>(opt.external_predictions->size()) != opt.n_test)
      throw DimensionMismatch("external predictions: expected " + std::to_string(opt.n_test) + " values, got " +
                              std::to_string(opt.external_predictions->size()));
    r.rmse_table.push_back(score(opt.external_name, *opt.external_predictions, truth, r.response_range));
  }
  return r;
}

} // namespace supersat
