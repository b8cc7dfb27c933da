#include "supersat/commands.hpp"

#include "supersat/bench.hpp"
#include "supersat/designopt.hpp"
#include "supersat/io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace supersat {

namespace {

using io::fmt6;
using io::json;

struct BasisArgs {
  std::string box;
  std::string order = "deglex";
  std::string priority;
  double rank_tol = default_rank_tol;
  int extra_terms = 0;
  std::string precision = "high";
};

struct FitArgs {
  BasisArgs basis;
  std::string design;
  std::string obs;
  std::string criterion = "hessian";
  std::string mixed = "ordered";
  std::string weight;
  std::string target;
  std::string method = "block";
  std::string form_cache;
  std::string output;
};

struct PredictArgs {
  std::string model;
  std::string query;
  std::string output;
};

struct SincArgs {
  int n = 6;
  int q_max = 5;
  bool sweep = false;
  std::string json_out;
  std::string csv_out;
};

struct PeaksArgs {
  PeaksOptions opt;
  std::string external;
  std::string json_out;
};

struct DesignOptArgs {
  std::string criterion = "largest-eig";
  double tol = 1e-6;
  double knots = 0.0;
  std::string csv_out;
};

struct BasisCmdArgs {
  BasisArgs basis;
  std::string design;
};

/// "2,1" -> {1, 0}: 1-based variable indices, greatest first.
TermOrder parse_order(const BasisArgs& a, int d) {
  std::vector<int> priority;
  if (a.priority.empty()) {
    for (int k = 0; k < d; ++k) priority.push_back(k);
  } else {
    std::stringstream ss(a.priority);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        size_t used = 0;
        const int v = std::stoi(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        priority.push_back(v - 1);
      } catch (const std::logic_error&) {
        throw InputError("--priority: '" + cell + "' is not a variable index");
      }
    }
    if (static_cast<int>(priority.size()) != d)
      throw DimensionMismatch("--priority: expected " + std::to_string(d) + " variable indices");
  }
  return TermOrder::make(order_kind_from_string(a.order), std::move(priority));
}

Design load_design(const Eigen::MatrixXd& points, const std::string& box_arg) {
  if (points.rows() == 0) throw InputError("design has no points");
  const int d = static_cast<int>(points.cols());
  return Design(points, box_arg.empty() ? Box::bounding(points) : io::resolve_box(box_arg, d));
}

template <typename S> Basis make_basis(const Design& design, const BasisArgs& a) {
  if (a.extra_terms < 0) throw InputError("--extra-terms must be nonnegative");
  const Basis saturated = good_saturated_basis<S>(design, parse_order(a, design.dimension()), a.rank_tol);
  return extend_basis(saturated, saturated.size() + a.extra_terms);
}

QuadraticCriterion make_criterion(const FitArgs& a, int d) {
  QuadraticCriterion c;
  c.kind = criterion_kind_from_string(a.criterion);
  if (a.mixed == "unordered")
    c.mixed = MixedPartials::Unordered;
  else if (a.mixed != "ordered")
    throw InputError("--mixed-partials must be ordered or unordered");
  if (c.kind == CriterionKind::WeightedHessian) {
    if (a.weight.empty()) throw InputError("--criterion weighted needs --weight FILE");
    c.weight_or_target = io::polynomial_from_json(io::read_json_file(a.weight), d);
  } else if (!a.weight.empty()) {
    throw InputError("--weight is only valid with --criterion weighted");
  }
  if (!a.target.empty()) {
    if (c.kind != CriterionKind::Value) throw InputError("--target is only valid with --criterion value");
    c.weight_or_target = io::polynomial_from_json(io::read_json_file(a.target), d);
  }
  return c;
}

template <typename S>
SmoothnessForm<S> load_form(const Basis& basis, const Box& box, const QuadraticCriterion& c, const std::string& cache,
                            std::ostream& log) {
  if (!cache.empty() && std::filesystem::is_regular_file(cache)) {
    if (auto f = io::form_from_json<S>(io::read_json_file(cache), basis, box, c)) {
      log << "form: loaded from " << cache << '\n';
      return *f;
    }
    log << "form: cache " << cache << " does not match; rebuilding\n";
  }
  auto form = build_form<S>(basis, box, c);
  if (!cache.empty()) io::write_text_file(cache, io::form_to_json(form, basis, box, c).dump(2) + "\n");
  return form;
}

template <typename S> int fit_with(const FitArgs& a, std::ostream& out, std::ostream& err) {
  const auto obs = io::observations(io::read_csv_file(a.obs), a.obs);
  if (!a.design.empty()) {
    const Eigen::MatrixXd pts = io::design_points(io::read_csv_file(a.design), a.design);
    if (pts.rows() != obs.points.rows() || pts.cols() != obs.points.cols() || pts != obs.points)
      throw InputError(a.obs + ": observation points differ from the design in " + a.design);
  }
  const Design design = load_design(obs.points, a.basis.box);
  const Basis basis = make_basis<S>(design, a.basis);
  const QuadraticCriterion crit = make_criterion(a, design.dimension());
  std::ostream& log = a.output.empty() ? err : out;
  const auto form = load_form<S>(basis, design.box(), crit, a.form_cache, log);
  const Vector<S> y = obs.y.cast<S>();

  FittedModel<S> model;
  if (a.method == "block")
    model = fit_block_kkt(design, basis, form, y);
  else if (a.method == "closed")
    model = fit_closed_form(design, basis, form, y);
  else if (a.method == "nonsingular")
    model = fit_nonsingular_k(design, basis, form, y);
  else if (a.method == "dummy")
    model = fit_dummy_design(design, default_dummy_points<S>(design, basis), basis, form, y).model;
  else
    throw InputError("--method must be block, closed, nonsingular or dummy");

  const std::string text = io::model_to_json(model, crit).dump(2) + "\n";
  if (a.output.empty())
    out << text;
  else
    io::write_text_file(a.output, text);

  using std::sqrt;
  log << "basis_size " << basis.size() << " (saturated " << basis.saturated_len << ")\n";
  log << "method " << to_string(model.method) << '\n';
  log << "psi_star " << fmt6(to_double(model.psi_star)) << '\n';
  log << "psi_star_root " << fmt6(to_double(S(sqrt(model.psi_star)))) << '\n';
  const auto& d = model.diagnostics;
  log << "condition x " << fmt6(d.x_condition) << " x0 " << fmt6(d.x0_condition) << " ktilde " << fmt6(d.ktilde_condition)
      << " system " << fmt6(d.system_condition) << '\n';
  for (const auto& w : d.warnings) log << "warning: " << w << '\n';
  return 0;
}

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  if (a.basis.precision == "double") return fit_with<double>(a, out, err);
  if (a.basis.precision == "high") return fit_with<HighPrecision>(a, out, err);
  throw InputError("--precision must be double or high");
}

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  const auto model = io::model_from_json<HighPrecision>(io::read_json_file(a.model));
  const auto table = io::read_csv_file(a.query);
  const Eigen::MatrixXd q = io::design_points(table, a.query);
  const int d = model.basis.dimension();
  if (!table.header.empty() && static_cast<int>(q.cols()) != d)
    throw DimensionMismatch(a.query + ": queries have " + std::to_string(q.cols()) + " coordinates, model expects " +
                            std::to_string(d));
  Eigen::MatrixXd rows(q.rows(), d + 2);
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    const Eigen::VectorXd x = q.row(i).transpose();
    rows.row(i).head(d) = q.row(i);
    rows(i, d) = to_double(predict(model, x));
    rows(i, d + 1) = model.design.box().contains(x) ? 0.0 : 1.0;
  }
  auto header = io::coordinate_header(d);
  header.push_back("y_hat");
  header.push_back("extrapolated");
  if (a.output.empty()) {
    io::write_csv(out, header, rows);
  } else {
    std::ostringstream os;
    io::write_csv(os, header, rows);
    io::write_text_file(a.output, os.str());
  }
  return 0;
}

json to_json(const BenchReport& r) {
  json psi = json::array(), ratio = json::array(), rmse = json::array();
  for (const auto& [q, v] : r.psi_star_by_q) psi.push_back({{"q", q}, {"psi_star", v}, {"psi_star_root", std::sqrt(v)}});
  for (const auto& [q, v] : r.ratio_curve) ratio.push_back({{"q", q}, {"ratio", v}});
  for (const auto& row : r.rmse_table)
    rmse.push_back({{"model", row.model}, {"rmse", row.rmse}, {"percent_of_range", row.percent_of_range}});
  return {{"name", r.name},
          {"n", r.n},
          {"basis_size", r.basis_size},
          {"psi_star_by_q", psi},
          {"spline_psi", r.spline_psi},
          {"spline_psi_root", std::sqrt(r.spline_psi)},
          {"ratio_curve", ratio},
          {"rmse_table", rmse},
          {"response_range", r.response_range},
          {"warnings", r.warnings}};
}

json to_json(const CriterionReport& r) {
  json scan = json::array();
  for (const auto& [p, v] : r.scan) scan.push_back({p, std::isfinite(v) ? json(v) : json(nullptr)});
  json j = {{"criterion", to_string(r.criterion)}, {"parameter", r.parameter}, {"objective", r.objective},
            {"eigenvalues", r.eigenvalues}};
  if (r.criterion == DesignCriterion::DOptKernels) {
    j["kw_max_variance"] = r.kw_max_variance;
    j["kw_support_variance"] = r.kw_support_variance;
  }
  return j;
}

int cmd_bench_sinc(const SincArgs& a, std::ostream& out) {
  const auto reports = a.sweep ? bench_sinc_sweep(a.q_max) : std::vector<BenchReport>{bench_sinc(a.n, a.q_max)};
  std::ostringstream csv;
  csv << "n,q,psi_star,psi_star_root,ratio\n";
  json all = json::array();
  for (const auto& r : reports) {
    out << "sinc n=" << r.n << '\n';
    out << "q psi_star psi_star_root ratio\n";
    for (size_t i = 0; i < r.psi_star_by_q.size(); ++i) {
      const auto [q, v] = r.psi_star_by_q[i];
      const double ratio = r.ratio_curve[i].second;
      out << q << ' ' << fmt6(v) << ' ' << fmt6(std::sqrt(v)) << ' ' << fmt6(ratio) << '\n';
      csv << r.n << ',' << q << ',' << fmt6(v) << ',' << fmt6(std::sqrt(v)) << ',' << fmt6(ratio) << '\n';
    }
    out << "spline " << fmt6(r.spline_psi) << ' ' << fmt6(std::sqrt(r.spline_psi)) << '\n';
    all.push_back(to_json(r));
  }
  if (!a.json_out.empty()) io::write_text_file(a.json_out, (a.sweep ? all : all[0]).dump(2) + "\n");
  if (!a.csv_out.empty()) io::write_text_file(a.csv_out, csv.str());
  return 0;
}

int cmd_bench_peaks(PeaksArgs a, std::ostream& out) {
  if (!a.external.empty()) {
    const auto t = io::read_csv_file(a.external);
    if (t.rows.cols() != 1) throw InputError(a.external + ": expected a single column of predictions");
    a.opt.external_predictions = std::vector<double>(t.rows.data(), t.rows.data() + t.rows.rows());
    a.opt.external_name = t.header.front();
  }
  const auto r = bench_peaks(a.opt);
  out << "peaks n_fit=" << a.opt.n_fit << " n_test=" << a.opt.n_test << " skip=" << a.opt.sobol_skip
      << " basis=" << r.basis_size << " psi_star=" << fmt6(r.psi_star_by_q.front().second) << '\n';
  if (!r.rmse_table.empty()) {
    out << "range " << fmt6(r.response_range) << '\n';
    out << "model rmse percent_of_range\n";
    for (const auto& row : r.rmse_table) out << row.model << ' ' << fmt6(row.rmse) << ' ' << fmt6(row.percent_of_range) << '\n';
  }
  for (const auto& w : r.warnings) out << "warning: " << w << '\n';
  if (!a.json_out.empty()) io::write_text_file(a.json_out, to_json(r).dump(2) + "\n");
  return 0;
}

int cmd_design_opt(const DesignOptArgs& a, std::ostream& out) {
  using S = HighPrecision;
  const DesignFamily1D family;
  const auto inst = quartic_instance<S>(family);
  const DesignCriterion c = design_criterion_from_string(a.criterion);
  CriterionReport r;
  if (c == DesignCriterion::DOptKernels) {
    double knots = a.knots;
    if (knots == 0.0) knots = optimize_family(DesignCriterion::LargestEigQ, family, inst.basis, inst.form, a.tol).parameter;
    if (!family.admissible(knots)) throw InputError("--knots must lie in (0, 1)");
    const Design kd = family.design(knots);
    const auto ks = kernels(smoother_matrix(kd, inst.basis, inst.form), inst.basis, kd);
    r = d_optimal_kernel_design(ks, family, a.tol);
  } else {
    r = optimize_family(c, family, inst.basis, inst.form, a.tol);
  }
  out << to_json(r).dump(2) << '\n';
  if (!a.csv_out.empty()) {
    std::ostringstream csv;
    csv << "parameter,objective\n";
    for (const auto& [p, v] : r.scan) csv << fmt6(p) << ',' << fmt6(v) << '\n';
    io::write_text_file(a.csv_out, csv.str());
  }
  return 0;
}

int cmd_basis(const BasisCmdArgs& a, std::ostream& out) {
  const Design design = load_design(io::design_points(io::read_csv_file(a.design), a.design), a.basis.box);
  Basis b;
  if (a.basis.precision == "double")
    b = make_basis<double>(design, a.basis);
  else if (a.basis.precision == "high")
    b = make_basis<HighPrecision>(design, a.basis);
  else
    throw InputError("--precision must be double or high");
  out << io::to_json(b).dump(2) << '\n';
  return 0;
}

void add_basis_options(CLI::App* cmd, BasisArgs& a) {
  cmd->add_option("--box", a.box, "lo:hi[,lo:hi...] or a JSON box file (default: bounding box)");
  cmd->add_option("--order", a.order, "deglex|degrevlex|lex")->check(CLI::IsMember({"deglex", "degrevlex", "lex"}));
  cmd->add_option("--priority", a.priority, "variables from greatest to least, 1-based, e.g. 2,1");
  cmd->add_option("--rank-tol", a.rank_tol, "relative rank threshold")->check(CLI::PositiveNumber);
  cmd->add_option("--extra-terms", a.extra_terms, "terms beyond saturation")->check(CLI::NonNegativeNumber);
  cmd->add_option("--precision", a.precision, "double|high")->check(CLI::IsMember({"double", "high"}));
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Smooth supersaturated polynomial interpolation"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "fit a minimum-smoothness interpolant");
  fit_cmd->add_option("--obs", fit.obs, "observation CSV x1,...,xd,y")->required();
  fit_cmd->add_option("--design", fit.design, "design CSV x1,...,xd (must match the observation points)");
  add_basis_options(fit_cmd, fit.basis);
  fit_cmd->add_option("--criterion", fit.criterion, "hessian|gradient|value|weighted")
      ->check(CLI::IsMember({"hessian", "gradient", "value", "weighted"}));
  fit_cmd->add_option("--mixed-partials", fit.mixed, "ordered|unordered")->check(CLI::IsMember({"ordered", "unordered"}));
  fit_cmd->add_option("--weight", fit.weight, "weight polynomial JSON for --criterion weighted");
  fit_cmd->add_option("--target", fit.target, "target polynomial JSON for --criterion value");
  fit_cmd->add_option("--method", fit.method, "block|closed|nonsingular|dummy")
      ->check(CLI::IsMember({"block", "closed", "nonsingular", "dummy"}));
  fit_cmd->add_option("--form-cache", fit.form_cache, "smoothness form cache JSON");
  fit_cmd->add_option("-o,--output", fit.output, "model JSON path (default: stdout)");

  PredictArgs pred;
  auto* pred_cmd = app.add_subcommand("predict", "evaluate a fitted model");
  pred_cmd->add_option("--model", pred.model, "model JSON")->required();
  pred_cmd->add_option("--query", pred.query, "query CSV x1,...,xd")->required();
  pred_cmd->add_option("-o,--output", pred.output, "predictions CSV (default: stdout)");

  SincArgs sinc;
  auto* sinc_cmd = app.add_subcommand("bench-sinc", "sinc benchmark against the natural cubic spline");
  sinc_cmd->add_option("--n", sinc.n, "design size")->check(CLI::Range(3, 1000));
  sinc_cmd->add_option("--q-max", sinc.q_max, "largest extension")->check(CLI::NonNegativeNumber);
  sinc_cmd->add_flag("--sweep", sinc.sweep, "run n = 5, 10, 15, 20");
  sinc_cmd->add_option("--json", sinc.json_out, "report JSON path");
  sinc_cmd->add_option("--csv", sinc.csv_out, "ratio curve CSV path");

  PeaksArgs peaks;
  auto* peaks_cmd = app.add_subcommand("bench-peaks", "peaks benchmark against a thin-plate spline");
  peaks_cmd->add_option("--n-fit", peaks.opt.n_fit, "design size")->check(CLI::Range(3, 100000));
  peaks_cmd->add_option("--n-test", peaks.opt.n_test, "holdout size")->check(CLI::NonNegativeNumber);
  peaks_cmd->add_option("--degree", peaks.opt.degree, "total degree of the complete basis")->check(CLI::NonNegativeNumber);
  peaks_cmd->add_option("--sobol-skip", peaks.opt.sobol_skip, "leading Sobol points to drop")->check(CLI::NonNegativeNumber);
  peaks_cmd->add_option("--rank-tol", peaks.opt.rank_tol, "relative rank threshold")->check(CLI::PositiveNumber);
  peaks_cmd->add_option("--external-preds", peaks.external, "single-column CSV of holdout predictions");
  peaks_cmd->add_option("--json", peaks.json_out, "report JSON path");

  DesignOptArgs dopt;
  auto* dopt_cmd = app.add_subcommand("design-opt", "optimal four-point designs for the quartic basis on [-1,1]");
  dopt_cmd->add_option("--criterion", dopt.criterion, "largest-eig|product-eig|d-opt")
      ->check(CLI::IsMember({"largest-eig", "product-eig", "d-opt"}));
  dopt_cmd->add_option("--tol", dopt.tol, "parameter tolerance")->check(CLI::PositiveNumber);
  dopt_cmd->add_option("--knots", dopt.knots, "knot parameter for d-opt (default: largest-eig optimum)");
  dopt_cmd->add_option("--csv", dopt.csv_out, "parameter-vs-objective CSV path");

  BasisCmdArgs bas;
  auto* bas_cmd = app.add_subcommand("basis", "print a good saturated (or extended) basis for a design");
  bas_cmd->add_option("--design", bas.design, "design CSV x1,...,xd")->required();
  add_basis_options(bas_cmd, bas.basis);

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit, out, err);
    if (*pred_cmd) return cmd_predict(pred, out);
    if (*sinc_cmd) return cmd_bench_sinc(sinc, out);
    if (*peaks_cmd) return cmd_bench_peaks(peaks, out);
    if (*dopt_cmd) return cmd_design_opt(dopt, out);
    if (*bas_cmd) return cmd_basis(bas, out);
  } catch (const SingularSystem& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const io::json::exception& e) {
    err << "error: malformed JSON: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

} // namespace supersat
