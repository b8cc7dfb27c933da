#pragma once

#include "supersat/basis.hpp"
#include "supersat/design.hpp"
#include "supersat/errors.hpp"
#include "supersat/scalar.hpp"
#include "supersat/smoothness.hpp"
#include "supersat/solver.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace supersat::io {

using json = nlohmann::json;

/// Numeric CSV with a header row. Parse errors name the 1-based line.
struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd rows;
};

CsvTable read_csv(std::istream& in, const std::string& source);
CsvTable read_csv_file(const std::string& path);

/// Header must be x1,...,xd.
Eigen::MatrixXd design_points(const CsvTable& t, const std::string& source);

struct Observations {
  Eigen::MatrixXd points;
  Eigen::VectorXd y;
};

/// Header must be x1,...,xd,y.
Observations observations(const CsvTable& t, const std::string& source);

/// Writes a header and rows at 17 significant digits.
void write_csv(std::ostream& out, const std::vector<std::string>& header, const Eigen::MatrixXd& rows);

std::vector<std::string> coordinate_header(int d);

/// Six significant digits, as used in all human-readable output.
std::string fmt6(double x);

/// "lo:hi" (every coordinate) or "lo:hi,lo:hi,..." (one per coordinate).
Box parse_box(const std::string& text, int d);
/// {"box": [[lo, hi], ...]} or a bare [[lo, hi], ...].
Box box_from_json(const json& j);
json to_json(const Box& box);
/// Interprets `arg` as a JSON sidecar path when it names an existing file,
/// otherwise as the inline syntax of parse_box.
Box resolve_box(const std::string& arg, int d);

json to_json(const TermOrder& order);
TermOrder order_from_json(const json& j, int d);
json to_json(const Basis& basis);
Basis basis_from_json(const json& j);

json to_json(const Polynomial& p);
Polynomial polynomial_from_json(const json& j, int d);
json to_json(const QuadraticCriterion& c);
QuadraticCriterion criterion_from_json(const json& j, int d);

json to_json(const FitDiagnostics& diag);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

template <typename Scalar> json scalar_array(const Vector<Scalar>& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_double(Scalar(v[i])));
  return a;
}

template <typename Scalar> json text_array(const Vector<Scalar>& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_text(Scalar(v[i])));
  return a;
}

template <typename Scalar> Vector<Scalar> vector_from_json(const json& a) {
  Vector<Scalar> v(static_cast<Eigen::Index>(a.size()));
  for (size_t i = 0; i < a.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = a[i].is_string() ? from_text<Scalar>(a[i].get<std::string>()) : Scalar(a[i].get<double>());
  return v;
}

/// Cache of a smoothness form together with what it was built from.
template <typename Scalar>
json form_to_json(const SmoothnessForm<Scalar>& form, const Basis& basis, const Box& box, const QuadraticCriterion& criterion) {
  json K = json::array();
  for (Eigen::Index i = 0; i < form.K.rows(); ++i) K.push_back(text_array<Scalar>(form.K.row(i).transpose()));
  return {{"basis", to_json(basis)},     {"box", to_json(box)},           {"criterion", to_json(criterion)},
          {"K", K},                      {"zero_idx", form.zero_idx},     {"linear", text_array<Scalar>(form.linear)},
          {"offset", to_text(form.offset)}};
}

/// The cached form if it was built for exactly this basis, box and
/// criterion; nullopt otherwise.
template <typename Scalar>
std::optional<SmoothnessForm<Scalar>> form_from_json(const json& j, const Basis& basis, const Box& box,
                                                     const QuadraticCriterion& criterion) {
  if (j.at("basis") != to_json(basis) || j.at("box") != to_json(box) || j.at("criterion") != to_json(criterion))
    return std::nullopt;
  const json& K = j.at("K");
  const auto N = static_cast<Eigen::Index>(K.size());
  Matrix<Scalar> M(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    if (static_cast<Eigen::Index>(K[static_cast<size_t>(i)].size()) != N) throw InputError("form cache: K is not square");
    M.row(i) = vector_from_json<Scalar>(K[static_cast<size_t>(i)]).transpose();
  }
  auto form = form_from_matrix<Scalar>(std::move(M), j.at("zero_idx").get<std::vector<int>>(), criterion.kind);
  form.linear = vector_from_json<Scalar>(j.at("linear"));
  form.offset = from_text<Scalar>(j.at("offset").get<std::string>());
  return form;
}

template <typename Scalar>
json model_to_json(const FittedModel<Scalar>& model, const QuadraticCriterion& criterion) {
  using std::sqrt;
  const Scalar root = model.psi_star > Scalar(0) ? Scalar(sqrt(model.psi_star)) : Scalar(0);
  const Eigen::MatrixXd& pts = model.design.points();
  json design = json::array();
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < pts.cols(); ++k) row.push_back(pts(i, k));
    design.push_back(row);
  }
  return {{"basis", to_json(model.basis)},
          {"box", to_json(model.design.box())},
          {"criterion", to_json(criterion)},
          {"method", to_string(model.method)},
          {"design", design},
          {"y", scalar_array<Scalar>(model.y)},
          {"theta", scalar_array<Scalar>(model.theta)},
          {"theta_hp", text_array<Scalar>(model.theta)},
          {"lambda", scalar_array<Scalar>(model.lambda)},
          {"psi_star", to_double(model.psi_star)},
          {"psi_star_root", to_double(root)},
          {"psi_star_hp", to_text(model.psi_star)},
          {"diagnostics", to_json(model.diagnostics)}};
}

template <typename Scalar> FittedModel<Scalar> model_from_json(const json& j) {
  FittedModel<Scalar> m;
  m.basis = basis_from_json(j.at("basis"));
  const Box box = box_from_json(j.at("box"));
  const json& design = j.at("design");
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(design.size()), m.basis.dimension());
  for (size_t i = 0; i < design.size(); ++i) {
    if (static_cast<int>(design[i].size()) != m.basis.dimension()) throw DimensionMismatch("model: design point has the wrong dimension");
    for (int k = 0; k < m.basis.dimension(); ++k) pts(static_cast<Eigen::Index>(i), k) = design[i][static_cast<size_t>(k)].get<double>();
  }
  m.design = Design(pts, box);
  m.theta = vector_from_json<Scalar>(j.contains("theta_hp") ? j.at("theta_hp") : j.at("theta"));
  if (m.theta.size() != m.basis.size()) throw DimensionMismatch("model: theta length differs from the basis size");
  m.y = vector_from_json<Scalar>(j.at("y"));
  m.lambda = vector_from_json<Scalar>(j.at("lambda"));
  m.method = fit_method_from_string(j.at("method").get<std::string>());
  m.psi_star = j.contains("psi_star_hp") ? from_text<Scalar>(j.at("psi_star_hp").get<std::string>())
                                         : Scalar(j.at("psi_star").get<double>());
  return m;
}

} // namespace supersat::io
