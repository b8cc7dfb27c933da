#include "supersat/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace supersat::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty()) throw InputError(where + ": '" + s + "' is not a number");
  if (!std::isfinite(v)) throw InputError(where + ": non-finite value '" + s + "'");
  return v;
}

void expect_header(const CsvTable& t, const std::vector<std::string>& want, const std::string& source) {
  if (t.header != want) {
    std::string w;
    for (const auto& h : want) w += (w.empty() ? "" : ",") + h;
    throw InputError(source + ": expected header " + w);
  }
}

} // namespace

CsvTable read_csv(std::istream& in, const std::string& source) {
  CsvTable t;
  std::string line;
  int line_no = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split(line, ',');
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    const std::string where = source + " line " + std::to_string(line_no);
    if (cells.size() != t.header.size())
      throw InputError(where + ": expected " + std::to_string(t.header.size()) + " fields, found " + std::to_string(cells.size()));
    std::vector<double> r;
    for (const auto& c : cells) r.push_back(parse_double(c, where));
    rows.push_back(std::move(r));
  }
  if (t.header.empty()) throw InputError(source + ": missing header row");
  t.rows.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.header.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t k = 0; k < rows[i].size(); ++k) t.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_csv(in, path);
}

std::vector<std::string> coordinate_header(int d) {
  std::vector<std::string> h;
  for (int k = 1; k <= d; ++k) h.push_back("x" + std::to_string(k));
  return h;
}

Eigen::MatrixXd design_points(const CsvTable& t, const std::string& source) {
  expect_header(t, coordinate_header(static_cast<int>(t.header.size())), source);
  return t.rows;
}

Observations observations(const CsvTable& t, const std::string& source) {
  if (t.header.size() < 2) throw InputError(source + ": expected header x1,...,xd,y");
  auto want = coordinate_header(static_cast<int>(t.header.size()) - 1);
  want.push_back("y");
  expect_header(t, want, source);
  const auto d = t.rows.cols() - 1;
  return {t.rows.leftCols(d), t.rows.col(d)};
}

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Eigen::MatrixXd& rows) {
  for (size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index k = 0; k < rows.cols(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", rows(i, k));
      out << (k ? "," : "") << buf;
    }
    out << '\n';
  }
}

std::string fmt6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

Box parse_box(const std::string& text, int d) {
  const auto parts = split(text, ',');
  if (parts.size() != 1 && static_cast<int>(parts.size()) != d)
    throw InputError("--box: expected 1 or " + std::to_string(d) + " intervals, got " + std::to_string(parts.size()));
  std::vector<Interval> sides;
  for (const auto& p : parts) {
    const auto ends = split(p, ':');
    if (ends.size() != 2) throw InputError("--box: interval '" + p + "' is not of the form lo:hi");
    sides.push_back({parse_double(ends[0], "--box"), parse_double(ends[1], "--box")});
  }
  if (sides.size() == 1) sides.assign(static_cast<size_t>(d), sides.front());
  return Box(std::move(sides));
}

Box box_from_json(const json& j) {
  const json& a = j.is_object() ? j.at("box") : j;
  if (!a.is_array()) throw InputError("box JSON: expected an array of [lo, hi] pairs");
  std::vector<Interval> sides;
  for (const auto& s : a) {
    if (!s.is_array() || s.size() != 2) throw InputError("box JSON: each side must be [lo, hi]");
    sides.push_back({s[0].get<double>(), s[1].get<double>()});
  }
  return Box(std::move(sides));
}

json to_json(const Box& box) {
  json a = json::array();
  for (const auto& s : box.sides()) a.push_back({s.lo, s.hi});
  return a;
}

Box resolve_box(const std::string& arg, int d) {
  if (std::filesystem::is_regular_file(arg)) {
    Box b = box_from_json(read_json_file(arg));
    if (b.dimension() != d) throw DimensionMismatch("box file '" + arg + "' has the wrong dimension");
    return b;
  }
  return parse_box(arg, d);
}

json to_json(const TermOrder& order) { return {{"kind", to_string(order.kind)}, {"priority", order.priority}}; }

TermOrder order_from_json(const json& j, int d) {
  std::vector<int> priority;
  if (j.contains("priority")) {
    priority = j.at("priority").get<std::vector<int>>();
  } else {
    for (int k = 0; k < d; ++k) priority.push_back(k);
  }
  if (static_cast<int>(priority.size()) != d) throw DimensionMismatch("order priority has the wrong length");
  return TermOrder::make(order_kind_from_string(j.at("kind").get<std::string>()), std::move(priority));
}

json to_json(const Basis& basis) {
  json terms = json::array();
  for (const auto& m : basis.terms) terms.push_back(m.exponents);
  return {{"d", basis.dimension()}, {"order", to_json(basis.order)}, {"terms", terms}, {"saturated_len", basis.saturated_len}};
}

Basis basis_from_json(const json& j) {
  try {
    const int d = j.at("d").get<int>();
    if (d < 1) throw InputError("basis JSON: d must be positive");
    Basis b;
    b.order = order_from_json(j.at("order"), d);
    for (const auto& t : j.at("terms")) {
      auto e = t.get<std::vector<int>>();
      if (static_cast<int>(e.size()) != d) throw DimensionMismatch("basis JSON: term of the wrong dimension");
      for (int v : e)
        if (v < 0) throw InputError("basis JSON: negative exponent");
      b.terms.emplace_back(std::move(e));
    }
    b.saturated_len = j.at("saturated_len").get<int>();
    b.validate();
    return b;
  } catch (const json::exception& e) {
    throw InputError(std::string("basis JSON: ") + e.what());
  }
}

json to_json(const Polynomial& p) {
  json a = json::array();
  for (const auto& t : p) a.push_back({{"exponents", t.monomial.exponents}, {"coefficient", t.coefficient}});
  return a;
}

Polynomial polynomial_from_json(const json& j, int d) {
  Polynomial p;
  for (const auto& t : j) {
    auto e = t.at("exponents").get<std::vector<int>>();
    if (static_cast<int>(e.size()) != d) throw DimensionMismatch("polynomial term of the wrong dimension");
    p.push_back({Monomial(std::move(e)), t.at("coefficient").get<double>()});
  }
  return p;
}

json to_json(const QuadraticCriterion& c) {
  return {{"kind", to_string(c.kind)},
          {"mixed_partials", c.mixed == MixedPartials::Ordered ? "ordered" : "unordered"},
          {"polynomial", to_json(c.weight_or_target)}};
}

QuadraticCriterion criterion_from_json(const json& j, int d) {
  QuadraticCriterion c;
  c.kind = criterion_kind_from_string(j.at("kind").get<std::string>());
  c.mixed = j.value("mixed_partials", std::string("ordered")) == "unordered" ? MixedPartials::Unordered : MixedPartials::Ordered;
  if (j.contains("polynomial")) c.weight_or_target = polynomial_from_json(j.at("polynomial"), d);
  return c;
}

json to_json(const FitDiagnostics& diag) {
  return {{"x_condition", diag.x_condition},
          {"x0_condition", diag.x0_condition},
          {"ktilde_condition", diag.ktilde_condition},
          {"system_condition", diag.system_condition},
          {"warnings", diag.warnings}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

} // namespace supersat::io
