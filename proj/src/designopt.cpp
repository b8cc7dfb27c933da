#include "supersat/designopt.hpp"

#include <algorithm>
#include <sstream>

namespace supersat {

std::string to_string(DesignCriterion c) {
  switch (c) {
  case DesignCriterion::LargestEigQ: return "largest-eig";
  case DesignCriterion::ProductNonzeroEigQ: return "product-eig";
  case DesignCriterion::DOptKernels: return "d-opt";
  }
  return "largest-eig";
}

DesignCriterion design_criterion_from_string(const std::string& s) {
  if (s == "largest-eig") return DesignCriterion::LargestEigQ;
  if (s == "product-eig") return DesignCriterion::ProductNonzeroEigQ;
  if (s == "d-opt") return DesignCriterion::DOptKernels;
  throw InputError("unknown design criterion '" + s + "' (expected largest-eig|product-eig|d-opt)");
}

double product_nonzero(const std::vector<double>& ev) {
  if (ev.empty()) return 0.0;
  const double top = *std::max_element(ev.begin(), ev.end());
  double p = 1.0;
  for (double v : ev)
    if (v > 1e-9 * top) p *= v;
  return p;
}

namespace detail {

std::pair<double, std::vector<std::pair<double, double>>> minimize_unimodal(const std::function<double(double)>& f, double tol) {
  if (!(tol > 0)) throw InputError("tolerance must be positive");
  std::vector<std::pair<double, double>> scan;
  for (int i = 1; i <= scan_points; ++i) {
    const double a = static_cast<double>(i) / (scan_points + 1);
    scan.emplace_back(a, f(a));
  }
  std::vector<size_t> minima;
  for (size_t i = 0; i < scan.size(); ++i) {
    const double v = scan[i].second;
    const bool left = i == 0 || v < scan[i - 1].second;
    const bool right = i + 1 == scan.size() || v <= scan[i + 1].second;
    if (std::isfinite(v) && left && right) minima.push_back(i);
  }
  if (minima.size() != 1) {
    std::ostringstream os;
    os << "objective is not unimodal on the scan grid; local minima at";
    for (size_t i : minima) os << ' ' << scan[i].first;
    if (minima.empty()) os << " (none)";
    throw NonUnimodal(os.str());
  }
  const size_t k = minima.front();
  double lo = k == 0 ? 0.0 : scan[k - 1].first;
  double hi = k + 1 == scan.size() ? 1.0 : scan[k + 1].first;

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - invphi * (hi - lo);
  double d = lo + invphi * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > tol) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - invphi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + invphi * (hi - lo);
      fd = f(d);
    }
  }
  return {0.5 * (lo + hi), std::move(scan)};
}

} // namespace detail

double combined_criterion(double lambda, const CriterionReport& psi0, const CriterionReport& psi2, double scale0, double scale2) {
  if (lambda < 0.0 || lambda > 1.0) throw InputError("combined_criterion: lambda must lie in [0, 1]");
  if (std::abs(psi0.parameter - psi2.parameter) > 1e-12)
    throw InputError("combined_criterion: reports are at different parameters");
  if (!(scale0 > 0) || !(scale2 > 0)) throw InputError("combined_criterion: scales must be positive");
  return (1.0 - lambda) * psi0.objective / scale0 + lambda * psi2.objective / scale2;
}

} // namespace supersat
