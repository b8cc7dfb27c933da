#include "supersat/smoothness.hpp"

#include <map>

namespace supersat {

Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw InputError("non-finite value cannot be converted to a rational");
  int exp = 0;
  const double mant = std::frexp(x, &exp);
  // mant * 2^53 is an exact integer.
  const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  Rational r(scaled);
  exp -= 53;
  boost::multiprecision::mpz_int pow2 = 1;
  pow2 <<= std::abs(exp);
  if (exp >= 0)
    r *= Rational(pow2);
  else
    r /= Rational(pow2);
  return r;
}

double evaluate(const Polynomial& p, const Eigen::Ref<const Eigen::VectorXd>& x) {
  double v = 0.0;
  for (const auto& t : p) v += t.coefficient * evaluate<double>(t.monomial, x);
  return v;
}

std::string to_string(CriterionKind kind) {
  switch (kind) {
  case CriterionKind::Hessian: return "hessian";
  case CriterionKind::Gradient: return "gradient";
  case CriterionKind::Value: return "value";
  case CriterionKind::WeightedHessian: return "weighted";
  }
  return "hessian";
}

CriterionKind criterion_kind_from_string(const std::string& s) {
  if (s == "hessian") return CriterionKind::Hessian;
  if (s == "gradient") return CriterionKind::Gradient;
  if (s == "value") return CriterionKind::Value;
  if (s == "weighted") return CriterionKind::WeightedHessian;
  throw InputError("unknown criterion '" + s + "' (expected hessian|gradient|value|weighted)");
}

namespace {

/// Memoised per-coordinate integrals (b^{e+1} - a^{e+1}) / (e+1).
class BoxIntegrator {
public:
  explicit BoxIntegrator(const Box& box) {
    for (const auto& s : box.sides()) ends_.push_back({exact_rational(s.lo), exact_rational(s.hi)});
    cache_.resize(ends_.size());
  }

  const Rational& axis(size_t k, int e) {
    auto& c = cache_[k];
    while (static_cast<int>(c.size()) <= e) {
      const int p = static_cast<int>(c.size()) + 1;
      Rational lo = 1, hi = 1;
      for (int t = 0; t < p; ++t) {
        lo *= ends_[k].first;
        hi *= ends_[k].second;
      }
      c.push_back((hi - lo) / p);
    }
    return c[static_cast<size_t>(e)];
  }

  Rational operator()(const Monomial& m) {
    Rational v = 1;
    for (size_t k = 0; k < ends_.size(); ++k) v *= axis(k, m[static_cast<int>(k)]);
    return v;
  }

private:
  std::vector<std::pair<Rational, Rational>> ends_;
  std::vector<std::vector<Rational>> cache_;
};

struct Component {
  long long coefficient;
  Monomial monomial;
};

/// The derivative components the criterion squares and integrates: second
/// partials for Hessian criteria, first partials for Gradient, the term
/// itself for Value. Position in the list identifies the (i,j) slot.
std::vector<Component> components(const Monomial& m, const QuadraticCriterion& c) {
  const int d = m.dimension();
  std::vector<Component> out;
  switch (c.kind) {
  case CriterionKind::Value: out.push_back({1, m}); break;
  case CriterionKind::Gradient:
    for (int i = 0; i < d; ++i) {
      auto [ci, mi] = derivative(m, i);
      out.push_back({ci, mi});
    }
    break;
  case CriterionKind::Hessian:
  case CriterionKind::WeightedHessian:
    for (int i = 0; i < d; ++i)
      for (int j = c.mixed == MixedPartials::Ordered ? 0 : i; j < d; ++j) {
        auto [ci, mi] = derivative(m, i);
        auto [cj, mij] = derivative(mi, j);
        out.push_back({ci * cj, mij});
      }
    break;
  }
  return out;
}

} // namespace

Rational monomial_integral_exact(const Monomial& m, const Box& box) {
  if (m.dimension() != box.dimension()) throw DimensionMismatch("monomial_integral: dimension mismatch");
  BoxIntegrator integ(box);
  return integ(m);
}

double monomial_integral(const Monomial& m, const Box& box) { return monomial_integral_exact(m, box).convert_to<double>(); }

ExactForm build_exact_form(const std::vector<Monomial>& terms, const Box& box, const QuadraticCriterion& criterion) {
  const int N = static_cast<int>(terms.size());
  const int d = box.dimension();
  for (const auto& m : terms)
    if (m.dimension() != d) throw DimensionMismatch("build_form: term " + m.to_string() + " has the wrong dimension");
  for (const auto& t : criterion.weight_or_target)
    if (t.monomial.dimension() != d) throw DimensionMismatch("build_form: weight/target term has the wrong dimension");
  if (criterion.kind == CriterionKind::WeightedHessian) {
    if (criterion.weight_or_target.empty()) throw InputError("weighted criterion needs a weight polynomial");
    if (!sampled_nonnegative(criterion.weight_or_target, box)) throw InputError("weight polynomial is negative inside the box");
  }

  BoxIntegrator integ(box);
  std::vector<std::pair<Rational, Monomial>> weight;
  if (criterion.kind == CriterionKind::WeightedHessian)
    for (const auto& t : criterion.weight_or_target) weight.emplace_back(exact_rational(t.coefficient), t.monomial);
  else
    weight.emplace_back(Rational(1), Monomial::constant(d));

  std::vector<std::vector<Component>> comps;
  comps.reserve(terms.size());
  for (const auto& m : terms) comps.push_back(components(m, criterion));

  ExactForm out;
  out.size = N;
  out.K.assign(static_cast<size_t>(N) * N, Rational(0));
  out.linear.assign(static_cast<size_t>(N), Rational(0));
  for (int p = 0; p < N; ++p) {
    for (int q = p; q < N; ++q) {
      Rational acc = 0;
      const auto& cp = comps[static_cast<size_t>(p)];
      const auto& cq = comps[static_cast<size_t>(q)];
      for (size_t s = 0; s < cp.size(); ++s) {
        const long long c = cp[s].coefficient * cq[s].coefficient;
        if (c == 0) continue;
        const Monomial prod = cp[s].monomial * cq[s].monomial;
        for (const auto& [w, wm] : weight) acc += Rational(c) * w * integ(prod * wm);
      }
      out.K[static_cast<size_t>(p * N + q)] = acc;
      out.K[static_cast<size_t>(q * N + p)] = acc;
    }
    bool zero = true;
    for (const auto& c : comps[static_cast<size_t>(p)]) zero = zero && c.coefficient == 0;
    if (zero) out.zero_idx.push_back(p);
  }

  if (criterion.has_target()) {
    std::vector<std::pair<Rational, Monomial>> target;
    for (const auto& t : criterion.weight_or_target) target.emplace_back(exact_rational(t.coefficient), t.monomial);
    for (int p = 0; p < N; ++p)
      for (const auto& [c, m] : target) out.linear[static_cast<size_t>(p)] += c * integ(terms[static_cast<size_t>(p)] * m);
    for (const auto& [c1, m1] : target)
      for (const auto& [c2, m2] : target) out.offset += c1 * c2 * integ(m1 * m2);
  }
  return out;
}

double second_partial(const Monomial& m, int i, int j, const Eigen::Ref<const Eigen::VectorXd>& x) {
  auto [ci, mi] = derivative(m, i);
  auto [cj, mij] = derivative(mi, j);
  if (ci * cj == 0) return 0.0;
  return static_cast<double>(ci * cj) * evaluate<double>(mij, x);
}

double finite_difference_check(const std::vector<Monomial>& terms, const Eigen::Ref<const Eigen::VectorXd>& x, double h) {
  if (!(h > 0)) throw InputError("finite_difference_check: h must be positive");
  double worst = 0.0;
  const auto d = x.size();
  for (const auto& m : terms) {
    if (m.dimension() != d) throw DimensionMismatch("finite_difference_check: dimension mismatch");
    auto f = [&](const Eigen::VectorXd& p) { return evaluate<double>(m, p); };
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        const Eigen::VectorXd ei = Eigen::VectorXd::Unit(d, i) * h;
        const Eigen::VectorXd ej = Eigen::VectorXd::Unit(d, j) * h;
        const Eigen::VectorXd x0 = x;
        double fd;
        if (i == j)
          fd = (f(x0 + ei) - 2.0 * f(x0) + f(x0 - ei)) / (h * h);
        else
          fd = (f(x0 + ei + ej) - f(x0 + ei - ej) - f(x0 - ei + ej) + f(x0 - ei - ej)) / (4.0 * h * h);
        worst = std::max(worst, std::abs(fd - second_partial(m, static_cast<int>(i), static_cast<int>(j), x)));
      }
    }
  }
  return worst;
}

bool sampled_nonnegative(const Polynomial& p, const Box& box, int per_side) {
  const int d = box.dimension();
  std::vector<int> idx(static_cast<size_t>(d), 0);
  Eigen::VectorXd x(d);
  while (true) {
    for (int k = 0; k < d; ++k)
      x[k] = box[k].lo + (box[k].hi - box[k].lo) * idx[static_cast<size_t>(k)] / static_cast<double>(per_side - 1);
    if (evaluate(p, x) < 0.0) return false;
    int k = 0;
    while (k < d && ++idx[static_cast<size_t>(k)] == per_side) idx[static_cast<size_t>(k++)] = 0;
    if (k == d) return true;
  }
}

} // namespace supersat
