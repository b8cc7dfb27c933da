#include "supersat/solver.hpp"

namespace supersat {

std::string to_string(FitMethod m) {
  switch (m) {
  case FitMethod::BlockKKT: return "BlockKKT";
  case FitMethod::ClosedForm: return "ClosedForm";
  case FitMethod::NonsingularK: return "NonsingularK";
  case FitMethod::DummyDesign: return "DummyDesign";
  }
  return "BlockKKT";
}

FitMethod fit_method_from_string(const std::string& s) {
  if (s == "BlockKKT") return FitMethod::BlockKKT;
  if (s == "ClosedForm") return FitMethod::ClosedForm;
  if (s == "NonsingularK") return FitMethod::NonsingularK;
  if (s == "DummyDesign") return FitMethod::DummyDesign;
  throw InputError("unknown fit method '" + s + "'");
}

namespace {

double radical_inverse(long long i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

} // namespace

Eigen::MatrixXd halton_candidates(const Box& box, int count) {
  static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  const int d = box.dimension();
  if (d > static_cast<int>(std::size(primes))) throw InputError("halton_candidates: dimension too large");
  Eigen::MatrixXd out(count, d);
  for (int i = 0; i < count; ++i)
    for (int k = 0; k < d; ++k)
      out(i, k) = box[k].lo + (box[k].hi - box[k].lo) * radical_inverse(i + 1, primes[k]);
  return out;
}

} // namespace supersat
