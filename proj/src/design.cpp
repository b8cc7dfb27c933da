#include "supersat/design.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <numeric>
#include <string>

namespace supersat {

Box::Box(std::vector<Interval> sides) : sides_(std::move(sides)) {
  for (size_t i = 0; i < sides_.size(); ++i) {
    const auto& s = sides_[i];
    if (!std::isfinite(s.lo) || !std::isfinite(s.hi) || !(s.lo < s.hi))
      throw InputError("box side " + std::to_string(i + 1) + " must satisfy lo < hi");
  }
}

Box Box::bounding(const Eigen::MatrixXd& points) {
  std::vector<Interval> sides;
  for (Eigen::Index k = 0; k < points.cols(); ++k) {
    double lo = points.col(k).minCoeff();
    double hi = points.col(k).maxCoeff();
    if (!(lo < hi)) {
      lo -= 0.5;
      hi += 0.5;
    }
    sides.push_back({lo, hi});
  }
  return Box(std::move(sides));
}

bool Box::contains(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != dimension()) return false;
  for (int k = 0; k < dimension(); ++k)
    if (x[k] < sides_[k].lo || x[k] > sides_[k].hi) return false;
  return true;
}

Eigen::VectorXd Box::to_symmetric(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd out(x.size());
  for (int k = 0; k < dimension(); ++k) {
    const auto& s = sides_[k];
    out[k] = (2.0 * x[k] - s.lo - s.hi) / (s.hi - s.lo);
  }
  return out;
}

bool Box::operator==(const Box& other) const {
  if (dimension() != other.dimension()) return false;
  for (int k = 0; k < dimension(); ++k)
    if (sides_[k].lo != other[k].lo || sides_[k].hi != other[k].hi) return false;
  return true;
}

Design::Design(Eigen::MatrixXd points, Box box) : points_(std::move(points)), box_(std::move(box)) {
  if (points_.rows() < 1) throw InputError("design needs at least one point");
  if (box_.dimension() != points_.cols())
    throw DimensionMismatch("design has " + std::to_string(points_.cols()) + " coordinates but box has " +
                            std::to_string(box_.dimension()));
  if (!points_.allFinite()) throw InputError("design points must be finite");

  // Exact distinctness: sort row indices lexicographically, compare neighbours.
  std::vector<Eigen::Index> idx(static_cast<size_t>(points_.rows()));
  std::iota(idx.begin(), idx.end(), 0);
  auto row_less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index k = 0; k < points_.cols(); ++k)
      if (points_(a, k) != points_(b, k)) return points_(a, k) < points_(b, k);
    return false;
  };
  std::sort(idx.begin(), idx.end(), row_less);
  for (size_t i = 1; i < idx.size(); ++i)
    if (points_.row(idx[i - 1]) == points_.row(idx[i]))
      throw InputError("design points " + std::to_string(std::min(idx[i - 1], idx[i]) + 1) + " and " +
                       std::to_string(std::max(idx[i - 1], idx[i]) + 1) + " coincide");
}

Design Design::extended(const Eigen::MatrixXd& extra) const {
  if (extra.rows() == 0) return *this;
  if (extra.cols() != dimension()) throw DimensionMismatch("extra points have the wrong dimension");
  Eigen::MatrixXd all(points_.rows() + extra.rows(), points_.cols());
  all << points_, extra;
  return Design(std::move(all), box_);
}

Design uniform_design_1d(int n, double lo, double hi) {
  if (n < 1) throw InputError("uniform design needs n >= 1");
  Eigen::MatrixXd pts(n, 1);
  for (int i = 0; i < n; ++i) pts(i, 0) = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return Design(std::move(pts), Box({{lo, hi}}));
}

Eigen::MatrixXd sobol_points_2d(int count, int skip) {
  if (count < 0 || skip < 0) throw InputError("sobol: count and skip must be nonnegative");
  constexpr int bits = 32;
  // Direction numbers v_k = m_k / 2^k. Dimension 1: m_k = 1. Dimension 2 uses
  // the primitive polynomial x + 1: m_1 = 1, m_k = 2 m_{k-1} xor m_{k-1}.
  std::array<std::array<std::uint32_t, bits>, 2> v{};
  std::uint64_t m2 = 1;
  for (int k = 1; k <= bits; ++k) {
    v[0][k - 1] = static_cast<std::uint32_t>(1u) << (bits - k);
    if (k > 1) m2 = (m2 << 1) ^ m2;
    v[1][k - 1] = static_cast<std::uint32_t>(m2 << (bits - k));
  }
  Eigen::MatrixXd out(count, 2);
  std::array<std::uint32_t, 2> x{0, 0};
  const std::int64_t total = static_cast<std::int64_t>(skip) + count;
  for (std::int64_t i = 0; i < total; ++i) {
    if (i >= skip)
      for (int j = 0; j < 2; ++j) out(i - skip, j) = std::ldexp(static_cast<double>(x[j]), -bits);
    // Gray-code update: flip with the direction number of the lowest zero bit of i.
    int c = 0;
    for (std::uint64_t t = static_cast<std::uint64_t>(i); t & 1u; t >>= 1) ++c;
    for (int j = 0; j < 2; ++j) x[j] ^= v[j][c];
  }
  return out;
}

Design sobol_2d(int count, int skip) {
  if (count < 1) throw InputError("sobol: count must be >= 1");
  return Design(sobol_points_2d(count, skip), Box::unit(2));
}

} // namespace supersat
