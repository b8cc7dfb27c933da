#pragma once

#include "supersat/errors.hpp"

#include <Eigen/Dense>

#include <vector>

namespace supersat {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Axis-aligned region of integration, one closed interval per coordinate.
class Box {
public:
  Box() = default;
  explicit Box(std::vector<Interval> sides);

  static Box unit(int d) { return Box(std::vector<Interval>(static_cast<size_t>(d), Interval{0.0, 1.0})); }
  static Box symmetric(int d) { return Box(std::vector<Interval>(static_cast<size_t>(d), Interval{-1.0, 1.0})); }
  static Box bounding(const Eigen::MatrixXd& points);

  int dimension() const { return static_cast<int>(sides_.size()); }
  const Interval& operator[](int i) const { return sides_[static_cast<size_t>(i)]; }
  const std::vector<Interval>& sides() const { return sides_; }

  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Affine image of x under the map taking this box onto [-1,1]^d.
  Eigen::VectorXd to_symmetric(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  bool operator==(const Box&) const;

private:
  std::vector<Interval> sides_;
};

/// n distinct points in R^d (rows of `points`) with the region they live in.
class Design {
public:
  Design() = default;
  Design(Eigen::MatrixXd points, Box box);

  int size() const { return static_cast<int>(points_.rows()); }
  int dimension() const { return static_cast<int>(points_.cols()); }
  const Eigen::MatrixXd& points() const { return points_; }
  Eigen::VectorXd point(int i) const { return points_.row(i).transpose(); }
  const Box& box() const { return box_; }

  /// Union with extra points (rows appended in order); same box.
  Design extended(const Eigen::MatrixXd& extra) const;

private:
  Eigen::MatrixXd points_;
  Box box_;
};

/// Equispaced n points on [lo, hi], endpoints included.
Design uniform_design_1d(int n, double lo = 0.0, double hi = 1.0);

/// Points `skip`..`skip+count-1` of the unscrambled two-dimensional Sobol
/// sequence (Bratley-Fox direction numbers, Gray-code order). Index 0 is the
/// origin, so skip = 1 starts at (0.5, 0.5).
Eigen::MatrixXd sobol_points_2d(int count, int skip = 1);

Design sobol_2d(int count, int skip = 1);

} // namespace supersat
