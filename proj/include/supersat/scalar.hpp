#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace supersat {

// 100 significant decimal digits. Monomial bases past degree ~15 on the unit
// interval produce KKT systems whose conditioning exceeds what double resolves.
using HighPrecision = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<100>,
                                                    boost::multiprecision::et_off>;

using Rational = boost::multiprecision::mpq_rational;

template <typename Scalar> using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar> using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar> using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

template <typename Scalar> inline double to_double(const Scalar& x) {
  if constexpr (std::is_floating_point_v<Scalar>) {
    return static_cast<double>(x);
  } else {
    return x.template convert_to<double>();
  }
}

template <typename Scalar> inline Scalar from_rational(const Rational& r) {
  if constexpr (std::is_floating_point_v<Scalar>) {
    return r.convert_to<Scalar>();
  } else {
    return Scalar(r);
  }
}

/// Exact rational value of a finite double (every double is a dyadic rational).
Rational exact_rational(double x);

/// Round-trippable decimal text for a scalar.
template <typename Scalar> std::string to_text(const Scalar& x) {
  std::ostringstream os;
  os.precision(std::numeric_limits<Scalar>::max_digits10);
  os << std::scientific << x;
  return os.str();
}

template <typename Scalar> Scalar from_text(const std::string& s) {
  if constexpr (std::is_floating_point_v<Scalar>) {
    return static_cast<Scalar>(std::stod(s));
  } else {
    return Scalar(s);
  }
}

template <typename Scalar> inline Scalar machine_epsilon() {
  return std::numeric_limits<Scalar>::epsilon();
}

/// Condition number above which a nominally nonsingular matrix is treated as
/// singular. 1e12 for double; scales with the working precision otherwise.
template <typename Scalar> inline double condition_limit() {
  const double eps = to_double(machine_epsilon<Scalar>());
  return std::max(1e12, 1.0 / std::sqrt(eps));
}

template <typename Scalar> Matrix<Scalar> cast_matrix(const Eigen::MatrixXd& m) {
  return m.template cast<Scalar>();
}

} // namespace supersat

namespace Eigen {

template <> struct NumTraits<supersat::HighPrecision> : GenericNumTraits<supersat::HighPrecision> {
  using Real = supersat::HighPrecision;
  using NonInteger = supersat::HighPrecision;
  using Literal = supersat::HighPrecision;
  using Nested = supersat::HighPrecision;

  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 16,
    MulCost = 32
  };

  static inline Real epsilon() { return std::numeric_limits<Real>::epsilon(); }
  static inline Real dummy_precision() { return Real("1e-80"); }
  static inline Real highest() { return std::numeric_limits<Real>::max(); }
  static inline Real lowest() { return std::numeric_limits<Real>::lowest(); }
  static inline Real infinity() { return std::numeric_limits<Real>::infinity(); }
  static inline Real quiet_NaN() { return std::numeric_limits<Real>::quiet_NaN(); }
  static inline int digits10() { return std::numeric_limits<Real>::digits10; }
};

} // namespace Eigen
