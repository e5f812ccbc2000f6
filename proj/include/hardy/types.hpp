#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <cmath>

namespace hardy {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

using Vec2 = Point2<double>;
using Mat2 = Matrix2<double>;

/// Second derivatives of a planar vector field: component k holds the
/// Hessian of the k-th component.
using Hessian2 = std::array<Mat2, 2>;

template <typename Scalar>
inline Scalar cross(const Point2<Scalar>& a, const Point2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Counter-clockwise normal (rotation by +90 degrees).
template <typename Scalar>
inline Point2<Scalar> perp(const Point2<Scalar>& v) {
  return Point2<Scalar>(-v.y(), v.x());
}

template <typename Scalar>
inline Scalar orient(const Point2<Scalar>& a, const Point2<Scalar>& b, const Point2<Scalar>& c) {
  return cross<Scalar>(b - a, c - a);
}

/// Closest point on segment [a, b] to p. Writes the segment parameter to
/// `param`; clamped endpoints return the endpoint itself bit-exactly.
template <typename Scalar>
Point2<Scalar> closest_on_segment(const Point2<Scalar>& a, const Point2<Scalar>& b,
                                  const Point2<Scalar>& p, Scalar& param) {
  const Point2<Scalar> ab = b - a;
  const Scalar len2 = ab.squaredNorm();
  if (len2 <= Scalar(0)) {
    param = Scalar(0);
    return a;
  }
  const Scalar s = (p - a).dot(ab) / len2;
  if (s <= Scalar(0)) {
    param = Scalar(0);
    return a;
  }
  if (s >= Scalar(1)) {
    param = Scalar(1);
    return b;
  }
  param = s;
  return a + s * ab;
}

/// Operator 2-norm of a 2x2 matrix (largest singular value).
template <typename Scalar>
Scalar operator_norm(const Matrix2<Scalar>& m) {
  const Scalar a = m.squaredNorm();
  const Scalar det = m.determinant();
  const Scalar disc = std::sqrt(std::max(Scalar(0), a * a - 4 * det * det));
  return std::sqrt((a + disc) / 2);
}

}  // namespace hardy
