#pragma once

// Planar oriented-rectangle geometry: containment, separating-axis overlap,
// signed clearance and the minimal translation axis. Everything is a free
// function templated on the scalar type so it composes with Eigen
// expressions.

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace hocc {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

using Vec2d = Vec2<double>;

/// Wraps an angle into (-pi, pi].
template <typename Scalar>
Scalar wrap_angle(Scalar a) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  a = std::remainder(a, Scalar(2) * pi);
  if (a <= -pi) a += Scalar(2) * pi;
  return a;
}

template <typename Scalar>
Vec2<Scalar> heading_vector(Scalar yaw) {
  return {std::cos(yaw), std::sin(yaw)};
}

template <typename Scalar>
Scalar cross2(const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

template <typename Scalar>
struct OrientedBox {
  Vec2<Scalar> center = Vec2<Scalar>::Zero();
  Scalar yaw = 0;
  Scalar half_length = 0;
  Scalar half_width = 0;

  Vec2<Scalar> axis_u() const { return heading_vector(yaw); }
  Vec2<Scalar> axis_v() const { return {-std::sin(yaw), std::cos(yaw)}; }

  /// Counterclockwise, starting at the rear-right corner.
  std::array<Vec2<Scalar>, 4> corners() const {
    const Vec2<Scalar> u = axis_u() * half_length;
    const Vec2<Scalar> v = axis_v() * half_width;
    return {center - u - v, center + u - v, center + u + v, center - u + v};
  }

  bool contains(const Vec2<Scalar>& p) const {
    const Vec2<Scalar> d = p - center;
    return std::abs(d.dot(axis_u())) <= half_length && std::abs(d.dot(axis_v())) <= half_width;
  }
};

using OrientedBoxd = OrientedBox<double>;

template <typename Scalar>
OrientedBox<Scalar> make_box(const Vec2<Scalar>& center, Scalar yaw, Scalar length, Scalar width) {
  return {center, yaw, length / 2, width / 2};
}

namespace detail {

template <typename Scalar>
void project(const std::array<Vec2<Scalar>, 4>& pts, const Vec2<Scalar>& axis, Scalar& lo, Scalar& hi) {
  lo = hi = pts[0].dot(axis);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Scalar p = pts[i].dot(axis);
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
}

template <typename Scalar>
Scalar point_segment_distance(const Vec2<Scalar>& p, const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
  const Vec2<Scalar> ab = b - a;
  const Scalar len2 = ab.squaredNorm();
  Scalar t = len2 > 0 ? (p - a).dot(ab) / len2 : Scalar(0);
  t = std::clamp(t, Scalar(0), Scalar(1));
  return (a + t * ab - p).norm();
}

}  // namespace detail

/// Result of the separating-axis test. `depth` is the smallest interval
/// overlap over the four candidate axes; `axis` points from `a` towards `b`.
template <typename Scalar>
struct Penetration {
  bool overlapping = false;
  Scalar depth = 0;
  Vec2<Scalar> axis = Vec2<Scalar>::UnitX();
};

template <typename Scalar>
Penetration<Scalar> penetration(const OrientedBox<Scalar>& a, const OrientedBox<Scalar>& b) {
  const auto ca = a.corners();
  const auto cb = b.corners();
  const std::array<Vec2<Scalar>, 4> axes{a.axis_u(), a.axis_v(), b.axis_u(), b.axis_v()};

  Penetration<Scalar> out;
  out.depth = std::numeric_limits<Scalar>::infinity();
  for (const auto& axis : axes) {
    Scalar alo, ahi, blo, bhi;
    detail::project(ca, axis, alo, ahi);
    detail::project(cb, axis, blo, bhi);
    const Scalar overlap = std::min(ahi, bhi) - std::max(alo, blo);
    if (overlap < 0) return Penetration<Scalar>{false, 0, axis};
    if (overlap < out.depth) {
      out.depth = overlap;
      out.axis = axis;
    }
  }
  out.overlapping = true;
  if ((b.center - a.center).dot(out.axis) < 0) out.axis = -out.axis;
  return out;
}

template <typename Scalar>
bool overlaps(const OrientedBox<Scalar>& a, const OrientedBox<Scalar>& b) {
  return penetration(a, b).overlapping;
}

/// Boundary distance between disjoint boxes, or minus the minimal
/// translation distance when they overlap. Symmetric in its arguments.
template <typename Scalar>
Scalar signed_clearance(const OrientedBox<Scalar>& a, const OrientedBox<Scalar>& b) {
  const auto pen = penetration(a, b);
  if (pen.overlapping) return -pen.depth;

  const auto ca = a.corners();
  const auto cb = b.corners();
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      best = std::min(best, detail::point_segment_distance(ca[i], cb[j], cb[(j + 1) % 4]));
      best = std::min(best, detail::point_segment_distance(cb[i], ca[j], ca[(j + 1) % 4]));
    }
  }
  return best;
}

/// Faces of a vehicle-aligned box, named in the body frame.
enum class Face { front, rear, left, right };

/// Face of `box` whose outward normal is most aligned with `direction`.
template <typename Scalar>
Face facing(const OrientedBox<Scalar>& box, const Vec2<Scalar>& direction) {
  const Scalar du = direction.dot(box.axis_u());
  const Scalar dv = direction.dot(box.axis_v());
  if (std::abs(du) >= std::abs(dv)) return du >= 0 ? Face::front : Face::rear;
  return dv >= 0 ? Face::left : Face::right;
}

}  // namespace hocc
