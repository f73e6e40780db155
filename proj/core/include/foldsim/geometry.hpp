#pragma once

#include <Eigen/Dense>
#include <vector>

#include "foldsim/errors.hpp"

namespace foldsim {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat32 = Eigen::Matrix<double, 3, 2>;

enum class CurveKind { Parabolic, CircularArc, CubicBezier, Polyline };

struct CurveProjection {
  double t = 0.0;          // parameter of the nearest curve point
  Vec2 point = Vec2::Zero();  // curve point at t
  double dist = 0.0;       // distance from the query to the curve point
};

// Planar arc parametrized over [0,1], used to describe fold lines.
//
// All kinds share one closest-point solver; evaluation at parameters 0 and 1
// reproduces the stored endpoints bit-exactly.
class FoldCurve {
 public:
  CurveKind kind() const { return kind_; }
  const std::vector<Vec2>& control_data() const { return pts_; }

  Vec2 eval(double t) const;
  Vec2 derivative(double t) const;
  Vec2 second_derivative(double t) const;

  Vec2 start() const { return p0_; }
  Vec2 finish() const { return p1_; }

  // Nearest curve point: 64-interval coarse scan followed by at most 20
  // Newton steps on (sigma(t)-p).sigma'(t) = 0, clamped to [0,1]. Distance
  // ties resolve to the smallest parameter.
  CurveProjection closest_point(const Vec2& p) const;

  // Same solver restricted to the parameter window [tmin, tmax].
  CurveProjection closest_point_in_range(const Vec2& p, double tmin,
                                         double tmax) const;

 private:
  FoldCurve() = default;

  friend FoldCurve make_parabolic_arc(const Vec2&, const Vec2&, const Vec2&);
  friend FoldCurve make_circular_arc(const Vec2&, const Vec2&, const Vec2&);
  friend FoldCurve make_cubic_bezier(const Vec2&, const Vec2&, const Vec2&,
                                     const Vec2&);
  friend FoldCurve make_polyline(const std::vector<Vec2>&);

  CurveKind kind_ = CurveKind::Polyline;
  std::vector<Vec2> pts_;  // kind-specific control data
  Vec2 p0_ = Vec2::Zero(), p1_ = Vec2::Zero();

  // CircularArc cache: angle sweep chosen as the minor arc.
  Vec2 center_ = Vec2::Zero();
  double radius_ = 0.0, theta0_ = 0.0, dtheta_ = 0.0;

  // Polyline cache: cumulative chord lengths (chord-length parametrization).
  std::vector<double> cum_;
  double length_ = 0.0;
};

// Quadratic arc through p0 and p1 whose midpoint eval(1/2) is the apex.
// Collinear input is rejected.
FoldCurve make_parabolic_arc(const Vec2& p0, const Vec2& p1, const Vec2& apex);

// Minor circular arc from p0 to p1 about the given center. |p0-center| and
// |p1-center| must agree to 1e-9 relative.
FoldCurve make_circular_arc(const Vec2& p0, const Vec2& p1,
                            const Vec2& center);

// Cubic Bezier arc; coincident endpoints are rejected.
FoldCurve make_cubic_bezier(const Vec2& p0, const Vec2& c1, const Vec2& c2,
                            const Vec2& p3);

// Chord-length parametrized polyline through at least two distinct points.
FoldCurve make_polyline(const std::vector<Vec2>& points);

}  // namespace foldsim
